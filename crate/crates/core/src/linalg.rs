//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Operator 2-norm (largest singular value).
pub fn op_norm(m: &DMatrix<f64>) -> f64 {
    if m.nrows() == 1 && m.ncols() == 1 {
        return m[(0, 0)].abs();
    }
    m.singular_values().max()
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &b| a.max(b.abs()))
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix by power
/// iteration. Returns the Rayleigh quotient, the number of iterations used
/// and the residual `‖Mv - λv‖`, which bounds the distance from the
/// quotient to the spectrum.
pub fn power_iteration_sym(m: &DMatrix<f64>, tol: f64, max_iter: usize) -> (f64, usize, f64) {
    let n = m.nrows();
    // A deterministic start vector with no special alignment to the axes.
    let mut v = DVector::from_iterator(n, (0..n).map(|i| 1.0 + 0.1 * i as f64));
    v /= v.norm();
    let mut lambda = 0.0;
    for it in 1..=max_iter {
        let w = m * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return (0.0, it, 0.0);
        }
        let next = w / norm;
        let rayleigh = next.dot(&(m * &next));
        let converged = (rayleigh - lambda).abs() <= tol * rayleigh.abs().max(1.0);
        lambda = rayleigh;
        v = next;
        if converged && it > 2 {
            return (lambda, it, residual(m, &v, lambda));
        }
    }
    (lambda, max_iter, residual(m, &v, lambda))
}

fn residual(m: &DMatrix<f64>, v: &DVector<f64>, lambda: f64) -> f64 {
    (m * v - v * lambda).norm()
}

/// Largest eigenvalue of a symmetric matrix via nalgebra's symmetric
/// eigendecomposition.
pub fn sym_max_eigen(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.max()
}

/// A matrix product kept as `scale_log` plus a renormalized factor, so long
/// products neither overflow nor underflow.
#[derive(Clone, Debug)]
pub struct LogProduct {
    pub factor: DMatrix<f64>,
    pub scale_log: f64,
}

impl LogProduct {
    pub fn identity(m: usize) -> Self {
        LogProduct { factor: DMatrix::identity(m, m), scale_log: 0.0 }
    }

    /// Replaces the product `P` by `g * P`.
    pub fn push_left(&mut self, g: &DMatrix<f64>) -> Result<()> {
        self.factor = g * &self.factor;
        self.renormalize()
    }

    /// Replaces the product `P` by `P * g`.
    pub fn push_right(&mut self, g: &DMatrix<f64>) -> Result<()> {
        self.factor = &self.factor * g;
        self.renormalize()
    }

    fn renormalize(&mut self) -> Result<()> {
        let s = max_abs(&self.factor);
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::Numerical(format!("product degenerated (max entry {s})")));
        }
        self.factor /= s;
        self.scale_log += s.ln();
        Ok(())
    }

    pub fn log_norm(&self) -> f64 {
        self.scale_log + op_norm(&self.factor).ln()
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        &self.factor * self.scale_log.exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_iteration_agrees_with_eigen() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 1.0]);
        let (l, _, _) = power_iteration_sym(&m, 1e-14, 10_000);
        assert!((l - sym_max_eigen(&m)).abs() < 1e-10);
    }

    #[test]
    fn log_product_tracks_scale() {
        let g = DMatrix::from_row_slice(2, 2, &[1e100, 0.0, 0.0, 1.0]);
        let mut p = LogProduct::identity(2);
        for _ in 0..10 {
            p.push_left(&g).unwrap();
        }
        assert!((p.log_norm() - 1000.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn op_norm_of_diagonal() {
        let m = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, -5.0]);
        assert!((op_norm(&m) - 5.0).abs() < 1e-12);
    }
}
