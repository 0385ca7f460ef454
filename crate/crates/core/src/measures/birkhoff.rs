//! Observables constant on cylinders and their Birkhoff averages.

use std::fmt;
use std::sync::Arc;

use crate::cocycle::CocycleSpec;
use crate::error::{Error, Result};
use crate::linalg::op_norm;
use crate::shift_space::{Symbol, SymbolPoint};

/// `φ(x) = f(x_0 .. x_{d-1})`.
#[derive(Clone)]
pub struct Observable {
    depth: usize,
    f: Arc<dyn Fn(&[Symbol]) -> f64 + Send + Sync>,
    label: String,
}

impl Observable {
    pub fn new(depth: usize, label: impl Into<String>, f: impl Fn(&[Symbol]) -> f64 + Send + Sync + 'static) -> Self {
        Observable { depth: depth.max(1), f: Arc::new(f), label: label.into() }
    }

    pub fn indicator(symbol: Symbol) -> Self {
        Self::new(1, format!("1[x_0 = {symbol}]"), move |w| if w[0] == symbol { 1.0 } else { 0.0 })
    }

    /// `log ‖A(x)‖` for a locally constant cocycle.
    pub fn log_norm(cocycle: &CocycleSpec) -> Self {
        let c = cocycle.clone();
        Self::new(cocycle.depth(), "log‖A(x)‖", move |w| op_norm(c.generator(w).expect("word in cocycle table")).ln())
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn eval(&self, x: &SymbolPoint) -> f64 {
        (self.f)(&x.window(0, self.depth as i64 - 1))
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Observable({}, depth {})", self.label, self.depth)
    }
}

/// `(1/n) Σ_{i<n} φ(f^i x)`.
pub fn birkhoff_average(phi: &Observable, x: &SymbolPoint, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidMeasure("birkhoff_average needs n >= 1".into()));
    }
    let d = phi.depth;
    let w = x.window(0, (n + d) as i64 - 2);
    let sum: f64 = (0..n).map(|i| (phi.f)(&w[i..i + d])).sum();
    Ok(sum / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn examples() {
        let x = SymbolPoint::periodic(&[0, 1]).unwrap();
        assert_eq!(birkhoff_average(&Observable::indicator(1), &x, 10).unwrap(), 0.5);
        let phi = Observable::log_norm(&fixtures::test_cocycle());
        let v = birkhoff_average(&phi, &SymbolPoint::constant(1), 7).unwrap();
        assert!((v - 3f64.ln()).abs() < 1e-15);
        let s = fixtures::bernoulli(0.1).sample_point(10, 3);
        let f = birkhoff_average(&Observable::indicator(0), &s, 100_000).unwrap();
        assert!((f - 0.1).abs() < 0.01, "{f}");
    }
}
