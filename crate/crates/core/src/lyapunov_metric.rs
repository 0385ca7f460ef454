//! ε-Lyapunov scalar products, the comparison function `K_ε`, and numerical
//! checks of the norm and cone estimates along close orbit segments.
//!
//! For `u, v` in the Oseledec space `E_i(x)` with exponent `χ_i`:
//!
//! ```text
//! <u, v>_x = m Σ_{n ∈ Z} <A(x,n)u, A(x,n)v> exp(-2 χ_i n - ε|n|)
//! ```
//!
//! and distinct Oseledec spaces are orthogonal. The series is truncated at
//! `|n| <= W`. `W` grows until the a-priori tail bound is below the
//! configured fraction of the partial sum.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cocycle::CocycleSpec;
use crate::error::{Error, Result};
use crate::linalg::{max_abs, power_iteration_sym, sym_max_eigen};
use crate::report::{InequalityCheck, Verdict};
use crate::shift_space::{distance, SymbolPoint};

/// An `A`-invariant splitting supplied analytically.
pub trait Splitting: Send + Sync {
    /// Lyapunov exponents in increasing order.
    fn exponents(&self) -> &[f64];
    /// Orthonormal bases of `E_{χ_1}(x), …, E_{χ_l}(x)` (one matrix of
    /// columns per exponent, in the order of [`Splitting::exponents`]).
    fn bases(&self, x: &SymbolPoint) -> Result<Vec<DMatrix<f64>>>;

    fn multiplicities(&self, x: &SymbolPoint) -> Result<Vec<usize>> {
        Ok(self.bases(x)?.iter().map(|b| b.ncols()).collect())
    }

    fn top_exponent(&self) -> f64 {
        *self.exponents().last().expect("at least one exponent")
    }
}

fn check_exponents(exponents: &[f64]) -> Result<()> {
    if exponents.is_empty() || exponents.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidSplitting("exponents must be nonempty and strictly increasing".into()));
    }
    Ok(())
}

/// A splitting that does not depend on the point.
#[derive(Clone, Debug)]
pub struct GlobalSplitting {
    exponents: Vec<f64>,
    bases: Vec<DMatrix<f64>>,
}

impl GlobalSplitting {
    pub fn new(exponents: Vec<f64>, bases: Vec<DMatrix<f64>>) -> Result<Self> {
        check_exponents(&exponents)?;
        if bases.len() != exponents.len() {
            return Err(Error::InvalidSplitting("one basis per exponent".into()));
        }
        let m = bases[0].nrows();
        let total: usize = bases.iter().map(|b| b.ncols()).sum();
        if total != m || bases.iter().any(|b| b.nrows() != m || b.ncols() == 0) {
            return Err(Error::InvalidSplitting(format!("bases must span R^{m}")));
        }
        let p = DMatrix::from_columns(&bases.iter().flat_map(|b| b.column_iter().map(|c| c.into_owned())).collect::<Vec<_>>());
        if p.determinant().abs() < 1e-12 {
            return Err(Error::InvalidSplitting("subspaces are not independent".into()));
        }
        for b in &bases {
            let g = b.transpose() * b;
            if (g - DMatrix::identity(b.ncols(), b.ncols())).amax() > 1e-10 {
                return Err(Error::InvalidSplitting("bases must be orthonormal".into()));
            }
        }
        Ok(GlobalSplitting { exponents, bases })
    }

    /// Coordinate axes for a diagonal 2×2 cocycle with exponents `±chi`:
    /// `e_2` carries `-chi`, `e_1` carries `chi`.
    pub fn diagonal(chi: f64) -> Result<Self> {
        Self::new(
            vec![-chi, chi],
            vec![DMatrix::from_column_slice(2, 1, &[0.0, 1.0]), DMatrix::from_column_slice(2, 1, &[1.0, 0.0])],
        )
    }
}

impl Splitting for GlobalSplitting {
    fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    fn bases(&self, _x: &SymbolPoint) -> Result<Vec<DMatrix<f64>>> {
        Ok(self.bases.clone())
    }
}

/// Splitting of an upper-triangular 2×2 cocycle `[[a, b], [0, d]]` with
/// `|d| < |a|` along orbits. `E_top = span(e_1)` everywhere; the slow
/// direction is `span(c(x), 1)` with
/// `c(x) = Σ_k -(b/a)(f^k x) Π_{j<k} (d/a)(f^j x)`.
#[derive(Clone, Debug)]
pub struct TriangularSplitting {
    cocycle: CocycleSpec,
    exponents: Vec<f64>,
}

impl TriangularSplitting {
    /// `exponents = [low, top]` for the measure under study.
    pub fn new(cocycle: CocycleSpec, exponents: [f64; 2]) -> Result<Self> {
        check_exponents(&exponents)?;
        if cocycle.dimension() != 2 {
            return Err(Error::InvalidSplitting("triangular splitting needs a 2×2 cocycle".into()));
        }
        for (w, g) in cocycle.generators() {
            if g[(1, 0)] != 0.0 || g[(0, 0)].abs() <= g[(1, 1)].abs() {
                return Err(Error::InvalidSplitting(format!(
                    "generator {w:?} must be upper triangular with |a| > |d|"
                )));
            }
        }
        Ok(TriangularSplitting { cocycle, exponents: exponents.to_vec() })
    }

    /// `c(x)`, summed until the terms drop below `1e-18` relative.
    pub fn slow_direction_slope(&self, x: &SymbolPoint) -> Result<f64> {
        let d = self.cocycle.depth();
        let mut c = 0.0;
        let mut prod = 1.0;
        let chunk = 64usize;
        let mut start = 0i64;
        loop {
            let w = x.window(start, start + (chunk + d) as i64 - 2);
            for k in 0..chunk {
                let g = self.cocycle.generator(&w[k..k + d])?;
                let (a, b, dd) = (g[(0, 0)], g[(0, 1)], g[(1, 1)]);
                let term = -(b / a) * prod;
                c += term;
                prod *= dd / a;
                if prod.abs() < 1e-18 * (1.0 + c.abs()) {
                    return Ok(c);
                }
            }
            start += chunk as i64;
            if start > 100_000 {
                return Err(Error::InvalidSplitting("slow-direction series did not converge".into()));
            }
        }
    }
}

impl Splitting for TriangularSplitting {
    fn exponents(&self) -> &[f64] {
        &self.exponents
    }

    fn bases(&self, x: &SymbolPoint) -> Result<Vec<DMatrix<f64>>> {
        let c = self.slow_direction_slope(x)?;
        let r = (c * c + 1.0).sqrt();
        Ok(vec![DMatrix::from_column_slice(2, 1, &[c / r, 1.0 / r]), DMatrix::from_column_slice(2, 1, &[1.0, 0.0])])
    }
}

/// Largest residual of `A(x) E_i(x) ⊆ E_i(fx)` over the subspaces, relative
/// to `‖A(x) B_i‖`.
pub fn invariance_residual(splitting: &dyn Splitting, cocycle: &CocycleSpec, x: &SymbolPoint) -> Result<f64> {
    let here = splitting.bases(x)?;
    let there = splitting.bases(&x.shifted(1))?;
    let a = cocycle.at(x)?;
    let mut worst: f64 = 0.0;
    for (b, b1) in here.iter().zip(&there) {
        let img = a * b;
        let proj = b1 * (b1.transpose() * &img);
        worst = worst.max((&img - proj).norm() / img.norm());
    }
    Ok(worst)
}

/// Numerical settings for the Lyapunov norm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovNormContext {
    pub epsilon: f64,
    /// Required ratio of tail bound to partial sum.
    #[serde(default = "default_tail_tolerance")]
    pub tail_tolerance: f64,
    /// Smallest truncation window used.
    #[serde(default)]
    pub min_window: usize,
    #[serde(default = "default_max_window")]
    pub max_window: usize,
    /// Half-width `W_K` of the tempering window in [`LyapunovMetric::k_epsilon`].
    /// Defaults to `ceil(ln(1000) / ε)`.
    #[serde(default)]
    pub temper_window: Option<usize>,
}

fn default_tail_tolerance() -> f64 {
    1e-8
}

fn default_max_window() -> usize {
    1 << 16
}

impl LyapunovNormContext {
    pub fn new(epsilon: f64) -> Self {
        LyapunovNormContext {
            epsilon,
            tail_tolerance: default_tail_tolerance(),
            min_window: 0,
            max_window: default_max_window(),
            temper_window: None,
        }
    }

    pub fn temper_window(&self) -> usize {
        self.temper_window.unwrap_or_else(|| (1000f64.ln() / self.epsilon).ceil() as usize)
    }

    /// Smallest `W` with `2 e^{2D} e^{-ε(W+1)} / (1 - e^{-ε}) <= tol`.
    fn window_for_deviation(&self, deviation: f64) -> usize {
        let e = self.epsilon;
        let need = ((2.0 / (1.0 - (-e).exp())).ln() + 2.0 * deviation.max(0.0) - self.tail_tolerance.ln()) / e;
        (need.ceil().max(1.0) as usize).saturating_sub(1).max(self.min_window).max(1)
    }

    fn relative_tail(&self, deviation: f64, window: usize) -> f64 {
        let e = self.epsilon;
        2.0 * (2.0 * deviation.max(0.0) - e * (window as f64 + 1.0)).exp() / (1.0 - (-e).exp())
    }
}

/// The truncated Lyapunov Gram data at one point.
#[derive(Clone, Debug)]
pub struct LyapunovGram {
    pub window: usize,
    pub exponents: Vec<f64>,
    /// Columns are the concatenated subspace bases.
    pub basis: DMatrix<f64>,
    basis_inv: DMatrix<f64>,
    pub dims: Vec<usize>,
    /// Gram matrix of each subspace in its own basis coordinates.
    pub blocks: Vec<DMatrix<f64>>,
    /// Absolute bound on the truncated tail of each block, per unit
    /// coefficient vector.
    pub tail_bounds: Vec<f64>,
    /// Tail bound divided by the smallest possible partial sum.
    pub relative_tail: f64,
    /// Largest `log‖A(x,n)|E_i‖ - nχ_i` seen in the window.
    pub max_deviation: f64,
    /// `Q_x` with `‖u‖_x² = u^T Q_x u`.
    pub q: DMatrix<f64>,
}

/// A Lyapunov norm value together with its truncation error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    /// Upper bound on `‖u‖_x - value` from the truncated tail.
    pub tail_bound: f64,
    pub window: usize,
}

impl LyapunovGram {
    fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.dims
            .iter()
            .map(|d| {
                let o = acc;
                acc += d;
                o
            })
            .collect()
    }

    /// Coefficients of `u` in the concatenated basis.
    pub fn coefficients(&self, u: &DVector<f64>) -> DVector<f64> {
        &self.basis_inv * u
    }

    /// The component of `u` in subspace `i`.
    pub fn component(&self, u: &DVector<f64>, i: usize) -> DVector<f64> {
        let c = self.coefficients(u);
        let o = self.offsets()[i];
        let k = self.dims[i];
        self.basis.columns(o, k) * c.rows(o, k)
    }

    pub fn norm_sq(&self, u: &DVector<f64>) -> f64 {
        u.dot(&(&self.q * u))
    }

    /// `‖u‖_x` restricted to the subspaces in `which`.
    pub fn partial_norm(&self, u: &DVector<f64>, which: std::ops::Range<usize>) -> f64 {
        let c = self.coefficients(u);
        let offs = self.offsets();
        let mut s = 0.0;
        for i in which {
            let ci = c.rows(offs[i], self.dims[i]);
            s += ci.dot(&(&self.blocks[i] * ci));
        }
        s.max(0.0).sqrt()
    }

    pub fn norm(&self, u: &DVector<f64>) -> NormValue {
        let c = self.coefficients(u);
        let offs = self.offsets();
        let mut tail = 0.0;
        for (i, &t) in self.tail_bounds.iter().enumerate() {
            tail += t * c.rows(offs[i], self.dims[i]).norm_squared();
        }
        let v2 = self.norm_sq(u).max(0.0);
        let value = v2.sqrt();
        NormValue { value, tail_bound: (v2 + tail).sqrt() - value, window: self.window }
    }

    /// `K_0(x) = sup ‖u‖_x / ‖u‖ = sqrt(λ_max(Q_x))` from a symmetric
    /// eigendecomposition, cross-checked by power iteration. Near-degenerate
    /// top eigenvalues slow the iteration down, so the check allows its
    /// residual.
    pub fn k0(&self) -> Result<f64> {
        let (lp, _, resid) = power_iteration_sym(&self.q, 1e-15, 100_000);
        let le = sym_max_eigen(&self.q);
        if (lp - le).abs() > resid + 1e-8 * le.abs().max(1.0) {
            return Err(Error::Numerical(format!("power iteration {lp} disagrees with eigensolver {le}")));
        }
        Ok(le.sqrt())
    }
}

/// `‖B‖_{y←x} = sup ‖Bu‖_y / ‖u‖_x`.
pub fn lyapunov_operator_norm(b: &DMatrix<f64>, at_x: &LyapunovGram, at_y: &LyapunovGram) -> Result<f64> {
    let chol = at_x.q.clone().cholesky().ok_or_else(|| Error::Numerical("Q_x is not positive definite".into()))?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&b.transpose())
        .ok_or_else(|| Error::Numerical("singular Cholesky factor".into()))?;
    let mut m = &x * &at_y.q * x.transpose();
    m = (&m + m.transpose()) * 0.5;
    Ok(sym_max_eigen(&m).max(0.0).sqrt())
}

/// A cocycle, an analytic splitting and a context.
pub struct LyapunovMetric<'a> {
    pub ctx: LyapunovNormContext,
    pub splitting: &'a dyn Splitting,
    pub cocycle: &'a CocycleSpec,
}

impl<'a> LyapunovMetric<'a> {
    /// Fails unless `ε` is below half of every gap between consecutive
    /// exponents.
    pub fn new(ctx: LyapunovNormContext, splitting: &'a dyn Splitting, cocycle: &'a CocycleSpec) -> Result<Self> {
        check_exponents(splitting.exponents())?;
        if !(ctx.epsilon > 0.0) {
            return Err(Error::InvalidSplitting("epsilon must be positive".into()));
        }
        if let Some(gap) = splitting.exponents().windows(2).map(|w| w[1] - w[0]).reduce(f64::min) {
            if ctx.epsilon >= gap / 2.0 {
                return Err(Error::InvalidSplitting(format!(
                    "epsilon {} must be below half the smallest exponent gap {gap}",
                    ctx.epsilon
                )));
            }
        }
        Ok(LyapunovMetric { ctx, splitting, cocycle })
    }

    pub fn top_exponent(&self) -> f64 {
        self.splitting.top_exponent()
    }

    /// Gram data at `x`, with the window enlarged until the tail bound is
    /// below tolerance.
    pub fn gram(&self, x: &SymbolPoint) -> Result<LyapunovGram> {
        let bases = self.splitting.bases(x)?;
        let m = self.cocycle.dimension();
        if bases.iter().any(|b| b.nrows() != m) || bases.iter().map(|b| b.ncols()).sum::<usize>() != m {
            return Err(Error::InvalidSplitting(format!("splitting does not span R^{m}")));
        }
        if bases.len() != self.splitting.exponents().len() {
            return Err(Error::InvalidSplitting("one basis per exponent".into()));
        }
        let mut w = self.ctx.window_for_deviation(0.0);
        loop {
            let g = self.gram_at_window(x, &bases, w)?;
            if g.relative_tail <= self.ctx.tail_tolerance {
                return Ok(g);
            }
            let next = self.ctx.window_for_deviation(g.max_deviation).max(w + w / 2);
            if next > self.ctx.max_window {
                return Err(Error::TailTooLarge { tail: g.relative_tail, tolerance: self.ctx.tail_tolerance, window: w });
            }
            w = next;
        }
    }

    fn gram_at_window(&self, x: &SymbolPoint, bases: &[DMatrix<f64>], w: usize) -> Result<LyapunovGram> {
        let m = self.cocycle.dimension();
        let d = self.cocycle.depth();
        let eps = self.ctx.epsilon;
        let mf = m as f64;
        let word = x.window(-(w as i64), (w + d) as i64 - 1);
        let at = |p: i64| -> usize { (p + w as i64) as usize };
        let exps = self.splitting.exponents();
        let mut blocks = Vec::with_capacity(bases.len());
        let mut tails = Vec::with_capacity(bases.len());
        let mut dmax: f64 = 0.0;
        for (b, &chi) in bases.iter().zip(exps) {
            let k = b.ncols();
            let mut block = b.transpose() * b * mf;
            let mut dev_i: f64 = 0.0;
            for backward in [false, true] {
                let mut v = b.clone();
                let mut s = 0.0;
                for n in 1..=w {
                    let g = if backward {
                        let p = at(-(n as i64));
                        self.cocycle.generator_inverse(&word[p..p + d])?
                    } else {
                        let p = at(n as i64 - 1);
                        self.cocycle.generator(&word[p..p + d])?
                    };
                    v = g * v;
                    let r = max_abs(&v);
                    if !(r.is_finite() && r > 0.0) {
                        return Err(Error::Numerical("Lyapunov series degenerated".into()));
                    }
                    v /= r;
                    s += r.ln();
                    let nn = if backward { -(n as f64) } else { n as f64 };
                    let weight = (2.0 * s - 2.0 * chi * nn - eps * n as f64).exp();
                    block += v.transpose() * &v * (mf * weight);
                    let vn = if k == 1 { v.norm() } else { crate::linalg::op_norm(&v) };
                    dev_i = dev_i.max(s + vn.ln() - chi * nn);
                }
            }
            let _ = k;
            blocks.push((&block + block.transpose()) * 0.5);
            tails.push(mf * self.ctx.relative_tail(dev_i, w));
            dmax = dmax.max(dev_i);
        }
        let cols: Vec<DVector<f64>> = bases.iter().flat_map(|b| b.column_iter().map(|c| c.into_owned())).collect();
        let basis = DMatrix::from_columns(&cols);
        let basis_inv = basis.clone().try_inverse().ok_or_else(|| Error::InvalidSplitting("degenerate splitting".into()))?;
        let mut bd = DMatrix::zeros(m, m);
        let mut o = 0;
        for blk in &blocks {
            let k = blk.nrows();
            bd.view_mut((o, o), (k, k)).copy_from(blk);
            o += k;
        }
        let q = basis_inv.transpose() * bd * &basis_inv;
        let q = (&q + q.transpose()) * 0.5;
        Ok(LyapunovGram {
            window: w,
            exponents: exps.to_vec(),
            basis,
            basis_inv,
            dims: bases.iter().map(|b| b.ncols()).collect(),
            blocks,
            relative_tail: self.ctx.relative_tail(dmax, w),
            tail_bounds: tails,
            max_deviation: dmax,
            q,
        })
    }

    pub fn lyapunov_norm(&self, x: &SymbolPoint, u: &DVector<f64>) -> Result<NormValue> {
        if u.iter().all(|&c| c == 0.0) {
            return Err(Error::InvalidSplitting("u must be nonzero".into()));
        }
        Ok(self.gram(x)?.norm(u))
    }

    /// `K_0(x) = sup ‖u‖_x / ‖u‖`, the pointwise comparison constant.
    pub fn k0(&self, x: &SymbolPoint) -> Result<f64> {
        self.gram(x)?.k0()
    }

    /// The tempered comparison function
    /// `K_ε(x) = max_{|k| <= W_K} K_0(f^k x) e^{-ε|k|}`.
    pub fn k_epsilon(&self, x: &SymbolPoint) -> Result<f64> {
        Ok(self.k_along(x, 0)?[0])
    }

    /// `K_ε(f^i x)` for `i = 0..=n`, sharing the `K_0` evaluations.
    pub fn k_along(&self, x: &SymbolPoint, n: usize) -> Result<Vec<f64>> {
        let wk = self.ctx.temper_window() as i64;
        let idx: Vec<i64> = (-wk..=n as i64 + wk).collect();
        let k0s: Vec<f64> = idx.par_iter().map(|&j| self.k0(&x.shifted(j))).collect::<Result<_>>()?;
        let eps = self.ctx.epsilon;
        Ok((0..=n as i64)
            .map(|i| {
                (i - wk..=i + wk)
                    .map(|j| k0s[(j + wk) as usize] * (-eps * (j - i).abs() as f64).exp())
                    .fold(0.0, f64::max)
            })
            .collect())
    }

    /// `x ∈ R_{ε,l}`, i.e. `K_ε(x) <= l`.
    pub fn in_regular_set(&self, x: &SymbolPoint, l: f64) -> Result<bool> {
        Ok(self.k_epsilon(x)? <= l)
    }

    /// `‖A(x,n)u‖_{f^n x}` together with the bounds
    /// `e^{nχ_i ∓ ε|n|} ‖u‖_x` for `u ∈ E_i(x)`.
    pub fn two_sided_check(&self, x: &SymbolPoint, i: usize, u: &DVector<f64>, n: i64) -> Result<InequalityPair> {
        let chi = self.splitting.exponents()[i];
        let g0 = self.gram(x)?;
        let y = x.shifted(n);
        let g1 = self.gram(&y)?;
        let v = self.cocycle.product(x, n)? * u;
        let base = g0.norm(u);
        let img = g1.norm(&v);
        let e = self.ctx.epsilon * n.unsigned_abs() as f64;
        let nf = n as f64;
        let lower = (nf * chi - e).exp() * base.value;
        let upper = (nf * chi + e).exp() * base.value;
        let tol = 10.0 * (img.tail_bound + base.tail_bound * (nf * chi + e).exp()) + 1e-12 * upper;
        let window = g0.window.max(g1.window);
        let tail = g0.relative_tail.max(g1.relative_tail);
        Ok(InequalityPair {
            lower: InequalityCheck::new("exp(nχ_i - ε|n|)‖u‖_x <= ‖A(x,n)u‖_{f^n x}", lower, img.value, tol)
                .with_window(window)
                .with_tail_bound(tail),
            upper: InequalityCheck::new("‖A(x,n)u‖_{f^n x} <= exp(nχ_i + ε|n|)‖u‖_x", img.value, upper, tol)
                .with_window(window)
                .with_tail_bound(tail),
        })
    }

    /// Checks the self-contained norm estimate
    /// `‖A(y,n)‖ <= l² e^l e^{n(χ+ε)}` after verifying its preconditions,
    /// and reports the Lyapunov operator-norm variant with the constant `c`
    /// it would need.
    pub fn verify_norm_estimate(
        &self,
        x: &SymbolPoint,
        y: &SymbolPoint,
        n: usize,
        l: f64,
        tau: f64,
        lambda: f64,
    ) -> Result<NormEstimateReport> {
        let chi = self.top_exponent();
        let eps = self.ctx.epsilon;
        let alpha = self.cocycle.holder_exponent();
        let mut preconditions = Vec::new();
        let ks = self.k_along(x, n)?;
        let (k_x, k_fnx) = (ks[0], ks[n]);
        if k_x > l {
            preconditions.push(format!("K(x) = {k_x:.6} exceeds l = {l}"));
        }
        if k_fnx > l {
            preconditions.push(format!("K(f^n x) = {k_fnx:.6} exceeds l = {l}"));
        }
        if !(lambda > eps / alpha) {
            preconditions.push(format!("lambda = {lambda} is not above eps/alpha = {}", eps / alpha));
        }
        let closeness = closeness_failure(x, y, n, tau, lambda);
        if let Some(why) = &closeness {
            preconditions.push(why.clone());
        }

        let log_ay = self.cocycle.log_product(y, n)?.log_norm();
        let log_rhs = 2.0 * l.ln() + l + n as f64 * (chi + eps);
        let mut checks =
            vec![InequalityCheck::new("log‖A(y,n)‖ <= 2 log l + l + n(χ+ε)", log_ay, log_rhs, 1e-9 * log_rhs.abs().max(1.0))];

        let gx = self.gram(x)?;
        let gn = self.gram(&x.shifted(n as i64))?;
        let window = gx.window.max(gn.window);
        let tail = gx.relative_tail.max(gn.relative_tail);
        let ax = self.cocycle.product(x, n as i64)?;
        let op_x = lyapunov_operator_norm(&ax, &gx, &gn)?.ln();
        let tol = 10.0 * tail + 1e-10;
        let nf = n as f64;
        checks.push(
            InequalityCheck::new("n(χ-ε) <= log‖A(x,n)‖_{f^n x←x}", nf * (chi - eps), op_x, tol)
                .with_window(window)
                .with_tail_bound(tail),
        );
        checks.push(
            InequalityCheck::new("log‖A(x,n)‖_{f^n x←x} <= n(χ+ε)", op_x, nf * (chi + eps), tol)
                .with_window(window)
                .with_tail_bound(tail),
        );

        let ay = self.cocycle.product(y, n as i64)?;
        let op_y = lyapunov_operator_norm(&ay, &gx, &gn)?.ln();
        let operator_variant = InequalityCheck::new("log‖A(y,n)‖_{f^n x←x} <= n(χ+ε) + c l τ^α", op_y, nf * (chi + eps), tol)
            .with_window(window)
            .with_tail_bound(tail);
        let denom = l * tau.powf(alpha);
        let required_c = if operator_variant.slack >= 0.0 {
            Some(0.0)
        } else if denom > 0.0 {
            Some(-operator_variant.slack / denom)
        } else {
            None
        };

        let verdict = if preconditions.is_empty() {
            Verdict::from_checks(&checks)
        } else {
            Verdict::Indeterminate(preconditions.join("; "))
        };
        Ok(NormEstimateReport { verdict, n, l, tau, lambda, k_x, k_fnx, checks, operator_variant, required_c })
    }

    /// Samples vectors of the cones `K_i` at `x_i = f^i x` and checks
    /// `A(y_i) K_i ⊆ K_{i+1}^η` and `‖(A(y_i)u)'‖_{i+1} >= e^{χ-2ε} ‖u'‖_i`.
    pub fn cone_check(&self, x: &SymbolPoint, y: &SymbolPoint, n: usize, eta: f64, samples: usize) -> Result<ConeReport> {
        let l = self.splitting.exponents().len();
        if l < 2 {
            return Err(Error::InvalidSplitting("cone check needs at least two exponents".into()));
        }
        let grams: Vec<LyapunovGram> =
            (0..=n as i64).into_par_iter().map(|i| self.gram(&x.shifted(i))).collect::<Result<_>>()?;
        let top = l - 1;
        let chi = self.top_exponent();
        let eps = self.ctx.epsilon;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut worst_inv = f64::INFINITY;
        let mut worst_growth = f64::INFINITY;
        let mut min_log_growth = f64::INFINITY;
        let mut max_log_growth = f64::NEG_INFINITY;
        let mut worst_inv_at = 0;
        let mut worst_growth_at = 0;
        for i in 0..n {
            let (g, g1) = (&grams[i], &grams[i + 1]);
            let a = self.cocycle.at(&y.shifted(i as i64))?;
            let offs = g.offsets();
            let top_cols = g.basis.columns(offs[top], g.dims[top]).into_owned();
            let low_cols = g.basis.columns(0, offs[top]).into_owned();
            for s in 0..samples.max(2) {
                let ct = DVector::from_fn(top_cols.ncols(), |_, _| rng.gen_range(-1.0..1.0));
                let cl = DVector::from_fn(low_cols.ncols(), |_, _| rng.gen_range(-1.0..1.0));
                let mut up = &top_cols * ct;
                let mut perp = &low_cols * cl;
                up /= g.partial_norm(&up, top..l).max(f64::MIN_POSITIVE);
                // Even samples sit on the cone boundary, odd ones inside.
                let t = if s % 2 == 0 { 1.0 } else { rng.gen_range(0.0..1.0) };
                perp *= t / g.partial_norm(&perp, 0..top).max(f64::MIN_POSITIVE);
                let u = &up + &perp;
                let v = a * &u;
                let v_up = g1.partial_norm(&v, top..l);
                let v_perp = g1.partial_norm(&v, 0..top);
                let inv = (1.0 - eta) - v_perp / v_up;
                if inv < worst_inv {
                    worst_inv = inv;
                    worst_inv_at = i;
                }
                let lg = v_up.ln() - g.partial_norm(&u, top..l).ln();
                min_log_growth = min_log_growth.min(lg);
                max_log_growth = max_log_growth.max(lg);
                let gm = lg - (chi - 2.0 * eps);
                if gm < worst_growth {
                    worst_growth = gm;
                    worst_growth_at = i;
                }
            }
        }
        Ok(ConeReport {
            n,
            eta,
            samples_per_step: samples.max(2),
            worst_invariance_margin: worst_inv,
            worst_invariance_at: worst_inv_at,
            worst_growth_margin: worst_growth,
            worst_growth_at,
            min_log_growth,
            max_log_growth,
            holds: worst_inv > 0.0 && worst_growth >= 0.0,
        })
    }
}

/// First failure of `d(f^i x, f^i y) < τ e^{-λ min(i, n-i)}`, `0 <= i < n`.
/// `τ = 0` demands that the two points coincide.
fn closeness_failure(x: &SymbolPoint, y: &SymbolPoint, n: usize, tau: f64, lambda: f64) -> Option<String> {
    if tau <= 0.0 {
        return if x.same_as(y) { None } else { Some("tau = 0 requires y = x".into()) };
    }
    for i in 0..n {
        let bound = tau * (-lambda * i.min(n - i) as f64).exp();
        let window = ((-bound.log2()).ceil().max(0.0) as usize) + 1;
        let d = distance(&x.shifted(i as i64), &y.shifted(i as i64), window);
        if !d.certainly_below(bound) {
            return Some(format!(
                "orbit segments not exponentially close at i = {i}: d = {} >= {bound:.3e}",
                d.value
            ));
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityPair {
    pub lower: InequalityCheck,
    pub upper: InequalityCheck,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimateReport {
    pub verdict: Verdict,
    pub n: usize,
    pub l: f64,
    pub tau: f64,
    pub lambda: f64,
    pub k_x: f64,
    pub k_fnx: f64,
    pub checks: Vec<InequalityCheck>,
    /// Reported only: the constant `c` is not known.
    pub operator_variant: InequalityCheck,
    /// Smallest `c >= 0` making the operator variant hold, if `τ > 0`.
    pub required_c: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub n: usize,
    pub eta: f64,
    pub samples_per_step: usize,
    /// `min (1-η) - ‖v^⊥‖_{i+1} / ‖v'‖_{i+1}` over sampled `u ∈ K_i`.
    pub worst_invariance_margin: f64,
    pub worst_invariance_at: usize,
    /// `min log(‖v'‖_{i+1} / ‖u'‖_i) - (χ - 2ε)`.
    pub worst_growth_margin: f64,
    pub worst_growth_at: usize,
    pub min_log_growth: f64,
    pub max_log_growth: f64,
    pub holds: bool,
}

/// `‖u‖_x` for the given context, splitting and cocycle.
pub fn lyapunov_norm(
    ctx: &LyapunovNormContext,
    splitting: &dyn Splitting,
    cocycle: &CocycleSpec,
    x: &SymbolPoint,
    u: &DVector<f64>,
) -> Result<NormValue> {
    LyapunovMetric::new(ctx.clone(), splitting, cocycle)?.lyapunov_norm(x, u)
}

/// The tempered `K_ε(x)`.
pub fn k_epsilon(ctx: &LyapunovNormContext, splitting: &dyn Splitting, cocycle: &CocycleSpec, x: &SymbolPoint) -> Result<f64> {
    LyapunovMetric::new(ctx.clone(), splitting, cocycle)?.k_epsilon(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn closed_form(eps: f64) -> f64 {
        (2.0 * (2.0 / (1.0 - (-eps).exp()) - 1.0)).sqrt()
    }

    #[test]
    fn fixed_point_norm_matches_geometric_series() {
        let a = fixtures::test_cocycle();
        let s = GlobalSplitting::diagonal(2f64.ln()).unwrap();
        let ctx = LyapunovNormContext::new(0.1);
        let x = SymbolPoint::constant(0);
        let v = lyapunov_norm(&ctx, &s, &a, &x, &DVector::from_vec(vec![1.0, 0.0])).unwrap();
        // Direct summation to |n| = 2000.
        let direct: f64 = (-2000i64..=2000).map(|n| 2.0 * (-0.1 * n.abs() as f64).exp()).sum::<f64>().sqrt();
        assert!((v.value - direct).abs() < 1e-7 * direct, "{} vs {direct}", v.value);
        assert!((v.value - closed_form(0.1)).abs() < 1e-7);
        assert!((v.value - 6.3272).abs() < 1e-4);
        assert!(v.tail_bound < 1e-6);
        let k = k_epsilon(&ctx, &s, &a, &x).unwrap();
        assert!((k - closed_form(0.1)).abs() < 1e-7);
    }

    #[test]
    fn triangular_splitting_is_invariant() {
        let a = fixtures::triangular_cocycle();
        let chi = fixtures::test_cocycle_exponent(0.5);
        let s = TriangularSplitting::new(a.clone(), [-chi, chi]).unwrap();
        let mu = fixtures::bernoulli(0.5);
        for seed in 0..5 {
            let x = mu.sample_point(4096, seed);
            for k in 0..20 {
                assert!(invariance_residual(&s, &a, &x.shifted(k)).unwrap() < 1e-10);
            }
        }
    }

    #[test]
    fn cone_boundary_vector_at_one_block() {
        let a = fixtures::test_cocycle();
        let chi = 3f64.ln();
        let s = GlobalSplitting::diagonal(chi).unwrap();
        let metric = LyapunovMetric::new(LyapunovNormContext::new(0.1), &s, &a).unwrap();
        let x = SymbolPoint::constant(1);
        let r = metric.cone_check(&x, &x, 3, 1.0 - 1.0 / 9.0 - 1e-9, 8).unwrap();
        assert!(r.worst_invariance_margin >= 0.0, "{r:?}");
        assert!((r.min_log_growth - 3f64.ln()).abs() < 1e-9);
        assert!((r.max_log_growth - 3f64.ln()).abs() < 1e-9);
        let degenerate = metric.cone_check(&x, &x, 3, 1.0, 8).unwrap();
        assert!(degenerate.worst_invariance_margin <= 0.0);
        assert!(!degenerate.holds);
    }

    #[test]
    fn epsilon_must_respect_the_gap() {
        let a = fixtures::test_cocycle();
        let s = GlobalSplitting::diagonal(0.1).unwrap();
        assert!(LyapunovMetric::new(LyapunovNormContext::new(0.1), &s, &a).is_err());
    }
}
