//! Canonical spaces, cocycles and measures with closed-form answers.

use nalgebra::DMatrix;

use crate::cocycle::CocycleSpec;
use crate::measures::MarkovMeasure;
use crate::shift_space::ShiftSpace;

/// `M_0 = diag(2, 1/2)`, `M_1 = diag(3, 1/3)` on the full 2-shift.
pub fn test_cocycle() -> CocycleSpec {
    CocycleSpec::from_symbol_generators(vec![
        DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 0.5]),
        DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, 1.0 / 3.0]),
    ])
    .expect("fixture is valid")
}

/// Upper-triangular generators with the same diagonals as [`test_cocycle`]
/// and unit off-diagonal coupling.
pub fn triangular_cocycle() -> CocycleSpec {
    CocycleSpec::from_symbol_generators(vec![
        DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 0.5]),
        DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 0.0, 1.0 / 3.0]),
    ])
    .expect("fixture is valid")
}

pub fn full_shift() -> ShiftSpace {
    ShiftSpace::full(2)
}

pub fn golden_mean() -> ShiftSpace {
    ShiftSpace::golden_mean()
}

pub fn bernoulli(p0: f64) -> MarkovMeasure {
    MarkovMeasure::bernoulli(p0).expect("p0 in [0, 1]")
}

/// `δ` at the fixed point `s^∞` of the full 2-shift.
pub fn delta(s: u8) -> MarkovMeasure {
    MarkovMeasure::point_mass(2, s).expect("binary fixed point")
}

/// `χ(μ)` of the diagonal test cocycle for Bernoulli(p0).
pub fn test_cocycle_exponent(p0: f64) -> f64 {
    p0 * 2f64.ln() + (1.0 - p0) * 3f64.ln()
}

/// A depth-2 scheme small enough to enumerate: Bernoulli(0.05) and
/// Bernoulli(0.95) under [`test_cocycle`], two blocks of length 4 per level,
/// `N_1 = 2`, `N_2 = 4`, `γ = h*/10`. It has 64 points and `t = [9, 26]`.
pub fn tiny_scheme() -> crate::fractal::FractalScheme {
    use crate::fractal::{build_scheme, choose_parameters, BuildConfig, NkRule, ParamConfig};
    let (mu1, mu2) = (bernoulli(0.05), bernoulli(0.95));
    let config = ParamConfig { varsigma: 0.1, ..ParamConfig::default() };
    let gamma = mu1.entropy().min(mu2.entropy()) / 10.0;
    let params =
        choose_parameters(&test_cocycle(), &full_shift(), &mu1, &mu2, gamma, None, &config).expect("fixture parameters");
    let mut build = BuildConfig::full(2, NkRule::Explicit(vec![2, 4]));
    build.block_cap = Some(2);
    build_scheme(&full_shift(), &params, &build).expect("fixture scheme")
}
