//! Parameter selection for the two-measure construction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cocycle::CocycleSpec;
use crate::error::{Error, Result};
use crate::lyapunov_metric::{LyapunovMetric, LyapunovNormContext, Splitting};
use crate::measures::{CylinderPartition, Gamma, MarkovMeasure};
use crate::report::InequalityCheck;
use crate::shift_space::{Resolution, ShiftSpace};

/// Machine tolerance used for the `a > b` precondition.
const MLE_TOL: f64 = 1e-12;

/// Settings for [`choose_parameters`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamConfig {
    /// Depth `n_max` of the subadditive MLE bound.
    #[serde(default = "default_mle_depth")]
    pub mle_depth: usize,
    #[serde(default = "default_mle_cap")]
    pub mle_cap: u64,
    /// Jump bound of the pseudo-orbits (dyadic).
    #[serde(default = "one")]
    pub delta: f64,
    #[serde(default = "default_varsigma")]
    pub varsigma: f64,
    #[serde(default = "default_rho")]
    pub rho: f64,
    /// Separation radius of the block sets (dyadic).
    #[serde(default = "half")]
    pub sep_radius: f64,
    /// Bowen-ball radius of the measure estimates (dyadic).
    #[serde(default = "eighth")]
    pub ball_radius: f64,
    #[serde(default = "half")]
    pub eta: f64,
    /// Overrides the default `ε = (a - b)/16`.
    #[serde(default)]
    pub epsilon: Option<f64>,
    /// Return parameters even when `a <= b`; the failed checks are kept.
    #[serde(default)]
    pub force: bool,
    #[serde(default = "default_regularity_samples")]
    pub regularity_samples: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_mle_depth() -> usize {
    8
}
fn default_mle_cap() -> u64 {
    1 << 22
}
fn one() -> f64 {
    1.0
}
fn half() -> f64 {
    0.5
}
fn eighth() -> f64 {
    0.125
}
fn default_varsigma() -> f64 {
    0.05
}
fn default_rho() -> f64 {
    0.1
}
fn default_regularity_samples() -> usize {
    32
}

impl Default for ParamConfig {
    fn default() -> Self {
        ParamConfig {
            mle_depth: default_mle_depth(),
            mle_cap: default_mle_cap(),
            delta: one(),
            varsigma: default_varsigma(),
            rho: default_rho(),
            sep_radius: half(),
            ball_radius: eighth(),
            eta: half(),
            epsilon: None,
            force: false,
            regularity_samples: default_regularity_samples(),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SchemeParams {
    pub mu1: MarkovMeasure,
    pub mu2: MarkovMeasure,
    /// `a = χ_max(A, μ1) > b = χ_max(A, μ2)`.
    pub a: f64,
    pub b: f64,
    pub h1: f64,
    pub h2: f64,
    /// `min(h1, h2)` and `max(h1, h2)`.
    pub h_star: f64,
    pub big_h_star: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub varsigma: f64,
    pub rho: f64,
    /// Regularity level `l`, when a splitting was supplied.
    pub l: Option<f64>,
    pub eta: f64,
    pub tau: f64,
    pub lambda: f64,
    pub delta: f64,
    pub sep_radius: f64,
    pub ball_radius: f64,
    /// `w` with `δ = 2^{-w}`.
    pub junction_depth: usize,
    pub mixing_gap: usize,
    pub t_star: usize,
    pub n1_min: usize,
    pub n2_min: Option<usize>,
    pub checks: Vec<InequalityCheck>,
    pub log: Vec<String>,
}

impl SchemeParams {
    /// `(a - 3ε) - (b + 2ε)`.
    pub fn margin(&self) -> f64 {
        (self.a - 3.0 * self.epsilon) - (self.b + 2.0 * self.epsilon)
    }

    pub fn valid(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    /// The measure used at level `k`: `g(k) = (k+1) mod 2 + 1`.
    pub fn measure_index(k: usize) -> usize {
        (k + 1) % 2 + 1
    }

    pub fn measure(&self, k: usize) -> &MarkovMeasure {
        if Self::measure_index(k) == 1 {
            &self.mu1
        } else {
            &self.mu2
        }
    }

    pub fn entropy(&self, k: usize) -> f64 {
        if Self::measure_index(k) == 1 {
            self.h1
        } else {
            self.h2
        }
    }
}

/// Empirical `l` with `μ{K_ε <= l} > 1 - ρ` over seeded samples.
pub fn regularity_level(
    cocycle: &CocycleSpec,
    splitting: &dyn Splitting,
    mu: &MarkovMeasure,
    epsilon: f64,
    rho: f64,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    use rayon::prelude::*;
    let metric = LyapunovMetric::new(LyapunovNormContext::new(epsilon), splitting, cocycle)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seeds: Vec<u64> = (0..samples.max(1)).map(|_| rng.gen()).collect();
    let mut ks = seeds
        .par_iter()
        .map(|&s| metric.k_epsilon(&mu.sample_point(64, s)))
        .collect::<Result<Vec<f64>>>()?;
    ks.sort_by(f64::total_cmp);
    let m = ks.len();
    // Smallest index i with (i + 1)/m > 1 - ρ.
    let i = (0..m).find(|&i| (i + 1) as f64 / m as f64 > 1.0 - rho).unwrap_or(m - 1);
    Ok(ks[i])
}

/// Smallest `n` with `n γ > (h* - 3γ) N` and `2 < e^{n ε}`.
fn first_block_length(h_star: f64, gamma: f64, epsilon: f64, big_n: usize) -> usize {
    let by_entropy = ((h_star - 3.0 * gamma) * big_n as f64 / gamma).max(0.0).floor() as usize + 1;
    let by_eps = (2f64.ln() / epsilon).floor() as usize + 1;
    by_entropy.max(by_eps)
}

/// Smallest `n` with `l² e^l < e^{n ε}`.
fn second_block_length(l: f64, epsilon: f64) -> usize {
    ((2.0 * l.ln() + l) / epsilon).max(0.0).floor() as usize + 1
}

/// Chooses the constants of the construction. `splittings`, when given,
/// are the Oseledec splittings for `μ1`, `μ2` and fix the regularity level.
pub fn choose_parameters(
    cocycle: &CocycleSpec,
    space: &ShiftSpace,
    mu1: &MarkovMeasure,
    mu2: &MarkovMeasure,
    gamma: f64,
    splittings: Option<[&dyn Splitting; 2]>,
    config: &ParamConfig,
) -> Result<SchemeParams> {
    cocycle.validate_for(space)?;
    for mu in [mu1, mu2] {
        if !mu.supported_on(space) {
            return Err(Error::InvalidMeasure("measure charges a forbidden transition".into()));
        }
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidScheme(format!("gamma must be positive, got {gamma}")));
    }
    let mut log = Vec::new();
    let a = cocycle.mle_of_measure(mu1, config.mle_depth, config.mle_cap)?.value;
    let b = cocycle.mle_of_measure(mu2, config.mle_depth, config.mle_cap)?.value;
    log.push(format!("a = {a:.9}, b = {b:.9} (subadditive bound, depth {})", config.mle_depth));
    let distinguished = a - b > 8.0 * MLE_TOL * (1.0 + a.abs().max(b.abs()));
    if !distinguished && !config.force {
        return Err(Error::NotDistinguished { a, b });
    }
    let epsilon = match config.epsilon {
        Some(e) => e,
        None if distinguished => (a - b) / 16.0,
        None => 1e-2,
    };
    log.push(format!("epsilon = {epsilon:.9}"));

    let h1 = mu1.entropy();
    let h2 = mu2.entropy();
    let h_star = h1.min(h2);
    let big_h_star = h1.max(h2);

    let res_delta = Resolution::from_eps(config.delta)?;
    Resolution::from_eps(config.sep_radius)?;
    Resolution::from_eps(config.ball_radius)?;
    let w = res_delta.m as usize;
    let mixing_gap = space.mixing_gap(w)?;
    let t_star = CylinderPartition::centered(w + 1).cardinality(space, &Gamma::Whole);
    log.push(format!("delta = 2^-{w}, N = {mixing_gap}, T* = {t_star}"));

    let tau = 2.0;
    let lambda = 2f64.ln();
    let alpha = cocycle.holder_exponent();
    let mut checks = vec![
        InequalityCheck::new("0 < ε", 0.0, epsilon, 0.0),
        InequalityCheck::new("ε < (a - b)/8", epsilon, (a - b) / 8.0, 0.0),
        InequalityCheck::new("ε/α < λ", epsilon / alpha, lambda, 0.0),
        InequalityCheck::new("b + 2ε < a - 3ε", b + 2.0 * epsilon, a - 3.0 * epsilon, 0.0),
    ];
    for c in &mut checks {
        // Strict inequalities.
        c.holds = c.lhs < c.rhs;
    }

    let l = match splittings {
        Some([s1, s2]) if distinguished => {
            let l1 = regularity_level(cocycle, s1, mu1, epsilon, config.rho, config.regularity_samples, config.seed)?;
            let l2 =
                regularity_level(cocycle, s2, mu2, epsilon, config.rho, config.regularity_samples, config.seed + 1)?;
            log.push(format!("l = max({l1:.4}, {l2:.4}) from {} samples", config.regularity_samples));
            Some(l1.max(l2))
        }
        _ => None,
    };
    let n1_min = first_block_length(h_star, gamma, epsilon, mixing_gap);
    let n2_min = l.map(|l| second_block_length(l, epsilon));
    log.push(format!("n1_min = {n1_min}, n2_min = {n2_min:?}"));

    Ok(SchemeParams {
        mu1: mu1.clone(),
        mu2: mu2.clone(),
        a,
        b,
        h1,
        h2,
        h_star,
        big_h_star,
        gamma,
        epsilon,
        varsigma: config.varsigma,
        rho: config.rho,
        l,
        eta: config.eta,
        tau,
        lambda,
        delta: config.delta,
        sep_radius: config.sep_radius,
        ball_radius: config.ball_radius,
        junction_depth: w,
        mixing_gap,
        t_star,
        n1_min,
        n2_min,
        checks,
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::lyapunov_metric::GlobalSplitting;

    #[test]
    fn test_cocycle_parameters() {
        let a_ = fixtures::test_cocycle();
        let space = fixtures::full_shift();
        let p = choose_parameters(
            &a_,
            &space,
            &fixtures::bernoulli(0.1),
            &fixtures::bernoulli(0.9),
            0.05,
            None,
            &ParamConfig::default(),
        )
        .unwrap();
        assert!((p.a - 1.058066).abs() < 1e-6);
        assert!((p.b - 0.733693).abs() < 1e-6);
        assert!((p.epsilon - 0.020273).abs() < 1e-6);
        // (a - 3ε) - (b + 2ε) = 11 (a - b)/16 with ε = (a - b)/16.
        assert!((p.margin() - 11.0 * (p.a - p.b) / 16.0).abs() < 1e-12);
        assert!(p.valid());
        assert_eq!(p.mixing_gap, 1);
        assert_eq!(p.t_star, 8);
    }

    #[test]
    fn equal_measures_are_the_other_alternative() {
        let mu = fixtures::bernoulli(0.3);
        let e = choose_parameters(
            &fixtures::test_cocycle(),
            &fixtures::full_shift(),
            &mu,
            &mu,
            0.05,
            None,
            &ParamConfig::default(),
        );
        assert!(matches!(e, Err(Error::NotDistinguished { .. })));
    }

    #[test]
    fn periodic_measures() {
        let p = choose_parameters(
            &fixtures::test_cocycle(),
            &fixtures::full_shift(),
            &fixtures::delta(1),
            &fixtures::delta(0),
            0.01,
            None,
            &ParamConfig::default(),
        )
        .unwrap();
        assert!((p.a - 3f64.ln()).abs() < 1e-12 && (p.b - 2f64.ln()).abs() < 1e-12);
        assert_eq!(p.h_star, 0.0);
        assert!(p.valid());
    }

    #[test]
    fn regularity_level_sets_second_length() {
        let a_ = fixtures::test_cocycle();
        let (mu1, mu2) = (fixtures::bernoulli(0.1), fixtures::bernoulli(0.9));
        let s1 = GlobalSplitting::diagonal(fixtures::test_cocycle_exponent(0.1)).unwrap();
        let s2 = GlobalSplitting::diagonal(fixtures::test_cocycle_exponent(0.9)).unwrap();
        let cfg = ParamConfig { regularity_samples: 2, epsilon: Some(0.04), ..ParamConfig::default() };
        let p = choose_parameters(&a_, &fixtures::full_shift(), &mu1, &mu2, 0.05, Some([&s1, &s2]), &cfg).unwrap();
        let l = p.l.unwrap();
        assert!(l >= 1.0);
        let n2 = p.n2_min.unwrap();
        let lhs = 2.0 * l.ln() + l;
        assert!(lhs < n2 as f64 * p.epsilon, "l = {l}");
        assert!(lhs >= (n2 - 1) as f64 * p.epsilon);
    }
}
