//! Workloads shared by the criterion benches and their smoke test.

use cocycle_lab::cocycle::CocycleSpec;
use cocycle_lab::entropy::{bowen_hausdorff_estimate, topological_entropy, PointFamily};
use cocycle_lab::fixtures;
use cocycle_lab::fractal::{edp_lower_bound, FractalScheme};
use cocycle_lab::lyapunov_metric::{GlobalSplitting, LyapunovMetric, LyapunovNormContext};
use cocycle_lab::measures::{katok_entropy, MarkovMeasure};
use cocycle_lab::shadowing::{random_pseudo_orbit, shadow, verify_shadowing, ShadowingParams};
use cocycle_lab::shift_space::{ShiftSpace, SymbolPoint};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Workloads {
    pub cocycle: CocycleSpec,
    pub triangular: CocycleSpec,
    pub mu: MarkovMeasure,
    pub sample: SymbolPoint,
    pub golden: ShiftSpace,
    pub scheme: FractalScheme,
    pub splitting: GlobalSplitting,
}

impl Workloads {
    pub fn new() -> Self {
        let mu = fixtures::bernoulli(0.1);
        Workloads {
            cocycle: fixtures::test_cocycle(),
            triangular: fixtures::triangular_cocycle(),
            sample: mu.sample_point(100_000, 1),
            mu,
            golden: fixtures::golden_mean(),
            scheme: fixtures::tiny_scheme(),
            splitting: GlobalSplitting::diagonal(fixtures::test_cocycle_exponent(0.1)).expect("diagonal splitting"),
        }
    }

    pub fn orbit_mle(&self, n: usize) -> f64 {
        self.triangular.finite_time_mle(&self.sample, n).unwrap()
    }

    pub fn spectrum(&self, n: usize) -> Vec<f64> {
        self.triangular.oseledec_spectrum(&self.sample, n).unwrap().exponents
    }

    pub fn measure_mle(&self, n_max: usize) -> f64 {
        self.triangular.mle_of_measure(&self.mu, n_max, 1 << 22).unwrap().value
    }

    /// Pseudo-orbits shadowed and verified; returns the worst margin.
    pub fn shadowing(&self, count: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let po = random_pseudo_orbit(&self.golden, 4, 1..=12, 3, &mut rng).unwrap();
                let z = shadow(&po, &self.golden).unwrap();
                verify_shadowing(&z, &po, ShadowingParams::canonical()).unwrap().worst_margin
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn topological(&self, horizon: usize) -> f64 {
        topological_entropy(&PointFamily::Whole(self.golden.clone()), horizon, 0.5).unwrap().value
    }

    pub fn cover(&self, horizon: usize) -> f64 {
        let fam = PointFamily::Whole(self.golden.clone());
        bowen_hausdorff_estimate(&fam, 0.48, 1, 0.5, horizon).unwrap().value
    }

    pub fn katok(&self, l_max: usize) -> f64 {
        katok_entropy(&self.mu, 0.5, 0.1, l_max).unwrap().slope
    }

    pub fn lyapunov_k(&self, eps: f64) -> f64 {
        let m = LyapunovMetric::new(LyapunovNormContext::new(eps), &self.splitting, &self.cocycle).unwrap();
        m.k_epsilon(&self.sample).unwrap()
    }

    pub fn edp(&self) -> f64 {
        edp_lower_bound(&self.scheme, self.scheme.params.gamma, 0.125, 2, 1, 1 << 20).unwrap().s
    }
}

impl Default for Workloads {
    fn default() -> Self {
        Self::new()
    }
}
