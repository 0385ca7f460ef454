use std::sync::{Arc, Mutex};

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift_space::{CoordinateSource, ShiftSpace, Symbol, SymbolPoint};

const ROW_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;

/// A stationary Markov measure on a two-sided SFT.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MarkovJson", into = "MarkovJson")]
pub struct MarkovMeasure {
    q: usize,
    p: Vec<f64>,
    pi: Vec<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct MarkovJson {
    #[serde(rename = "P")]
    p: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pi: Option<Vec<f64>>,
}

impl TryFrom<MarkovJson> for MarkovMeasure {
    type Error = Error;
    fn try_from(j: MarkovJson) -> Result<Self> {
        let q = (j.p.len() as f64).sqrt().round() as usize;
        MarkovMeasure::new(q, j.p, j.pi)
    }
}

impl From<MarkovMeasure> for MarkovJson {
    fn from(m: MarkovMeasure) -> Self {
        MarkovJson { p: m.p, pi: Some(m.pi) }
    }
}

impl MarkovMeasure {
    /// `p` is the row-major stochastic matrix. When `pi` is omitted the
    /// stationary vector is solved for, which requires it to be unique.
    pub fn new(q: usize, p: Vec<f64>, pi: Option<Vec<f64>>) -> Result<Self> {
        if q == 0 || p.len() != q * q {
            return Err(Error::InvalidMeasure(format!("P has {} entries, not a square matrix", p.len())));
        }
        if p.iter().any(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::InvalidMeasure("P entries must lie in [0, 1]".into()));
        }
        for i in 0..q {
            let s: f64 = p[i * q..(i + 1) * q].iter().sum();
            if (s - 1.0).abs() > ROW_TOL {
                return Err(Error::InvalidMeasure(format!("row {i} of P sums to {s}")));
            }
        }
        let pi = match pi {
            Some(pi) => pi,
            None => stationary(q, &p)?,
        };
        if pi.len() != q || pi.iter().any(|&v| v < 0.0) || (pi.iter().sum::<f64>() - 1.0).abs() > ROW_TOL {
            return Err(Error::InvalidMeasure("pi must be a probability vector of length q".into()));
        }
        for j in 0..q {
            let s: f64 = (0..q).map(|i| pi[i] * p[i * q + j]).sum();
            if (s - pi[j]).abs() > STATIONARY_TOL {
                return Err(Error::InvalidMeasure(format!("pi is not stationary at symbol {j}")));
            }
        }
        Ok(MarkovMeasure { q, p, pi })
    }

    /// Bernoulli measure on the full 2-shift putting mass `p0` on symbol 0.
    pub fn bernoulli(p0: f64) -> Result<Self> {
        Self::new(2, vec![p0, 1.0 - p0, p0, 1.0 - p0], Some(vec![p0, 1.0 - p0]))
    }

    /// Bernoulli measure with the given symbol weights.
    pub fn bernoulli_weights(w: &[f64]) -> Result<Self> {
        let q = w.len();
        let p = (0..q).flat_map(|_| w.iter().copied()).collect();
        Self::new(q, p, Some(w.to_vec()))
    }

    /// Point mass on the fixed point `s^∞`.
    pub fn point_mass(q: usize, s: Symbol) -> Result<Self> {
        let mut p = vec![0.0; q * q];
        for i in 0..q {
            p[i * q + i] = 1.0;
        }
        let mut pi = vec![0.0; q];
        pi[s as usize] = 1.0;
        Self::new(q, p, Some(pi))
    }

    /// Parry measure (measure of maximal entropy) of an SFT.
    pub fn parry(space: &ShiftSpace) -> Result<Self> {
        let q = space.alphabet_size();
        let a = DMatrix::from_fn(q, q, |i, j| if space.allowed(i as Symbol, j as Symbol) { 1.0 } else { 0.0 });
        let lambda = space.spectral_radius();
        let right = perron_vector(&a);
        let left = perron_vector(&a.transpose());
        let mut p = vec![0.0; q * q];
        for i in 0..q {
            for j in 0..q {
                p[i * q + j] = a[(i, j)] * right[j] / (lambda * right[i]);
            }
            let s: f64 = p[i * q..(i + 1) * q].iter().sum();
            for v in &mut p[i * q..(i + 1) * q] {
                *v /= s;
            }
        }
        let norm: f64 = (0..q).map(|i| left[i] * right[i]).sum();
        let pi = (0..q).map(|i| left[i] * right[i] / norm).collect();
        Self::new(q, p, Some(pi))
    }

    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    pub fn transition(&self, a: Symbol, b: Symbol) -> f64 {
        self.p[a as usize * self.q + b as usize]
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn matrix(&self) -> &[f64] {
        &self.p
    }

    /// True when every positive transition is allowed in `space`.
    pub fn supported_on(&self, space: &ShiftSpace) -> bool {
        space.alphabet_size() == self.q
            && (0..self.q).all(|i| {
                (0..self.q).all(|j| self.p[i * self.q + j] == 0.0 || space.allowed(i as Symbol, j as Symbol))
            })
    }

    /// `h = -Σ_i π_i Σ_j P_ij log P_ij`.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for i in 0..self.q {
            for j in 0..self.q {
                let pij = self.p[i * self.q + j];
                if pij > 0.0 && self.pi[i] > 0.0 {
                    h -= self.pi[i] * pij * pij.ln();
                }
            }
        }
        h
    }

    /// μ of the cylinder carrying `word` (at any position, by invariance).
    pub fn cylinder_weight(&self, word: &[Symbol]) -> f64 {
        match word.split_first() {
            None => 1.0,
            Some((&first, _)) => {
                let mut w = self.pi[first as usize];
                for p in word.windows(2) {
                    w *= self.transition(p[0], p[1]);
                }
                w
            }
        }
    }

    pub fn log_cylinder_weight(&self, word: &[Symbol]) -> f64 {
        match word.split_first() {
            None => 0.0,
            Some((&first, _)) => {
                let mut w = self.pi[first as usize].ln();
                for p in word.windows(2) {
                    w += self.transition(p[0], p[1]).ln();
                }
                w
            }
        }
    }

    /// Time-reversed kernel `P*_ij = π_j P_ji / π_i` (rows of π-null symbols
    /// are left as the identity; they are never visited).
    pub fn reversed(&self) -> Vec<f64> {
        let q = self.q;
        let mut r = vec![0.0; q * q];
        for i in 0..q {
            if self.pi[i] > 0.0 {
                for j in 0..q {
                    r[i * q + j] = self.pi[j] * self.p[j * q + i] / self.pi[i];
                }
            } else {
                r[i * q + i] = 1.0;
            }
        }
        r
    }

    /// Seeded two-sided stationary sample, realized on
    /// `[-half_window, half_window]` up front and extended lazily.
    pub fn sample_point(&self, half_window: usize, seed: u64) -> SymbolPoint {
        let src = Arc::new(MarkovSample::new(self, seed));
        src.ensure(-(half_window as i64), half_window as i64);
        SymbolPoint::lazy(src).with_provenance(format!("markov sample seed {seed}"))
    }

    /// A forward-only random word of the given length (first symbol from π).
    pub fn sample_word(&self, len: usize, rng: &mut impl Rng) -> Vec<Symbol> {
        let mut w = Vec::with_capacity(len);
        if len == 0 {
            return w;
        }
        let mut s = draw(&self.pi, rng.gen());
        w.push(s);
        for _ in 1..len {
            s = draw(&self.p[s as usize * self.q..(s as usize + 1) * self.q], rng.gen());
            w.push(s);
        }
        w
    }
}

fn perron_vector(a: &DMatrix<f64>) -> Vec<f64> {
    let n = a.nrows();
    let mut v = DVector::from_element(n, 1.0);
    for _ in 0..20_000 {
        let w = a * &v;
        let w = &w / w.max();
        if (&w - &v).amax() < 1e-15 {
            v = w;
            break;
        }
        v = w;
    }
    v.iter().copied().collect()
}

fn stationary(q: usize, p: &[f64]) -> Result<Vec<f64>> {
    // Solve (P^T - I) π = 0 with the last row replaced by Σ π = 1.
    let mut m = DMatrix::from_fn(q, q, |i, j| p[j * q + i] - if i == j { 1.0 } else { 0.0 });
    let mut rhs = DVector::zeros(q);
    for j in 0..q {
        m[(q - 1, j)] = 1.0;
    }
    rhs[q - 1] = 1.0;
    let lu = m.lu();
    let sol = lu
        .solve(&rhs)
        .ok_or_else(|| Error::InvalidMeasure("stationary vector is not unique; supply pi".into()))?;
    if sol.iter().any(|v| !v.is_finite() || *v < -1e-12) {
        return Err(Error::InvalidMeasure("stationary vector is not unique; supply pi".into()));
    }
    Ok(sol.iter().map(|v| v.max(0.0)).collect())
}

fn draw(weights: &[f64], u: f64) -> Symbol {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            acc += w;
            last = i;
            if u < acc {
                return i as Symbol;
            }
        }
    }
    last as Symbol
}

struct SampleState {
    forward: Vec<Symbol>,
    backward: Vec<Symbol>,
    rng_forward: ChaCha8Rng,
    rng_backward: ChaCha8Rng,
}

/// Lazily extended two-sided Markov chain. Coordinates `0, 1, ...` come from
/// ChaCha stream 0 using `P`; coordinates `-1, -2, ...` from stream 1 using
/// the reversed kernel. The stationary start makes the sample two-sided
/// stationary.
struct MarkovSample {
    q: usize,
    p: Vec<f64>,
    p_rev: Vec<f64>,
    seed: u64,
    state: Mutex<SampleState>,
}

impl MarkovSample {
    fn new(mu: &MarkovMeasure, seed: u64) -> Self {
        let mut rng_forward = ChaCha8Rng::seed_from_u64(seed);
        rng_forward.set_stream(0);
        let mut rng_backward = ChaCha8Rng::seed_from_u64(seed);
        rng_backward.set_stream(1);
        let x0 = draw(&mu.pi, rng_forward.gen());
        MarkovSample {
            q: mu.q,
            p: mu.p.clone(),
            p_rev: mu.reversed(),
            seed,
            state: Mutex::new(SampleState { forward: vec![x0], backward: Vec::new(), rng_forward, rng_backward }),
        }
    }

    fn ensure(&self, a: i64, b: i64) {
        let mut st = self.state.lock().expect("sample cache poisoned");
        self.extend(&mut st, a, b);
    }

    fn extend(&self, st: &mut SampleState, a: i64, b: i64) {
        let q = self.q;
        while (st.forward.len() as i64) <= b {
            let s = *st.forward.last().unwrap() as usize;
            let u = st.rng_forward.gen();
            st.forward.push(draw(&self.p[s * q..(s + 1) * q], u));
        }
        while -(st.backward.len() as i64) > a {
            let s = *st.backward.last().unwrap_or(&st.forward[0]) as usize;
            let u = st.rng_backward.gen();
            st.backward.push(draw(&self.p_rev[s * q..(s + 1) * q], u));
        }
    }
}

impl CoordinateSource for MarkovSample {
    fn fill(&self, start: i64, out: &mut [Symbol]) {
        if out.is_empty() {
            return;
        }
        let end = start + out.len() as i64 - 1;
        let mut st = self.state.lock().expect("sample cache poisoned");
        self.extend(&mut st, start, end);
        for (k, o) in out.iter_mut().enumerate() {
            let i = start + k as i64;
            *o = if i >= 0 { st.forward[i as usize] } else { st.backward[(-i - 1) as usize] };
        }
    }

    fn describe(&self) -> String {
        format!("markov(q={}, seed={})", self.q, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_closed_forms() {
        assert!((MarkovMeasure::bernoulli(0.5).unwrap().entropy() - 2f64.ln()).abs() < 1e-15);
        let h = -0.1 * 0.1f64.ln() - 0.9 * 0.9f64.ln();
        assert!((MarkovMeasure::bernoulli(0.1).unwrap().entropy() - h).abs() < 1e-15);
        assert!((h - 0.325083).abs() < 1e-6);
        assert_eq!(MarkovMeasure::point_mass(2, 0).unwrap().entropy(), 0.0);
    }

    #[test]
    fn stationary_vector_is_solved() {
        let m = MarkovMeasure::new(2, vec![0.5, 0.5, 1.0, 0.0], None).unwrap();
        assert!((m.stationary()[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!(MarkovMeasure::new(2, vec![1.0, 0.0, 0.0, 1.0], None).is_err());
        assert!(MarkovMeasure::new(2, vec![0.5, 0.6, 1.0, 0.0], None).is_err());
    }

    #[test]
    fn parry_measure_has_maximal_entropy() {
        let g = ShiftSpace::golden_mean();
        let m = MarkovMeasure::parry(&g).unwrap();
        assert!(m.supported_on(&g));
        assert!((m.entropy() - g.spectral_radius().ln()).abs() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_and_two_sided() {
        let mu = MarkovMeasure::bernoulli(0.1).unwrap();
        let x = mu.sample_point(100, 7);
        let y = mu.sample_point(10, 7);
        assert_eq!(x.window(-500, 500), y.window(-500, 500));
        let z = mu.sample_point(100, 8);
        assert_ne!(x.window(-100, 100), z.window(-100, 100));
        assert_eq!(MarkovMeasure::point_mass(2, 0).unwrap().sample_point(5, 1).window(-50, 50), vec![0; 101]);
    }

    #[test]
    fn golden_mean_sample_is_admissible_both_ways() {
        let g = ShiftSpace::golden_mean();
        let mu = MarkovMeasure::parry(&g).unwrap();
        let x = mu.sample_point(1000, 3);
        assert!(g.is_admissible(&x.window(-1000, 1000)));
    }

    #[test]
    fn json_schema() {
        let m: MarkovMeasure = serde_json::from_str(r#"{"P":[0.1,0.9,0.1,0.9]}"#).unwrap();
        assert!((m.entropy() - MarkovMeasure::bernoulli(0.1).unwrap().entropy()).abs() < 1e-12);
        let d: MarkovMeasure = serde_json::from_str(r#"{"P":[1,0,0,1],"pi":[0,1]}"#).unwrap();
        assert_eq!(d.entropy(), 0.0);
    }
}
