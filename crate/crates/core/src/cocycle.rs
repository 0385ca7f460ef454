//! Locally constant matrix cocycles over a shift.
//!
//! The generator `A(x)` depends on `x_0 .. x_{d-1}` (depth `d`), so
//! `A(x, n)` is constant on cylinders on `[0, n+d-2]`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{op_norm, LogProduct};
use crate::measures::MarkovMeasure;
use crate::shift_space::{parse_word, word_to_string, ShiftSpace, Symbol, SymbolPoint, Word};

pub const DEFAULT_DET_FLOOR: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct CocycleSpec {
    dimension: usize,
    depth: usize,
    q: usize,
    table: Vec<Option<DMatrix<f64>>>,
    inverses: Vec<Option<DMatrix<f64>>>,
    holder_exponent: f64,
    det_floor: f64,
    bound: f64,
}

#[derive(Serialize, Deserialize)]
struct CocycleJson {
    dimension: usize,
    depth: usize,
    generators: BTreeMap<String, Vec<f64>>,
    #[serde(default = "default_det_floor")]
    det_floor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet_size: Option<usize>,
}

fn default_det_floor() -> f64 {
    DEFAULT_DET_FLOOR
}

impl Serialize for CocycleSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let generators = self
            .generators()
            .map(|(w, g)| (word_to_string(&w), g.transpose().iter().copied().collect()))
            .collect();
        CocycleJson {
            dimension: self.dimension,
            depth: self.depth,
            generators,
            det_floor: self.det_floor,
            alphabet_size: Some(self.q),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CocycleSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = CocycleJson::deserialize(d)?;
        let mut gens = Vec::new();
        for (k, v) in &j.generators {
            let w = parse_word(k).map_err(serde::de::Error::custom)?;
            if v.len() != j.dimension * j.dimension {
                return Err(serde::de::Error::custom(format!(
                    "generator {k:?} has {} entries, expected {}",
                    v.len(),
                    j.dimension * j.dimension
                )));
            }
            gens.push((w, DMatrix::from_row_slice(j.dimension, j.dimension, v)));
        }
        let q = j.alphabet_size.unwrap_or_else(|| {
            gens.iter().flat_map(|(w, _)| w.iter()).map(|&s| s as usize + 1).max().unwrap_or(1)
        });
        CocycleSpec::new(q, j.depth, gens, j.det_floor).map_err(serde::de::Error::custom)
    }
}

impl CocycleSpec {
    /// Generators keyed by depth-`d` words over a `q`-letter alphabet.
    /// Words missing from the table are allowed only if they never occur
    /// (checked against a shift by [`CocycleSpec::validate_for`]).
    pub fn new(q: usize, depth: usize, generators: Vec<(Word, DMatrix<f64>)>, det_floor: f64) -> Result<Self> {
        let dimension = generators
            .first()
            .map(|(_, g)| g.nrows())
            .ok_or_else(|| Error::InvalidCocycle("no generators".into()))?;
        if depth == 0 {
            return Err(Error::InvalidCocycle("depth must be at least 1 (use equal generators for a constant cocycle)".into()));
        }
        let slots = q.checked_pow(depth as u32).filter(|&s| s <= 1 << 20);
        let slots = slots.ok_or_else(|| Error::InvalidCocycle(format!("depth {depth} too large")))?;
        let mut table = vec![None; slots];
        let mut inverses = vec![None; slots];
        let mut bound: f64 = 1.0;
        for (w, g) in generators {
            if w.len() != depth || w.iter().any(|&s| s as usize >= q) {
                return Err(Error::InvalidCocycle(format!("bad generator word {:?}", word_to_string(&w))));
            }
            if g.nrows() != dimension || g.ncols() != dimension {
                return Err(Error::InvalidCocycle("generators must share one square dimension".into()));
            }
            let det = g.determinant();
            if !(det.abs() >= det_floor) {
                return Err(Error::InvalidCocycle(format!(
                    "generator {:?} has |det| = {} below floor {det_floor}",
                    word_to_string(&w),
                    det.abs()
                )));
            }
            let inv = g.clone().try_inverse().ok_or_else(|| Error::InvalidCocycle("singular generator".into()))?;
            bound = bound.max(op_norm(&g)).max(op_norm(&inv));
            let idx = index_of(&w, q);
            table[idx] = Some(g);
            inverses[idx] = Some(inv);
        }
        Ok(CocycleSpec { dimension, depth, q, table, inverses, holder_exponent: 1.0, det_floor, bound })
    }

    /// Depth-1 cocycle with one generator per symbol.
    pub fn from_symbol_generators(gens: Vec<DMatrix<f64>>) -> Result<Self> {
        let q = gens.len();
        Self::new(q, 1, gens.into_iter().enumerate().map(|(s, g)| (vec![s as Symbol], g)).collect(), DEFAULT_DET_FLOOR)
    }

    pub fn with_holder_exponent(mut self, alpha: f64) -> Self {
        self.holder_exponent = alpha;
        self
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    pub fn holder_exponent(&self) -> f64 {
        self.holder_exponent
    }

    pub fn det_floor(&self) -> f64 {
        self.det_floor
    }

    /// `C = max over generators of max(‖A‖, ‖A^{-1}‖)`.
    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn generators(&self) -> impl Iterator<Item = (Word, &DMatrix<f64>)> {
        let (q, d) = (self.q, self.depth);
        self.table.iter().enumerate().filter_map(move |(i, g)| g.as_ref().map(|g| (word_of(i, q, d), g)))
    }

    /// Hölder constant `H` with `‖A(x) - A(y)‖ <= H d(x, y)^α`. Generators
    /// can only differ when `x, y` disagree on `[0, d-1]`, and then
    /// `d(x, y) >= 2^{-(d-1)}`.
    pub fn holder_constant(&self) -> f64 {
        let gens: Vec<&DMatrix<f64>> = self.table.iter().flatten().collect();
        let mut diff: f64 = 0.0;
        for a in &gens {
            for b in &gens {
                diff = diff.max(op_norm(&(*a - *b)));
            }
        }
        diff * (2f64).powf((self.depth as f64 - 1.0) * self.holder_exponent)
    }

    /// Every admissible depth-`d` word has a generator.
    pub fn validate_for(&self, space: &ShiftSpace) -> Result<()> {
        if space.alphabet_size() != self.q {
            return Err(Error::InvalidCocycle(format!(
                "cocycle alphabet {} does not match shift alphabet {}",
                self.q,
                space.alphabet_size()
            )));
        }
        for w in space.words(self.depth, 1 << 20)? {
            if self.table[index_of(&w, self.q)].is_none() {
                return Err(Error::InvalidCocycle(format!("no generator for word {:?}", word_to_string(&w))));
            }
        }
        Ok(())
    }

    fn slot(&self, word: &[Symbol]) -> Result<usize> {
        if word.iter().any(|&s| s as usize >= self.q) {
            return Err(Error::InvalidCocycle(format!("symbol outside alphabet in {:?}", word_to_string(word))));
        }
        let idx = index_of(word, self.q);
        if self.table[idx].is_none() {
            return Err(Error::InvalidCocycle(format!("no generator for word {:?}", word_to_string(word))));
        }
        Ok(idx)
    }

    pub fn generator(&self, word: &[Symbol]) -> Result<&DMatrix<f64>> {
        Ok(self.table[self.slot(word)?].as_ref().unwrap())
    }

    pub fn generator_inverse(&self, word: &[Symbol]) -> Result<&DMatrix<f64>> {
        Ok(self.inverses[self.slot(word)?].as_ref().unwrap())
    }

    /// `A(x)`.
    pub fn at(&self, x: &SymbolPoint) -> Result<&DMatrix<f64>> {
        self.generator(&x.window(0, self.depth as i64 - 1))
    }

    /// Coordinates of `x` needed for `A(x, n)`, `n > 0`.
    pub fn orbit_word(&self, x: &SymbolPoint, n: usize) -> Word {
        x.window(0, (n + self.depth) as i64 - 2)
    }

    /// Generator slots along `x_0 .. x_{n+d-2}`.
    pub fn slots_along(&self, word: &[Symbol], n: usize) -> Result<Vec<usize>> {
        let d = self.depth;
        if word.len() + 1 < n + d {
            return Err(Error::Indeterminate(format!("need {} coordinates, have {}", n + d - 1, word.len())));
        }
        (0..n).map(|i| self.slot(&word[i..i + d])).collect()
    }

    /// `A(x, n)`: `A(f^{n-1}x)···A(x)` for `n > 0`, identity for `n = 0`,
    /// `A(f^n x, -n)^{-1}` for `n < 0`.
    pub fn product(&self, x: &SymbolPoint, n: i64) -> Result<DMatrix<f64>> {
        let m = self.dimension;
        let mut out = DMatrix::identity(m, m);
        if n > 0 {
            let w = self.orbit_word(x, n as usize);
            for s in self.slots_along(&w, n as usize)? {
                out = self.table[s].as_ref().unwrap() * out;
            }
        } else if n < 0 {
            let k = (-n) as usize;
            let start = x.shifted(n);
            let w = self.orbit_word(&start, k);
            // (A_{k-1}···A_0)^{-1} = A_0^{-1}···A_{k-1}^{-1}
            for s in self.slots_along(&w, k)? {
                out *= self.inverses[s].as_ref().unwrap();
            }
        }
        Ok(out)
    }

    /// Renormalized `A(x, n)` for `n >= 0`.
    pub fn log_product(&self, x: &SymbolPoint, n: usize) -> Result<LogProduct> {
        let mut p = LogProduct::identity(self.dimension);
        let w = self.orbit_word(x, n);
        for s in self.slots_along(&w, n)? {
            p.push_left(self.table[s].as_ref().unwrap())?;
        }
        Ok(p)
    }

    /// `(1/n) log ‖A(x, n)‖` with the operator 2-norm.
    pub fn finite_time_mle(&self, x: &SymbolPoint, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidCocycle("finite_time_mle needs n >= 1".into()));
        }
        let v = self.log_product(x, n)?.log_norm() / n as f64;
        if !v.is_finite() {
            return Err(Error::Numerical("log-norm overflow despite renormalization".into()));
        }
        Ok(v)
    }

    /// Finite-time exponents at increasing checkpoint times, in one pass.
    pub fn mle_report(&self, x: &SymbolPoint, checkpoints: &[usize], point_id: &str) -> Result<LyapunovReport> {
        if checkpoints.windows(2).any(|w| w[0] >= w[1]) || checkpoints.first() == Some(&0) {
            return Err(Error::InvalidCocycle("checkpoints must be positive and increasing".into()));
        }
        let last = checkpoints.last().copied().unwrap_or(0);
        let w = self.orbit_word(x, last);
        let slots = self.slots_along(&w, last)?;
        let mut p = LogProduct::identity(self.dimension);
        let mut values = Vec::with_capacity(checkpoints.len());
        let mut next = checkpoints.iter().peekable();
        for (i, s) in slots.iter().enumerate() {
            p.push_left(self.table[*s].as_ref().unwrap())?;
            if next.peek() == Some(&&(i + 1)) {
                values.push(p.log_norm() / (i + 1) as f64);
                next.next();
            }
        }
        Ok(LyapunovReport {
            point_id: point_id.to_string(),
            checkpoints: checkpoints.to_vec(),
            values,
            spectrum: None,
        })
    }

    /// Lyapunov spectrum by QR re-orthogonalization along `x_0 .. x_{n-1}`.
    pub fn oseledec_spectrum(&self, x: &SymbolPoint, n: usize) -> Result<OseledecEstimate> {
        if n == 0 {
            return Err(Error::InvalidCocycle("oseledec_spectrum needs n >= 1".into()));
        }
        let m = self.dimension;
        let w = self.orbit_word(x, n);
        let slots = self.slots_along(&w, n)?;
        let mut frame = DMatrix::<f64>::identity(m, m);
        let mut sums = vec![0.0f64; m];
        let checkpoint = (3 * n / 4).max(1);
        let mut at_checkpoint = None;
        for (step, s) in slots.iter().enumerate() {
            let moved = self.table[*s].as_ref().unwrap() * &frame;
            let qr = moved.qr();
            let r = qr.r();
            let mut q = qr.q();
            for i in 0..m {
                let rii = r[(i, i)];
                if !(rii.abs() > 0.0) || !rii.is_finite() {
                    return Err(Error::Numerical(format!("frame degenerated at step {step} (R[{i},{i}] = {rii})")));
                }
                sums[i] += rii.abs().ln();
                if rii < 0.0 {
                    q.column_mut(i).neg_mut();
                }
            }
            frame = q;
            if step + 1 == checkpoint {
                at_checkpoint = Some(sums.iter().map(|s| s / checkpoint as f64).collect::<Vec<_>>());
            }
        }
        let exps: Vec<f64> = sums.iter().map(|s| s / n as f64).collect();
        let earlier = at_checkpoint.unwrap_or_else(|| exps.clone());
        let drift = exps.iter().zip(&earlier).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let mut exponents = exps;
        exponents.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(OseledecEstimate { exponents, drift, horizon: n })
    }

    /// `(1/n) log |det A(x, n)|`, computed from generator determinants.
    pub fn log_det_rate(&self, x: &SymbolPoint, n: usize) -> Result<f64> {
        let w = self.orbit_word(x, n);
        let mut s = 0.0;
        for slot in self.slots_along(&w, n)? {
            s += self.table[slot].as_ref().unwrap().determinant().abs().ln();
        }
        Ok(s / n as f64)
    }

    /// `∫ log ‖A(x, n)‖ dμ` as an exact sum over cylinders on `[0, n+d-2]`.
    /// `cap` bounds the number of positive-weight cylinders visited.
    pub fn integrated_lognorm(&self, mu: &MarkovMeasure, n: usize, cap: u64) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        if mu.alphabet_size() != self.q {
            return Err(Error::InvalidCocycle("measure and cocycle alphabets differ".into()));
        }
        let len = n + self.depth - 1;
        let mut dfs = LognormDfs { spec: self, mu, n, len, visited: 0, cap, total: 0.0, word: Vec::with_capacity(len) };
        let id = DMatrix::identity(self.dimension, self.dimension);
        for s in 0..self.q as Symbol {
            let w = mu.stationary()[s as usize];
            if w > 0.0 {
                dfs.word.push(s);
                dfs.descend(w, &id)?;
                dfs.word.pop();
            }
        }
        Ok(dfs.total)
    }

    /// Monte Carlo estimate of `∫ log ‖A(x, n)‖ dμ`: returns the mean and its
    /// standard error over `samples` forward words.
    pub fn integrated_lognorm_mc(&self, mu: &MarkovMeasure, n: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let len = n + self.depth - 1;
        let mut sum = 0.0;
        let mut sq = 0.0;
        for _ in 0..samples {
            let w = mu.sample_word(len, &mut rng);
            let mut p = LogProduct::identity(self.dimension);
            for s in self.slots_along(&w, n)? {
                p.push_left(self.table[s].as_ref().unwrap())?;
            }
            let v = p.log_norm();
            sum += v;
            sq += v * v;
        }
        let k = samples as f64;
        let mean = sum / k;
        let var = (sq / k - mean * mean).max(0.0) * k / (k - 1.0).max(1.0);
        Ok((mean, (var / k).sqrt()))
    }

    /// `χ_max(A, μ) <= min_{n <= n_max} a_n / n` with `a_n = ∫ log ‖A(x, n)‖ dμ`,
    /// after checking `a_{n+k} <= a_n + a_k` on every pair in range.
    ///
    /// Non-ergodic measures such as `(δ_0 + δ_1)/2` are accepted; the value
    /// then upper-bounds the mean of the ergodic components' exponents.
    pub fn mle_of_measure(&self, mu: &MarkovMeasure, n_max: usize, cap: u64) -> Result<MeasureMle> {
        let mut a = vec![0.0];
        for n in 1..=n_max {
            a.push(self.integrated_lognorm(mu, n, cap)?);
        }
        let mut max_violation: f64 = f64::NEG_INFINITY;
        let mut pairs = 0;
        for n in 1..=n_max {
            for k in 1..=n_max - n {
                let lhs = a[n + k];
                let rhs = a[n] + a[k];
                let tol = SUBADDITIVITY_TOL * (1.0 + lhs.abs().max(rhs.abs()));
                pairs += 1;
                max_violation = max_violation.max(lhs - rhs);
                if lhs > rhs + tol {
                    return Err(Error::Subadditivity { n, k, n_plus_k: n + k, lhs, rhs });
                }
            }
        }
        let rates: Vec<f64> = (1..=n_max).map(|n| a[n] / n as f64).collect();
        let (argmin, value) = rates
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
        Ok(MeasureMle {
            value,
            argmin_n: argmin + 1,
            integrals: a[1..].to_vec(),
            rates,
            pairs_checked: pairs,
            max_violation: if pairs == 0 { 0.0 } else { max_violation },
        })
    }
}

pub const SUBADDITIVITY_TOL: f64 = 1e-12;

struct LognormDfs<'a> {
    spec: &'a CocycleSpec,
    mu: &'a MarkovMeasure,
    n: usize,
    len: usize,
    visited: u64,
    cap: u64,
    total: f64,
    word: Word,
}

impl LognormDfs<'_> {
    /// `word` holds the prefix; `prod` is the product of generators whose
    /// windows lie inside the prefix except the newest one.
    fn descend(&mut self, weight: f64, prod: &DMatrix<f64>) -> Result<()> {
        let d = self.spec.depth;
        let len = self.word.len();
        // Generator i is determined once the prefix reaches length i + d.
        let prod = if len >= d && len - d < self.n {
            let i = len - d;
            let g = self.spec.generator(&self.word[i..i + d])?;
            g * prod
        } else {
            prod.clone()
        };
        if len == self.len {
            self.visited += 1;
            if self.visited > self.cap {
                return Err(Error::Budget {
                    what: "exact cylinder sum (use the Monte Carlo mode)",
                    required: self.visited,
                    budget: self.cap,
                });
            }
            self.total += weight * op_norm(&prod).ln();
            return Ok(());
        }
        let last = *self.word.last().unwrap();
        for s in 0..self.spec.q as Symbol {
            let p = self.mu.transition(last, s);
            if p > 0.0 {
                self.word.push(s);
                self.descend(weight * p, &prod)?;
                self.word.pop();
            }
        }
        Ok(())
    }
}

fn index_of(w: &[Symbol], q: usize) -> usize {
    w.iter().fold(0, |acc, &s| acc * q + s as usize)
}

fn word_of(mut idx: usize, q: usize, d: usize) -> Word {
    let mut w = vec![0; d];
    for i in (0..d).rev() {
        w[i] = (idx % q) as Symbol;
        idx /= q;
    }
    w
}

/// Finite-time exponents of one point at a list of checkpoint times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LyapunovReport {
    pub point_id: String,
    pub checkpoints: Vec<usize>,
    pub values: Vec<f64>,
    pub spectrum: Option<OseledecEstimate>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OseledecEstimate {
    /// Exponents in decreasing order, one per dimension (repeated by multiplicity).
    pub exponents: Vec<f64>,
    /// Largest change of a running average between `3n/4` and `n`.
    pub drift: f64,
    pub horizon: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasureMle {
    /// `min_n a_n / n`, an upper bound for `χ_max(A, μ)`.
    pub value: f64,
    pub argmin_n: usize,
    /// `a_1 .. a_{n_max}`.
    pub integrals: Vec<f64>,
    /// `a_n / n`.
    pub rates: Vec<f64>,
    pub pairs_checked: usize,
    /// Largest `a_{n+k} - a_n - a_k` seen (nonpositive up to rounding).
    pub max_violation: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn diag(a: f64, b: f64) -> DMatrix<f64> {
        DMatrix::from_row_slice(2, 2, &[a, 0.0, 0.0, b])
    }

    #[test]
    fn product_examples() {
        let a = fixtures::test_cocycle();
        let zero = SymbolPoint::constant(0);
        let one = SymbolPoint::constant(1);
        assert!((a.product(&zero, 4).unwrap() - diag(16.0, 1.0 / 16.0)).amax() < 1e-12);
        assert_eq!(a.product(&zero, 0).unwrap(), DMatrix::identity(2, 2));
        assert!((a.product(&one, -2).unwrap() - diag(1.0 / 9.0, 9.0)).amax() < 1e-12);
    }

    #[test]
    fn negative_product_inverts_past_segment() {
        let a = fixtures::triangular_cocycle();
        let x = SymbolPoint::parse("L(01) C(0010111)@-4 R(110)").unwrap();
        for k in 1..6i64 {
            let back = a.product(&x, -k).unwrap();
            let fwd = a.product(&x.shifted(-k), k).unwrap();
            assert!((back * fwd - DMatrix::identity(2, 2)).amax() < 1e-9);
        }
    }

    #[test]
    fn finite_time_mle_closed_forms() {
        let a = fixtures::test_cocycle();
        for n in [1, 7, 100, 10_000] {
            assert!((a.finite_time_mle(&SymbolPoint::constant(0), n).unwrap() - 2f64.ln()).abs() < 1e-12);
            assert!((a.finite_time_mle(&SymbolPoint::constant(1), n).unwrap() - 3f64.ln()).abs() < 1e-12);
        }
        let alt = SymbolPoint::periodic(&[0, 1]).unwrap();
        let v = a.finite_time_mle(&alt, 1000).unwrap();
        assert!((v - 0.5 * (2f64.ln() + 3f64.ln())).abs() < 1e-12);
        assert!((v - 0.895880).abs() < 1e-6);
    }

    #[test]
    fn oseledec_closed_forms() {
        let a = fixtures::test_cocycle();
        let est = a.oseledec_spectrum(&SymbolPoint::constant(0), 50).unwrap();
        assert!((est.exponents[0] - 2f64.ln()).abs() < 1e-12);
        assert!((est.exponents[1] + 2f64.ln()).abs() < 1e-12);
        let scalar = CocycleSpec::from_symbol_generators(vec![DMatrix::from_element(1, 1, 1.7); 2]).unwrap();
        let est = scalar.oseledec_spectrum(&SymbolPoint::periodic(&[0, 1]).unwrap(), 10).unwrap();
        assert!((est.exponents[0] - 1.7f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn oseledec_bernoulli_sample_matches_coordinate_sums() {
        let a = fixtures::test_cocycle();
        let mu = MarkovMeasure::bernoulli(0.1).unwrap();
        let n = 100_000;
        let x = mu.sample_point(n, 11);
        let est = a.oseledec_spectrum(&x, n).unwrap();
        // oracle: diagonal entries multiply coordinatewise
        let w = x.window(0, n as i64 - 1);
        let direct: f64 = w.iter().map(|&s| if s == 0 { 2f64.ln() } else { 3f64.ln() }).sum::<f64>() / n as f64;
        assert!((est.exponents[0] - direct).abs() < 1e-9);
        assert!((est.exponents[1] + direct).abs() < 1e-9);
        let chi = 0.1 * 2f64.ln() + 0.9 * 3f64.ln();
        assert!((est.exponents[0] - chi).abs() < 5e-3);
    }

    #[test]
    fn integrated_lognorm_examples() {
        let a = fixtures::test_cocycle();
        let half = MarkovMeasure::bernoulli(0.5).unwrap();
        let v1 = a.integrated_lognorm(&half, 1, 1 << 20).unwrap();
        assert!((v1 - 0.5 * (2f64.ln() + 3f64.ln())).abs() < 1e-12);
        let v2 = a.integrated_lognorm(&half, 2, 1 << 20).unwrap();
        assert!((v2 - 6f64.ln()).abs() < 1e-12);
        let one = MarkovMeasure::point_mass(2, 1).unwrap();
        assert!((a.integrated_lognorm(&one, 1, 1 << 20).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!(matches!(a.integrated_lognorm(&half, 12, 100), Err(Error::Budget { .. })));
    }

    #[test]
    fn integrated_lognorm_monte_carlo_brackets_exact() {
        let a = fixtures::triangular_cocycle();
        let mu = MarkovMeasure::bernoulli(0.3).unwrap();
        let exact = a.integrated_lognorm(&mu, 8, 1 << 20).unwrap();
        let (mean, se) = a.integrated_lognorm_mc(&mu, 8, 20_000, 5).unwrap();
        assert!((mean - exact).abs() < 4.0 * se + 1e-12, "{mean} ± {se} vs {exact}");
    }

    #[test]
    fn mle_of_measure_closed_forms() {
        let a = fixtures::test_cocycle();
        let r = a.mle_of_measure(&MarkovMeasure::bernoulli(0.1).unwrap(), 8, 1 << 20).unwrap();
        assert!((r.value - (0.1 * 2f64.ln() + 0.9 * 3f64.ln())).abs() < 1e-9);
        assert!((r.value - 1.058066).abs() < 1e-6);
        let r = a.mle_of_measure(&MarkovMeasure::bernoulli(0.9).unwrap(), 8, 1 << 20).unwrap();
        assert!((r.value - 0.733693).abs() < 1e-6);
        let r = a.mle_of_measure(&MarkovMeasure::point_mass(2, 0).unwrap(), 8, 1 << 20).unwrap();
        assert!((r.value - 2f64.ln()).abs() < 1e-12);
        assert_eq!(r.pairs_checked, 28);
    }

    #[test]
    fn depth_two_generators_use_n_plus_d_minus_one_coordinates() {
        let gens = vec![
            (vec![0, 0], diag(2.0, 0.5)),
            (vec![0, 1], diag(1.0, 1.0)),
            (vec![1, 0], diag(3.0, 1.0 / 3.0)),
            (vec![1, 1], diag(0.5, 2.0)),
        ];
        let a = CocycleSpec::new(2, 2, gens, DEFAULT_DET_FLOOR).unwrap();
        let x = SymbolPoint::parse("L(0) C(0110)@0 R(0)").unwrap();
        // windows 01, 11, 10 for n = 3
        let p = a.product(&x, 3).unwrap();
        assert!((p - diag(3.0 * 0.5, 2.0 / 3.0)).amax() < 1e-12);
        let mu = MarkovMeasure::bernoulli(0.5).unwrap();
        let exact = a.integrated_lognorm(&mu, 1, 1 << 10).unwrap();
        let by_hand = 0.25 * (2f64.ln() + 0.0 + 3f64.ln() + 2f64.ln());
        assert!((exact - by_hand).abs() < 1e-12);
        assert!((a.holder_constant() - 2.5 * 2f64.powf(1.0)).abs() < 1e-12);
    }

    #[test]
    fn json_round_trip() {
        let a = fixtures::triangular_cocycle();
        let text = serde_json::to_string(&a).unwrap();
        let b: CocycleSpec = serde_json::from_str(&text).unwrap();
        assert_eq!(a, b);
        let bad = r#"{"dimension":2,"depth":1,"generators":{"0":[1,0,0,0],"1":[1,0,0,1]},"det_floor":1e-9}"#;
        assert!(serde_json::from_str::<CocycleSpec>(bad).is_err());
    }
}
