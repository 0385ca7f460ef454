//! Katok entropy from minimal Bowen-ball covers, and separated sets with
//! controlled returns.
//!
//! At `ε = 2^{-m}` the open ball `B_l(x, ε)` is the cylinder of `x` on
//! `[-m, l-1+m]`, so balls either coincide or are disjoint and the minimal
//! cover of measure `1-ρ` is the greedy choice of the heaviest cylinders.
//! Cylinder weights of a Markov measure depend only on a type class
//! (symbol counts for i.i.d. measures; first symbol and transition counts
//! otherwise), so the greedy runs over classes with multiplicities.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::recurrence::{recurrence_membership, CylinderPartition, Gamma, RecurrenceSetSpec};
use super::MarkovMeasure;
use crate::error::{Error, Result};
use crate::report::{slope_fit, InequalityCheck};
use crate::shift_space::{bowen_distance, distance, window_for, Resolution, ShiftSpace, SymbolPoint, Word};

pub const DEFAULT_CLASS_BUDGET: usize = 2_000_000;

/// One type class: `count` cylinders, each of weight `exp(log_weight)`.
#[derive(Clone, Copy, Debug)]
struct Class {
    log_weight: f64,
    count: f64,
}

fn is_iid(mu: &MarkovMeasure) -> bool {
    let q = mu.alphabet_size();
    (0..q).all(|i| (0..q).all(|j| mu.transition(i as u8, j as u8) == mu.stationary()[j]))
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

fn iid_classes(mu: &MarkovMeasure, len: usize, budget: usize) -> Result<Vec<Class>> {
    let w: Vec<f64> = mu.stationary().to_vec();
    let support: Vec<usize> = (0..w.len()).filter(|&s| w[s] > 0.0).collect();
    let k = support.len();
    let mut out = Vec::new();
    let mut counts = vec![0usize; k];
    // Enumerate compositions of len into k parts.
    fn rec(
        i: usize,
        left: usize,
        counts: &mut Vec<usize>,
        support: &[usize],
        w: &[f64],
        len: usize,
        out: &mut Vec<Class>,
        budget: usize,
    ) -> Result<()> {
        if i + 1 == counts.len() {
            counts[i] = left;
            if out.len() >= budget {
                return Err(Error::Budget { what: "katok type classes", required: out.len() as u64 + 1, budget: budget as u64 });
            }
            let mut lw = 0.0;
            let mut lc = ln_factorial(len);
            for (j, &c) in counts.iter().enumerate() {
                lw += c as f64 * w[support[j]].ln();
                lc -= ln_factorial(c);
            }
            out.push(Class { log_weight: lw, count: lc.exp().round() });
            return Ok(());
        }
        for c in 0..=left {
            counts[i] = c;
            rec(i + 1, left - c, counts, support, w, len, out, budget)?;
        }
        Ok(())
    }
    if k == 0 {
        return Ok(out);
    }
    rec(0, len, &mut counts, &support, &w, len, &mut out, budget)?;
    Ok(out)
}

fn markov_classes(mu: &MarkovMeasure, len: usize, budget: usize) -> Result<Vec<Class>> {
    let q = mu.alphabet_size();
    let pi = mu.stationary();
    // state: (first, last, transition counts) -> number of words
    let mut layer: HashMap<(u8, u8, Vec<u16>), f64> = HashMap::new();
    for s in 0..q {
        if pi[s] > 0.0 {
            layer.insert((s as u8, s as u8, vec![0; q * q]), 1.0);
        }
    }
    for _ in 1..len {
        let mut next: HashMap<(u8, u8, Vec<u16>), f64> = HashMap::with_capacity(layer.len() * 2);
        for ((first, last, counts), mult) in layer {
            for t in 0..q {
                if mu.transition(last, t as u8) > 0.0 {
                    let mut c = counts.clone();
                    c[last as usize * q + t] += 1;
                    *next.entry((first, t as u8, c)).or_insert(0.0) += mult;
                }
            }
            if next.len() > budget {
                return Err(Error::Budget { what: "katok type classes", required: next.len() as u64, budget: budget as u64 });
            }
        }
        layer = next;
    }
    Ok(layer
        .into_iter()
        .map(|((first, _, counts), count)| {
            let mut lw = pi[first as usize].ln();
            for (idx, &c) in counts.iter().enumerate() {
                if c > 0 {
                    lw += c as f64 * mu.transition((idx / q) as u8, (idx % q) as u8).ln();
                }
            }
            Class { log_weight: lw, count }
        })
        .collect())
}

/// Minimal number of cylinders of length `len` whose union has measure at
/// least `1 - rho`.
pub fn minimal_cylinder_cover(mu: &MarkovMeasure, len: usize, rho: f64, budget: usize) -> Result<f64> {
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::InvalidMeasure(format!("rho must lie in [0, 1), got {rho}")));
    }
    if len == 0 {
        return Ok(1.0);
    }
    let mut classes = if is_iid(mu) { iid_classes(mu, len, budget)? } else { markov_classes(mu, len, budget)? };
    classes.sort_by(|a, b| b.log_weight.partial_cmp(&a.log_weight).unwrap());
    let target = 1.0 - rho;
    let mut mass = 0.0;
    let mut n = 0.0;
    for c in &classes {
        let w = c.log_weight.exp();
        let class_mass = w * c.count;
        if mass + class_mass >= target * (1.0 - 1e-12) {
            let need = ((target - mass) / w * (1.0 - 1e-12)).ceil().max(1.0).min(c.count);
            return Ok(n + need);
        }
        mass += class_mass;
        n += c.count;
    }
    // Rounding left the target unreachable by a hair: every cylinder is used.
    Ok(n)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KatokRow {
    pub l: usize,
    pub cover: f64,
    pub log_cover: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KatokEstimate {
    pub eps: f64,
    pub rho: f64,
    /// Balls at step `l` are cylinders of length `l + 2m`.
    pub ball_window_extra: usize,
    pub table: Vec<KatokRow>,
    /// Least-squares slope of `log N_l` against `l` over the final third.
    pub slope: f64,
    pub fit_from: usize,
    pub residual: f64,
}

/// `N_l(ε, ρ)` for `l = 1..=l_max` and the slope estimate of `h_μ(f, ε)`.
pub fn katok_entropy(mu: &MarkovMeasure, eps: f64, rho: f64, l_max: usize) -> Result<KatokEstimate> {
    katok_entropy_with_budget(mu, eps, rho, l_max, DEFAULT_CLASS_BUDGET)
}

pub fn katok_entropy_with_budget(mu: &MarkovMeasure, eps: f64, rho: f64, l_max: usize, budget: usize) -> Result<KatokEstimate> {
    if l_max < 2 {
        return Err(Error::InvalidMeasure("katok_entropy needs l_max >= 2".into()));
    }
    let res = Resolution::from_eps(eps)?;
    let extra = 2 * res.m as usize;
    let table: Vec<KatokRow> = (1..=l_max)
        .into_par_iter()
        .map(|l| {
            let cover = minimal_cylinder_cover(mu, l + extra, rho, budget)?;
            Ok(KatokRow { l, cover, log_cover: cover.ln() })
        })
        .collect::<Result<_>>()?;
    let fit_from = l_max - l_max / 3;
    let rows = &table[fit_from - 1..];
    let xs: Vec<f64> = rows.iter().map(|r| r.l as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.log_cover).collect();
    let (slope, residual) = slope_fit(&xs, &ys);
    Ok(KatokEstimate { eps, rho, ball_window_extra: extra, table, slope, fit_from, residual })
}

/// Parameters of the separated-set construction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedSetParams {
    /// Atoms of the partition have diameter below `delta / 2`.
    pub delta: f64,
    pub varsigma: f64,
    pub eps: f64,
    /// The construction uses `L = n_floor`, so `n >= n_floor`.
    pub n_floor: usize,
    pub pool_size: usize,
    pub seed: u64,
    /// Return horizon for the pool filter; defaults to `⌊(1+ς)L⌋`.
    #[serde(default)]
    pub horizon: Option<usize>,
    /// Settings for the `h_μ(f, ε)` estimate.
    #[serde(default = "default_katok_rho")]
    pub katok_rho: f64,
    #[serde(default = "default_katok_l_max")]
    pub katok_l_max: usize,
    /// The count bound is checked with `h = h_est - tolerance`; defaults to
    /// 5% of `h_est`.
    #[serde(default)]
    pub estimator_tolerance: Option<f64>,
}

fn default_katok_rho() -> f64 {
    0.1
}

fn default_katok_l_max() -> usize {
    20
}

impl SeparatedSetParams {
    pub fn new(delta: f64, varsigma: f64, eps: f64, n_floor: usize, pool_size: usize, seed: u64) -> Self {
        SeparatedSetParams {
            delta,
            varsigma,
            eps,
            n_floor,
            pool_size,
            seed,
            horizon: None,
            katok_rho: default_katok_rho(),
            katok_l_max: default_katok_l_max(),
            estimator_tolerance: None,
        }
    }
}

/// Independent re-verification of the three properties plus separation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatedSetCertificate {
    /// `f^n x ∈ Γ` for every `x ∈ E_n`.
    pub returns_to_gamma: bool,
    /// `max d(f^n x, y)` over `x, y ∈ E_n`, against `δ`.
    pub max_return_distance: f64,
    pub close_returns: bool,
    /// `(1/n) log(T* #E_n) >= h - (2 + 2ς + h) ς`.
    pub count_bound: InequalityCheck,
    /// `min d_n(x, y)` over distinct pairs, against `ε`.
    pub min_separation: f64,
    pub separated: bool,
}

impl SeparatedSetCertificate {
    pub fn passes(&self) -> bool {
        self.returns_to_gamma && self.close_returns && self.count_bound.holds && self.separated
    }
}

#[derive(Clone, Debug)]
pub struct SeparatedSet {
    pub n: usize,
    pub points: Vec<SymbolPoint>,
    pub t_star: usize,
    pub big_l: usize,
    pub partition: CylinderPartition,
    pub pool_members: usize,
    pub d_l_size: usize,
    /// `#G_l` for `l = L..=⌊(1+ς)L⌋`.
    pub g_sizes: Vec<usize>,
    pub h_estimate: f64,
    pub h_used: f64,
    pub certificate: SeparatedSetCertificate,
}

impl SeparatedSet {
    /// The words of the points on `[0, n-1]`.
    pub fn block_words(&self) -> Vec<Word> {
        self.points.iter().map(|x| x.window(0, self.n as i64 - 1)).collect()
    }
}

/// Builds `E_n` following the counting argument: a seeded pool from `μ`,
/// filtered to `Γ_{L,ς}`; a maximal `(L, ε)`-separated subset `D_L`; the
/// return classes `G_l`; the best `n` and the best atom. The result is then
/// re-verified directly.
pub fn katok_separated_sets(
    space: &ShiftSpace,
    mu: &MarkovMeasure,
    gamma: &Gamma,
    params: &SeparatedSetParams,
) -> Result<SeparatedSet> {
    let res = Resolution::from_eps(params.eps)?;
    let res_delta = Resolution::from_eps(params.delta)?;
    let big_l = params.n_floor.max(1);
    let vs = params.varsigma;
    let l_hi = ((1.0 + vs) * big_l as f64 + 1e-9).floor() as usize;
    let partition = CylinderPartition::centered(res_delta.m as usize + 1);
    let t_star = partition.cardinality(space, gamma);
    let horizon = params.horizon.unwrap_or(l_hi).max(l_hi);
    let spec = RecurrenceSetSpec { partition, gamma: gamma.clone(), s: big_l, rho: vs };

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let seeds: Vec<u64> = (0..params.pool_size).map(|_| rng.gen()).collect();
    let half = horizon + res.m as usize + partition.b as usize + 2;
    let pool: Vec<SymbolPoint> = seeds
        .par_iter()
        .map(|&s| {
            let x = mu.sample_point(half, s);
            Ok(recurrence_membership(&spec, &x, horizon)?.is_member().then_some(x))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    if pool.is_empty() {
        return Err(Error::EmptyPool(format!("no sample of {} lies in the recurrence set", params.pool_size)));
    }

    // Maximal (L, ε)-separated subset: one point per word on the separation
    // window, in lexicographic word order.
    let (a, b) = res.separation_window(big_l);
    let mut by_word: BTreeMap<Word, SymbolPoint> = BTreeMap::new();
    for x in &pool {
        by_word.entry(x.window(a, b)).or_insert_with(|| x.clone());
    }
    let d_l: Vec<(Word, SymbolPoint)> = by_word.into_iter().collect();

    let mut g_sizes = Vec::new();
    let mut g_sets: Vec<Vec<usize>> = Vec::new();
    for l in big_l..=l_hi {
        let mut g = Vec::new();
        for (i, (_, x)) in d_l.iter().enumerate() {
            let y = x.shifted(l as i64);
            if partition.key(&y) == partition.key(x) && gamma.contains(&y)? {
                g.push(i);
            }
        }
        g_sizes.push(g.len());
        g_sets.push(g);
    }
    let best = (0..g_sets.len()).max_by_key(|&i| (g_sets[i].len(), std::cmp::Reverse(i))).unwrap();
    let n = big_l + best;
    let mut atoms: BTreeMap<Word, Vec<usize>> = BTreeMap::new();
    for &i in &g_sets[best] {
        atoms.entry(partition.key(&d_l[i].1)).or_default().push(i);
    }
    // Largest atom; ties go to the lexicographically smallest atom word.
    let chosen = atoms
        .iter()
        .max_by(|p, q| p.1.len().cmp(&q.1.len()).then_with(|| q.0.cmp(p.0)))
        .map(|(_, v)| v.clone())
        .unwrap_or_default();
    if chosen.is_empty() {
        return Err(Error::EmptyPool("no point of D_L returns in [L, (1+ς)L]".into()));
    }
    let points: Vec<SymbolPoint> = chosen.iter().map(|&i| d_l[i].1.clone()).collect();

    let h_estimate = katok_entropy(mu, params.eps, params.katok_rho, params.katok_l_max)?.slope;
    let tol = params.estimator_tolerance.unwrap_or(0.05 * h_estimate.abs());
    let h_used = h_estimate - tol;
    let certificate = verify_separated_set(&points, n, t_star, gamma, params.delta, params.eps, vs, h_used)?;
    Ok(SeparatedSet {
        n,
        points,
        t_star,
        big_l,
        partition,
        pool_members: pool.len(),
        d_l_size: d_l.len(),
        g_sizes,
        h_estimate,
        h_used,
        certificate,
    })
}

/// Checks the properties of a candidate `E_n` from scratch.
#[allow(clippy::too_many_arguments)]
pub fn verify_separated_set(
    points: &[SymbolPoint],
    n: usize,
    t_star: usize,
    gamma: &Gamma,
    delta: f64,
    eps: f64,
    varsigma: f64,
    h: f64,
) -> Result<SeparatedSetCertificate> {
    let res = Resolution::from_eps(eps)?;
    let res_delta = Resolution::from_eps(delta)?;
    let mut returns_to_gamma = true;
    for x in points {
        returns_to_gamma &= gamma.contains(&x.shifted(n as i64))?;
    }
    let w_delta = window_for(res_delta);
    let mut max_return_distance: f64 = 0.0;
    let mut close_returns = true;
    for x in points {
        let fx = x.shifted(n as i64);
        for y in points {
            let d = distance(&fx, y, w_delta);
            close_returns &= d.certainly_below(delta);
            max_return_distance = max_return_distance.max(d.value);
        }
    }
    let w_eps = window_for(res);
    let mut min_separation = f64::INFINITY;
    let mut separated = true;
    for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            let d = bowen_distance(x, y, n, w_eps);
            separated &= !d.window_limited && d.value > eps;
            min_separation = min_separation.min(d.value);
        }
    }
    let lhs = h - (2.0 + 2.0 * varsigma + h) * varsigma;
    let rhs = ((t_star * points.len()) as f64).ln() / n as f64;
    Ok(SeparatedSetCertificate {
        returns_to_gamma,
        max_return_distance,
        close_returns,
        count_bound: InequalityCheck::new("h - (2 + 2ς + h)ς <= (1/n) log(T* #E_n)", lhs, rhs, 0.0),
        min_separation,
        separated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn uniform_cover_is_a_fraction_of_all_cylinders() {
        let mu = fixtures::bernoulli(0.5);
        for len in [3, 10, 12] {
            let n = minimal_cylinder_cover(&mu, len, 0.1, DEFAULT_CLASS_BUDGET).unwrap();
            assert_eq!(n, (0.9 * 2f64.powi(len as i32)).ceil());
        }
    }

    #[test]
    fn class_greedy_matches_sorted_cylinders() {
        // Oracle: sort all 2^len cylinder weights and take the heaviest.
        let golden = MarkovMeasure::parry(&fixtures::golden_mean()).unwrap();
        for mu in [fixtures::bernoulli(0.1), fixtures::bernoulli(0.3), golden] {
            for len in [1, 4, 9, 13] {
                let mut ws: Vec<f64> = (0..1u32 << len)
                    .map(|bits| {
                        let w: Vec<u8> = (0..len).map(|i| ((bits >> i) & 1) as u8).collect();
                        mu.cylinder_weight(&w)
                    })
                    .collect();
                ws.sort_by(|a, b| b.partial_cmp(a).unwrap());
                let (mut acc, mut k) = (0.0, 0);
                while acc < 0.9 * (1.0 - 1e-12) {
                    acc += ws[k];
                    k += 1;
                }
                let n = minimal_cylinder_cover(&mu, len, 0.1, DEFAULT_CLASS_BUDGET).unwrap();
                assert_eq!(n, k as f64, "len {len}");
            }
        }
    }

    #[test]
    fn point_mass_has_zero_entropy() {
        let e = katok_entropy(&fixtures::delta(0), 0.5, 0.1, 12).unwrap();
        assert!(e.table.iter().all(|r| r.cover == 1.0));
        assert_eq!(e.slope, 0.0);
    }

    #[test]
    fn trivial_partition_case() {
        // δ = 1 with Γ = X: atoms are cylinders on [-1, 1].
        let space = fixtures::full_shift();
        let mu = fixtures::bernoulli(0.5);
        let p = SeparatedSetParams::new(1.0, 0.1, 0.5, 10, 1024, 7);
        let e = katok_separated_sets(&space, &mu, &Gamma::Whole, &p).unwrap();
        assert_eq!(e.t_star, 8);
        assert!(e.certificate.passes(), "{:?}", e.certificate);
        assert!(e.n >= 10 && e.n <= 11);
    }
}
