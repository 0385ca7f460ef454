//! Finite-depth estimators for topological, Bowen–Hausdorff, packing and
//! local entropies on shift spaces.
//!
//! At a dyadic radius `2^{-m}` every Bowen ball is a cylinder, so each
//! estimator works on the tree of cylinders read from a point family: the
//! nodes at scale `u` are the distinct words on `[-r, u - 1 + r]`. Open balls
//! of radius `2^{-m}` use `r = m`; closed balls and separation at `2^{-m}`
//! use `r = m - 1`. An open ball of radius `2ε` is the closed ball of radius
//! `ε`, which is how resolutions are matched in [`relation_check`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::MarkovMeasure;
use crate::report::{final_third, slope_fit, InequalityCheck};
use crate::shift_space::{Resolution, ShiftSpace, SymbolPoint, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyNotion {
    BowenSeparated,
    BowenHausdorff,
    Packing,
    Katok,
    LocalLower,
    LocalUpper,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerBound,
    UpperBound,
    TwoSided,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyRow {
    pub n: usize,
    /// Count or `-log` mass at depth `n`.
    pub raw: f64,
    /// Running estimate `raw / n` (log of the count for counts).
    pub estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyEstimate {
    pub notion: EntropyNotion,
    pub value: f64,
    pub eps: f64,
    pub horizon: usize,
    pub direction: Direction,
    /// Finite-depth truncation allowance attached to `value`.
    pub slack: f64,
    pub fit_from: Option<usize>,
    /// `C(E; t, n0, σ)` or `P^s_{N0, ε}(E)` at the requested exponent.
    pub weight: Option<f64>,
    /// `[lower, upper]` when both sides are known.
    pub bracket: Option<[f64; 2]>,
    pub table: Vec<EntropyRow>,
}

/// A set to estimate: the whole SFT or an enumerated family of points.
#[derive(Clone, Debug)]
pub enum PointFamily {
    Whole(ShiftSpace),
    Points(Vec<SymbolPoint>),
}

impl PointFamily {
    /// `x, f x, …, f^{len-1} x`.
    pub fn orbit(x: &SymbolPoint, len: usize) -> Self {
        PointFamily::Points((0..len as i64).map(|i| x.shifted(i)).collect())
    }

    /// The orbit of the periodic point with the given period word.
    pub fn periodic_orbit(word: &[u8]) -> Result<Self> {
        let x = SymbolPoint::periodic(word)?;
        Ok(Self::orbit(&x, word.len()))
    }

    /// The whole SFT, or a finite family closed under the shift.
    pub fn is_invariant_compact(&self) -> bool {
        match self {
            PointFamily::Whole(_) => true,
            PointFamily::Points(pts) => pts.iter().all(|x| {
                let fx = x.shifted(1);
                pts.iter().any(|y| y.same_as(&fx))
            }),
        }
    }
}

/// The cylinder tree of a family between scales `u0` and `horizon`.
enum Tree {
    /// `counts[u - u0][s]`: log-number of words of length `u + 2r` ending in
    /// `s`.
    Whole { space: ShiftSpace, log_counts: Vec<Vec<f64>> },
    /// Sorted distinct words on `[-r, horizon - 1 + r]`.
    Finite { words: Vec<Word> },
}

struct CylinderTree {
    tree: Tree,
    r: usize,
    u0: usize,
    horizon: usize,
}

fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

impl CylinderTree {
    fn new(family: &PointFamily, r: usize, u0: usize, horizon: usize) -> Result<Self> {
        if u0 == 0 || u0 > horizon {
            return Err(Error::InvalidScheme(format!("scales {u0}..={horizon} must satisfy 1 <= n0 <= horizon")));
        }
        let tree = match family {
            PointFamily::Whole(space) => {
                let q = space.alphabet_size();
                // Log-counts of admissible words of length L ending in s.
                let mut cur = vec![0.0f64; q];
                let mut log_counts = Vec::with_capacity(horizon - u0 + 1);
                let first_len = u0 + 2 * r;
                for len in 1..=(horizon + 2 * r) {
                    if len > 1 {
                        let mut next = vec![f64::NEG_INFINITY; q];
                        for (a, &ca) in cur.iter().enumerate() {
                            for (b, nb) in next.iter_mut().enumerate() {
                                if space.allowed(a as u8, b as u8) {
                                    *nb = log_add(*nb, ca);
                                }
                            }
                        }
                        cur = next;
                    }
                    if len >= first_len {
                        log_counts.push(cur.clone());
                    }
                }
                Tree::Whole { space: space.clone(), log_counts }
            }
            PointFamily::Points(points) => {
                if points.is_empty() {
                    return Err(Error::EmptyPool("empty point family".into()));
                }
                let mut words: Vec<Word> =
                    points.iter().map(|x| x.window(-(r as i64), (horizon + r) as i64 - 1)).collect();
                words.sort();
                words.dedup();
                Tree::Finite { words }
            }
        };
        Ok(CylinderTree { tree, r, u0, horizon })
    }

    /// Log of the number of nodes at scale `u`.
    fn log_count(&self, u: usize) -> f64 {
        match &self.tree {
            Tree::Whole { log_counts, .. } => {
                log_counts[u - self.u0].iter().fold(f64::NEG_INFINITY, |acc, &c| log_add(acc, c))
            }
            Tree::Finite { words } => {
                let len = u + 2 * self.r;
                let distinct = 1 + words.windows(2).filter(|p| p[0][..len] != p[1][..len]).count();
                (distinct as f64).ln()
            }
        }
    }

    /// Log-weight of the cheapest cut of the tree (a cover by balls of
    /// scales in `[u0, horizon]`) with node weight `e^{-t u}`.
    fn optimal_cover(&self, t: f64) -> f64 {
        match &self.tree {
            Tree::Whole { space, log_counts } => {
                let q = space.alphabet_size();
                let mut val = vec![-t * self.horizon as f64; q];
                for u in (self.u0..self.horizon).rev() {
                    let own = -t * u as f64;
                    val = (0..q)
                        .map(|s| {
                            let kids = (0..q)
                                .filter(|&c| space.allowed(s as u8, c as u8))
                                .fold(f64::NEG_INFINITY, |acc, c| log_add(acc, val[c]));
                            own.min(kids)
                        })
                        .collect();
                }
                (0..q).fold(f64::NEG_INFINITY, |acc, s| log_add(acc, log_counts[0][s] + val[s]))
            }
            Tree::Finite { words } => {
                let start = self.u0 + 2 * self.r;
                let mut total = f64::NEG_INFINITY;
                for (lo, hi) in groups(words, 0, words.len(), start) {
                    total = log_add(total, self.node(words, lo, hi, self.u0, t));
                }
                total
            }
        }
    }

    fn node(&self, words: &[Word], lo: usize, hi: usize, u: usize, t: f64) -> f64 {
        let own = -t * u as f64;
        if u == self.horizon {
            return own;
        }
        let len = u + 1 + 2 * self.r;
        let mut kids = f64::NEG_INFINITY;
        for (a, b) in groups(words, lo, hi, len) {
            kids = log_add(kids, self.node(words, a, b, u + 1, t));
        }
        own.min(kids)
    }

    /// The exponent at which the cheapest cover weighs 1.
    fn critical_cover(&self) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while self.optimal_cover(hi) > 0.0 {
            hi *= 2.0;
            if hi > 1e6 {
                break;
            }
        }
        if self.optimal_cover(lo) <= 0.0 {
            return 0.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if self.optimal_cover(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    }
}

/// Contiguous runs of `words[lo..hi]` sharing their first `len` symbols.
fn groups(words: &[Word], lo: usize, hi: usize, len: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut a = lo;
    for i in lo + 1..=hi {
        if i == hi || words[i][..len] != words[a][..len] {
            out.push((a, i));
            a = i;
        }
    }
    out
}

/// `min` and `max` of `(1/u) log N_u` over the tree's scales.
fn rate_range(table: &[EntropyRow]) -> (f64, f64) {
    table.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r.estimate), hi.max(r.estimate)))
}

fn count_table(tree: &CylinderTree) -> Vec<EntropyRow> {
    (tree.u0..=tree.horizon)
        .map(|n| {
            let lc = tree.log_count(n);
            EntropyRow { n, raw: lc.exp(), estimate: lc / n as f64 }
        })
        .collect()
}

/// `s_n(E, ε)`: the size of a maximal `(n, ε)`-separated subset.
pub fn separated_count(family: &PointFamily, n: usize, eps: f64) -> Result<f64> {
    let m = Resolution::from_eps(eps)?.m as i64;
    match family {
        PointFamily::Whole(space) => {
            let len = (n as i64 + 2 * m - 2).max(0) as usize;
            Ok(space.word_counts(len)[len])
        }
        PointFamily::Points(points) => {
            let mut words: Vec<Word> = points.iter().map(|x| x.window(1 - m, n as i64 + m - 2)).collect();
            words.sort();
            words.dedup();
            Ok(words.len() as f64)
        }
    }
}

/// `r_n(E, ε)`: the size of a minimal `(n, ε)`-spanning subset (every point
/// of `E` within `d_n <= ε` of a member), built greedily.
pub fn spanning_count(family: &PointFamily, n: usize, eps: f64) -> Result<f64> {
    let m = Resolution::from_eps(eps)?.m as i64;
    match family {
        PointFamily::Whole(space) => {
            let len = (n as i64 + 2 * m - 2).max(0) as usize;
            Ok(space.word_counts(len)[len])
        }
        PointFamily::Points(points) => {
            let mut centers: Vec<Word> = Vec::new();
            for x in points {
                let w = x.window(1 - m, n as i64 + m - 2);
                // d_n(x, c) <= 2^{-m} exactly when the words agree.
                if !centers.contains(&w) {
                    centers.push(w);
                }
            }
            Ok(centers.len() as f64)
        }
    }
}

/// `lim (1/n) log s_n(E, ε)` by a least-squares slope over the final third
/// of `n <= n_max`; the slack is the largest gap between the running
/// estimate and the slope there.
pub fn topological_entropy(family: &PointFamily, n_max: usize, eps: f64) -> Result<EntropyEstimate> {
    let m = Resolution::from_eps(eps)?.m as usize;
    let tree = CylinderTree::new(family, m.saturating_sub(1), 1, n_max.max(1))?;
    let table = count_table(&tree);
    let fit = final_third(1, n_max.max(1));
    let rows: Vec<&EntropyRow> = table.iter().filter(|r| fit.contains(&r.n)).collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.estimate * r.n as f64).collect();
    let (slope, _) = if xs.len() >= 2 { slope_fit(&xs, &ys) } else { (ys[0] / xs[0], 0.0) };
    let value = slope.max(0.0);
    let slack = rows.iter().map(|r| (r.estimate - value).abs()).fold(0.0, f64::max);
    Ok(EntropyEstimate {
        notion: EntropyNotion::BowenSeparated,
        value,
        eps,
        horizon: n_max,
        direction: Direction::TwoSided,
        slack,
        fit_from: Some(*fit.start()),
        weight: None,
        bracket: None,
        table,
    })
}

/// Carathéodory sums over covers by open balls `B_u(x, σ)`,
/// `n0 <= u <= horizon`, mixing scales freely. `weight` is the optimal cover
/// weight `C(E; t, n0, σ)`; `value` is the exponent at which it reaches 1,
/// an upper estimate for `h^B(E, σ)`. The slack is the distance to the
/// largest single-scale rate `(1/u) log N_u`.
pub fn bowen_hausdorff_estimate(
    family: &PointFamily,
    t: f64,
    n0: usize,
    sigma: f64,
    horizon: usize,
) -> Result<EntropyEstimate> {
    let m = Resolution::from_eps(sigma)?.m as usize;
    let tree = CylinderTree::new(family, m, n0, horizon)?;
    let value = tree.critical_cover();
    let table = count_table(&tree);
    let (lo, hi) = rate_range(&table);
    Ok(EntropyEstimate {
        notion: EntropyNotion::BowenHausdorff,
        value,
        eps: sigma,
        horizon,
        direction: Direction::UpperBound,
        slack: (hi - value).max(0.0),
        fit_from: Some(n0),
        weight: Some(tree.optimal_cover(t).exp()),
        bracket: Some([value.min(lo), hi]),
        table,
    })
}

/// Sums over explicit disjoint families of closed balls `B̄_n(x_i, ε)`
/// centered in `E`, one family per scale `n0 <= n <= horizon` (the distinct
/// cylinders at that scale). `weight` is the best `D_n e^{-s n}`, a lower
/// bound for `P^s_{n0, ε}(E)`; `value` is the largest `s` with weight at
/// least 1, and the slack is its distance to the smallest single-scale rate.
pub fn packing_estimate(family: &PointFamily, s: f64, n0: usize, eps: f64, horizon: usize) -> Result<EntropyEstimate> {
    let m = Resolution::from_eps(eps)?.m as usize;
    let tree = CylinderTree::new(family, m.saturating_sub(1), n0, horizon)?;
    let table = count_table(&tree);
    let (lo, hi) = rate_range(&table);
    let weight = table.iter().map(|r| r.estimate * r.n as f64 - s * r.n as f64).fold(f64::NEG_INFINITY, f64::max).exp();
    Ok(EntropyEstimate {
        notion: EntropyNotion::Packing,
        value: hi,
        eps,
        horizon,
        direction: Direction::LowerBound,
        slack: hi - lo,
        fit_from: Some(n0),
        weight: Some(weight),
        bracket: Some([lo, hi]),
        table,
    })
}

/// `min_{n0 <= u <= horizon} -(1/u) log max_x μ(B_u(x, σ))`: every ball
/// then has `μ(B_u) <= e^{-s u}`, so `s` is a lower bound for `h^B` of the
/// whole space at radius `σ` over that range.
pub fn whole_space_mass_bound(mu: &MarkovMeasure, sigma: f64, n0: usize, horizon: usize) -> Result<f64> {
    let r = Resolution::from_eps(sigma)?.m as usize;
    let q = mu.alphabet_size();
    // Viterbi: best log-weight of a word of length L ending in s.
    let mut best: Vec<f64> = (0..q).map(|s| mu.stationary()[s].ln()).collect();
    let mut out = f64::INFINITY;
    for len in 1..=(horizon + 2 * r) {
        if len > 1 {
            best = (0..q)
                .map(|b| (0..q).map(|a| best[a] + mu.transition(a as u8, b as u8).ln()).fold(f64::NEG_INFINITY, f64::max))
                .collect();
        }
        if len >= n0 + 2 * r {
            let u = len - 2 * r;
            let top = best.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            out = out.min(-top / u as f64);
        }
    }
    Ok(out)
}

/// `-(1/n) log μ(B_n(x, ε))` from exact cylinder weights, `n = 1..=n_max`,
/// with the running minimum and maximum over the final third as the lower
/// and upper local entropies.
pub fn local_entropy(
    mu: &MarkovMeasure,
    x: &SymbolPoint,
    eps: f64,
    n_max: usize,
) -> Result<(EntropyEstimate, EntropyEstimate)> {
    if n_max == 0 {
        return Err(Error::InvalidMeasure("local_entropy needs n_max >= 1".into()));
    }
    let m = Resolution::from_eps(eps)?.m as i64;
    let w = x.window(-m, n_max as i64 - 1 + m);
    // prefix[i]: log-weight of w[..=i].
    let mut prefix = Vec::with_capacity(w.len());
    prefix.push(mu.stationary()[w[0] as usize].ln());
    for pair in w.windows(2) {
        prefix.push(prefix[prefix.len() - 1] + mu.transition(pair[0], pair[1]).ln());
    }
    let table: Vec<EntropyRow> = (1..=n_max)
        .map(|n| {
            let raw = -prefix[n + 2 * m as usize - 1];
            EntropyRow { n, raw, estimate: raw / n as f64 }
        })
        .collect();
    let fit = final_third(1, n_max);
    let tail: Vec<f64> = table.iter().filter(|r| fit.contains(&r.n)).map(|r| r.estimate).collect();
    let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mk = |notion, value, direction| EntropyEstimate {
        notion,
        value,
        eps,
        horizon: n_max,
        direction,
        slack: hi - lo,
        fit_from: Some(*fit.start()),
        weight: None,
        bracket: Some([lo, hi]),
        table: table.clone(),
    };
    Ok((mk(EntropyNotion::LocalLower, lo, Direction::TwoSided), mk(EntropyNotion::LocalUpper, hi, Direction::TwoSided)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub bowen_hausdorff: f64,
    pub packing: f64,
    pub topological: f64,
    pub checks: Vec<InequalityCheck>,
    pub invariant: bool,
    pub holds: bool,
}

/// `h^B <= h^P <= h_top` within slacks, and pairwise agreement on invariant
/// compact sets. The three estimates must share the resolution, with the
/// Bowen–Hausdorff one taken at `σ = 2ε`.
pub fn relation_check(
    invariant: bool,
    bh: &EntropyEstimate,
    packing: &EntropyEstimate,
    top: &EntropyEstimate,
) -> Result<RelationReport> {
    if (bh.eps - 2.0 * packing.eps).abs() > 1e-15 || (packing.eps - top.eps).abs() > 1e-15 {
        return Err(Error::InvalidScheme(format!(
            "unmatched resolutions: sigma = {}, eps = {}, {}",
            bh.eps, packing.eps, top.eps
        )));
    }
    let tol = 1e-9;
    let mut checks = vec![
        InequalityCheck::new("h^B <= h^P", bh.value - bh.slack, packing.value + packing.slack, tol),
        InequalityCheck::new("h^P <= h_top", packing.value - packing.slack, top.value + top.slack, tol),
    ];
    if invariant {
        let all = [bh, packing, top];
        for i in 0..3 {
            for j in i + 1..3 {
                checks.push(InequalityCheck::new(
                    format!("|{:?} - {:?}| within slack", all[i].notion, all[j].notion),
                    (all[i].value - all[j].value).abs(),
                    all[i].slack + all[j].slack,
                    tol,
                ));
            }
        }
    }
    let holds = checks.iter().all(|c| c.holds);
    Ok(RelationReport {
        bowen_hausdorff: bh.value,
        packing: packing.value,
        topological: top.value,
        checks,
        invariant,
        holds,
    })
}

/// The three estimates at resolution `ε` over the final third of depths up
/// to `horizon`, and their relation check.
pub fn entropy_suite(family: &PointFamily, eps: f64, horizon: usize) -> Result<RelationReport> {
    let top = topological_entropy(family, horizon, eps)?;
    let n0 = top.fit_from.unwrap_or(1);
    let bh = bowen_hausdorff_estimate(family, top.value, n0, 2.0 * eps, horizon)?;
    let pk = packing_estimate(family, top.value, n0, eps, horizon)?;
    relation_check(family.is_invariant_compact(), &bh, &pk, &top)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    const LN2: f64 = std::f64::consts::LN_2;

    #[test]
    fn full_shift_is_log_two_at_every_depth() {
        let fam = PointFamily::Whole(fixtures::full_shift());
        let e = topological_entropy(&fam, 24, 0.5).unwrap();
        assert!(e.table.iter().all(|r| (r.estimate - LN2).abs() < 1e-12));
        assert!((e.value - LN2).abs() < 1e-12);
        let bh = bowen_hausdorff_estimate(&fam, 0.5, 16, 1.0, 24).unwrap();
        assert!((bh.value - LN2).abs() < 1e-9, "{}", bh.value);
        let pk = packing_estimate(&fam, 0.5, 16, 0.5, 24).unwrap();
        assert!((pk.value - LN2).abs() < 1e-9, "{}", pk.value);
        // s < log 2: the disjoint family at the horizon already weighs 2^24 e^{-24 s}.
        assert!(pk.weight.unwrap() >= (24.0 * (LN2 - 0.5)).exp() * (1.0 - 1e-12));
        let hi = packing_estimate(&fam, 1.0, 16, 0.5, 24).unwrap();
        // s > log 2: the coarsest admissible scale is optimal.
        assert!((hi.weight.unwrap() - (16.0 * (LN2 - 1.0)).exp()).abs() < 1e-12);
    }

    #[test]
    fn golden_mean_slope() {
        let fam = PointFamily::Whole(fixtures::golden_mean());
        let e = topological_entropy(&fam, 24, 0.5).unwrap();
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((e.value - phi.ln()).abs() < 0.02 * phi.ln());
        assert!((e.value - fixtures::golden_mean().spectral_radius().ln()).abs() < 0.02 * phi.ln());
    }

    #[test]
    fn periodic_orbit_has_zero_entropy() {
        let fam = PointFamily::periodic_orbit(&[0, 0, 1]).unwrap();
        let e = topological_entropy(&fam, 30, 0.25).unwrap();
        assert!(e.value.abs() < 1e-12);
        let pk = packing_estimate(&fam, 0.1, 20, 0.25, 30).unwrap();
        assert!(pk.value <= 3f64.ln() / 20.0 + 1e-9);
    }

    #[test]
    fn single_orbit_cover_weight_vanishes() {
        let x = fixtures::bernoulli(0.5).sample_point(10, 5);
        let fam = PointFamily::orbit(&x, 50);
        let mut last = f64::INFINITY;
        for h in [50, 100, 200] {
            let bh = bowen_hausdorff_estimate(&fam, 0.05, 10, 0.5, h).unwrap();
            assert!(bh.weight.unwrap() <= 50.0 * (-0.05 * h as f64).exp() * (1.0 + 1e-12));
            assert!(bh.value <= last);
            last = bh.value;
        }
        assert!(last < 0.02);
    }

    #[test]
    fn whole_space_bracket_contains_log_two() {
        let fam = PointFamily::Whole(fixtures::full_shift());
        let up = bowen_hausdorff_estimate(&fam, LN2, 8, 1.0, 24).unwrap().value;
        let lo = whole_space_mass_bound(&fixtures::bernoulli(0.5), 1.0, 8, 24).unwrap();
        assert!(lo <= LN2 + 1e-12 && LN2 <= up + 1e-9);
    }

    #[test]
    fn local_entropy_examples() {
        let mu = fixtures::bernoulli(0.5);
        let x = mu.sample_point(10, 2);
        let (lo, hi) = local_entropy(&mu, &x, 0.5, 60).unwrap();
        // μ(B_n(x, 1/2)) = 2^{-(n+2)}.
        for r in &lo.table {
            assert!((r.raw - (r.n + 2) as f64 * LN2).abs() < 1e-9);
        }
        assert!(lo.value <= hi.value);
        let (lo, _) = local_entropy(&fixtures::delta(0), &SymbolPoint::constant(0), 0.5, 50).unwrap();
        assert!(lo.value.abs() < 1e-12);
    }

    #[test]
    fn spanning_and_separated_compare() {
        let x = fixtures::bernoulli(0.3).sample_point(10, 9);
        let fam = PointFamily::orbit(&x, 200);
        for n in [1, 5, 12] {
            for eps in [0.5, 0.25] {
                let r = spanning_count(&fam, n, eps).unwrap();
                let s = separated_count(&fam, n, eps).unwrap();
                let r2 = spanning_count(&fam, n, eps / 2.0).unwrap();
                assert!(r <= s && s <= r2, "{r} {s} {r2}");
            }
        }
    }
}
