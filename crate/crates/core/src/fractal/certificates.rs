//! Finite-depth certificates for a built scheme: divergence at the
//! checkpoints, exact ball masses of the atomic measures `ω_k`, and the
//! entropy lower bounds they imply.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scheme::{construct_point, FractalScheme, SchemeMode};
use crate::cocycle::{CocycleSpec, LyapunovReport};
use crate::error::{Error, Result};
use crate::report::InequalityCheck;
use crate::shadowing::{verify_shadowing, ShadowingParams};
use crate::shift_space::{bowen_distance, Resolution, SymbolPoint, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Irregularity {
    MlIrregular,
    NotIrregular,
    /// Fewer than one checkpoint of each parity.
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub report: LyapunovReport,
    /// `(kN + |t_k - N_k n_k|)/t_k · log C` per checkpoint.
    pub slack: Vec<f64>,
    /// `a - 3ε - slack <= value` for odd `k`, `value <= b + 2ε + slack` for
    /// even `k`.
    pub checks: Vec<InequalityCheck>,
    pub odd_floor: Option<f64>,
    pub even_ceiling: Option<f64>,
    pub verdict: Irregularity,
}

impl DivergenceReport {
    pub fn gap(&self) -> Option<f64> {
        Some(self.odd_floor? - self.even_ceiling?)
    }
}

/// `(1/t_k) log ‖A(p, t_k)‖` for `k = 1..=K` with the two-sided checks.
pub fn divergence_checkpoints(
    cocycle: &CocycleSpec,
    p: &SymbolPoint,
    scheme: &FractalScheme,
    k_max: usize,
) -> Result<DivergenceReport> {
    if k_max > scheme.depth() {
        return Err(Error::InvalidScheme(format!("K = {k_max} beyond realized depth {}", scheme.depth())));
    }
    let ts: Vec<usize> = scheme.checkpoints[..k_max].to_vec();
    let report = cocycle.mle_report(p, &ts, p.provenance().unwrap_or("scheme point"))?;
    let par = &scheme.params;
    let log_c = cocycle.bound().ln();
    let big_n = par.mixing_gap as f64;
    let mut slack = Vec::with_capacity(k_max);
    let mut checks = Vec::with_capacity(k_max);
    let (mut odd, mut even): (Option<f64>, Option<f64>) = (None, None);
    for (i, (&t, &v)) in ts.iter().zip(&report.values).enumerate() {
        let k = i + 1;
        let level = scheme.level(k);
        let main = (level.repeats * level.n) as f64;
        let s = (k as f64 * big_n + (t as f64 - main).abs()) / t as f64 * log_c;
        slack.push(s);
        if k % 2 == 1 {
            checks.push(InequalityCheck::new(format!("a - 3ε - slack <= χ(t_{k})"), par.a - 3.0 * par.epsilon - s, v, 1e-12));
            odd = Some(odd.map_or(v, |o: f64| o.min(v)));
        } else {
            checks.push(InequalityCheck::new(format!("χ(t_{k}) <= b + 2ε + slack"), v, par.b + 2.0 * par.epsilon + s, 1e-12));
            even = Some(even.map_or(v, |e: f64| e.max(v)));
        }
    }
    let verdict = match (odd, even) {
        (Some(o), Some(e)) if o > e => Irregularity::MlIrregular,
        (Some(_), Some(_)) => Irregularity::NotIrregular,
        _ => Irregularity::Undetermined,
    };
    Ok(DivergenceReport { report, slack, checks, odd_floor: odd, even_ceiling: even, verdict })
}

/// All points of `T_k`, with their coordinates on `[-r, t_k - 1 + r]`.
#[derive(Clone, Debug)]
pub struct SchemeEnumeration {
    pub depth: usize,
    pub radius: usize,
    pub choices: Vec<Vec<Vec<usize>>>,
    pub points: Vec<SymbolPoint>,
    pub windows: Vec<Word>,
}

impl SchemeEnumeration {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    fn offset(&self) -> i64 {
        -(self.radius as i64)
    }
}

/// Enumerates `T_k` exactly, reading `r` coordinates beyond `[0, t_k)`.
pub fn enumerate_points(scheme: &FractalScheme, k: usize, r: usize, budget: u64) -> Result<SchemeEnumeration> {
    if k == 0 || k > scheme.depth() {
        return Err(Error::InvalidScheme(format!("depth {k} outside 1..={}", scheme.depth())));
    }
    let count = scheme.point_count(k).filter(|&c| c <= budget).ok_or(Error::Budget {
        what: "#T_k",
        required: scheme.log_point_count(k).exp().min(u64::MAX as f64) as u64,
        budget,
    })?;
    let t = scheme.t(k) as i64;
    let rows = (0..count)
        .into_par_iter()
        .map(|idx| {
            let c = scheme.choices_at(k, idx);
            let z = construct_point(scheme, &c)?;
            let w = z.window(-(r as i64), t - 1 + r as i64);
            Ok((c, z, w))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut e = SchemeEnumeration { depth: k, radius: r, choices: Vec::new(), points: Vec::new(), windows: Vec::new() };
    for (c, z, w) in rows {
        e.choices.push(c);
        e.points.push(z);
        e.windows.push(w);
    }
    Ok(e)
}

/// `#{z : d_n(z, q) < 2^{-m}}` for every `n` at once: entry `n` counts points
/// agreeing with `qw` on `[-m, n - 1 + m]`.
fn ball_counts(e: &SchemeEnumeration, qw: &[u8], m: usize, n_max: usize) -> Vec<usize> {
    let off = e.radius - m;
    let mut counts = vec![0usize; n_max + 1];
    for zw in &e.windows {
        if zw[off..off + m] != qw[off..off + m] {
            continue;
        }
        // Largest n with agreement on [0, n - 1 + m].
        let base = off + m;
        let agree = zw[base..].iter().zip(&qw[base..]).take_while(|(a, b)| a == b).count();
        let reach = agree.saturating_sub(m).min(n_max);
        for c in &mut counts[..=reach] {
            *c += 1;
        }
    }
    counts
}

/// Position of `n` in the scheme: `t_k <= n < t_{k+1}`, and `j` with
/// `t_k + j n_{k+1} <= n < t_k + (j+1) n_{k+1}` (so `j = N_{k+1}` past the
/// last block); the bridge zone `t_{k+1} - N <= n` uses `j = N_{k+1} - 1`.
fn locate(scheme: &FractalScheme, n: usize) -> Option<(usize, usize, bool)> {
    let k = (0..scheme.depth()).find(|&k| scheme.t(k) <= n && n < scheme.t(k + 1))?;
    let next = scheme.level(k + 1);
    let bridge_zone = n + scheme.params.mixing_gap >= scheme.t(k + 1);
    let j = if bridge_zone { next.repeats - 1 } else { (n - scheme.t(k)) / next.n };
    Some((k, j, bridge_zone))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallBound {
    pub k: usize,
    pub p_extra: usize,
    pub n: usize,
    pub j: usize,
    pub bridge_zone: bool,
    pub mass: f64,
    /// `(#T_k)^{-1} (#S_{k+1})^{-j}`.
    pub level_bound: f64,
    /// `exp(-n (h* - 5γ))`, present when the count certificates hold.
    pub exp_bound: Option<f64>,
    pub holds: bool,
}

fn level_bound(scheme: &FractalScheme, k: usize, j: usize) -> f64 {
    let s_next = scheme.level(k + 1).blocks.len() as f64;
    (-scheme.log_point_count(k) - j as f64 * s_next.ln()).exp()
}

/// `ω_{k+p}(B_n(q, eps))` by exact enumeration of `T_{k+p}`, with the level
/// bound. Requires `t_k <= n < t_{k+1}` and `p >= 1`.
pub fn omega_ball_bound(
    scheme: &FractalScheme,
    k: usize,
    p_extra: usize,
    q: &SymbolPoint,
    n: usize,
    eps: f64,
    budget: u64,
) -> Result<BallBound> {
    let m = Resolution::from_eps(eps)?.m as usize;
    let e = enumerate_points(scheme, k + p_extra, m, budget)?;
    omega_ball_bound_on(scheme, &e, k, q, n, eps)
}

/// As [`omega_ball_bound`] on a precomputed enumeration.
pub fn omega_ball_bound_on(
    scheme: &FractalScheme,
    e: &SchemeEnumeration,
    k: usize,
    q: &SymbolPoint,
    n: usize,
    eps: f64,
) -> Result<BallBound> {
    let m = Resolution::from_eps(eps)?.m as usize;
    if m > e.radius {
        return Err(Error::InvalidScheme(format!("enumeration window {} below ball radius 2^-{m}", e.radius)));
    }
    let (k_found, j, bridge_zone) =
        locate(scheme, n).ok_or_else(|| Error::InvalidScheme(format!("n = {n} beyond t_K = {}", scheme.t(scheme.depth()))))?;
    if k_found != k || e.depth <= k {
        return Err(Error::InvalidScheme(format!(
            "n = {n} lies in [t_{k_found}, t_{}), enumeration depth {}",
            k_found + 1,
            e.depth
        )));
    }
    if n + m > scheme.t(e.depth) + e.radius {
        return Err(Error::InvalidScheme("enumeration window too short for n".into()));
    }
    let qw = q.window(e.offset(), scheme.t(e.depth) as i64 - 1 + e.radius as i64);
    let counts = ball_counts(e, &qw, m, n);
    Ok(ball_row(scheme, k, e.depth - k, n, j, bridge_zone, counts[n] as f64 / e.len() as f64))
}

fn ball_row(scheme: &FractalScheme, k: usize, p_extra: usize, n: usize, j: usize, bridge_zone: bool, mass: f64) -> BallBound {
    let lb = level_bound(scheme, k, j);
    let par = &scheme.params;
    let exp_bound = scheme.counts_hold().then(|| (-(n as f64) * (par.h_star - 5.0 * par.gamma)).exp());
    let tol = 1e-12;
    let holds = mass <= lb * (1.0 + tol) && exp_bound.map_or(true, |b| mass <= b * (1.0 + tol));
    BallBound { k, p_extra, n, j, bridge_zone, mass, level_bound: lb, exp_bound, holds }
}

/// Every ball `B_n(q, eps)` with `q ∈ T_K` and `1 <= n < t_K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSweep {
    pub depth: usize,
    pub eps: f64,
    pub balls: usize,
    pub level_violations: usize,
    pub exp_violations: usize,
    pub exp_checked: bool,
    /// Largest `mass / level_bound` and `mass / exp_bound`.
    pub worst_level_ratio: f64,
    pub worst_exp_ratio: f64,
    pub worst_exp_n: usize,
    pub first_violation: Option<BallBound>,
}

pub fn ball_sweep(scheme: &FractalScheme, e: &SchemeEnumeration, eps: f64, n_from: usize) -> Result<BallSweep> {
    let m = Resolution::from_eps(eps)?.m as usize;
    if m > e.radius {
        return Err(Error::InvalidScheme(format!("enumeration window {} below ball radius 2^-{m}", e.radius)));
    }
    let t_end = scheme.t(e.depth);
    let p = &scheme.params;
    let s = p.h_star - 5.0 * p.gamma;
    let rows: Vec<Vec<BallBound>> = e
        .windows
        .par_iter()
        .map(|qw| {
            let counts = ball_counts(e, qw, m, t_end);
            (n_from.max(1)..t_end)
                .filter_map(|n| {
                    let (k, j, bz) = locate(scheme, n)?;
                    Some(ball_row(scheme, k, e.depth - k, n, j, bz, counts[n] as f64 / e.len() as f64))
                })
                .collect()
        })
        .collect();
    let mut out = BallSweep {
        depth: e.depth,
        eps,
        balls: 0,
        level_violations: 0,
        exp_violations: 0,
        exp_checked: scheme.counts_hold(),
        worst_level_ratio: 0.0,
        worst_exp_ratio: 0.0,
        worst_exp_n: 0,
        first_violation: None,
    };
    for b in rows.into_iter().flatten() {
        out.balls += 1;
        let lr = b.mass / b.level_bound;
        out.worst_level_ratio = out.worst_level_ratio.max(lr);
        if lr > 1.0 + 1e-12 {
            out.level_violations += 1;
        }
        let er = b.mass / (-(b.n as f64) * s).exp();
        if er > out.worst_exp_ratio {
            out.worst_exp_ratio = er;
            out.worst_exp_n = b.n;
        }
        if out.exp_checked && er > 1.0 + 1e-12 {
            out.exp_violations += 1;
        }
        if !b.holds && out.first_violation.is_none() {
            out.first_violation = Some(b);
        }
    }
    Ok(out)
}

/// Pairwise `d_{t_K}(z, z') > 2 eps` on `T_K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Distinctness {
    pub points: usize,
    pub expected: f64,
    pub min_distance: f64,
    pub threshold: f64,
    pub holds: bool,
}

pub fn distinctness(scheme: &FractalScheme, e: &SchemeEnumeration, eps: f64) -> Result<Distinctness> {
    let m = Resolution::from_eps(eps)?.m as usize;
    let t = scheme.t(e.depth);
    let threshold = 2.0 * eps;
    let min_distance = (0..e.len())
        .into_par_iter()
        .map(|i| {
            ((i + 1)..e.len())
                .map(|j| bowen_distance(&e.points[i], &e.points[j], t, m + 1).value)
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    let expected = scheme.log_point_count(e.depth).exp();
    let holds = min_distance > threshold && (e.len() as f64 - expected).abs() < 0.5;
    Ok(Distinctness { points: e.len(), expected, min_distance, threshold, holds })
}

/// `T_K` lies in the level-`l` shadowing set of its own prefix for every
/// `l <= K`, which is both the nesting `F_{l+1} ⊆ F_l` and
/// `ω_K(F_l) = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub depth: usize,
    /// `ω_K(F_l)` for `l = 1..=K`.
    pub mass_by_level: Vec<f64>,
    pub worst_margin: f64,
    pub holds: bool,
}

pub fn support_check(scheme: &FractalScheme, e: &SchemeEnumeration) -> Result<SupportCheck> {
    let params = ShadowingParams::canonical();
    let per_point = e
        .points
        .par_iter()
        .zip(&e.choices)
        .map(|(z, c)| {
            (1..=e.depth)
                .map(|l| {
                    let po = scheme.pseudo_orbit(&c[..l])?;
                    verify_shadowing(z, &po, params)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut mass_by_level = vec![0.0; e.depth];
    let mut worst_margin = f64::INFINITY;
    for reps in &per_point {
        for (l, r) in reps.iter().enumerate() {
            if r.passes {
                mass_by_level[l] += 1.0 / e.len() as f64;
            }
            worst_margin = worst_margin.min(r.worst_margin);
        }
    }
    let holds = mass_by_level.iter().all(|&m| (m - 1.0).abs() < 1e-9);
    Ok(SupportCheck { depth: e.depth, mass_by_level, worst_margin, holds })
}

/// Status of an entropy lower-bound certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum CertificateStatus {
    Certified,
    /// `s <= 0`: nothing to prove.
    Trivial,
    Refused(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyBound {
    pub s: f64,
    pub h_star: f64,
    pub gamma: f64,
    pub eps: f64,
    pub depth: usize,
    pub status: CertificateStatus,
    pub distinct: Distinctness,
    pub support: SupportCheck,
    /// Inequalities checked (ball masses against `e^{-ns}`).
    pub checks: Vec<InequalityCheck>,
    pub balls_checked: usize,
    pub violations: usize,
}

impl EntropyBound {
    pub fn certified(&self) -> bool {
        matches!(self.status, CertificateStatus::Certified | CertificateStatus::Trivial)
    }

    /// The certified lower bound, if any.
    pub fn value(&self) -> Option<f64> {
        self.certified().then_some(self.s.max(0.0))
    }
}

fn premises(scheme: &FractalScheme, e: &SchemeEnumeration, eps: f64) -> Result<(Distinctness, SupportCheck)> {
    Ok((distinctness(scheme, e, eps)?, support_check(scheme, e)?))
}

/// Bowen–Hausdorff lower bound `s = h* - 5γ` from exact ball masses of
/// `ω_K` at every `n` in `[n_from, t_K)`.
pub fn edp_lower_bound(
    scheme: &FractalScheme,
    gamma: f64,
    eps: f64,
    depth: usize,
    n_from: usize,
    budget: u64,
) -> Result<EntropyBound> {
    if scheme.mode == SchemeMode::Light {
        return Err(Error::InvalidScheme(
            "light schemes control ball masses only along checkpoints; no Bowen-Hausdorff bound".into(),
        ));
    }
    let m = Resolution::from_eps(eps)?.m as usize;
    let e = enumerate_points(scheme, depth, m + 1, budget)?;
    let h_star = scheme.params.h_star;
    let s = h_star - 5.0 * gamma;
    let (distinct, support) = premises(scheme, &e, eps)?;
    let t_end = scheme.t(depth);
    let worst: Vec<(usize, f64)> = e
        .windows
        .par_iter()
        .map(|qw| ball_counts(&e, qw, m, t_end))
        .fold(
            || vec![0usize; t_end + 1],
            |mut acc, c| {
                for (a, v) in acc.iter_mut().zip(c) {
                    *a = (*a).max(v);
                }
                acc
            },
        )
        .reduce(|| vec![0usize; t_end + 1], |a, b| a.into_iter().zip(b).map(|(x, y)| x.max(y)).collect())
        .into_iter()
        .enumerate()
        .map(|(n, c)| (n, c as f64 / e.len() as f64))
        .collect();
    let checks: Vec<InequalityCheck> = worst[n_from.max(1)..t_end]
        .iter()
        .map(|&(n, mass)| InequalityCheck::new(format!("max_q ω(B_{n}(q)) <= e^(-{n} s)"), mass, (-(n as f64) * s).exp(), 1e-12))
        .collect();
    let violations = checks.iter().filter(|c| !c.holds).count();
    let status = if s <= 0.0 {
        CertificateStatus::Trivial
    } else if !distinct.holds {
        CertificateStatus::Refused(format!("points not 2ε-separated (min d = {})", distinct.min_distance))
    } else if !support.holds {
        CertificateStatus::Refused("a point leaves its shadowing set".into())
    } else if !scheme.counts_hold() {
        CertificateStatus::Refused("block-count condition fails".into())
    } else if let Some(c) = checks.iter().find(|c| !c.holds) {
        CertificateStatus::Refused(format!("ball bound violated: {}", c.inequality))
    } else {
        CertificateStatus::Certified
    };
    Ok(EntropyBound {
        s,
        h_star,
        gamma,
        eps,
        depth,
        status,
        distinct,
        support,
        balls_checked: e.len() * checks.len(),
        checks,
        violations,
    })
}

/// Packing lower bound `H* - 4γ` from ball masses at the checkpoints `t_k`
/// of the levels carrying the larger-entropy measure.
pub fn packing_lower_bound(
    scheme: &FractalScheme,
    gamma: f64,
    eps: f64,
    depth: usize,
    budget: u64,
) -> Result<EntropyBound> {
    let m = Resolution::from_eps(eps)?.m as usize;
    let e = enumerate_points(scheme, depth, m + 1, budget)?;
    let p = &scheme.params;
    let big_h = p.big_h_star;
    let s = big_h - 4.0 * gamma;
    let parity = if p.h1 >= p.h2 { 1 } else { 0 };
    let (distinct, support) = premises(scheme, &e, eps)?;
    let t_end = scheme.t(depth);
    let mut checks = Vec::new();
    for k in (1..=depth).filter(|k| k % 2 == parity) {
        let t = scheme.t(k);
        let window_end = t.min(t_end);
        let worst = e
            .windows
            .par_iter()
            .map(|qw| ball_counts(&e, qw, m, window_end)[window_end])
            .max()
            .unwrap_or(0) as f64
            / e.len() as f64;
        checks.push(InequalityCheck::new(format!("max_q ω(B_t{k}(q)) <= e^(-t_{k} s)"), worst, (-(t as f64) * s).exp(), 1e-12));
    }
    let violations = checks.iter().filter(|c| !c.holds).count();
    let status = if s <= 0.0 {
        CertificateStatus::Trivial
    } else if checks.is_empty() {
        CertificateStatus::Refused("no checkpoint of the required parity".into())
    } else if !distinct.holds {
        CertificateStatus::Refused(format!("points not 2ε-separated (min d = {})", distinct.min_distance))
    } else if !support.holds {
        CertificateStatus::Refused("a point leaves its shadowing set".into())
    } else if let Some(c) = checks.iter().find(|c| !c.holds) {
        CertificateStatus::Refused(format!("ball bound violated: {}", c.inequality))
    } else {
        CertificateStatus::Certified
    };
    Ok(EntropyBound {
        s,
        h_star: big_h,
        gamma,
        eps,
        depth,
        status,
        distinct,
        support,
        balls_checked: e.len() * checks.len(),
        checks,
        violations,
    })
}
