//! Pseudo-orbits of orbit segments and their exact shadowing on shift
//! spaces.
//!
//! On a shift, the concatenation of the segment words is a true orbit that
//! agrees with segment `i` on `[c_i, c_i + n_i - 1]`, which gives
//! `(τ, λ) = (2, log 2)` exponential shadowing for base-2 metrics.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::shift_space::{distance, window_for, CoordinateSource, Resolution, ShiftSpace, Symbol, SymbolPoint, Word};

#[derive(Clone, Debug)]
pub struct Segment {
    pub point: SymbolPoint,
    pub n: usize,
}

impl Segment {
    pub fn new(point: SymbolPoint, n: usize) -> Self {
        Segment { point, n }
    }

    pub fn word(&self) -> Word {
        self.point.window(0, self.n as i64 - 1)
    }
}

/// Segments `x_i, …, f^{n_i - 1} x_i` for `i` in
/// `first_index .. first_index + len`. A cyclic pseudo-orbit is one period
/// of a periodic one: segment `len` wraps to segment 0.
#[derive(Clone, Debug)]
pub struct PseudoOrbit {
    segments: Vec<Segment>,
    first_index: i64,
    delta: f64,
    cyclic: bool,
}

impl PseudoOrbit {
    /// Checks the jumps `d(f^{n_i} x_i, x_{i+1}) < δ`.
    pub fn new(segments: Vec<Segment>, first_index: i64, delta: f64) -> Result<Self> {
        let po = Self::unchecked(segments, first_index, delta, false)?;
        po.require_valid()?;
        Ok(po)
    }

    pub fn cyclic(segments: Vec<Segment>, delta: f64) -> Result<Self> {
        let po = Self::unchecked(segments, 0, delta, true)?;
        po.require_valid()?;
        Ok(po)
    }

    /// Builds without checking the jumps (the index structure is still
    /// validated).
    pub fn unchecked(segments: Vec<Segment>, first_index: i64, delta: f64, cyclic: bool) -> Result<Self> {
        Resolution::from_eps(delta)?;
        if segments.is_empty() || segments.iter().any(|s| s.n == 0) {
            return Err(Error::InvalidPseudoOrbit("segments must be nonempty with n_i >= 1".into()));
        }
        let end = first_index + segments.len() as i64;
        if first_index > 0 || end <= 0 {
            return Err(Error::InvalidPseudoOrbit(format!(
                "index range {first_index}..{end} must contain segment 0"
            )));
        }
        Ok(PseudoOrbit { segments, first_index, delta, cyclic })
    }

    fn require_valid(&self) -> Result<()> {
        if let Some(i) = self.first_bad_jump(self.delta) {
            return Err(Error::InvalidPseudoOrbit(format!("jump after segment {i} is not below delta = {}", self.delta)));
        }
        Ok(())
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn is_cyclic(&self) -> bool {
        self.cyclic
    }

    pub fn index_range(&self) -> std::ops::Range<i64> {
        self.first_index..self.first_index + self.segments.len() as i64
    }

    pub fn segment(&self, i: i64) -> Result<&Segment> {
        if !self.index_range().contains(&i) {
            return Err(Error::InvalidPseudoOrbit(format!("segment {i} outside {:?}", self.index_range())));
        }
        Ok(&self.segments[(i - self.first_index) as usize])
    }

    /// `c_0 = 0`, `c_i = Σ_{0<=j<i} n_j` for `i > 0`, and
    /// `c_i = -Σ_{i<=j<0} n_j` for `i < 0`. Defined up to one past the last
    /// segment.
    pub fn c_index(&self, i: i64) -> Result<i64> {
        let r = self.index_range();
        if i < r.start || i > r.end {
            return Err(Error::InvalidPseudoOrbit(format!("c_{i} outside {}..={}", r.start, r.end)));
        }
        let n = |j: i64| self.segments[(j - self.first_index) as usize].n as i64;
        Ok(if i >= 0 { (0..i).map(n).sum() } else { -(i..0).map(n).sum::<i64>() })
    }

    /// Total length `Σ n_i`.
    pub fn total_length(&self) -> usize {
        self.segments.iter().map(|s| s.n).sum()
    }

    fn first_bad_jump(&self, delta: f64) -> Option<i64> {
        let w = window_for(Resolution::from_eps(delta).ok()?);
        let count = self.segments.len() - usize::from(!self.cyclic);
        (0..count).find_map(|k| {
            let s = &self.segments[k];
            let next = &self.segments[(k + 1) % self.segments.len()];
            let d = distance(&s.point.shifted(s.n as i64), &next.point, w);
            (!d.certainly_below(delta)).then_some(self.first_index + k as i64)
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let w = Resolution::from_eps(self.delta)?.m;
        let segments = self
            .segments
            .iter()
            .map(|s| {
                let point = s.point.to_text().ok_or_else(|| Error::Parse("lazy points have no text form".into()))?;
                Ok(SegmentJson { point, n: s.n })
            })
            .collect::<Result<_>>()?;
        let j = PseudoOrbitJson { delta_exp: w, segments, first_index: self.first_index, cyclic: self.cyclic };
        serde_json::to_string_pretty(&j).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let j: PseudoOrbitJson = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let segments = j
            .segments
            .iter()
            .map(|s| Ok(Segment::new(SymbolPoint::parse(&s.point)?, s.n)))
            .collect::<Result<Vec<_>>>()?;
        let po = Self::unchecked(segments, j.first_index, 0.5f64.powi(j.delta_exp as i32), j.cyclic)?;
        po.require_valid()?;
        Ok(po)
    }
}

#[derive(Serialize, Deserialize)]
struct SegmentJson {
    point: String,
    n: usize,
}

#[derive(Serialize, Deserialize)]
struct PseudoOrbitJson {
    delta_exp: u32,
    segments: Vec<SegmentJson>,
    #[serde(default)]
    first_index: i64,
    #[serde(default)]
    cyclic: bool,
}

/// True when every jump is below `delta`.
pub fn verify_pseudo(po: &PseudoOrbit, delta: f64) -> Result<bool> {
    Resolution::from_eps(delta)?;
    Ok(po.first_bad_jump(delta).is_none())
}

/// The concatenation, with tails read from the first and last segment
/// points' own orbits.
struct ConcatSource {
    core: Word,
    core_start: i64,
    left: SymbolPoint,
    right: SymbolPoint,
    right_start: i64,
}

impl CoordinateSource for ConcatSource {
    fn fill(&self, start: i64, out: &mut [Symbol]) {
        let core_end = self.core_start + self.core.len() as i64;
        for (k, o) in out.iter_mut().enumerate() {
            let i = start + k as i64;
            *o = if i < self.core_start {
                self.left.symbol(i - self.core_start)
            } else if i < core_end {
                self.core[(i - self.core_start) as usize]
            } else {
                self.right.symbol(i - self.right_start)
            };
        }
    }

    fn describe(&self) -> String {
        format!("concatenation of {} symbols from {}", self.core.len(), self.core_start)
    }
}

/// The shadowing point `z` with `z_{c_i + j} = (x_i)_j`, `0 <= j < n_i`.
/// Finite pseudo-orbits are completed by repeating the first and last
/// segment words when that is admissible, and by the orbits of the first and
/// last segment points otherwise; cyclic ones give a periodic point.
pub fn shadow(po: &PseudoOrbit, space: &ShiftSpace) -> Result<SymbolPoint> {
    let words: Vec<Word> = po.segments.iter().map(Segment::word).collect();
    let core: Word = words.concat();
    space.check_word(&core)?;
    let start = po.c_index(po.first_index)?;
    let count = po.segments.len();
    if po.cyclic {
        let wrap = [core[core.len() - 1], core[0]];
        space.check_word(&wrap)?;
        let z = SymbolPoint::eventually_periodic(core.clone(), Vec::new(), start, core)?;
        return Ok(z.with_provenance(format!("shadow of {count} segments, cyclic")));
    }
    if count == 1 {
        return Ok(po.segments[0].point.clone());
    }
    let (first, last) = (&words[0], &words[count - 1]);
    let wraps = |w: &Word| space.allowed(w[w.len() - 1], w[0]);
    if wraps(first) && wraps(last) {
        let z = SymbolPoint::eventually_periodic(first.clone(), core, start, last.clone())?;
        return Ok(z.with_provenance(format!("shadow of {count} segments, periodic completion")));
    }
    let last_index = po.first_index + count as i64 - 1;
    let src = ConcatSource {
        core,
        core_start: start,
        left: po.segments[0].point.clone(),
        right: po.segments[count - 1].point.clone(),
        right_start: po.c_index(last_index)?,
    };
    Ok(SymbolPoint::lazy(Arc::new(src)).with_provenance(format!("shadow of {count} segments, orbit-tail completion")))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowingParams {
    pub tau: f64,
    pub lambda: f64,
}

impl ShadowingParams {
    /// `(τ, λ) = (2, log 2)`, valid for every shift with metric base 2.
    pub fn canonical() -> Self {
        ShadowingParams { tau: 2.0, lambda: 2f64.ln() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShadowingReport {
    pub passes: bool,
    /// `min_{i,j} log(τ e^{-λ min(j, n_i - j)}) - log d(f^{c_i+j} z, f^j x_i)`;
    /// a lower bound where no disagreement was inside the read window.
    pub worst_margin: f64,
    pub worst_segment: i64,
    pub worst_j: usize,
    pub checked: usize,
    /// Distance profile `j ↦ d` of the worst segment.
    pub worst_profile: Vec<f64>,
}

/// Checks `d(f^{c_i+j} z, f^j x_i) < τ e^{-λ min(j, n_i - j)}` for every
/// segment and `0 <= j < n_i`, in linear time per segment.
pub fn verify_shadowing(z: &SymbolPoint, po: &PseudoOrbit, params: ShadowingParams) -> Result<ShadowingReport> {
    if !(params.tau > 0.0 && params.lambda > 0.0) {
        return Err(Error::InvalidPseudoOrbit("tau and lambda must be positive".into()));
    }
    let ln2 = 2f64.ln();
    let mut rep = ShadowingReport {
        passes: true,
        worst_margin: f64::INFINITY,
        worst_segment: po.first_index,
        worst_j: 0,
        checked: 0,
        worst_profile: Vec::new(),
    };
    for i in po.index_range() {
        let seg = po.segment(i)?;
        let c = po.c_index(i)?;
        let n = seg.n;
        let log_bound = |j: usize| params.tau.ln() - params.lambda * j.min(n - j) as f64;
        // Radius r_j beyond which agreement certainly gives d < bound.
        let radius = |j: usize| ((-log_bound(j) / ln2).ceil().max(0.0) as usize) + 1;
        let big_r = (0..n).map(radius).max().unwrap_or(1) as i64;
        let zs = z.window(c - big_r, c + n as i64 - 1 + big_r);
        let xs = seg.point.window(-big_r, n as i64 - 1 + big_r);
        let len = zs.len();
        // Nearest disagreement to the left and right of each position.
        let mut left = vec![None; len];
        let mut last = None;
        for t in 0..len {
            if zs[t] != xs[t] {
                last = Some(t);
            }
            left[t] = last;
        }
        let mut right = vec![None; len];
        let mut next = None;
        for t in (0..len).rev() {
            if zs[t] != xs[t] {
                next = Some(t);
            }
            right[t] = next;
        }
        let mut profile = Vec::with_capacity(n);
        let mut seg_worst = f64::INFINITY;
        let mut seg_worst_j = 0;
        let mut seg_passes = true;
        for j in 0..n {
            let t = j + big_r as usize;
            let k = match (left[t], right[t]) {
                (None, None) => None,
                (a, b) => Some(a.map_or(usize::MAX, |a| t - a).min(b.map_or(usize::MAX, |b| b - t))),
            };
            let lb = log_bound(j);
            let (d, margin) = match k {
                Some(k) => {
                    let d = 0.5f64.powi(k as i32);
                    (d, lb + k as f64 * ln2)
                }
                // Agreement on the whole read window: d <= 2^{-(R+1)}.
                None => (0.0, lb + (big_r + 1) as f64 * ln2),
            };
            let ok = match k {
                Some(_) => margin > 0.0,
                None => (big_r as usize) >= radius(j) - 1,
            };
            seg_passes &= ok;
            profile.push(d);
            if margin < seg_worst {
                seg_worst = margin;
                seg_worst_j = j;
            }
            rep.checked += 1;
        }
        rep.passes &= seg_passes;
        if seg_worst < rep.worst_margin {
            rep.worst_margin = seg_worst;
            rep.worst_segment = i;
            rep.worst_j = seg_worst_j;
            rep.worst_profile = profile;
        }
    }
    Ok(rep)
}

/// A random `2^{-w}`-pseudo-orbit: segments cut from one admissible word,
/// each completed with its own periodic tails outside
/// `[-w, n_i + w]`, so jumps are nonzero but below `2^{-w}`.
pub fn random_pseudo_orbit(
    space: &ShiftSpace,
    count: usize,
    n_range: std::ops::RangeInclusive<usize>,
    w: usize,
    rng: &mut impl Rng,
) -> Result<PseudoOrbit> {
    let lens: Vec<usize> = (0..count.max(1)).map(|_| rng.gen_range(n_range.clone())).collect();
    let total: usize = lens.iter().sum();
    let q = space.alphabet_size();
    // Uniform random admissible walk.
    let mut word = Vec::with_capacity(total + 2 * w + 1);
    let mut s = rng.gen_range(0..q) as Symbol;
    word.push(s);
    while word.len() < total + 2 * w + 1 {
        let choices: Vec<Symbol> = (0..q as Symbol).filter(|&t| space.allowed(s, t)).collect();
        s = choices[rng.gen_range(0..choices.len())];
        word.push(s);
    }
    let mut segments = Vec::with_capacity(lens.len());
    let mut c = 0;
    for &n in &lens {
        let piece = &word[c..c + n + 2 * w + 1];
        segments.push(Segment::new(space.periodic_completion(piece, -(w as i64))?, n));
        c += n;
    }
    PseudoOrbit::new(segments, 0, 0.5f64.powi(w as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn seg(text: &str, n: usize) -> Segment {
        Segment::new(SymbolPoint::parse(text).unwrap(), n)
    }

    #[test]
    fn c_index_examples() {
        let s: Vec<Segment> = (0..5).map(|_| Segment::new(SymbolPoint::constant(0), 5)).collect();
        let po = PseudoOrbit::new(s, 0, 1.0).unwrap();
        assert_eq!(po.c_index(3).unwrap(), 15);
        assert_eq!(po.c_index(0).unwrap(), 0);
        let s = vec![Segment::new(SymbolPoint::constant(0), 4), Segment::new(SymbolPoint::constant(0), 5)];
        let po = PseudoOrbit::new(s, -1, 1.0).unwrap();
        assert_eq!(po.c_index(-1).unwrap(), -4);
        assert!(po.c_index(-2).is_err());
    }

    #[test]
    fn two_blocks_glued() {
        let space = fixtures::full_shift();
        let po = PseudoOrbit::unchecked(vec![seg("L(0) C()@0 R(0)", 5), seg("L(1) C()@0 R(1)", 5)], 0, 1.0, false).unwrap();
        // The jump from 0^∞ to 1^∞ is at distance 1: not a 1-pseudo-orbit.
        assert!(!verify_pseudo(&po, 1.0).unwrap());
        let z = shadow(&po, &space).unwrap();
        assert_eq!(z.window(0, 9), vec![0, 0, 0, 0, 0, 1, 1, 1, 1, 1]);
        assert_eq!(z.window(-3, -1), vec![0, 0, 0]);
        assert_eq!(z.window(10, 12), vec![1, 1, 1]);
        assert!(z.provenance().unwrap().contains("periodic completion"));
    }

    #[test]
    fn cut_true_orbit_is_a_pseudo_orbit_for_every_delta() {
        let x = fixtures::bernoulli(0.5).sample_point(200, 11);
        let segs: Vec<Segment> = (0..4).map(|k| Segment::new(x.shifted(7 * k), 7)).collect();
        let po = PseudoOrbit::new(segs, 0, 0.5f64.powi(20)).unwrap();
        for w in 0..20 {
            assert!(verify_pseudo(&po, 0.5f64.powi(w)).unwrap());
        }
    }

    #[test]
    fn cyclic_pseudo_orbit_shadows_periodically() {
        let space = fixtures::full_shift();
        let po = PseudoOrbit::cyclic(vec![seg("L(01) C()@0 R(01)", 2), seg("L(01) C()@0 R(01)", 4)], 1.0).unwrap();
        let z = shadow(&po, &space).unwrap();
        assert_eq!(z.window(0, 5), z.window(6, 11));
        assert_eq!(z.window(0, 5), z.window(-6, -1));
    }

    #[test]
    fn canonical_parameters_pass_and_tight_tau_fails_at_the_ends() {
        let space = fixtures::golden_mean();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let po = random_pseudo_orbit(&space, 6, 3..=12, 2, &mut rng).unwrap();
        let z = shadow(&po, &space).unwrap();
        z.check_admissible(&space, -50, 150).unwrap();
        let r = verify_shadowing(&z, &po, ShadowingParams::canonical()).unwrap();
        assert!(r.passes, "{r:?}");
        let tight = verify_shadowing(&z, &po, ShadowingParams { tau: 2f64.powi(-10), lambda: 2f64.ln() }).unwrap();
        assert!(!tight.passes);
        let n = po.segment(tight.worst_segment).unwrap().n;
        assert!(tight.worst_j <= 1 || tight.worst_j + 2 >= n);
    }

    #[test]
    fn single_segment_is_its_own_shadow() {
        let space = fixtures::full_shift();
        let x = fixtures::bernoulli(0.5).sample_point(50, 2);
        let po = PseudoOrbit::new(vec![Segment::new(x.clone(), 30)], 0, 0.25).unwrap();
        let z = shadow(&po, &space).unwrap();
        for tau in [2.0, 1e-3, 1e-9] {
            assert!(verify_shadowing(&z, &po, ShadowingParams { tau, lambda: 0.1 }).unwrap().passes);
        }
    }

    #[test]
    fn json_round_trip() {
        let po = PseudoOrbit::new(vec![seg("L(0) C(01)@0 R(1)", 2), seg("L(0) C()@0 R(1)", 3)], 0, 1.0).unwrap();
        let back = PseudoOrbit::from_json(&po.to_json().unwrap()).unwrap();
        assert_eq!(back.segments().len(), 2);
        assert_eq!(back.c_index(2).unwrap(), 5);
    }
}
