//! Two-sided subshifts of finite type.
//!
//! The metric is `d(x, y) = 2^{-min{|k| : x_k != y_k}}`. Resolutions are
//! restricted to `eps = 2^{-m}`, which turns every ball, separation and cover
//! question into word combinatorics on a fixed coordinate window.

mod point;
pub mod word;

use serde::{Deserialize, Serialize};

pub use point::{CoordinateSource, EventuallyPeriodic, SymbolPoint};
pub use word::{parse_word, word_to_string, Symbol, Word};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ShiftSpaceJson", into = "ShiftSpaceJson")]
pub struct ShiftSpace {
    q: usize,
    allowed: Vec<bool>,
    metric_base: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ShiftSpaceJson {
    alphabet_size: usize,
    transitions: Vec<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric_base: Option<f64>,
}

impl TryFrom<ShiftSpaceJson> for ShiftSpace {
    type Error = Error;
    fn try_from(j: ShiftSpaceJson) -> Result<Self> {
        let mut s = ShiftSpace::new(j.alphabet_size, &j.transitions)?;
        if let Some(b) = j.metric_base {
            if b != 2.0 {
                return Err(Error::InvalidShift(format!("metric_base must be 2, got {b}")));
            }
            s.metric_base = b;
        }
        Ok(s)
    }
}

impl From<ShiftSpace> for ShiftSpaceJson {
    fn from(s: ShiftSpace) -> Self {
        ShiftSpaceJson {
            alphabet_size: s.q,
            transitions: s.allowed.iter().map(|&b| b as u8).collect(),
            metric_base: None,
        }
    }
}

impl ShiftSpace {
    /// `transitions` is the row-major 0/1 matrix.
    pub fn new(q: usize, transitions: &[u8]) -> Result<Self> {
        if q == 0 || q > word::MAX_TEXT_ALPHABET {
            return Err(Error::InvalidShift(format!("alphabet size {q} outside 1..=36")));
        }
        if transitions.len() != q * q {
            return Err(Error::InvalidShift(format!(
                "transition list has {} entries, expected {}",
                transitions.len(),
                q * q
            )));
        }
        if let Some(v) = transitions.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidShift(format!("transition entry {v} is not 0/1")));
        }
        let allowed: Vec<bool> = transitions.iter().map(|&v| v == 1).collect();
        for i in 0..q {
            if !(0..q).any(|j| allowed[i * q + j]) {
                return Err(Error::InvalidShift(format!("symbol {i} has no successor")));
            }
            if !(0..q).any(|j| allowed[j * q + i]) {
                return Err(Error::InvalidShift(format!("symbol {i} has no predecessor")));
            }
        }
        let s = ShiftSpace { q, allowed, metric_base: 2.0 };
        s.primitivity_exponent()?;
        Ok(s)
    }

    pub fn full(q: usize) -> Self {
        Self::new(q, &vec![1; q * q]).expect("full shift is valid")
    }

    /// Binary shift with the word `11` forbidden.
    pub fn golden_mean() -> Self {
        Self::new(2, &[1, 1, 1, 0]).expect("golden mean shift is valid")
    }

    pub fn alphabet_size(&self) -> usize {
        self.q
    }

    pub fn metric_base(&self) -> f64 {
        self.metric_base
    }

    pub fn allowed(&self, a: Symbol, b: Symbol) -> bool {
        let (a, b) = (a as usize, b as usize);
        a < self.q && b < self.q && self.allowed[a * self.q + b]
    }

    pub fn is_admissible(&self, w: &[Symbol]) -> bool {
        self.check_word(w).is_ok()
    }

    pub fn check_word(&self, w: &[Symbol]) -> Result<()> {
        if let Some(&s) = w.iter().find(|&&s| s as usize >= self.q) {
            return Err(Error::InvalidShift(format!("symbol {s} outside alphabet of size {}", self.q)));
        }
        for (i, p) in w.windows(2).enumerate() {
            if !self.allowed(p[0], p[1]) {
                return Err(Error::Inadmissible { from: p[0], to: p[1], position: i });
            }
        }
        Ok(())
    }

    fn bool_mul(&self, a: &[bool], b: &[bool]) -> Vec<bool> {
        let q = self.q;
        let mut c = vec![false; q * q];
        for i in 0..q {
            for k in 0..q {
                if a[i * q + k] {
                    for j in 0..q {
                        c[i * q + j] |= b[k * q + j];
                    }
                }
            }
        }
        c
    }

    /// Smallest `p` such that `M^j > 0` entrywise for every `j >= p`.
    ///
    /// For a primitive matrix positivity of `M^p` persists, since every row
    /// and column of `M` is nonzero. Wielandt's bound `(q-1)^2 + 1` limits
    /// the search.
    pub fn primitivity_exponent(&self) -> Result<usize> {
        let limit = (self.q - 1) * (self.q - 1) + 1;
        let mut power = self.allowed.clone();
        for p in 1..=limit {
            if power.iter().all(|&b| b) {
                return Ok(p);
            }
            power = self.bool_mul(&power, &self.allowed);
        }
        Err(Error::NotMixing)
    }

    /// Number of admissible words of each length `0..=max_len`, as `f64`
    /// (exact below 2^53).
    pub fn word_counts(&self, max_len: usize) -> Vec<f64> {
        let q = self.q;
        let mut ends = vec![1.0f64; q];
        let mut out = vec![1.0];
        for len in 1..=max_len {
            if len > 1 {
                let mut next = vec![0.0; q];
                for a in 0..q {
                    for b in 0..q {
                        if self.allowed[a * q + b] {
                            next[b] += ends[a];
                        }
                    }
                }
                ends = next;
            }
            out.push(ends.iter().sum());
        }
        out
    }

    /// Spectral radius of the transition matrix (power iteration on a
    /// primitive nonnegative matrix); `h_top = log` of this.
    pub fn spectral_radius(&self) -> f64 {
        let q = self.q;
        let mut v = vec![1.0f64; q];
        let mut lambda = 0.0;
        for _ in 0..10_000 {
            let mut w = vec![0.0; q];
            for a in 0..q {
                for b in 0..q {
                    if self.allowed[a * q + b] {
                        w[a] += v[b];
                    }
                }
            }
            let norm = w.iter().cloned().fold(0.0, f64::max);
            let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let delta = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            v = next;
            lambda = norm;
            if delta < 1e-15 {
                break;
            }
        }
        lambda
    }

    /// All admissible words of length `len` in lexicographic order.
    pub fn words(&self, len: usize, cap: usize) -> Result<Vec<Word>> {
        let count = *self.word_counts(len).last().unwrap_or(&1.0);
        if count > cap as f64 {
            return Err(Error::Budget { what: "admissible words", required: count as u64, budget: cap as u64 });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut cur = Vec::with_capacity(len);
        self.words_rec(len, &mut cur, &mut out);
        Ok(out)
    }

    fn words_rec(&self, len: usize, cur: &mut Word, out: &mut Vec<Word>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for s in 0..self.q as Symbol {
            if cur.last().map_or(true, |&l| self.allowed(l, s)) {
                cur.push(s);
                self.words_rec(len, cur, out);
                cur.pop();
            }
        }
    }

    /// Smallest `N` such that any two cylinders on `[-depth, depth]` are
    /// connected at every time `n >= N`: the gap between the windows must
    /// absorb the primitivity exponent, so `N = 2*depth + p`.
    pub fn mixing_gap(&self, depth: usize) -> Result<usize> {
        Ok(2 * depth + self.primitivity_exponent()?)
    }

    /// Lexicographically smallest `w` of the given length with
    /// `from_word · w · to_word` admissible.
    pub fn bridge(&self, from_word: &[Symbol], to_word: &[Symbol], length: usize) -> Result<Word> {
        self.check_word(from_word)?;
        self.check_word(to_word)?;
        let no_bridge = || Error::NoBridge {
            from: word_to_string(from_word),
            to: word_to_string(to_word),
            length,
        };
        let q = self.q;
        let target = to_word.first().copied();
        // ok[i][s]: placing s at bridge position i can still reach the target.
        let mut ok = vec![vec![false; q]; length];
        for i in (0..length).rev() {
            for s in 0..q {
                ok[i][s] = if i + 1 == length {
                    target.map_or(true, |t| self.allowed(s as Symbol, t))
                } else {
                    (0..q).any(|t| ok[i + 1][t] && self.allowed(s as Symbol, t as Symbol))
                };
            }
        }
        let mut prev = from_word.last().copied();
        if length == 0 {
            return match (prev, target) {
                (Some(a), Some(b)) if !self.allowed(a, b) => Err(no_bridge()),
                _ => Ok(Vec::new()),
            };
        }
        let mut w = Vec::with_capacity(length);
        for row in &ok {
            let s = (0..q)
                .find(|&s| row[s] && prev.map_or(true, |p| self.allowed(p, s as Symbol)))
                .ok_or_else(no_bridge)? as Symbol;
            w.push(s);
            prev = Some(s);
        }
        Ok(w)
    }

    /// A cycle `c` ending in a symbol allowed before `first`, with `c·c`
    /// admissible and `c[0] = first`.
    pub fn cycle_through(&self, first: Symbol) -> Result<Word> {
        let p = self.primitivity_exponent()?;
        let mut c = vec![first];
        c.extend(self.bridge(&[first], &[first], p.saturating_sub(1))?);
        Ok(c)
    }

    /// The eventually periodic point carrying `word` on `[offset, offset +
    /// len - 1]`, with admissible periodic tails on both sides.
    pub fn periodic_completion(&self, word: &[Symbol], offset: i64) -> Result<SymbolPoint> {
        self.check_word(word)?;
        let (&first, &last) = match (word.first(), word.last()) {
            (Some(f), Some(l)) => (f, l),
            _ => return Err(Error::InvalidShift("cannot complete an empty word".into())),
        };
        let left = self.cycle_through(first)?;
        let mut right = self.cycle_through(last)?;
        right.rotate_left(1);
        SymbolPoint::eventually_periodic(left, word.to_vec(), offset, right)
    }

    /// Maximal `(n, eps)`-separated set, as the admissible words on the
    /// window `[-m+1, n+m-2]` (`eps = 2^{-m}`). Two points are
    /// `(n, 2^{-m})`-separated exactly when they differ on that window, and
    /// every admissible word extends to a point, so the words themselves are
    /// a maximal separated set.
    pub fn enumerate_separated(&self, n: usize, eps: f64, cap_len: usize) -> Result<SeparatedSet> {
        let res = Resolution::from_eps(eps)?;
        let (a, b) = res.separation_window(n);
        let len = (b - a + 1).max(0) as usize;
        if len > cap_len {
            return Err(Error::CapExceeded { required: len, cap: cap_len });
        }
        let words = self.words(len, usize::MAX)?;
        Ok(SeparatedSet { window: (a, b), words })
    }

    /// `s_n(X, eps)` without enumeration.
    pub fn count_separated(&self, n: usize, eps: f64) -> Result<f64> {
        let res = Resolution::from_eps(eps)?;
        let (a, b) = res.separation_window(n);
        let len = (b - a + 1).max(0) as usize;
        Ok(self.word_counts(len)[len])
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatedSet {
    /// Inclusive coordinate window the words live on.
    pub window: (i64, i64),
    pub words: Vec<Word>,
}

/// A dyadic resolution `eps = 2^{-m}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Resolution {
    pub m: u32,
}

impl Resolution {
    pub fn new(m: u32) -> Self {
        Resolution { m }
    }

    pub fn from_eps(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps <= 1.0) {
            return Err(Error::NonDyadic(eps));
        }
        let m = (-eps.log2()).round();
        if m > 60.0 || (2f64).powi(-(m as i32)) != eps {
            return Err(Error::NonDyadic(eps));
        }
        Ok(Resolution { m: m as u32 })
    }

    pub fn eps(&self) -> f64 {
        (2f64).powi(-(self.m as i32))
    }

    /// Window on which two points must differ to be `(n, eps)`-separated,
    /// i.e. `d_n > eps`. Also the window of the closed ball `d_n <= eps`.
    /// Empty (`b < a`) when `m = 0`.
    pub fn separation_window(&self, n: usize) -> (i64, i64) {
        let m = self.m as i64;
        if m == 0 {
            return (0, -1);
        }
        (1 - m, n as i64 + m - 2)
    }

    /// Window of the open ball `d_n < eps`.
    pub fn open_ball_window(&self, n: usize) -> (i64, i64) {
        let m = self.m as i64;
        (-m, n as i64 - 1 + m)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cylinder {
    pub start: i64,
    pub word: Word,
}

impl Cylinder {
    pub fn new(start: i64, word: Word) -> Self {
        Cylinder { start, word }
    }

    pub fn of_point(x: &SymbolPoint, a: i64, b: i64) -> Self {
        Cylinder { start: a, word: x.window(a, b) }
    }

    pub fn end(&self) -> i64 {
        self.start + self.word.len() as i64 - 1
    }

    pub fn contains(&self, x: &SymbolPoint) -> bool {
        x.window(self.start, self.end()) == self.word
    }

    /// Diameter in the shift metric (base 2). When the window contains 0,
    /// two members can first differ at `a - 1` or `b + 1`, which gives
    /// `2^{-(min(|a|, |b|) + 1)}`. Windows missing 0 give the trivial bound 1.
    pub fn diameter(&self) -> f64 {
        let (a, b) = (self.start, self.end());
        if self.word.is_empty() || a > 0 || b < 0 {
            return 1.0;
        }
        (2f64).powi(-((a.abs().min(b.abs()) + 1) as i32))
    }
}

/// A distance computed from a finite coordinate window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Distance {
    /// `2^{-k}`, or 0 when no disagreement was found in the window.
    pub value: f64,
    /// The exponent `k` if a disagreement was found.
    pub exponent: Option<u32>,
    /// Precision window used: coordinates `[-window, n-1+window]` were read.
    pub window: usize,
    /// True when `value = 0` only because the window showed no difference;
    /// the true distance is then at most `2^{-(window+1)}`.
    pub window_limited: bool,
}

impl Distance {
    /// The value, or an indeterminate error if it is a window-limited zero.
    pub fn certified(&self) -> Result<f64> {
        if self.window_limited {
            Err(Error::Indeterminate(format!(
                "no disagreement within precision window {}; distance < 2^-{}",
                self.window,
                self.window + 1
            )))
        } else {
            Ok(self.value)
        }
    }

    /// True when the distance is certainly below `bound`.
    pub fn certainly_below(&self, bound: f64) -> bool {
        if self.window_limited {
            (2f64).powi(-(self.window as i32 + 1)) < bound
        } else {
            self.value < bound
        }
    }
}

/// Exponent of `d_n` given the two windows on `[-window, n-1+window]`.
fn bowen_exponent(xs: &[Symbol], ys: &[Symbol], n: usize, window: usize) -> Option<u32> {
    let mut best: Option<i64> = None;
    for (idx, (a, b)) in xs.iter().zip(ys).enumerate() {
        if a != b {
            let k = idx as i64 - window as i64;
            let dist = if k < 0 { -k } else { (k - (n as i64 - 1)).max(0) };
            best = Some(best.map_or(dist, |d: i64| d.min(dist)));
            if dist == 0 {
                break;
            }
        }
    }
    best.map(|d| d as u32)
}

/// `d(x, y)` read from coordinates `[-window, window]`.
pub fn distance(x: &SymbolPoint, y: &SymbolPoint, window: usize) -> Distance {
    bowen_distance(x, y, 1, window)
}

/// `d_n(x, y) = max_{0 <= i < n} d(f^i x, f^i y)`, read from coordinates
/// `[-window, n-1+window]`.
pub fn bowen_distance(x: &SymbolPoint, y: &SymbolPoint, n: usize, window: usize) -> Distance {
    let (a, b) = (-(window as i64), n as i64 - 1 + window as i64);
    let xs = x.window(a, b);
    let ys = y.window(a, b);
    match bowen_exponent(&xs, &ys, n, window) {
        Some(k) => Distance { value: (2f64).powi(-(k as i32)), exponent: Some(k), window, window_limited: false },
        None => Distance { value: 0.0, exponent: None, window, window_limited: true },
    }
}

/// Default precision window for distance checks at resolution `2^{-m}`:
/// nothing beyond `m` coordinates outside `[0, n-1]` can change whether a
/// distance is below `2^{-m}`.
pub fn window_for(res: Resolution) -> usize {
    res.m as usize + 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(text: &str) -> SymbolPoint {
        SymbolPoint::parse(text).unwrap()
    }

    #[test]
    fn bowen_distance_examples() {
        let zero = SymbolPoint::constant(0);
        let d = bowen_distance(&zero, &zero, 10, 20);
        assert_eq!(d.value, 0.0);
        assert!(d.window_limited);
        assert!(d.certified().is_err());

        let y = pt("L(0) C(1)@0 R(0)");
        let d = bowen_distance(&zero, &y, 4, 8);
        assert_eq!(d.value, 1.0);
        assert_eq!(d.exponent, Some(0));

        // agree on [-3, 12], differ at 13
        let y = pt("L(0) C(1)@13 R(0)");
        let d = bowen_distance(&zero, &y, 10, 8);
        assert_eq!(d.value, 1.0 / 16.0);
    }

    /// Brute force over the definition: max over shifts of the single-step metric.
    #[test]
    fn bowen_distance_matches_shift_by_shift_maximum() {
        let x = pt("L(01) C(0011010)@-3 R(110)");
        let y = pt("L(01) C(0111010)@-3 R(100)");
        for n in 1..12 {
            let direct = bowen_distance(&x, &y, n, 30).value;
            let brute = (0..n as i64)
                .map(|i| distance(&x.shifted(i), &y.shifted(i), 40).value)
                .fold(0.0, f64::max);
            assert_eq!(direct, brute, "n = {n}");
        }
    }

    #[test]
    fn mixing_gap_examples() {
        assert_eq!(ShiftSpace::full(2).mixing_gap(0).unwrap(), 1);
        assert_eq!(ShiftSpace::golden_mean().mixing_gap(0).unwrap(), 2);
        assert_eq!(ShiftSpace::full(2).mixing_gap(3).unwrap(), 7);
        assert!(ShiftSpace::new(2, &[0, 1, 1, 0]).is_err());
    }

    /// Oracle: for every pair of cylinders on [-d, d] and every time n, check
    /// directly whether some admissible word realizes both.
    fn brute_force_gap(space: &ShiftSpace, depth: usize) -> usize {
        let width = 2 * depth + 1;
        let cyl = space.words(width, 1 << 20).unwrap();
        let connects = |u: &Word, v: &Word, n: usize| -> bool {
            // u on [-d, d], v on [n-d, n+d]
            if n < width {
                let overlap = width - n;
                if u[n..] != v[..overlap] {
                    return false;
                }
                let mut joined = u.clone();
                joined.extend_from_slice(&v[overlap..]);
                return space.is_admissible(&joined);
            }
            space.bridge(u, v, n - width).is_ok()
        };
        let ok_at = |n: usize| cyl.iter().all(|u| cyl.iter().all(|v| connects(u, v, n)));
        let horizon = 4 * width + 10;
        let mut gap = horizon;
        for n in (0..horizon).rev() {
            if ok_at(n) {
                gap = n;
            } else {
                break;
            }
        }
        gap
    }

    #[test]
    fn mixing_gap_matches_brute_force() {
        let spaces = [
            ShiftSpace::full(2),
            ShiftSpace::golden_mean(),
            ShiftSpace::new(3, &[0, 1, 1, 1, 0, 1, 1, 1, 0]).unwrap(),
            ShiftSpace::new(3, &[0, 1, 0, 0, 0, 1, 1, 1, 0]).unwrap(),
        ];
        for s in &spaces {
            for depth in 0..3 {
                assert_eq!(s.mixing_gap(depth).unwrap(), brute_force_gap(s, depth), "{s:?} depth {depth}");
            }
        }
    }

    #[test]
    fn bridge_examples() {
        let full = ShiftSpace::full(2);
        assert_eq!(full.bridge(&[0, 1], &[1, 0], 1).unwrap(), vec![0]);
        assert_eq!(full.bridge(&[1], &[0], 0).unwrap(), Vec::<Symbol>::new());
        let g = ShiftSpace::golden_mean();
        assert_eq!(g.bridge(&[1], &[1], 2).unwrap(), vec![0, 0]);
        assert_eq!(g.bridge(&[1], &[1], 1).unwrap(), vec![0]);
        assert!(g.bridge(&[1], &[1], 0).is_err());
    }

    #[test]
    fn separated_set_examples() {
        let full = ShiftSpace::full(2);
        let s = full.enumerate_separated(5, 0.5, 64).unwrap();
        assert_eq!(s.words.len(), 32);
        assert_eq!(s.window, (0, 4));
        let s = full.enumerate_separated(3, 0.25, 64).unwrap();
        assert_eq!(s.words.len(), 32);
        assert_eq!(s.window, (-1, 3));
        let g = ShiftSpace::golden_mean().enumerate_separated(4, 0.5, 64).unwrap();
        assert_eq!(g.words.len(), 8);
        assert!(full.enumerate_separated(100, 0.5, 64).is_err());
        assert!(full.enumerate_separated(3, 0.3, 64).is_err());
    }

    /// Pairwise d_n check over all candidate points built from longer words.
    #[test]
    fn separation_window_matches_pairwise_check() {
        let full = ShiftSpace::full(2);
        for (n, m) in [(3usize, 2u32), (2, 1), (4, 3), (1, 2)] {
            let res = Resolution::new(m);
            let eps = res.eps();
            let (a, b) = res.open_ball_window(n);
            let words = full.words((b - a + 3) as usize, 1 << 16).unwrap();
            let pts: Vec<SymbolPoint> = words
                .iter()
                .map(|w| SymbolPoint::eventually_periodic(vec![0], w.clone(), a - 1, vec![0]).unwrap())
                .collect();
            // size of a maximal separated set via greedy selection
            let mut chosen: Vec<&SymbolPoint> = Vec::new();
            for p in &pts {
                if chosen.iter().all(|c| bowen_distance(c, p, n, 20).value > eps) {
                    chosen.push(p);
                }
            }
            let expected = full.count_separated(n, eps).unwrap();
            assert_eq!(chosen.len() as f64, expected, "n={n} m={m}");
        }
    }

    #[test]
    fn cylinder_diameter_from_metric() {
        let full = ShiftSpace::full(2);
        for (a, b) in [(-2i64, 3i64), (0, 0), (-1, 1), (-3, 0), (0, 4)] {
            let len = (b - a + 1) as usize;
            let cyl = Cylinder::new(a, vec![0; len]);
            // realize members differing just outside the window
            let mut worst: f64 = 0.0;
            for w in full.words(len + 4, 1 << 12).unwrap() {
                if w[2..2 + len] != cyl.word[..] {
                    continue;
                }
                let p = SymbolPoint::eventually_periodic(vec![0], w, a - 2, vec![0]).unwrap();
                let base = SymbolPoint::eventually_periodic(vec![0], cyl.word.clone(), a, vec![0]).unwrap();
                worst = worst.max(distance(&p, &base, 40).value);
            }
            assert_eq!(worst, cyl.diameter(), "[{a},{b}]");
        }
    }

    #[test]
    fn json_round_trip() {
        let g: ShiftSpace = serde_json::from_str(r#"{"alphabet_size":2,"transitions":[1,1,1,0]}"#).unwrap();
        assert_eq!(g, ShiftSpace::golden_mean());
        let text = serde_json::to_string(&g).unwrap();
        assert_eq!(text, r#"{"alphabet_size":2,"transitions":[1,1,1,0]}"#);
        assert!(serde_json::from_str::<ShiftSpace>(r#"{"alphabet_size":2,"transitions":[0,1,1,0]}"#).is_err());
    }

    #[test]
    fn spectral_radius_and_counts() {
        let g = ShiftSpace::golden_mean();
        assert!((g.spectral_radius() - (1.0 + 5f64.sqrt()) / 2.0).abs() < 1e-12);
        assert_eq!(g.word_counts(4), vec![1.0, 2.0, 3.0, 5.0, 8.0]);
        assert_eq!(ShiftSpace::full(3).word_counts(2)[2], 9.0);
    }
}
