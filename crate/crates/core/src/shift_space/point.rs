//! Bi-infinite symbol sequences.
//!
//! A [`SymbolPoint`] is either eventually periodic (finitely described) or
//! backed by a lazy [`CoordinateSource`], such as a seeded Markov sample.
//! Either way coordinate access is total and deterministic. Shifting is a
//! constant-time offset change.

use std::fmt;
use std::sync::Arc;

use super::word::{parse_word, word_to_string, Symbol, Word};
use super::ShiftSpace;
use crate::error::{Error, Result};

/// Lazily generated coordinates. Implementations must be deterministic:
/// the same index always yields the same symbol.
pub trait CoordinateSource: Send + Sync {
    /// Writes coordinates `start, start + 1, ...` into `out`.
    fn fill(&self, start: i64, out: &mut [Symbol]);
    fn describe(&self) -> String;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EventuallyPeriodic {
    pub left: Word,
    pub core: Word,
    pub offset: i64,
    pub right: Word,
}

impl EventuallyPeriodic {
    fn symbol(&self, i: i64) -> Symbol {
        let core_end = self.offset + self.core.len() as i64;
        if i < self.offset {
            self.left[(i - self.offset).rem_euclid(self.left.len() as i64) as usize]
        } else if i < core_end {
            self.core[(i - self.offset) as usize]
        } else {
            self.right[(i - core_end).rem_euclid(self.right.len() as i64) as usize]
        }
    }
}

#[derive(Clone)]
enum Repr {
    Periodic(Arc<EventuallyPeriodic>),
    Lazy(Arc<dyn CoordinateSource>),
}

#[derive(Clone)]
pub struct SymbolPoint {
    repr: Repr,
    shift: i64,
    provenance: Option<Arc<str>>,
}

impl SymbolPoint {
    pub fn eventually_periodic(left: Word, core: Word, offset: i64, right: Word) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::Parse("periodic parts must be nonempty".into()));
        }
        Ok(SymbolPoint {
            repr: Repr::Periodic(Arc::new(EventuallyPeriodic { left, core, offset, right })),
            shift: 0,
            provenance: None,
        })
    }

    /// The periodic point `w^∞` with `w` starting at index 0.
    pub fn periodic(word: &[Symbol]) -> Result<Self> {
        Self::eventually_periodic(word.to_vec(), Vec::new(), 0, word.to_vec())
    }

    pub fn constant(s: Symbol) -> Self {
        Self::periodic(&[s]).expect("nonempty")
    }

    pub fn lazy(source: Arc<dyn CoordinateSource>) -> Self {
        SymbolPoint { repr: Repr::Lazy(source), shift: 0, provenance: None }
    }

    pub fn with_provenance(mut self, text: impl Into<String>) -> Self {
        self.provenance = Some(Arc::from(text.into()));
        self
    }

    pub fn provenance(&self) -> Option<&str> {
        self.provenance.as_deref()
    }

    pub fn symbol(&self, i: i64) -> Symbol {
        let j = i + self.shift;
        match &self.repr {
            Repr::Periodic(p) => p.symbol(j),
            Repr::Lazy(src) => {
                let mut out = [0];
                src.fill(j, &mut out);
                out[0]
            }
        }
    }

    pub fn fill(&self, start: i64, out: &mut [Symbol]) {
        let j = start + self.shift;
        match &self.repr {
            Repr::Periodic(p) => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = p.symbol(j + k as i64);
                }
            }
            Repr::Lazy(src) => src.fill(j, out),
        }
    }

    /// Coordinates on the inclusive window `[a, b]` (empty if `b < a`).
    pub fn window(&self, a: i64, b: i64) -> Word {
        if b < a {
            return Vec::new();
        }
        let mut out = vec![0; (b - a + 1) as usize];
        self.fill(a, &mut out);
        out
    }

    /// `f^k x`, i.e. `(f^k x)_i = x_{i+k}`.
    pub fn shifted(&self, k: i64) -> SymbolPoint {
        SymbolPoint { repr: self.repr.clone(), shift: self.shift + k, provenance: self.provenance.clone() }
    }

    /// The finite description, if the point is eventually periodic, normalized
    /// so the current shift is folded into the core offset.
    pub fn as_eventually_periodic(&self) -> Option<EventuallyPeriodic> {
        match &self.repr {
            Repr::Periodic(p) => {
                let mut q = (**p).clone();
                q.offset -= self.shift;
                Some(q)
            }
            Repr::Lazy(_) => None,
        }
    }

    /// True when `self` and `other` are certainly the same point: equal
    /// eventually periodic sequences, or the same lazy source at the same
    /// shift.
    pub fn same_as(&self, other: &SymbolPoint) -> bool {
        match (&self.repr, &other.repr) {
            (Repr::Lazy(a), Repr::Lazy(b)) => Arc::ptr_eq(a, b) && self.shift == other.shift,
            (Repr::Periodic(_), Repr::Periodic(_)) => {
                let (p, q) = (self.as_eventually_periodic().unwrap(), other.as_eventually_periodic().unwrap());
                let lcm = |a: usize, b: usize| a / gcd(a, b) * b;
                let lo = p.offset.min(q.offset) - lcm(p.left.len(), q.left.len()) as i64;
                let hi = (p.offset + p.core.len() as i64).max(q.offset + q.core.len() as i64)
                    + lcm(p.right.len(), q.right.len()) as i64;
                (lo..=hi).all(|i| p.symbol(i) == q.symbol(i))
            }
            _ => false,
        }
    }

    /// Checks every transition on `[a, b]`. Eventually periodic points are
    /// checked on a window that exposes every distinct pair, whatever `a, b`.
    pub fn check_admissible(&self, space: &ShiftSpace, a: i64, b: i64) -> Result<()> {
        let (a, b) = match &self.repr {
            Repr::Periodic(p) => {
                let lo = p.offset - self.shift - p.left.len() as i64 - 1;
                let hi = p.offset - self.shift + (p.core.len() + p.right.len()) as i64 + 1;
                (lo.min(a), hi.max(b))
            }
            Repr::Lazy(_) => (a, b),
        };
        let w = self.window(a, b);
        space.check_word(&w)?;
        Ok(())
    }

    pub fn to_text(&self) -> Option<String> {
        self.as_eventually_periodic().map(|p| {
            format!(
                "L({}) C({})@{} R({})",
                word_to_string(&p.left),
                word_to_string(&p.core),
                p.offset,
                word_to_string(&p.right)
            )
        })
    }

    /// Parses `L(w_l) C(w_c)@k R(w_r)`. `C()@k` is allowed for an empty core.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `L(..) C(..)@k R(..)`, got {text:?}"));
        let t = text.trim();
        let rest = t.strip_prefix("L(").ok_or_else(bad)?;
        let (left, rest) = rest.split_once(')').ok_or_else(bad)?;
        let rest = rest.trim_start().strip_prefix("C(").ok_or_else(bad)?;
        let (core, rest) = rest.split_once(')').ok_or_else(bad)?;
        let rest = rest.strip_prefix('@').ok_or_else(bad)?;
        let (offset, rest) = rest.split_once(char::is_whitespace).ok_or_else(bad)?;
        let offset: i64 = offset.parse().map_err(|_| bad())?;
        let rest = rest.trim_start().strip_prefix("R(").ok_or_else(bad)?;
        let right = rest.strip_suffix(')').ok_or_else(bad)?;
        Self::eventually_periodic(parse_word(left)?, parse_word(core)?, offset, parse_word(right)?)
    }
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl fmt::Debug for SymbolPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.repr, self.to_text()) {
            (_, Some(t)) => write!(f, "SymbolPoint({t})"),
            (Repr::Lazy(src), None) => write!(f, "SymbolPoint(lazy {} shift {})", src.describe(), self.shift),
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eventually_periodic_coordinates() {
        let p = SymbolPoint::parse("L(0) C(0110)@0 R(1)").unwrap();
        assert_eq!(p.window(-2, 6), vec![0, 0, 0, 1, 1, 0, 1, 1, 1]);
        let p = SymbolPoint::parse("L(01) C()@3 R(2)").unwrap();
        // left period ends at index 2 with symbol 1.
        assert_eq!(p.window(-1, 4), vec![0, 1, 0, 1, 2, 2]);
        assert_eq!(p.symbol(2), 1);
        assert_eq!(p.symbol(1), 0);
        assert_eq!(p.symbol(3), 2);
    }

    #[test]
    fn shift_and_text_round_trip() {
        let p = SymbolPoint::parse("L(0) C(0110)@0 R(1)").unwrap();
        let q = p.shifted(2);
        assert_eq!(q.symbol(0), p.symbol(2));
        let text = q.to_text().unwrap();
        let r = SymbolPoint::parse(&text).unwrap();
        assert_eq!(r.window(-10, 10), q.window(-10, 10));
        assert_eq!(text, "L(0) C(0110)@-2 R(1)");
    }

    #[test]
    fn parse_errors() {
        assert!(SymbolPoint::parse("C(0)@0 R(1)").is_err());
        assert!(SymbolPoint::parse("L() C(0)@0 R(1)").is_err());
        assert!(SymbolPoint::parse("L(0) C(0)@x R(1)").is_err());
    }
}
