//! Recurrence sets: points that return to their partition atom (or to a
//! fixed set) in every window `[l, (1+ρ)l]`, `l >= s`.
//!
//! Only finitely many `l` can be inspected, so membership is certified up
//! to a horizon.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::shift_space::{Cylinder, ShiftSpace, Symbol, SymbolPoint, Word};

/// A target set `Γ`, given as a membership predicate.
#[derive(Clone)]
pub enum Gamma {
    Whole,
    Predicate { label: String, test: Arc<dyn Fn(&SymbolPoint) -> Result<bool> + Send + Sync> },
}

impl Gamma {
    pub fn predicate(label: impl Into<String>, test: impl Fn(&SymbolPoint) -> Result<bool> + Send + Sync + 'static) -> Self {
        Gamma::Predicate { label: label.into(), test: Arc::new(test) }
    }

    pub fn contains(&self, x: &SymbolPoint) -> Result<bool> {
        match self {
            Gamma::Whole => Ok(true),
            Gamma::Predicate { test, .. } => test(x),
        }
    }

    pub fn is_whole(&self) -> bool {
        matches!(self, Gamma::Whole)
    }
}

impl fmt::Debug for Gamma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gamma::Whole => write!(f, "Gamma::Whole"),
            Gamma::Predicate { label, .. } => write!(f, "Gamma({label})"),
        }
    }
}

/// Partition by cylinders on `[a, b]`, refined by `Γ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderPartition {
    pub a: i64,
    pub b: i64,
}

impl CylinderPartition {
    pub fn new(a: i64, b: i64) -> Self {
        assert!(a <= b, "empty partition window");
        CylinderPartition { a, b }
    }

    /// Cylinders on `[-r, r]`.
    pub fn centered(r: usize) -> Self {
        Self::new(-(r as i64), r as i64)
    }

    pub fn key(&self, x: &SymbolPoint) -> Word {
        x.window(self.a, self.b)
    }

    /// Partition cardinality: admissible words on the window, doubled when
    /// `Γ` splits atoms.
    pub fn cardinality(&self, space: &ShiftSpace, gamma: &Gamma) -> usize {
        let len = (self.b - self.a + 1) as usize;
        let words = space.word_counts(len)[len] as usize;
        if gamma.is_whole() {
            words
        } else {
            2 * words
        }
    }

    /// Diameter of every atom (cylinder diameter bound).
    pub fn diameter(&self) -> f64 {
        Cylinder::new(self.a, vec![0; (self.b - self.a + 1) as usize]).diameter()
    }
}

#[derive(Clone, Debug)]
pub struct RecurrenceSetSpec {
    pub partition: CylinderPartition,
    pub gamma: Gamma,
    pub s: usize,
    pub rho: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Membership {
    /// Every `l` with `s <= l` and `(1+ρ)l <= horizon` has a return.
    Member { horizon: usize },
    /// `x ∉ Γ` (`l = None`), or no return in `[l, (1+ρ)l]`.
    NonMember { l: Option<usize> },
    Indeterminate { reason: String },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member { .. })
    }
}

fn upper(l: usize, rho: f64) -> usize {
    ((1.0 + rho) * l as f64 + 1e-9).floor() as usize
}

/// Scans `l = s, s+1, …` with `⌊(1+ρ)l⌋ <= horizon` for a window
/// `[l, ⌊(1+ρ)l⌋]` containing no `m` with `returns(m)`.
fn scan(s: usize, rho: f64, horizon: usize, returns: impl Fn(usize) -> Result<bool>) -> Result<Membership> {
    let s = s.max(1);
    if horizon < upper(s, rho) {
        return Ok(Membership::Indeterminate {
            reason: format!("horizon {horizon} below (1+rho)s = {}", upper(s, rho)),
        });
    }
    // prefix[m] = number of returns at times s..m-1
    let mut prefix = vec![0usize; horizon + 2];
    for m in s..=horizon {
        prefix[m + 1] = prefix[m] + returns(m)? as usize;
    }
    let mut l = s;
    while upper(l, rho) <= horizon {
        if prefix[upper(l, rho) + 1] == prefix[l] {
            return Ok(Membership::NonMember { l: Some(l) });
        }
        l += 1;
    }
    Ok(Membership::Member { horizon })
}

/// Membership of `x` in `Γ_{s,ρ}`: `x ∈ Γ` and `f^m x ∈ ξ(x)` for some
/// `m ∈ [l, (1+ρ)l]`, for every `l >= s` up to the horizon.
pub fn recurrence_membership(spec: &RecurrenceSetSpec, x: &SymbolPoint, horizon: usize) -> Result<Membership> {
    if !spec.gamma.contains(x)? {
        return Ok(Membership::NonMember { l: None });
    }
    let p = spec.partition;
    let len = (p.b - p.a) as usize;
    let coords = x.window(p.a, p.b + horizon as i64);
    let key: Vec<Symbol> = coords[..=len].to_vec();
    scan(spec.s, spec.rho, horizon, |m| {
        if coords[m..=m + len] != key[..] {
            return Ok(false);
        }
        spec.gamma.contains(&x.shifted(m as i64))
    })
}

/// Membership of `x` in `Δ_{s,ρ}` for a fixed cylinder `Δ`: returns are to
/// `Δ` itself rather than to the atom of `x`.
pub fn delta_membership(delta: &Cylinder, x: &SymbolPoint, s: usize, rho: f64, horizon: usize) -> Result<Membership> {
    if !delta.contains(x) {
        return Ok(Membership::NonMember { l: None });
    }
    let len = delta.word.len();
    let coords = x.window(delta.start, delta.start + (len + horizon) as i64 - 1);
    scan(s, rho, horizon, |m| Ok(coords[m..m + len] == delta.word[..]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn spec(s: usize, rho: f64) -> RecurrenceSetSpec {
        RecurrenceSetSpec { partition: CylinderPartition::new(0, 0), gamma: Gamma::Whole, s, rho }
    }

    #[test]
    fn fixed_point_always_returns() {
        let x = SymbolPoint::constant(0);
        for s in [1, 5, 40] {
            assert!(recurrence_membership(&spec(s, 0.3), &x, 200).unwrap().is_member());
        }
    }

    #[test]
    fn finite_block_leaves_its_atom() {
        let k = 20;
        let x = SymbolPoint::parse(&format!("L(0) C({})@0 R(1)", "0".repeat(k))).unwrap();
        assert_eq!(recurrence_membership(&spec(1, 0.5), &x, k - 1).unwrap(), Membership::Member { horizon: k - 1 });
        assert_eq!(recurrence_membership(&spec(1, 0.5), &x, 3 * k + 1).unwrap(), Membership::NonMember { l: Some(k) });
        assert!(matches!(recurrence_membership(&spec(10, 0.5), &x, 12).unwrap(), Membership::Indeterminate { .. }));
    }

    #[test]
    fn delta_sets_grow_with_s() {
        let mu = fixtures::bernoulli(0.5);
        let delta = Cylinder::new(0, vec![1, 0]);
        let mut last = 0;
        for s in [10, 50, 100, 500] {
            let count = (0..200)
                .filter(|&seed| {
                    let x = mu.sample_point(4, seed);
                    delta_membership(&delta, &x, s, 0.5, 2000).unwrap().is_member()
                })
                .count();
            assert!(count >= last);
            last = count;
        }
    }
}
