//! Search of a Markov family for a measure with large entropy and a
//! prescribed top exponent.

use serde::{Deserialize, Serialize};

use super::MarkovMeasure;
use crate::cocycle::CocycleSpec;
use crate::error::Result;

/// Constraint on `χ_max(A, μ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum MleConstraint {
    /// Strictly above the family infimum by more than the margin.
    AboveInfimum(f64),
    Above(f64),
    Below(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseCandidate {
    pub index: usize,
    pub entropy: f64,
    pub mle: f64,
    pub qualifies: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseSearch {
    /// The qualifying candidate of largest entropy (ties: lowest index).
    pub witness: Option<DenseCandidate>,
    /// The best candidate by entropy among those meeting the MLE
    /// constraint, or overall if none does.
    pub best: DenseCandidate,
    pub family_infimum_mle: f64,
    pub entropy_target: f64,
    pub tolerance: f64,
    pub candidates: Vec<DenseCandidate>,
}

/// Evaluates `h(μ)` and `χ_max(A, μ)` on `grid` and returns the witness with
/// `h >= entropy_target - tolerance` that satisfies `constraint`.
pub fn entropy_dense_witness(
    cocycle: &CocycleSpec,
    constraint: MleConstraint,
    entropy_target: f64,
    tolerance: f64,
    grid: &[MarkovMeasure],
    mle_depth: usize,
) -> Result<DenseSearch> {
    let mut raw = Vec::with_capacity(grid.len());
    for mu in grid {
        let mle = cocycle.mle_of_measure(mu, mle_depth, 1 << 22)?.value;
        raw.push((mu.entropy(), mle));
    }
    let inf = raw.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let meets = |mle: f64| match constraint {
        MleConstraint::AboveInfimum(margin) => mle > inf + margin,
        MleConstraint::Above(v) => mle > v,
        MleConstraint::Below(v) => mle < v,
    };
    let candidates: Vec<DenseCandidate> = raw
        .iter()
        .enumerate()
        .map(|(index, &(entropy, mle))| DenseCandidate {
            index,
            entropy,
            mle,
            qualifies: meets(mle) && entropy >= entropy_target - tolerance,
        })
        .collect();
    let by_entropy = |it: &mut dyn Iterator<Item = &DenseCandidate>| {
        it.fold(None::<&DenseCandidate>, |acc, c| match acc {
            Some(a) if a.entropy >= c.entropy => Some(a),
            _ => Some(c),
        })
        .cloned()
    };
    let witness = by_entropy(&mut candidates.iter().filter(|c| c.qualifies));
    let best = by_entropy(&mut candidates.iter().filter(|c| meets(c.mle)))
        .or_else(|| by_entropy(&mut candidates.iter()))
        .ok_or_else(|| crate::Error::EmptyPool("empty Markov grid".into()))?;
    Ok(DenseSearch { witness, best, family_infimum_mle: inf, entropy_target, tolerance, candidates })
}

/// Bernoulli(p) for `p = 0, 1/k, …, 1`.
pub fn bernoulli_grid(k: usize) -> Vec<MarkovMeasure> {
    (0..=k).map(|i| MarkovMeasure::bernoulli(i as f64 / k as f64).expect("p in [0, 1]")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn examples() {
        let a = fixtures::test_cocycle();
        let grid = bernoulli_grid(10);
        let s = entropy_dense_witness(&a, MleConstraint::AboveInfimum(0.0), 2f64.ln() - 0.01, 1e-12, &grid, 1).unwrap();
        let w = s.witness.unwrap();
        assert_eq!(w.index, 5);
        assert!((w.entropy - 2f64.ln()).abs() < 1e-12);
        assert!((s.family_infimum_mle - 2f64.ln()).abs() < 1e-12);

        let s = entropy_dense_witness(&a, MleConstraint::AboveInfimum(0.0), 0.0, 1e-12, &grid, 1).unwrap();
        assert!(s.candidates.iter().filter(|c| c.mle > s.family_infimum_mle).all(|c| c.qualifies));

        let s = entropy_dense_witness(&a, MleConstraint::AboveInfimum(0.0), 2f64.ln() + 0.1, 1e-12, &grid, 1).unwrap();
        assert!(s.witness.is_none());
        assert_eq!(s.best.index, 5);
    }
}
