//! Markov measures and the measure-theoretic constructions built on them.

mod birkhoff;
mod dense;
mod katok;
mod markov;
mod recurrence;

pub use birkhoff::{birkhoff_average, Observable};
pub use dense::{bernoulli_grid, entropy_dense_witness, DenseCandidate, DenseSearch, MleConstraint};
pub use katok::{
    katok_entropy, katok_entropy_with_budget, katok_separated_sets, minimal_cylinder_cover, verify_separated_set,
    KatokEstimate, KatokRow, SeparatedSet, SeparatedSetCertificate, SeparatedSetParams, DEFAULT_CLASS_BUDGET,
};
pub use markov::MarkovMeasure;
pub use recurrence::{
    delta_membership, recurrence_membership, CylinderPartition, Gamma, Membership, RecurrenceSetSpec,
};
