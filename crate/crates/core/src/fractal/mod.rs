//! Construction of Lyapunov-irregular points from two measures with
//! different top exponents, and finite-depth certificates for the
//! construction.
//!
//! Blocks from separated sets of `μ1` and `μ2` alternate level by level
//! (odd levels use `μ1`), each level repeated `N_k` times and joined to the
//! next by a bridge of length `N`. The shadowing points of these
//! pseudo-orbits form the sets `T_k`.

mod certificates;
mod params;
mod scheme;

pub use certificates::{
    ball_sweep, distinctness, divergence_checkpoints, edp_lower_bound, enumerate_points, omega_ball_bound,
    omega_ball_bound_on, packing_lower_bound, support_check, BallBound, BallSweep, CertificateStatus, Distinctness,
    DivergenceReport, EntropyBound, Irregularity, SchemeEnumeration, SupportCheck,
};
pub use params::{choose_parameters, regularity_level, ParamConfig, SchemeParams};
pub use scheme::{build_scheme, construct_point, Block, BlockSetInfo, BuildConfig, FractalScheme, Level, NkRule, SchemeMode};
