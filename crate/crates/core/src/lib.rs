pub mod cocycle;
pub mod entropy;
pub mod error;
pub mod fixtures;
pub mod fractal;
pub mod linalg;
pub mod lyapunov_metric;
pub mod measures;
pub mod report;
pub mod shadowing;
pub mod shift_space;
pub mod suite;

pub use error::{Error, Result};
pub use cocycle::CocycleSpec;
pub use entropy::{EntropyNotion, PointFamily};
pub use fractal::{FractalScheme, SchemeParams};
pub use measures::MarkovMeasure;
pub use shift_space::{Cylinder, Resolution, ShiftSpace, Symbol, SymbolPoint, Word};
