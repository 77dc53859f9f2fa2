//! Bipartite entanglement measures, state-space distance metrics, and an
//! empirical harness for the continuity inequalities relating them.

pub mod entanglement;
pub mod error;
pub mod linalg;
pub mod metrics;
pub mod scalar;
pub mod states;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use states::RngSeed;

/// Concrete f64 aliases.
pub type ComplexMatrix64 = linalg::ComplexMatrix<f64>;
pub type EigenSystem64 = linalg::EigenSystem<f64>;
pub type DensityMatrix64 = states::DensityMatrix<f64>;
pub type PureState64 = states::PureState<f64>;
pub type BipartiteState64 = states::BipartiteState<f64>;
