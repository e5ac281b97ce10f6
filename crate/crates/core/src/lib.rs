//! Robustness of entanglement for small bipartite systems, its optimal
//! witnesses, and the teleportation activation protocol it quantifies.
//!
//! Every numerical kernel is generic over a [`Real`] scalar; the aliases
//! below fix the scalar to `f64`, which is what the acceptance tolerances
//! are stated for.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activation;
pub mod error;
pub mod linalg;
pub mod robustness;
pub mod scalar;
pub mod sdp;
pub mod seesaw;
pub mod states;
pub mod teleport;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{BipartiteSpace, Subsystem};
pub use scalar::Real;
pub use states::FourPartySpace;

pub type ComplexMatrix = linalg::Matrix<f64>;
pub type ComplexMatrix32 = linalg::Matrix<f32>;
pub type PureState = linalg::PureState<f64>;
pub type DensityMatrix = states::Density<f64>;
pub type DensityMatrix32 = states::Density<f32>;
pub type SdpProblem = sdp::Problem<f64>;
pub type SdpSolution = sdp::Solution<f64>;
pub type RobustnessResult = robustness::RobustnessResult<f64>;
pub type Witness = robustness::Witness<f64>;
pub type TeleportReport = teleport::TeleportReport<f64>;
pub type ActivationReport = activation::ActivationReport<f64>;
