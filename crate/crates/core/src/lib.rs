//! Spectral-Galerkin simulation of the stochastic Kuramoto-Sivashinsky
//! equation `du = (-u_xxxx - u_xx - u u_x) dt + dW` on `(-l, l)` with hinged
//! ends and additive trace-class noise, plus numerical checks of the
//! estimates behind local and global well-posedness.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convergence;
pub mod error;
pub mod estimates;
pub mod mild;
pub mod noise;
pub mod path;
pub mod rng;
pub mod spectral;
pub mod transform;

pub use error::{Error, Result};
pub use estimates::{CheckReport, ConstantsLedger};
pub use mild::{solve_global, GlobalRun, SolverConfig, Trajectory};
pub use noise::{NoiseProfile, NoiseSpec};
pub use path::FieldPath;
pub use rng::{stream_rng, Purpose, StreamId, StreamRng};
pub use spectral::{DomainSpec, Galerkin, SpectralField};
