//! Simulation of a geometric phase gate between two collective spins that
//! share one driven cavity mode.
//!
//! Units: ħ = 1, frequencies in units of the ac Stark coupling `G` unless a
//! function says otherwise.

// `!(x > 0.0)` style guards are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod drive;
pub mod error;
pub mod feasibility;
pub mod fock;
pub mod format;
pub mod linalg;
pub mod model;
pub mod phase;
pub mod quadrature;
pub mod state;
pub mod trajectory;
pub mod validate;

pub use drive::DrivePulse;
pub use error::{Error, Result};
pub use model::{ProtocolParams, SpinSector, SpinState};
pub use phase::{PhaseCoefficients, PhaseTable, Stage};
pub use trajectory::Trajectory;
pub use state::{EntanglementReport, JointAmplitudes, JointDensityMatrix, RemnantModel};
