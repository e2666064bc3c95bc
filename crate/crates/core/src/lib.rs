//! Steady-state coherences, optical torque and regime analysis for a
//! five-level double-tripod atom driven by four phase-locked control fields
//! and two weak vortex probes.
//!
//! Frequencies are in units of the excited-state decay rate Γ.

// Guards like `!(x > 0.0)` deliberately reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod dynamics;
pub mod error;
pub mod linalg;
pub mod mechanics;
pub mod model;
pub mod parallel;
pub mod presets;
pub mod regime;
pub mod steady;
pub mod sweep;

pub use error::{Error, ParamPoint, Result};
pub use mechanics::{torque, torque_function, TorqueSpectrum};
pub use model::{ControlFieldSet, DetuningConfig, ProbeAmplitudes, ProbeConfig, SpatialPoint};
pub use parallel::Execution;
pub use regime::{classify, RegimeLabel, RegimeReport};
pub use steady::{solve_general, steady_state, CoherenceState, SolverKind};
