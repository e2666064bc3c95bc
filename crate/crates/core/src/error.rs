use std::fmt;

use thiserror::Error;

use crate::steady::CoherenceState;

/// Parameter point attached to solver failures so sweeps can report where they broke.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ParamPoint {
    pub delta: f64,
    pub two_photon: f64,
    pub gamma: f64,
    pub phi: f64,
    pub theta: f64,
}

impl fmt::Display for ParamPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(Delta={}, delta={}, Gamma={}, phi={:.6}, theta={:.6})",
            self.delta, self.two_photon, self.gamma, self.phi, self.theta
        )
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("steady-state system is singular at {0}")]
    Singular(ParamPoint),

    #[error("closed-form expression has a pole at {0}; use the general solver")]
    Pole(ParamPoint),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate bright/dark basis: {0}")]
    DegenerateBasis(String),

    #[error("regime classification is only defined for equal control amplitudes")]
    UnsupportedClassification,

    #[error("phase gradient is undefined on the beam axis (r = 0)")]
    SingularAxis,

    #[error("no steady state by t = {t_max} (convergence metric {metric:e})")]
    Timeout {
        t_max: f64,
        metric: f64,
        last: Box<CoherenceState>,
    },

    #[error("invalid request: {0}")]
    InvalidRequest(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
