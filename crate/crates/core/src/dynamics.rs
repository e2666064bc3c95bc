//! Time-domain integration of the weak-probe Bloch equations.
//!
//! Starting from zero coherences (atom in |0⟩) the linear system relaxes to
//! the steady state found by [`crate::steady::solve_general`]. Only the optical
//! coherences are damped (Γ/2); the ground-state coherences relax through
//! their coupling to them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{self, C64, I};
use crate::model::{ControlFieldSet, DetuningConfig, ProbeAmplitudes};
use crate::steady::CoherenceState;

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_ATOL: f64 = 1e-10;
pub const DEFAULT_RTOL: f64 = 1e-8;

/// Right-hand side of the Bloch equations.
pub fn rhs(
    state: &CoherenceState,
    fields: &ControlFieldSet,
    probes: &ProbeAmplitudes,
    det: &DetuningConfig,
) -> CoherenceState {
    let om = fields.omega_matrix();
    let om_adj = linalg::mat2_adjoint(&om);
    let drive = linalg::mat2_apply(&om, &state.ground());
    let back = linalg::mat2_apply(&om_adj, &state.optical());
    let damp = C64::new(-det.gamma / 2.0, det.delta);
    CoherenceState {
        rho_a: I * drive[0] + damp * state.rho_a + I * probes.a,
        rho_b: I * drive[1] + damp * state.rho_b + I * probes.b,
        rho_1: I * back[0] + I * (det.delta + det.two_photon) * state.rho_1,
        rho_2: I * back[1] + I * (det.delta - det.two_photon) * state.rho_2,
    }
}

/// max |dρ/dt| / Γ over the four coherences.
pub fn convergence_metric(derivative: &CoherenceState, gamma: f64) -> f64 {
    derivative.max_abs() / gamma
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorOptions {
    pub atol: f64,
    pub rtol: f64,
    /// Keep every n-th accepted step in the trajectory (the final state is always kept).
    pub record_every: usize,
    pub max_steps: usize,
}

impl IntegratorOptions {
    /// Local error tolerances tied to the convergence tolerance: step-controller
    /// noise at the stability boundary otherwise keeps the metric near rtol.
    pub fn for_tolerance(tol: f64) -> Self {
        Self {
            atol: DEFAULT_ATOL.min(1e-4 * tol),
            rtol: DEFAULT_RTOL.min(1e-2 * tol),
            ..Self::default()
        }
    }
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        Self {
            atol: DEFAULT_ATOL,
            rtol: DEFAULT_RTOL,
            record_every: 1,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlochTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<CoherenceState>,
    /// Convergence metric at the final sample.
    pub metric: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

impl BlochTrajectory {
    pub fn final_state(&self) -> &CoherenceState {
        self.states
            .last()
            .expect("trajectory always holds the initial state")
    }

    pub fn final_time(&self) -> f64 {
        *self
            .times
            .last()
            .expect("trajectory always holds the initial time")
    }
}

// Dormand–Prince 5(4) tableau. The system is autonomous, so the nodes c_i are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

type State = [C64; 4];

fn axpy(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (coef, k) in terms {
        if *coef == 0.0 {
            continue;
        }
        for i in 0..4 {
            out[i] += k[i] * (h * coef);
        }
    }
    out
}

/// Integrates from zero coherences until the convergence metric drops below `tol`,
/// using [`IntegratorOptions::for_tolerance`].
pub fn integrate_to_steady(
    fields: &ControlFieldSet,
    probes: &ProbeAmplitudes,
    det: &DetuningConfig,
    tol: f64,
    t_max: f64,
) -> Result<BlochTrajectory> {
    integrate_to_steady_with(
        fields,
        probes,
        det,
        tol,
        t_max,
        &IntegratorOptions::for_tolerance(tol),
    )
}

pub fn integrate_to_steady_with(
    fields: &ControlFieldSet,
    probes: &ProbeAmplitudes,
    det: &DetuningConfig,
    tol: f64,
    t_max: f64,
    opts: &IntegratorOptions,
) -> Result<BlochTrajectory> {
    if !(tol > 0.0) || !(t_max > 0.0) {
        return Err(Error::Domain(format!(
            "tolerance and t_max must be positive, got ({tol}, {t_max})"
        )));
    }
    let f = |y: &State| rhs(&CoherenceState::from_array(*y), fields, probes, det).to_array();

    let mut t = 0.0;
    let mut y: State = CoherenceState::zero().to_array();
    let mut k1 = f(&y);
    let mut metric = convergence_metric(&CoherenceState::from_array(k1), det.gamma);
    let mut traj = BlochTrajectory {
        times: vec![t],
        states: vec![CoherenceState::from_array(y)],
        metric,
        accepted_steps: 0,
        rejected_steps: 0,
    };
    if metric < tol {
        return Ok(traj);
    }

    let freq = fields
        .max_amplitude()
        .max(det.gamma)
        .max(det.delta.abs())
        .max(det.two_photon.abs());
    let mut h = (0.01 / freq).min(t_max);

    while metric >= tol {
        if t >= t_max || traj.accepted_steps + traj.rejected_steps >= opts.max_steps {
            return Err(Error::Timeout {
                t_max,
                metric,
                last: Box::new(CoherenceState::from_array(y)),
            });
        }
        h = h.min(t_max - t);
        let mut k: [State; 7] = [k1; 7];
        for stage in 1..7 {
            let terms: Vec<(f64, &State)> = (0..stage).map(|j| (A[stage][j], &k[j])).collect();
            let ys = axpy(&y, &terms, h);
            k[stage] = f(&ys);
        }
        let y5 = axpy(
            &y,
            &B5.iter()
                .zip(k.iter())
                .map(|(b, ki)| (*b, ki))
                .collect::<Vec<_>>(),
            h,
        );
        let y4 = axpy(
            &y,
            &B4.iter()
                .zip(k.iter())
                .map(|(b, ki)| (*b, ki))
                .collect::<Vec<_>>(),
            h,
        );

        let mut err = 0.0_f64;
        for i in 0..4 {
            let sc = opts.atol + opts.rtol * y[i].norm().max(y5[i].norm());
            err = err.max((y5[i] - y4[i]).norm() / sc);
        }

        if err <= 1.0 {
            t += h;
            y = y5;
            // FSAL: the last stage is f(y5).
            k1 = k[6];
            metric = convergence_metric(&CoherenceState::from_array(k1), det.gamma);
            traj.accepted_steps += 1;
            let done = metric < tol;
            if done || traj.accepted_steps.is_multiple_of(opts.record_every.max(1)) {
                traj.times.push(t);
                traj.states.push(CoherenceState::from_array(y));
            }
            traj.metric = metric;
        } else {
            traj.rejected_steps += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Ok(traj)
}
