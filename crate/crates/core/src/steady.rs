//! Weak-probe steady state of the double-tripod optical Bloch equations.
//!
//! All population sits in |0⟩ and the equations are first order in the probes:
//!
//! ```text
//! d/dt [ρA, ρB] = iΩ̂ [ρ1, ρ2] + (iΔ − Γ/2) [ρA, ρB] + i [ΩA0, ΩB0]
//! d/dt [ρ1, ρ2] = iΩ̂† [ρA, ρB] + i (ΔI + δ̂) [ρ1, ρ2]
//! ```
//!
//! [`solve_general`] solves the full 4×4 system directly and works for any
//! control amplitudes and at Δ = ±δ. The closed forms ([`kernel`],
//! [`coherences_closed_form`], [`coherences_special`], [`ground_coherences`])
//! assume equal control amplitudes and have poles the physical solution does
//! not share, so they are used away from those points only.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParamPoint, Result};
use crate::linalg::{self, Mat2, Vec2, C64, I, ONE, ZERO};
use crate::model::{wrap_phase, ControlFieldSet, DetuningConfig, ProbeAmplitudes};

/// Pole threshold relative to the characteristic scale max(Ω², Γ², Δ², δ²).
pub const POLE_RTOL: f64 = 1e-12;
/// Determinant threshold of the 4×4 system relative to its entry scale.
pub const SINGULAR_RTOL: f64 = 1e-14;
/// Tolerance on (φ, θ, δ) when checking special-case constraints.
pub const CONSTRAINT_TOL: f64 = 1e-12;
/// Pole neighborhood inside which [`SolverKind::Auto`] uses the general solver.
pub const AUTO_POLE_RTOL: f64 = 1e-6;

/// Optical (ρA, ρB) and ground-state (ρ1, ρ2) coherences.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceState {
    pub rho_a: C64,
    pub rho_b: C64,
    pub rho_1: C64,
    pub rho_2: C64,
}

impl CoherenceState {
    pub fn zero() -> Self {
        Self::from_array([ZERO; 4])
    }

    pub fn from_array(v: [C64; 4]) -> Self {
        Self {
            rho_a: v[0],
            rho_b: v[1],
            rho_1: v[2],
            rho_2: v[3],
        }
    }

    pub fn to_array(&self) -> [C64; 4] {
        [self.rho_a, self.rho_b, self.rho_1, self.rho_2]
    }

    pub fn optical(&self) -> Vec2 {
        [self.rho_a, self.rho_b]
    }

    pub fn ground(&self) -> Vec2 {
        [self.rho_1, self.rho_2]
    }

    pub fn max_abs(&self) -> f64 {
        self.to_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest componentwise modulus of the difference.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.to_array()
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    fn check_bound(&self, probes: &ProbeAmplitudes, gamma: f64) {
        let bound = 10.0 * probes.max() / gamma;
        if self.max_abs() > bound && bound > 0.0 {
            log::warn!(
                "coherence modulus {:e} exceeds weak-probe sanity bound {:e}",
                self.max_abs(),
                bound
            );
        }
    }
}

/// K = Ω̂ (ΔI + δ̂)⁻¹ Ω̂†.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionKernel {
    pub matrix: Mat2,
}

impl InteractionKernel {
    /// Largest entry modulus of K − K†.
    pub fn hermitian_defect(&self) -> f64 {
        linalg::mat2_hermitian_defect(&self.matrix)
    }
}

/// Parameter surfaces with dedicated reduced formulas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpecialCase {
    /// φ = π, θ = 0: two Λ systems coupled through δ.
    PhiPi,
    /// φ = 0, θ = 0: double-Λ.
    PhiZero,
    /// δ = 0, φ = π, θ = 0: two decoupled Λ systems.
    DeltaZeroPhiPi,
    /// δ = 0, φ = 0, θ = 0: degenerate double-Λ.
    DeltaZeroPhiZero,
}

/// Which route computes the steady state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Closed form plus back-substitution; equal amplitudes only.
    ClosedForm,
    /// Full 4×4 linear solve.
    General,
    /// Closed form away from its poles, general solve near them.
    #[default]
    Auto,
}

pub fn param_point(fields: &ControlFieldSet, det: &DetuningConfig) -> ParamPoint {
    let (phi, theta) = fields.reduce_phases();
    ParamPoint {
        delta: det.delta,
        two_photon: det.two_photon,
        gamma: det.gamma,
        phi,
        theta,
    }
}

/// max(Ω², Γ², Δ², δ²) with Ω the largest control amplitude.
pub fn characteristic_scale(fields: &ControlFieldSet, det: &DetuningConfig) -> f64 {
    let om = fields.max_amplitude();
    [
        om * om,
        det.gamma * det.gamma,
        det.delta * det.delta,
        det.two_photon * det.two_photon,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

/// Steady state from the full 4×4 system in the unknowns (ρA, ρB, ρ1, ρ2).
pub fn solve_general(
    fields: &ControlFieldSet,
    probes: &ProbeAmplitudes,
    det: &DetuningConfig,
) -> Result<CoherenceState> {
    let om = fields.omega_matrix();
    let om_adj = linalg::mat2_adjoint(&om);
    let optical_diag = C64::new(-det.gamma / 2.0, det.delta);
    let ground_diag = [
        I * (det.delta + det.two_photon),
        I * (det.delta - det.two_photon),
    ];

    let mut a = [[ZERO; 4]; 4];
    for i in 0..2 {
        a[i][i] = optical_diag;
        a[2 + i][2 + i] = ground_diag[i];
        for j in 0..2 {
            a[i][2 + j] = I * om[i][j];
            a[2 + i][j] = I * om_adj[i][j];
        }
    }
    let b = [-I * probes.a, -I * probes.b, ZERO, ZERO];

    let sol = linalg::solve_dense(a, b, SINGULAR_RTOL)
        .ok_or_else(|| Error::Singular(param_point(fields, det)))?;
    let state = CoherenceState::from_array(sol.x);
    state.check_bound(probes, det.gamma);
    Ok(state)
}

fn require_equal(fields: &ControlFieldSet) -> Result<f64> {
    fields
        .common_amplitude()
        .ok_or_else(|| Error::Precondition("closed forms require equal control amplitudes".into()))
}

/// e^{i(θ+φ/2)} (cos(φ/2) − i(δ/Δ) sin(φ/2)) and its partner with the signs flipped.
fn phase_factors(phi: f64, theta: f64, ratio: f64) -> (C64, C64) {
    let h = phi / 2.0;
    let upper = C64::from_polar(1.0, theta + h) * C64::new(h.cos(), -ratio * h.sin());
    let lower = C64::from_polar(1.0, -(theta + h)) * C64::new(h.cos(), ratio * h.sin());
    (upper, lower)
}

/// Closed-form kernel for equal control amplitudes.
pub fn kernel(fields: &ControlFieldSet, det: &DetuningConfig) -> Result<InteractionKernel> {
    let omega = require_equal(fields)?;
    let scale = characteristic_scale(fields, det);
    let (dl, dt) = (det.delta, det.two_photon);
    if dl * dl < POLE_RTOL * scale || (dl * dl - dt * dt).abs() < POLE_RTOL * scale {
        return Err(Error::Pole(param_point(fields, det)));
    }
    let (phi, theta) = fields.reduce_phases();
    let pref = 2.0 * omega * omega * dl / (dl * dl - dt * dt);
    let (upper, lower) = phase_factors(phi, theta, dt / dl);
    let p = C64::new(pref, 0.0);
    Ok(InteractionKernel {
        matrix: [[p, p * upper], [p * lower, p]],
    })
}

/// Optical coherences (ρA, ρB) from the general equal-amplitude closed form.
pub fn coherences_closed_form(
    fields: &ControlFieldSet,
    probes: &ProbeAmplitudes,
    det: &DetuningConfig,
) -> Result<Vec2> {
    let omega = require_equal(fields)?;
    let scale = characteristic_scale(fields, det);
    let (dl, dt, g) = (det.delta, det.two_photon, det.gamma);
    let diff = dl * dl - dt * dt;
    if dl * dl < POLE_RTOL * scale || diff.abs() < POLE_RTOL * scale {
        return Err(Error::Pole(param_point(fields, det)));
    }
    let (phi, theta) = fields.reduce_phases();
    let om2 = omega * omega;
    let s = C64::new(2.0 * dl, g);
    let q = s * (diff / (4.0 * om2));
    let h = phi / 2.0;
    let ratio = dt / dl;
    let denom = (ONE - q / dl).powi(2) - h.cos().powi(2) - ratio * ratio * h.sin().powi(2);
    if denom.norm() < POLE_RTOL {
        return Err(Error::Pole(param_point(fields, det)));
    }
    let pref = (diff / (2.0 * om2 * dl * dl)) / denom;
    let (upper, lower) = phase_factors(phi, theta, ratio);
    let diag = dl - q;
    let m: Mat2 = [[diag, -upper * dl], [-lower * dl, diag]];
    let rho = linalg::mat2_apply(&m, &[C64::new(probes.a, 0.0), C64::new(probes.b, 0.0)]);
    Ok([rho[0] * pref, rho[1] * pref])
}

fn check_phase(actual: f64, wanted: f64, what: &str) -> Result<()> {
    if wrap_phase(actual - wanted).abs() > CONSTRAINT_TOL {
        return Err(Error::Precondition(format!(
            "{what} = {actual} but the special case needs {wanted}"
        )));
    }
    Ok(())
}

/// Optical coherences from the reduced formula of a special parameter surface.
pub fn coherences_special(
    case: SpecialCase,
    fields: &ControlFieldSet,
    probes: &ProbeAmplitudes,
    det: &DetuningConfig,
) -> Result<Vec2> {
    let omega = require_equal(fields)?;
    let (phi, theta) = fields.reduce_phases();
    let scale = characteristic_scale(fields, det);
    let (dl, dt, g) = (det.delta, det.two_photon, det.gamma);

    let (target_phi, zero_delta) = match case {
        SpecialCase::PhiPi => (PI, false),
        SpecialCase::PhiZero => (0.0, false),
        SpecialCase::DeltaZeroPhiPi => (PI, true),
        SpecialCase::DeltaZeroPhiZero => (0.0, true),
    };
    check_phase(phi, target_phi, "phi")?;
    check_phase(theta, 0.0, "theta")?;
    if zero_delta && dt.abs() > CONSTRAINT_TOL * scale.sqrt() {
        return Err(Error::Precondition(format!(
            "two-photon detuning is {dt} but the special case needs 0"
        )));
    }

    let om2 = omega * omega;
    let s = C64::new(2.0 * dl, g);
    let pole = || Error::Pole(param_point(fields, det));

    let (pref, diag, off) = match case {
        SpecialCase::PhiPi => {
            let d1 = 4.0 * om2 - s * (dl + dt);
            let d2 = 4.0 * om2 - s * (dl - dt);
            if (d1 * d2).norm() < POLE_RTOL * scale * scale {
                return Err(pole());
            }
            let diag = dl - s * ((dl * dl - dt * dt) / (4.0 * om2));
            (8.0 * om2 / (d1 * d2), diag, C64::new(-dt, 0.0))
        }
        SpecialCase::PhiZero => {
            if dl * dl < POLE_RTOL * scale {
                return Err(pole());
            }
            let q = s * ((dl * dl - dt * dt) / (4.0 * om2));
            let bracket = 2.0 - q / dl;
            if bracket.norm() < POLE_RTOL {
                return Err(pole());
            }
            (-2.0 / (dl * s * bracket), dl - q, C64::new(-dl, 0.0))
        }
        SpecialCase::DeltaZeroPhiPi => {
            let d = 4.0 * om2 - dl * s;
            if (d * d).norm() < POLE_RTOL * scale * scale {
                return Err(pole());
            }
            (8.0 * om2 / (d * d), dl - s * (dl * dl / (4.0 * om2)), ZERO)
        }
        SpecialCase::DeltaZeroPhiZero => {
            if dl * dl < POLE_RTOL * scale {
                return Err(pole());
            }
            let bracket = 2.0 - dl * s / (4.0 * om2);
            if bracket.norm() < POLE_RTOL {
                return Err(pole());
            }
            let diag = dl - s * (dl * dl / (4.0 * om2));
            (-2.0 / (dl * s * bracket), diag, C64::new(-dl, 0.0))
        }
    };
    let (pa, pb) = (C64::new(probes.a, 0.0), C64::new(probes.b, 0.0));
    Ok([pref * (diag * pa + off * pb), pref * (off * pa + diag * pb)])
}

/// Ground-state coherences [ρ1, ρ2] = −(ΔI + δ̂)⁻¹ Ω̂† [ρA, ρB].
pub fn ground_coherences(
    fields: &ControlFieldSet,
    det: &DetuningConfig,
    rho_a: C64,
    rho_b: C64,
) -> Result<Vec2> {
    let scale = characteristic_scale(fields, det);
    let (dl, dt) = (det.delta, det.two_photon);
    if (dl * dl - dt * dt).abs() < POLE_RTOL * scale {
        return Err(Error::Pole(param_point(fields, det)));
    }
    let adj = linalg::mat2_adjoint(&fields.omega_matrix());
    let v = linalg::mat2_apply(&adj, &[rho_a, rho_b]);
    Ok([-v[0] / (dl + dt), -v[1] / (dl - dt)])
}

/// Full steady state from the closed forms.
pub fn solve_closed_form(
    fields: &ControlFieldSet,
    probes: &ProbeAmplitudes,
    det: &DetuningConfig,
) -> Result<CoherenceState> {
    let [rho_a, rho_b] = coherences_closed_form(fields, probes, det)?;
    let [rho_1, rho_2] = ground_coherences(fields, det, rho_a, rho_b)?;
    let state = CoherenceState {
        rho_a,
        rho_b,
        rho_1,
        rho_2,
    };
    state.check_bound(probes, det.gamma);
    Ok(state)
}

/// True when the point lies within [`AUTO_POLE_RTOL`] of a closed-form pole.
pub fn near_closed_form_pole(fields: &ControlFieldSet, det: &DetuningConfig) -> bool {
    let Some(omega) = fields.common_amplitude() else {
        return true;
    };
    let scale = characteristic_scale(fields, det);
    let (dl, dt, g) = (det.delta, det.two_photon, det.gamma);
    let diff = dl * dl - dt * dt;
    if dl * dl < AUTO_POLE_RTOL * scale || diff.abs() < AUTO_POLE_RTOL * scale {
        return true;
    }
    let (phi, _) = fields.reduce_phases();
    let q = C64::new(2.0 * dl, g) * (diff / (4.0 * omega * omega));
    let h = phi / 2.0;
    let ratio = dt / dl;
    let denom = (ONE - q / dl).powi(2) - h.cos().powi(2) - ratio * ratio * h.sin().powi(2);
    denom.norm() < AUTO_POLE_RTOL
}

/// Steady state by the requested route.
pub fn steady_state(
    solver: SolverKind,
    fields: &ControlFieldSet,
    probes: &ProbeAmplitudes,
    det: &DetuningConfig,
) -> Result<CoherenceState> {
    match solver {
        SolverKind::General => solve_general(fields, probes, det),
        SolverKind::ClosedForm => solve_closed_form(fields, probes, det),
        SolverKind::Auto => {
            if near_closed_form_pole(fields, det) {
                solve_general(fields, probes, det)
            } else {
                solve_closed_form(fields, probes, det)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn fig2a() -> (ControlFieldSet, ProbeAmplitudes) {
        (
            ControlFieldSet::equal_amplitude(1.0, [PI, 0.0, 0.0, 0.0]).unwrap(),
            ProbeAmplitudes::new(0.1, 0.1),
        )
    }

    #[test]
    fn zero_probes_give_zero_state() {
        let (f, _) = fig2a();
        let s = solve_general(
            &f,
            &ProbeAmplitudes::new(0.0, 0.0),
            &DetuningConfig::unit(0.3, 1.0),
        )
        .unwrap();
        assert_eq!(s.max_abs(), 0.0);
    }

    #[test]
    fn transparency_at_two_photon_resonance() {
        let (f, p) = fig2a();
        let s = solve_general(&f, &p, &DetuningConfig::unit(1.0, 1.0)).unwrap();
        assert!(s.rho_a.norm() < 1e-15 && s.rho_b.norm() < 1e-15);
    }

    #[test]
    fn fig2a_resonance_value() {
        let (f, p) = fig2a();
        let s = solve_general(&f, &p, &DetuningConfig::unit(0.0, 1.0)).unwrap();
        let want = C64::new(-0.8, 0.2) / 17.0;
        assert!((s.rho_a - want).norm() < 1e-15);
        assert!((s.rho_b - want).norm() < 1e-15);
        let sp = coherences_special(SpecialCase::PhiPi, &f, &p, &DetuningConfig::unit(0.0, 1.0))
            .unwrap();
        assert!((sp[0] - want).norm() < 1e-15);
    }

    #[test]
    fn kernel_examples() {
        let f = ControlFieldSet::equal_amplitude(1.0, [0.0; 4]).unwrap();
        let k = kernel(&f, &DetuningConfig::unit(2.0, 1.0)).unwrap();
        for e in k.matrix.iter().flatten() {
            assert!((e - C64::new(4.0 / 3.0, 0.0)).norm() < 1e-14);
        }
        let (f, _) = fig2a();
        let det = DetuningConfig::unit(1.7, 0.6);
        let k = kernel(&f, &det).unwrap();
        let pref = 2.0 * 1.7 / (1.7f64.powi(2) - 0.36);
        assert!((k.matrix[0][1] - C64::new(pref * 0.6 / 1.7, 0.0)).norm() < 1e-13);
        assert!(k.hermitian_defect() < 1e-12);
    }

    #[test]
    fn kernel_matches_matrix_product() {
        let f = ControlFieldSet::equal_amplitude(1.3, [0.4, -1.1, 2.0, 0.7]).unwrap();
        let det = DetuningConfig::unit(-0.9, 2.2);
        let k = kernel(&f, &det).unwrap();
        let om = f.omega_matrix();
        let inv = [
            [C64::new(1.0 / (det.delta + det.two_photon), 0.0), ZERO],
            [ZERO, C64::new(1.0 / (det.delta - det.two_photon), 0.0)],
        ];
        let direct = linalg::mat2_mul(&linalg::mat2_mul(&om, &inv), &linalg::mat2_adjoint(&om));
        for (row, want) in k.matrix.iter().zip(&direct) {
            for (z, w) in row.iter().zip(want) {
                assert!((z - w).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn kernel_poles() {
        let (f, _) = fig2a();
        assert!(matches!(
            kernel(&f, &DetuningConfig::unit(1.0, 1.0)),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            kernel(&f, &DetuningConfig::unit(-1.0, 1.0)),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            kernel(&f, &DetuningConfig::unit(0.0, 1.0)),
            Err(Error::Pole(_))
        ));
    }

    #[test]
    fn closed_forms_reject_unequal_amplitudes() {
        let f = ControlFieldSet::from_complex(ONE, ONE * 2.0, ONE, ONE);
        let det = DetuningConfig::unit(0.5, 1.0);
        let p = ProbeAmplitudes::new(0.1, 0.1);
        assert!(matches!(kernel(&f, &det), Err(Error::Precondition(_))));
        assert!(matches!(
            coherences_closed_form(&f, &p, &det),
            Err(Error::Precondition(_))
        ));
        assert!(solve_general(&f, &p, &det).is_ok());
        // Auto falls back to the general solver.
        assert!(steady_state(SolverKind::Auto, &f, &p, &det).is_ok());
    }

    #[test]
    fn special_case_constraints() {
        let p = ProbeAmplitudes::new(0.1, 0.1);
        let f = ControlFieldSet::equal_amplitude(1.0, [FRAC_PI_2, 0.0, 0.0, FRAC_PI_2]).unwrap();
        let det = DetuningConfig::unit(0.5, 1.0);
        assert!(matches!(
            coherences_special(SpecialCase::PhiPi, &f, &p, &det),
            Err(Error::Precondition(_))
        ));
        let (f, _) = fig2a();
        assert!(matches!(
            coherences_special(SpecialCase::DeltaZeroPhiPi, &f, &p, &det),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            coherences_special(SpecialCase::PhiZero, &f, &p, &det),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn delta_zero_phi_pi_is_decoupled() {
        let (f, _) = fig2a();
        let det = DetuningConfig::unit(0.8, 0.0);
        let a = coherences_special(
            SpecialCase::DeltaZeroPhiPi,
            &f,
            &ProbeAmplitudes::new(0.1, 0.0),
            &det,
        )
        .unwrap();
        let b = coherences_special(
            SpecialCase::DeltaZeroPhiPi,
            &f,
            &ProbeAmplitudes::new(0.1, 0.2),
            &det,
        )
        .unwrap();
        assert_eq!(a[0], b[0]);
        assert_eq!(a[1], ZERO);
    }

    #[test]
    fn phi_zero_vanishes_at_two_photon_resonances() {
        let f = ControlFieldSet::equal_amplitude(1.0, [0.0; 4]).unwrap();
        let p = ProbeAmplitudes::new(0.1, 0.1);
        for dl in [2.0, -2.0] {
            let r =
                coherences_special(SpecialCase::PhiZero, &f, &p, &DetuningConfig::unit(dl, 2.0))
                    .unwrap();
            assert!(r[0].norm() < 1e-16 && r[1].norm() < 1e-16);
        }
    }

    #[test]
    fn ground_back_substitution() {
        let f = ControlFieldSet::equal_amplitude(0.9, [0.3, 1.2, -0.4, 2.5]).unwrap();
        let det = DetuningConfig::unit(1.3, -0.4);
        let p = ProbeAmplitudes::new(0.12, 0.05);
        let g = solve_general(&f, &p, &det).unwrap();
        let r = ground_coherences(&f, &det, g.rho_a, g.rho_b).unwrap();
        assert!((r[0] - g.rho_1).norm() < 1e-10 && (r[1] - g.rho_2).norm() < 1e-10);

        assert_eq!(ground_coherences(&f, &det, ZERO, ZERO).unwrap(), [ZERO; 2]);
        assert!(matches!(
            ground_coherences(&f, &DetuningConfig::unit(0.4, -0.4), ONE, ONE),
            Err(Error::Pole(_))
        ));

        let far = ground_coherences(&f, &DetuningConfig::unit(1e6, 1.0), ONE, ONE).unwrap();
        assert!(far[0].norm() < 1e-5 && far[1].norm() < 1e-5);
    }

    #[test]
    fn singular_system_names_the_point() {
        let f = ControlFieldSet::equal_amplitude(1.0, [0.0; 4]).unwrap();
        let err = solve_general(
            &f,
            &ProbeAmplitudes::new(0.1, 0.1),
            &DetuningConfig::unit(0.0, 0.0),
        )
        .unwrap_err();
        match err {
            Error::Singular(pt) => assert_eq!(pt.delta, 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn auto_uses_general_at_poles() {
        let (f, p) = fig2a();
        let det = DetuningConfig::unit(1.0, 1.0);
        assert!(near_closed_form_pole(&f, &det));
        assert!(solve_closed_form(&f, &p, &det).is_err());
        let s = steady_state(SolverKind::Auto, &f, &p, &det).unwrap();
        assert!(s.rho_a.norm() < 1e-15);
    }
}
