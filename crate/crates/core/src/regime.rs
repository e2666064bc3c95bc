//! Bright/dark decomposition of the control loop and the effective level
//! structure it produces.
//!
//! At φ = π the two excited states couple to orthogonal ground superpositions
//! and δ mixes them (two coupled Λ systems); at δ = 0 that mixing disappears.
//! At φ = 0 both excited states share one bright state (double-Λ).

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Vec2, C64, ZERO};
use crate::model::{wrap_phase, ControlFieldSet, DetuningConfig, ProbeAmplitudes};

/// Phase and detuning comparisons in [`classify`].
pub const CLASSIFY_TOL: f64 = 1e-9;

pub type Mat5 = [[C64; 5]; 5];

/// Index of each state in the 5×5 Hamiltonians.
pub mod level {
    pub const GROUND: usize = 0;
    pub const A: usize = 1;
    pub const B: usize = 2;
    /// |1⟩ in the lab basis, |+⟩ in the transformed one.
    pub const FIRST: usize = 3;
    /// |2⟩ in the lab basis, |−⟩ in the transformed one.
    pub const SECOND: usize = 4;
}

/// Bright and dark ground superpositions over (|1⟩, |2⟩).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrightDarkBasis {
    pub bright_a: Vec2,
    pub dark_a: Vec2,
    pub bright_b: Vec2,
    pub dark_b: Vec2,
    /// √(|Ω_A1|² + |Ω_A2|²)
    pub omega_a: f64,
    /// √(|Ω_B1|² + |Ω_B2|²)
    pub omega_b: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeLabel {
    CoupledLambda,
    DoubleLambda,
    DecoupledLambdas,
    Generic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub label: RegimeLabel,
    pub c_b: f64,
    pub c_d: f64,
    pub c_x: f64,
    /// |⟨𝓑_A|𝓑_B⟩|
    pub overlap: f64,
    pub phi: f64,
    pub theta: f64,
}

pub fn inner(u: &Vec2, v: &Vec2) -> C64 {
    u[0].conj() * v[0] + u[1].conj() * v[1]
}

pub fn bright_dark(fields: &ControlFieldSet) -> Result<BrightDarkBasis> {
    let omega_a = (fields.a1.norm_sqr() + fields.a2.norm_sqr()).sqrt();
    let omega_b = (fields.b1.norm_sqr() + fields.b2.norm_sqr()).sqrt();
    if omega_a == 0.0 || omega_b == 0.0 {
        return Err(Error::DegenerateBasis(format!(
            "effective couplings are ({omega_a}, {omega_b})"
        )));
    }
    Ok(BrightDarkBasis {
        bright_a: [fields.a1.conj() / omega_a, fields.a2.conj() / omega_a],
        dark_a: [fields.a2 / omega_a, -fields.a1 / omega_a],
        bright_b: [fields.b1.conj() / omega_b, fields.b2.conj() / omega_b],
        dark_b: [fields.b2 / omega_b, -fields.b1 / omega_b],
        omega_a,
        omega_b,
    })
}

/// (C_B, C_D, C_X) as defined for the A subsystem. C_B and C_D are left
/// unnormalized while C_X is divided by Ω_A²; every equal-amplitude
/// configuration has C_B = C_D = 0.
pub fn coupling_coeffs(fields: &ControlFieldSet) -> Result<(f64, f64, f64)> {
    let norm = fields.a1.norm_sqr() + fields.a2.norm_sqr();
    if norm == 0.0 {
        return Err(Error::DegenerateBasis("Ω_A1 and Ω_A2 both vanish".into()));
    }
    let c_b = fields.a2.norm_sqr() - fields.a1.norm_sqr();
    let c_d = -c_b;
    let c_x = -(fields.a1 * fields.a2 + fields.a1.conj() * fields.a2.conj()) / norm;
    Ok((c_b, c_d, c_x.re))
}

pub fn classify(fields: &ControlFieldSet, det: &DetuningConfig) -> Result<RegimeReport> {
    if !fields.equal_amplitudes() {
        return Err(Error::UnsupportedClassification);
    }
    let (phi, theta) = fields.reduce_phases();
    let (c_b, c_d, c_x) = coupling_coeffs(fields)?;
    let basis = bright_dark(fields)?;
    let overlap = inner(&basis.bright_a, &basis.bright_b).norm();

    let scale = fields.max_amplitude().max(det.gamma);
    let phi_pi = wrap_phase(phi - PI).abs() < CLASSIFY_TOL;
    let phi_zero = phi.abs() < CLASSIFY_TOL;
    let delta_zero = det.two_photon.abs() < CLASSIFY_TOL * scale;
    let label = match (phi_pi, phi_zero, delta_zero) {
        (true, _, false) => RegimeLabel::CoupledLambda,
        (true, _, true) => RegimeLabel::DecoupledLambdas,
        (_, true, _) => RegimeLabel::DoubleLambda,
        _ => RegimeLabel::Generic,
    };
    Ok(RegimeReport {
        label,
        c_b,
        c_d,
        c_x,
        overlap,
        phi,
        theta,
    })
}

/// Lab-frame Hamiltonian over (|0⟩, |A⟩, |B⟩, |1⟩, |2⟩) with real local probe
/// amplitudes; |1⟩ is shifted by +δ and |2⟩ by −δ.
pub fn lab_hamiltonian(
    fields: &ControlFieldSet,
    det: &DetuningConfig,
    probes: &ProbeAmplitudes,
) -> Mat5 {
    use level::*;
    let mut h = [[ZERO; 5]; 5];
    let couplings = [
        (A, GROUND, C64::new(probes.a, 0.0)),
        (B, GROUND, C64::new(probes.b, 0.0)),
        (A, FIRST, fields.a1),
        (A, SECOND, fields.a2),
        (B, FIRST, fields.b1),
        (B, SECOND, fields.b2),
    ];
    for (i, j, g) in couplings {
        h[i][j] = -g;
        h[j][i] = -g.conj();
    }
    h[FIRST][FIRST] = C64::new(det.two_photon, 0.0);
    h[SECOND][SECOND] = C64::new(-det.two_photon, 0.0);
    h
}

/// The (|+⟩, |−⟩) pair used by [`transformed_hamiltonian`].
///
/// At φ = π the A-bright state is the antisymmetric |−⟩ = (|2⟩ − |1⟩)/√2 and
/// the A-dark state is |+⟩. Elsewhere |+⟩ is the A-bright state and |−⟩ the
/// A-dark state, which at φ = 0 gives |−⟩ = (|1⟩ − |2⟩)/√2.
pub fn symmetric_pair(fields: &ControlFieldSet) -> Result<(Vec2, Vec2)> {
    let basis = bright_dark(fields)?;
    let (phi, _) = fields.reduce_phases();
    if wrap_phase(phi - PI).abs() < CLASSIFY_TOL {
        Ok((basis.dark_a, basis.bright_a))
    } else {
        Ok((basis.bright_a, basis.dark_a))
    }
}

/// Hamiltonian in the basis (|0⟩, |A⟩, |B⟩, |+⟩, |−⟩).
pub fn transformed_hamiltonian(
    fields: &ControlFieldSet,
    det: &DetuningConfig,
    probes: &ProbeAmplitudes,
) -> Result<Mat5> {
    if !fields.equal_amplitudes() {
        return Err(Error::Precondition(
            "the transformed Hamiltonian is defined for equal control amplitudes".into(),
        ));
    }
    let (plus, minus) = symmetric_pair(fields)?;
    let mut u = [[ZERO; 5]; 5];
    for (i, row) in u.iter_mut().enumerate().take(3) {
        row[i] = C64::new(1.0, 0.0);
    }
    for k in 0..2 {
        u[level::FIRST + k][level::FIRST] = plus[k];
        u[level::FIRST + k][level::SECOND] = minus[k];
    }
    let h = lab_hamiltonian(fields, det, probes);
    // U† H U
    let mut hu = [[ZERO; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            hu[i][j] = (0..5).map(|k| h[i][k] * u[k][j]).sum();
        }
    }
    let mut out = [[ZERO; 5]; 5];
    for i in 0..5 {
        for j in 0..5 {
            out[i][j] = (0..5).map(|k| u[k][i].conj() * hu[k][j]).sum();
        }
    }
    Ok(out)
}

#[allow(clippy::needless_range_loop)]
pub fn hermitian_defect5(h: &Mat5) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..5 {
        for j in 0..5 {
            worst = worst.max((h[i][j] - h[j][i].conj()).norm());
        }
    }
    worst
}

/// (|1⟩ + |2⟩)/√2 and (|2⟩ − |1⟩)/√2.
pub fn plus_minus_states() -> (Vec2, Vec2) {
    let s = C64::new(FRAC_1_SQRT_2, 0.0);
    ([s, s], [-s, s])
}

#[cfg(test)]
mod tests {
    use super::*;
    use level::*;

    const EPS: f64 = 1e-12;

    fn close(u: &Vec2, v: &Vec2) -> bool {
        (u[0] - v[0]).norm() < EPS && (u[1] - v[1]).norm() < EPS
    }

    fn fields(phases: [f64; 4]) -> ControlFieldSet {
        ControlFieldSet::equal_amplitude(1.0, phases).unwrap()
    }

    #[test]
    fn bright_dark_phi_pi() {
        let b = bright_dark(&fields([PI, 0.0, 0.0, 0.0])).unwrap();
        let (plus, minus) = plus_minus_states();
        assert!(close(&b.bright_a, &minus));
        assert!(close(&b.bright_b, &plus));
        assert!(close(&b.dark_a, &plus));
        assert!((b.omega_a - 2f64.sqrt()).abs() < EPS);
        assert!((b.omega_b - 2f64.sqrt()).abs() < EPS);
    }

    #[test]
    fn bright_dark_phi_zero_collapse() {
        let b = bright_dark(&fields([0.0; 4])).unwrap();
        let (plus, _) = plus_minus_states();
        assert!(close(&b.bright_a, &plus) && close(&b.bright_b, &plus));
    }

    #[test]
    fn bright_dark_degenerate() {
        let z = C64::new(0.0, 0.0);
        let f = ControlFieldSet::from_complex(z, z, C64::new(1.0, 0.0), z);
        assert!(matches!(bright_dark(&f), Err(Error::DegenerateBasis(_))));
    }

    #[test]
    fn coefficient_examples() {
        let (cb, cd, cx) = coupling_coeffs(&fields([PI, 0.0, 0.0, 0.0])).unwrap();
        assert!(cb.abs() < EPS && cd.abs() < EPS && (cx - 1.0).abs() < EPS);
        let (cb, _, cx) = coupling_coeffs(&fields([0.0; 4])).unwrap();
        assert!(cb.abs() < EPS && (cx + 1.0).abs() < EPS);
        let z = C64::new(0.0, 0.0);
        let f = ControlFieldSet::from_complex(
            z,
            C64::new(0.0, 1.5),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        );
        let (cb, cd, cx) = coupling_coeffs(&f).unwrap();
        assert!((cb - 2.25).abs() < EPS && (cd + 2.25).abs() < EPS && cx == 0.0);
        assert!(coupling_coeffs(&ControlFieldSet::zero()).is_err());
    }

    #[test]
    fn classification_examples() {
        let label = |p, d| {
            classify(&fields(p), &DetuningConfig::unit(0.0, d))
                .unwrap()
                .label
        };
        assert_eq!(label([PI, 0.0, 0.0, 0.0], 1.0), RegimeLabel::CoupledLambda);
        assert_eq!(label([0.0; 4], 1.0), RegimeLabel::DoubleLambda);
        assert_eq!(
            label([PI, 0.0, 0.0, 0.0], 0.0),
            RegimeLabel::DecoupledLambdas
        );
        assert_eq!(label([PI / 6.0, 0.0, 0.0, 0.0], 1.0), RegimeLabel::Generic);
        let unequal = ControlFieldSet::from_complex(
            C64::new(1.0, 0.0),
            C64::new(2.0, 0.0),
            C64::new(1.0, 0.0),
            C64::new(1.0, 0.0),
        );
        assert!(matches!(
            classify(&unequal, &DetuningConfig::unit(0.0, 1.0)),
            Err(Error::UnsupportedClassification)
        ));
    }

    #[test]
    fn transformed_phi_pi_structure() {
        let omega = 1.3;
        let f = ControlFieldSet::equal_amplitude(omega, [PI, 0.0, 0.0, 0.0]).unwrap();
        let det = DetuningConfig::unit(0.0, 0.7);
        let h = transformed_hamiltonian(&f, &det, &ProbeAmplitudes::new(0.1, 0.1)).unwrap();
        let s2 = 2f64.sqrt() * omega;
        assert!((h[A][SECOND] + s2).norm() < EPS);
        assert!(h[A][FIRST].norm() < EPS);
        assert!((h[B][FIRST] + s2).norm() < EPS);
        assert!(h[B][SECOND].norm() < EPS);
        assert!((h[FIRST][SECOND] + 0.7).norm() < EPS);
        assert!(h[FIRST][FIRST].norm() < EPS && h[SECOND][SECOND].norm() < EPS);
        assert!(hermitian_defect5(&h) < EPS);
    }

    #[test]
    fn transformed_phi_zero_structure() {
        let f = fields([0.0; 4]);
        let h = transformed_hamiltonian(
            &f,
            &DetuningConfig::unit(0.0, 0.7),
            &ProbeAmplitudes::new(0.1, 0.1),
        )
        .unwrap();
        // both excited states couple to |+⟩ only; δ enters with a + sign
        assert!(h[A][SECOND].norm() < EPS && h[B][SECOND].norm() < EPS);
        assert!((h[A][FIRST] + 2f64.sqrt()).norm() < EPS);
        assert!((h[FIRST][SECOND] - 0.7).norm() < EPS);
    }
}
