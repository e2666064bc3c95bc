//! Physical configuration of the double-tripod system.
//!
//! Frequencies are in units of the excited-state decay rate Γ and lengths in
//! units of the probe beam waist `w`. The control fields drive |A⟩↔|1⟩,
//! |A⟩↔|2⟩, |B⟩↔|1⟩ and |B⟩↔|2⟩; the probes drive |0⟩↔|A⟩ and |0⟩↔|B⟩ and
//! carry orbital angular momentum `l`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance of the equal-amplitude predicate.
pub const EQUAL_AMPLITUDE_RTOL: f64 = 1e-12;

/// Wraps an angle into the half-open interval (−π, π].
pub fn wrap_phase(x: f64) -> f64 {
    let mut r = x.rem_euclid(TAU);
    if r > PI {
        r -= TAU;
    }
    // −π and +π describe the same configuration; canonicalize to +π.
    if (r + PI).abs() < 1e-12 {
        r = PI;
    }
    r
}

/// The four control Rabi frequencies Ω_A1, Ω_A2, Ω_B1, Ω_B2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlFieldSet {
    pub a1: Complex64,
    pub a2: Complex64,
    pub b1: Complex64,
    pub b2: Complex64,
}

impl ControlFieldSet {
    /// Equal amplitudes `omega` with phases given in the order
    /// (φ_A1, φ_B1, φ_A2, φ_B2).
    pub fn equal_amplitude(omega: f64, phases: [f64; 4]) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::Domain(format!(
                "control amplitude must be positive, got {omega}"
            )));
        }
        let [a1, b1, a2, b2] = phases;
        Ok(Self {
            a1: Complex64::from_polar(omega, a1),
            a2: Complex64::from_polar(omega, a2),
            b1: Complex64::from_polar(omega, b1),
            b2: Complex64::from_polar(omega, b2),
        })
    }

    /// Equal amplitudes with the reduced phases (φ, θ) realized as
    /// (φ_A1, φ_B1, φ_A2, φ_B2) = (φ + θ, 0, θ, 0).
    pub fn from_reduced(omega: f64, phi: f64, theta: f64) -> Result<Self> {
        Self::equal_amplitude(omega, [phi + theta, 0.0, theta, 0.0])
    }

    /// Four independent complex Rabi frequencies.
    pub fn from_complex(a1: Complex64, a2: Complex64, b1: Complex64, b2: Complex64) -> Self {
        Self { a1, a2, b1, b2 }
    }

    pub fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        Self::from_complex(z, z, z, z)
    }

    /// Phases in the order (φ_A1, φ_B1, φ_A2, φ_B2).
    pub fn phases(&self) -> [f64; 4] {
        [self.a1.arg(), self.b1.arg(), self.a2.arg(), self.b2.arg()]
    }

    pub fn amplitudes(&self) -> [f64; 4] {
        [
            self.a1.norm(),
            self.b1.norm(),
            self.a2.norm(),
            self.b2.norm(),
        ]
    }

    /// True when all four amplitudes agree to [`EQUAL_AMPLITUDE_RTOL`] and are nonzero.
    pub fn equal_amplitudes(&self) -> bool {
        let amps = self.amplitudes();
        let max = amps.iter().copied().fold(0.0_f64, f64::max);
        let min = amps.iter().copied().fold(f64::INFINITY, f64::min);
        max > 0.0 && (max - min) <= EQUAL_AMPLITUDE_RTOL * max
    }

    /// Common amplitude Ω when [`Self::equal_amplitudes`] holds.
    pub fn common_amplitude(&self) -> Option<f64> {
        if self.equal_amplitudes() {
            let amps = self.amplitudes();
            Some(amps.iter().sum::<f64>() / 4.0)
        } else {
            None
        }
    }

    /// Relative loop phase φ = (φ_A1 − φ_B1) − θ and θ = φ_A2 − φ_B2, both in (−π, π].
    pub fn reduce_phases(&self) -> (f64, f64) {
        let [a1, b1, a2, b2] = self.phases();
        let theta = wrap_phase(a2 - b2);
        let phi = wrap_phase((a1 - b1) - theta);
        (phi, theta)
    }

    /// Ω̂ with rows (Ω_A1, Ω_A2) and (Ω_B1, Ω_B2).
    pub fn omega_matrix(&self) -> [[Complex64; 2]; 2] {
        [[self.a1, self.a2], [self.b1, self.b2]]
    }

    /// Adds the common phase `chi` to all four fields.
    pub fn shifted(&self, chi: f64) -> Self {
        let u = Complex64::from_polar(1.0, chi);
        Self::from_complex(self.a1 * u, self.a2 * u, self.b1 * u, self.b2 * u)
    }

    /// Largest control amplitude.
    pub fn max_amplitude(&self) -> f64 {
        self.amplitudes().iter().copied().fold(0.0, f64::max)
    }
}

/// Probe strengths and the Laguerre-Gaussian mode they share.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeConfig {
    /// |Ω_A0|
    pub probe_a: f64,
    /// |Ω_B0|
    pub probe_b: f64,
    /// OAM charge.
    pub l: i32,
    /// Wave number in units of 1/w.
    pub k: f64,
    pub waist: f64,
}

impl ProbeConfig {
    pub fn new(probe_a: f64, probe_b: f64, l: i32, k: f64, waist: f64) -> Result<Self> {
        if !(probe_a >= 0.0 && probe_b >= 0.0) {
            return Err(Error::Domain(format!(
                "probe strengths must be nonnegative, got ({probe_a}, {probe_b})"
            )));
        }
        if !(waist > 0.0) {
            return Err(Error::Domain(format!(
                "beam waist must be positive, got {waist}"
            )));
        }
        Ok(Self {
            probe_a,
            probe_b,
            l,
            k,
            waist,
        })
    }

    /// Probe amplitudes with the radial profile stripped (G = 1).
    pub fn unit_amplitudes(&self) -> ProbeAmplitudes {
        ProbeAmplitudes {
            a: self.probe_a,
            b: self.probe_b,
        }
    }

    /// Local Rabi frequencies |Ω_X0|·G(r).
    pub fn amplitudes_at(&self, r: f64) -> Result<ProbeAmplitudes> {
        let g = lg_profile(self.l, self.waist, r)?;
        Ok(self.unit_amplitudes().scaled(g))
    }

    /// Weak-probe validity: neither probe exceeds 0.3 of the control amplitude.
    pub fn is_weak_relative_to(&self, omega: f64) -> bool {
        self.probe_a.max(self.probe_b) <= 0.3 * omega
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            probe_a: self.probe_a * s,
            probe_b: self.probe_b * s,
            ..*self
        }
    }

    pub fn with_charge(&self, l: i32) -> Self {
        Self { l, ..*self }
    }
}

/// Effective (local) probe Rabi frequencies Ω_A0, Ω_B0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeAmplitudes {
    pub a: f64,
    pub b: f64,
}

impl ProbeAmplitudes {
    pub fn new(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: self.a * s,
            b: self.b * s,
        }
    }

    pub fn max(&self) -> f64 {
        self.a.abs().max(self.b.abs())
    }
}

/// Probe detuning Δ, two-photon detuning δ and decay rate Γ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningConfig {
    pub delta: f64,
    pub two_photon: f64,
    pub gamma: f64,
}

impl DetuningConfig {
    pub fn new(delta: f64, two_photon: f64, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0) {
            return Err(Error::Domain(format!(
                "decay rate must be positive, got {gamma}"
            )));
        }
        Ok(Self {
            delta,
            two_photon,
            gamma,
        })
    }

    /// Γ = 1.
    pub fn unit(delta: f64, two_photon: f64) -> Self {
        Self {
            delta,
            two_photon,
            gamma: 1.0,
        }
    }

    pub fn with_delta(&self, delta: f64) -> Self {
        Self { delta, ..*self }
    }

    pub fn with_two_photon(&self, two_photon: f64) -> Self {
        Self {
            two_photon,
            ..*self
        }
    }
}

/// Cylindrical position (r, azimuth, z).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialPoint {
    pub r: f64,
    pub azimuth: f64,
    pub z: f64,
}

impl SpatialPoint {
    pub fn new(r: f64, azimuth: f64, z: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return Err(Error::Domain(format!(
                "radius must be nonnegative, got {r}"
            )));
        }
        Ok(Self {
            r,
            azimuth: azimuth.rem_euclid(TAU),
            z,
        })
    }

    /// Point in the waist plane z = 0.
    pub fn in_plane(r: f64, azimuth: f64) -> Result<Self> {
        Self::new(r, azimuth, 0.0)
    }
}

/// Unnormalized Laguerre-Gaussian radial mode G(r) = (r/w)^|l| exp(−r²/w²).
pub fn lg_profile(l: i32, w: f64, r: f64) -> Result<f64> {
    if !(w > 0.0) {
        return Err(Error::Domain(format!(
            "beam waist must be positive, got {w}"
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::Domain(format!(
            "radius must be nonnegative, got {r}"
        )));
    }
    let x = r / w;
    Ok(x.powi(l.abs()) * (-x * x).exp())
}

/// Radius of the maximum of G, w·√(|l|/2).
pub fn lg_peak_radius(l: i32, w: f64) -> f64 {
    w * (f64::from(l.abs()) / 2.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    const EPS: f64 = 1e-12;

    #[test]
    fn lg_profile_values() {
        assert_eq!(lg_profile(1, 1.0, 0.0).unwrap(), 0.0);
        assert_eq!(lg_profile(0, 1.0, 0.0).unwrap(), 1.0);
        assert!((lg_profile(1, 1.0, 1.0).unwrap() - (-1.0f64).exp()).abs() < EPS);
        let peak = lg_profile(1, 1.0, 1.0 / 2f64.sqrt()).unwrap();
        assert!((peak - 0.428_881_942_480_353_4).abs() < 1e-12);
    }

    #[test]
    fn lg_profile_rejects_bad_domain() {
        assert!(matches!(lg_profile(1, 1.0, -0.1), Err(Error::Domain(_))));
        assert!(matches!(lg_profile(1, 0.0, 0.5), Err(Error::Domain(_))));
        assert!(matches!(lg_profile(1, -1.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn lg_peak_matches_dense_scan() {
        for l in 1..=4 {
            let (mut best_r, mut best) = (0.0, 0.0);
            for i in 0..=400_000 {
                let r = i as f64 * 1e-5;
                let g = lg_profile(l, 1.0, r).unwrap();
                if g > best {
                    best = g;
                    best_r = r;
                }
            }
            assert!((best_r - lg_peak_radius(l, 1.0)).abs() < 2e-5, "l={l}");
        }
    }

    #[test]
    fn reduce_phases_figure_configurations() {
        let f = ControlFieldSet::equal_amplitude(1.0, [PI, 0.0, 0.0, 0.0]).unwrap();
        let (phi, theta) = f.reduce_phases();
        assert!((phi - PI).abs() < EPS && theta.abs() < EPS);

        let f = ControlFieldSet::equal_amplitude(1.0, [FRAC_PI_2, 0.0, 0.0, FRAC_PI_2]).unwrap();
        let (phi, theta) = f.reduce_phases();
        assert!((phi - PI).abs() < EPS);
        assert!((theta + FRAC_PI_2).abs() < EPS);

        let f = ControlFieldSet::equal_amplitude(1.0, [0.0; 4]).unwrap();
        assert_eq!(f.reduce_phases(), (0.0, 0.0));

        let f =
            ControlFieldSet::equal_amplitude(1.0, [PI / 6.0, 0.0, 0.0, 5.0 * PI / 6.0]).unwrap();
        let (phi, theta) = f.reduce_phases();
        assert!((phi - PI).abs() < EPS);
        assert!((theta + 5.0 * PI / 6.0).abs() < EPS);
    }

    #[test]
    fn wrap_canonicalizes_minus_pi() {
        assert_eq!(wrap_phase(-PI), PI);
        assert_eq!(wrap_phase(PI), PI);
        assert!((wrap_phase(3.0 * PI) - PI).abs() < EPS);
        assert!((wrap_phase(-FRAC_PI_2) + FRAC_PI_2).abs() < EPS);
    }

    #[test]
    fn omega_matrix_examples() {
        let f = ControlFieldSet::equal_amplitude(1.0, [0.0; 4]).unwrap();
        for row in f.omega_matrix() {
            for e in row {
                assert!((e - Complex64::new(1.0, 0.0)).norm() < EPS);
            }
        }
        let m = ControlFieldSet::equal_amplitude(1.0, [PI, 0.0, 0.0, 0.0])
            .unwrap()
            .omega_matrix();
        assert!((m[0][0] + 1.0).norm() < EPS);
        assert!((m[0][1] - 1.0).norm() < EPS);
        assert!((m[1][0] - 1.0).norm() < EPS);
        assert!((m[1][1] - 1.0).norm() < EPS);
        let z = ControlFieldSet::zero().omega_matrix();
        assert!(z.iter().flatten().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn constructors_validate() {
        assert!(ControlFieldSet::equal_amplitude(0.0, [0.0; 4]).is_err());
        assert!(ProbeConfig::new(-0.1, 0.1, 1, 1.0, 1.0).is_err());
        assert!(ProbeConfig::new(0.1, 0.1, 1, 1.0, 0.0).is_err());
        assert!(DetuningConfig::new(0.0, 1.0, 0.0).is_err());
        assert!(SpatialPoint::new(-1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn equal_amplitude_predicate() {
        let f = ControlFieldSet::equal_amplitude(2.0, [0.3, 1.0, -2.0, 0.1]).unwrap();
        assert!(f.equal_amplitudes());
        assert!((f.common_amplitude().unwrap() - 2.0).abs() < EPS);
        let g = ControlFieldSet::from_complex(
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0 + 1e-9, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        assert!(!g.equal_amplitudes());
        assert!(!ControlFieldSet::zero().equal_amplitudes());
    }

    #[test]
    fn weak_probe_flag() {
        let p = ProbeConfig::new(0.1, 0.1, 1, 1.0, 1.0).unwrap();
        assert!(p.is_weak_relative_to(1.0));
        assert!(!p.is_weak_relative_to(0.2));
    }
}
