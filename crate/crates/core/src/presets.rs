//! Parameter sets of the published torque spectra.
//!
//! Every preset uses Ω = Γ for all four controls, |Ω_A0| = |Ω_B0| = 0.1Γ and
//! the default Δ grid; they differ in the control phases
//! (φ_A1, φ_B1, φ_A2, φ_B2) and the two-photon detuning δ.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ControlFieldSet, DetuningConfig, ProbeConfig};
use crate::parallel::Execution;
use crate::steady::SolverKind;
use crate::sweep::{OutputFormat, SweepAxis, SweepRange, SweepRequest};

pub const PRESET_OMEGA: f64 = 1.0;
pub const PRESET_PROBE: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FigurePreset {
    pub id: &'static str,
    pub phases: [f64; 4],
    pub two_photon: f64,
}

const PI_000: [f64; 4] = [PI, 0.0, 0.0, 0.0];
const ZERO_000: [f64; 4] = [0.0; 4];

pub const PRESETS: [FigurePreset; 20] = [
    FigurePreset {
        id: "fig2a",
        phases: PI_000,
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig2b",
        phases: PI_000,
        two_photon: 2.0,
    },
    FigurePreset {
        id: "fig2c",
        phases: PI_000,
        two_photon: 3.0,
    },
    FigurePreset {
        id: "fig2d",
        phases: PI_000,
        two_photon: -1.0,
    },
    FigurePreset {
        id: "fig2e",
        phases: PI_000,
        two_photon: -2.0,
    },
    FigurePreset {
        id: "fig2f",
        phases: PI_000,
        two_photon: -3.0,
    },
    FigurePreset {
        id: "fig3a",
        phases: [PI / 2.0, 0.0, 0.0, PI / 2.0],
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig3b",
        phases: [PI / 6.0, 0.0, 0.0, 5.0 * PI / 6.0],
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig3c",
        phases: [PI / 3.0, 0.0, 0.0, 2.0 * PI / 3.0],
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig3d",
        phases: [5.0 * PI / 6.0, 0.0, 0.0, PI / 6.0],
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig4a",
        phases: ZERO_000,
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig4b",
        phases: ZERO_000,
        two_photon: 2.0,
    },
    FigurePreset {
        id: "fig4c",
        phases: ZERO_000,
        two_photon: 3.0,
    },
    FigurePreset {
        id: "fig4d",
        phases: ZERO_000,
        two_photon: 4.0,
    },
    FigurePreset {
        id: "fig5a",
        phases: [PI / 6.0, 0.0, 0.0, 0.0],
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig5b",
        phases: [PI / 4.0, 0.0, 0.0, 0.0],
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig5c",
        phases: [PI / 2.0, 0.0, 0.0, 0.0],
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig5d",
        phases: [5.0 * PI / 6.0, 0.0, 0.0, 0.0],
        two_photon: 1.0,
    },
    FigurePreset {
        id: "fig6a",
        phases: PI_000,
        two_photon: 0.0,
    },
    FigurePreset {
        id: "fig6b",
        phases: ZERO_000,
        two_photon: 0.0,
    },
];

impl FigurePreset {
    pub fn lookup(id: &str) -> Result<Self> {
        PRESETS
            .iter()
            .copied()
            .find(|p| p.id.eq_ignore_ascii_case(id))
            .ok_or_else(|| Error::InvalidRequest(format!("unknown preset '{id}'")))
    }

    pub fn all() -> &'static [FigurePreset] {
        &PRESETS
    }

    pub fn fields(&self) -> ControlFieldSet {
        ControlFieldSet::equal_amplitude(PRESET_OMEGA, self.phases)
            .expect("preset amplitude is positive")
    }

    pub fn probes(&self) -> ProbeConfig {
        ProbeConfig::new(PRESET_PROBE, PRESET_PROBE, 1, 1.0, 1.0).expect("preset probes are valid")
    }

    /// Detuning at probe detuning `delta` (Γ = 1).
    pub fn detuning(&self, delta: f64) -> DetuningConfig {
        DetuningConfig::unit(delta, self.two_photon)
    }

    pub fn request(&self) -> SweepRequest {
        SweepRequest {
            axis: SweepAxis::Delta,
            range: SweepRange::default(),
            fields: self.fields(),
            probes: self.probes(),
            detuning: self.detuning(0.0),
            format: OutputFormat::Csv,
            solver: SolverKind::Auto,
            execution: Execution::Parallel,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // (id, φ, θ, δ) transcribed from the figure captions.
    const CAPTIONS: [(&str, f64, f64, f64); 20] = [
        ("fig2a", PI, 0.0, 1.0),
        ("fig2b", PI, 0.0, 2.0),
        ("fig2c", PI, 0.0, 3.0),
        ("fig2d", PI, 0.0, -1.0),
        ("fig2e", PI, 0.0, -2.0),
        ("fig2f", PI, 0.0, -3.0),
        ("fig3a", PI, -PI / 2.0, 1.0),
        ("fig3b", PI, -5.0 * PI / 6.0, 1.0),
        ("fig3c", PI, -2.0 * PI / 3.0, 1.0),
        ("fig3d", PI, -PI / 6.0, 1.0),
        ("fig4a", 0.0, 0.0, 1.0),
        ("fig4b", 0.0, 0.0, 2.0),
        ("fig4c", 0.0, 0.0, 3.0),
        ("fig4d", 0.0, 0.0, 4.0),
        ("fig5a", PI / 6.0, 0.0, 1.0),
        ("fig5b", PI / 4.0, 0.0, 1.0),
        ("fig5c", PI / 2.0, 0.0, 1.0),
        ("fig5d", 5.0 * PI / 6.0, 0.0, 1.0),
        ("fig6a", PI, 0.0, 0.0),
        ("fig6b", 0.0, 0.0, 0.0),
    ];

    #[test]
    fn presets_match_captions() {
        for (id, phi, theta, delta2) in CAPTIONS {
            let p = FigurePreset::lookup(id).unwrap();
            let (got_phi, got_theta) = p.fields().reduce_phases();
            assert!((got_phi - phi).abs() < 1e-12, "{id}: phi {got_phi}");
            assert!((got_theta - theta).abs() < 1e-12, "{id}: theta {got_theta}");
            assert_eq!(p.two_photon, delta2, "{id}");
            assert!(p.fields().equal_amplitudes());
            let req = p.request();
            assert_eq!(req.probes.probe_a, 0.1);
            assert_eq!(req.probes.probe_b, 0.1);
            assert_eq!(
                req.range,
                SweepRange {
                    start: -6.0,
                    stop: 6.0,
                    count: 1201
                }
            );
        }
    }

    #[test]
    fn unknown_preset() {
        assert!(matches!(
            FigurePreset::lookup("fig7a"),
            Err(Error::InvalidRequest(_))
        ));
        assert_eq!(FigurePreset::lookup("FIG2A").unwrap().id, "fig2a");
    }
}
