//! Phase-gradient (radiation-pressure) force and the axial torque it exerts.
//!
//! Only the gradients of the probe phases Φ_A0 = −lϕ + kz and Φ_B0 = −lϕ − kz
//! contribute; the dipole force from intensity gradients is not modelled.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::model::{lg_profile, ControlFieldSet, DetuningConfig, ProbeConfig, SpatialPoint};
use crate::parallel::{map_ordered, Execution};
use crate::steady::{self, SolverKind};

/// Vector in the cylindrical frame (r̂, ϕ̂, ẑ).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylVector {
    pub r: f64,
    pub phi: f64,
    pub z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ForceSample {
    pub position: SpatialPoint,
    /// Always zero: the probe phases do not depend on r.
    pub f_r: f64,
    pub f_phi: f64,
    pub f_z: f64,
}

/// One point of a torque spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPoint {
    pub x: f64,
    pub tau: f64,
    pub rho_a: C64,
    pub rho_b: C64,
}

impl SpectrumPoint {
    pub fn nan(x: f64) -> Self {
        let n = C64::new(f64::NAN, f64::NAN);
        Self {
            x,
            tau: f64::NAN,
            rho_a: n,
            rho_b: n,
        }
    }

    pub fn is_nan(&self) -> bool {
        self.tau.is_nan()
    }
}

/// τ sampled along one sweep axis, with the parameters that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TorqueSpectrum {
    pub axis: String,
    pub points: Vec<SpectrumPoint>,
    pub fields: ControlFieldSet,
    pub probes: ProbeConfig,
    pub detuning: DetuningConfig,
}

impl TorqueSpectrum {
    pub fn taus(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.tau).collect()
    }

    pub fn axis_values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.x).collect()
    }

    pub fn nan_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_nan()).count()
    }
}

/// (∇Φ_A0, ∇Φ_B0) = ((−l/r)ϕ̂ + kẑ, (−l/r)ϕ̂ − kẑ).
pub fn phase_gradients(
    probes: &ProbeConfig,
    point: &SpatialPoint,
) -> Result<(CylVector, CylVector)> {
    if !(point.r > 0.0) {
        return Err(Error::SingularAxis);
    }
    let azimuthal = -f64::from(probes.l) / point.r;
    Ok((
        CylVector {
            r: 0.0,
            phi: azimuthal,
            z: probes.k,
        },
        CylVector {
            r: 0.0,
            phi: azimuthal,
            z: -probes.k,
        },
    ))
}

/// F = 2[Ω_A0 Im(ρA) ∇Φ_A0 + Ω_B0 Im(ρB) ∇Φ_B0] with local amplitudes Ω_X0 = |Ω_X0| G(r).
pub fn force(
    fields: &ControlFieldSet,
    probes: &ProbeConfig,
    det: &DetuningConfig,
    point: &SpatialPoint,
) -> Result<ForceSample> {
    let (grad_a, grad_b) = phase_gradients(probes, point)?;
    let local = probes.amplitudes_at(point.r)?;
    let state = steady::solve_general(fields, &local, det)?;
    let wa = 2.0 * local.a * state.rho_a.im;
    let wb = 2.0 * local.b * state.rho_b.im;
    Ok(ForceSample {
        position: *point,
        f_r: wa * grad_a.r + wb * grad_b.r,
        f_phi: wa * grad_a.phi + wb * grad_b.phi,
        f_z: wa * grad_a.z + wb * grad_b.z,
    })
}

/// τ = |Ω_A0| Im(ρA) + |Ω_B0| Im(ρB) with the coherences evaluated at G = 1.
pub fn torque_function(
    fields: &ControlFieldSet,
    probes: &ProbeConfig,
    det: &DetuningConfig,
) -> Result<f64> {
    torque_function_with(SolverKind::General, fields, probes, det)
}

pub fn torque_function_with(
    solver: SolverKind,
    fields: &ControlFieldSet,
    probes: &ProbeConfig,
    det: &DetuningConfig,
) -> Result<f64> {
    let unit = probes.unit_amplitudes();
    let s = steady::steady_state(solver, fields, &unit, det)?;
    Ok(unit.a * s.rho_a.im + unit.b * s.rho_b.im)
}

/// τ from coherences computed with the full radial profile, divided by G(r).
pub fn torque_function_at(
    fields: &ControlFieldSet,
    probes: &ProbeConfig,
    det: &DetuningConfig,
    r: f64,
) -> Result<f64> {
    let g = lg_profile(probes.l, probes.waist, r)?;
    if g == 0.0 {
        return Err(Error::Domain(format!("radial profile vanishes at r = {r}")));
    }
    let local = probes.amplitudes_at(r)?;
    let s = steady::solve_general(fields, &local, det)?;
    Ok((probes.probe_a * s.rho_a.im + probes.probe_b * s.rho_b.im) / g)
}

/// Axial torque T_z = −2 G²(r) l τ.
pub fn torque(
    fields: &ControlFieldSet,
    probes: &ProbeConfig,
    det: &DetuningConfig,
    point: &SpatialPoint,
) -> Result<f64> {
    let tau = torque_function(fields, probes, det)?;
    axial_torque(probes, point.r, tau)
}

/// T_z for a known τ.
pub fn axial_torque(probes: &ProbeConfig, r: f64, tau: f64) -> Result<f64> {
    let g = lg_profile(probes.l, probes.waist, r)?;
    Ok(-2.0 * g * g * f64::from(probes.l) * tau)
}

/// Point mass moving in the waist plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub mass: f64,
}

impl Atom {
    pub fn at_rest(x: f64, y: f64) -> Self {
        Self {
            position: [x, y],
            velocity: [0.0, 0.0],
            mass: 1.0,
        }
    }

    pub fn radius(&self) -> f64 {
        self.position[0].hypot(self.position[1])
    }

    /// v_ϕ = (x v_y − y v_x)/r.
    pub fn azimuthal_velocity(&self) -> f64 {
        let [x, y] = self.position;
        let [vx, vy] = self.velocity;
        (x * vy - y * vx) / self.radius()
    }

    pub fn kinetic_energy(&self) -> f64 {
        0.5 * self.mass * (self.velocity[0].powi(2) + self.velocity[1].powi(2))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AtomSnapshot {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    pub azimuthal_velocity: f64,
    /// Unwrapped angle swept since t = 0.
    pub angle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleFrame {
    pub t: f64,
    pub atoms: Vec<AtomSnapshot>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnsembleTrajectory {
    pub tau: f64,
    pub frames: Vec<EnsembleFrame>,
    /// Number of times an atom was pushed back out to the minimum radius.
    pub clamped: usize,
}

/// Atoms closer to the axis than this (in units of w) are pushed back out.
pub const MIN_RADIUS: f64 = 1e-6;

fn planar_force(probes: &ProbeConfig, tau: f64, pos: [f64; 2]) -> [f64; 2] {
    let r = pos[0].hypot(pos[1]);
    let g = lg_profile(probes.l, probes.waist, r).unwrap_or(0.0);
    let f_phi = -2.0 * f64::from(probes.l) * g * g * tau / r;
    [-f_phi * pos[1] / r, f_phi * pos[0] / r]
}

fn clamp_radius(pos: &mut [f64; 2], r_min: f64) -> bool {
    let r = pos[0].hypot(pos[1]);
    if r >= r_min {
        return false;
    }
    let (ux, uy) = if r > 0.0 {
        (pos[0] / r, pos[1] / r)
    } else {
        (1.0, 0.0)
    };
    *pos = [ux * r_min, uy * r_min];
    true
}

fn snapshot(atom: &Atom, angle: f64) -> AtomSnapshot {
    AtomSnapshot {
        position: atom.position,
        velocity: atom.velocity,
        azimuthal_velocity: atom.azimuthal_velocity(),
        angle,
    }
}

/// Velocity-Verlet integration of the ensemble under the azimuthal force.
/// Exploratory: masses are dimensionless and no trap or recoil heating is included.
pub fn rotate_ensemble(
    fields: &ControlFieldSet,
    probes: &ProbeConfig,
    det: &DetuningConfig,
    atoms: &[Atom],
    dt: f64,
    steps: usize,
) -> Result<EnsembleTrajectory> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!(
            "time step must be positive, got {dt}"
        )));
    }
    if let Some(bad) = atoms
        .iter()
        .find(|a| !(a.radius() > 0.0) || !(a.mass > 0.0))
    {
        return Err(Error::Domain(format!(
            "atoms need positive radius and mass, got r = {}, m = {}",
            bad.radius(),
            bad.mass
        )));
    }
    let tau = torque_function(fields, probes, det)?;
    let r_min = MIN_RADIUS * probes.waist;

    let mut atoms = atoms.to_vec();
    let mut angles = vec![0.0; atoms.len()];
    let mut clamped = 0;
    let mut frames = Vec::with_capacity(steps + 1);
    frames.push(EnsembleFrame {
        t: 0.0,
        atoms: atoms.iter().map(|a| snapshot(a, 0.0)).collect(),
    });

    for step in 1..=steps {
        for (atom, angle) in atoms.iter_mut().zip(angles.iter_mut()) {
            let old = atom.position;
            let f0 = planar_force(probes, tau, old);
            let a0 = [f0[0] / atom.mass, f0[1] / atom.mass];
            let mut new = [
                old[0] + atom.velocity[0] * dt + 0.5 * a0[0] * dt * dt,
                old[1] + atom.velocity[1] * dt + 0.5 * a0[1] * dt * dt,
            ];
            if clamp_radius(&mut new, r_min) {
                log::warn!("atom crossed r < {r_min}; clamped to the minimum radius");
                clamped += 1;
            }
            let f1 = planar_force(probes, tau, new);
            atom.velocity[0] += 0.5 * (a0[0] + f1[0] / atom.mass) * dt;
            atom.velocity[1] += 0.5 * (a0[1] + f1[1] / atom.mass) * dt;
            atom.position = new;
            let cross = old[0] * new[1] - old[1] * new[0];
            let dot = old[0] * new[0] + old[1] * new[1];
            *angle += cross.atan2(dot);
        }
        frames.push(EnsembleFrame {
            t: step as f64 * dt,
            atoms: atoms
                .iter()
                .zip(&angles)
                .map(|(a, &ang)| snapshot(a, ang))
                .collect(),
        });
    }
    Ok(EnsembleTrajectory {
        tau,
        frames,
        clamped,
    })
}

/// Independent ensembles integrated concurrently.
pub fn rotate_ensembles(
    fields: &ControlFieldSet,
    probes: &ProbeConfig,
    det: &DetuningConfig,
    ensembles: &[Vec<Atom>],
    dt: f64,
    steps: usize,
    exec: Execution,
) -> Vec<Result<EnsembleTrajectory>> {
    map_ordered(ensembles, exec, |atoms| {
        rotate_ensemble(fields, probes, det, atoms, dt, steps)
    })
}
