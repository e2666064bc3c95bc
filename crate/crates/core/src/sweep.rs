//! Sweeps, spatial maps and their serialized forms.
//!
//! CSV output uses a mandatory header row, 17 significant digits in
//! scientific notation, `.` as decimal separator and LF line endings, so
//! identical requests produce byte-identical files.

use std::f64::consts::TAU;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{self, BlochTrajectory};
use crate::error::{Error, Result};
use crate::mechanics::{self, SpectrumPoint, TorqueSpectrum};
use crate::model::{ControlFieldSet, DetuningConfig, ProbeConfig, SpatialPoint};
use crate::parallel::{map_ordered, Execution};
use crate::regime::{self, RegimeReport};
use crate::steady::{self, CoherenceState, SolverKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SweepAxis {
    /// Probe detuning Δ.
    #[default]
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "phi")]
    Phi,
    #[serde(rename = "theta")]
    Theta,
    /// Two-photon detuning δ.
    #[serde(rename = "delta2")]
    DeltaTwoPhoton,
}

impl SweepAxis {
    pub fn column(&self) -> &'static str {
        match self {
            Self::Delta => "delta",
            Self::Phi => "phi",
            Self::Theta => "theta",
            Self::DeltaTwoPhoton => "delta2",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "delta" | "detuning" => Ok(Self::Delta),
            "phi" => Ok(Self::Phi),
            "theta" => Ok(Self::Theta),
            "delta2" | "two-photon" => Ok(Self::DeltaTwoPhoton),
            other => Err(Error::InvalidRequest(format!(
                "unknown sweep axis '{other}'"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidRequest(format!(
                "unknown output format '{other}'"
            ))),
        }
    }
}

pub fn parse_solver(s: &str) -> Result<SolverKind> {
    match s.trim().to_ascii_lowercase().as_str() {
        "closed" | "closed-form" => Ok(SolverKind::ClosedForm),
        "general" => Ok(SolverKind::General),
        "auto" => Ok(SolverKind::Auto),
        other => Err(Error::InvalidRequest(format!("unknown solver '{other}'"))),
    }
}

/// Evenly spaced grid `start..=stop` with `count` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRange {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Default for SweepRange {
    /// Δ ∈ [−6Γ, 6Γ] with 1201 points (step 0.01Γ).
    fn default() -> Self {
        Self {
            start: -6.0,
            stop: 6.0,
            count: 1201,
        }
    }
}

impl SweepRange {
    pub fn new(start: f64, stop: f64, count: usize) -> Result<Self> {
        let r = Self { start, stop, count };
        r.validate()?;
        Ok(r)
    }

    /// Parses `lo:hi:n`.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidRequest(format!("range must look like lo:hi:n, got '{s}'"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let start = crate::config::parse_number(parts[0]).map_err(|_| bad())?;
        let stop = crate::config::parse_number(parts[1]).map_err(|_| bad())?;
        let count = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
        Self::new(start, stop, count)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 2 {
            return Err(Error::InvalidRequest(format!(
                "need at least 2 points, got {}",
                self.count
            )));
        }
        if !(self.start < self.stop) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidRequest(format!(
                "range start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        Ok(())
    }

    /// Grid values; integer multiples of the step land exactly on representable values.
    pub fn values(&self) -> Vec<f64> {
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| self.start + (self.stop - self.start) * i as f64 / n)
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRequest {
    pub axis: SweepAxis,
    pub range: SweepRange,
    pub fields: ControlFieldSet,
    pub probes: ProbeConfig,
    pub detuning: DetuningConfig,
    pub format: OutputFormat,
    pub solver: SolverKind,
    pub execution: Execution,
}

impl SweepRequest {
    pub fn validate(&self) -> Result<()> {
        self.range.validate()?;
        if matches!(self.axis, SweepAxis::Phi | SweepAxis::Theta) && !self.fields.equal_amplitudes()
        {
            return Err(Error::InvalidRequest(
                "phase sweeps need equal control amplitudes".into(),
            ));
        }
        if self.solver == SolverKind::ClosedForm && !self.fields.equal_amplitudes() {
            return Err(Error::InvalidRequest(
                "the closed-form solver needs equal control amplitudes".into(),
            ));
        }
        if let Some(om) = self.fields.common_amplitude() {
            if !self.probes.is_weak_relative_to(om) {
                log::warn!("probe strength exceeds 0.3 Ω; weak-probe results may be inaccurate");
            }
        }
        Ok(())
    }

    /// Parameters at one axis value.
    pub fn point(&self, x: f64) -> Result<(ControlFieldSet, DetuningConfig)> {
        let (phi, theta) = self.fields.reduce_phases();
        let omega = || {
            self.fields.common_amplitude().ok_or_else(|| {
                Error::InvalidRequest("phase sweeps need equal control amplitudes".into())
            })
        };
        Ok(match self.axis {
            SweepAxis::Delta => (self.fields, self.detuning.with_delta(x)),
            SweepAxis::DeltaTwoPhoton => (self.fields, self.detuning.with_two_photon(x)),
            SweepAxis::Phi => (
                ControlFieldSet::from_reduced(omega()?, x, theta)?,
                self.detuning,
            ),
            SweepAxis::Theta => (
                ControlFieldSet::from_reduced(omega()?, phi, x)?,
                self.detuning,
            ),
        })
    }

    fn evaluate(&self, x: f64) -> Result<SpectrumPoint> {
        let (fields, det) = self.point(x)?;
        let unit = self.probes.unit_amplitudes();
        let s = steady::steady_state(self.solver, &fields, &unit, &det)?;
        Ok(SpectrumPoint {
            x,
            tau: unit.a * s.rho_a.im + unit.b * s.rho_b.im,
            rho_a: s.rho_a,
            rho_b: s.rho_b,
        })
    }
}

/// Evaluates τ along the sweep axis. Points where the solver fails become NaN rows.
pub fn run_spectrum(req: &SweepRequest) -> Result<TorqueSpectrum> {
    req.validate()?;
    let xs = req.range.values();
    let points = map_ordered(&xs, req.execution, |&x| match req.evaluate(x) {
        Ok(p) => p,
        Err(e) => {
            log::warn!("{} = {x}: {e}", req.axis.column());
            SpectrumPoint::nan(x)
        }
    });
    Ok(TorqueSpectrum {
        axis: req.axis.column().to_string(),
        points,
        fields: req.fields,
        probes: req.probes,
        detuning: req.detuning,
    })
}

/// Parameter echo written alongside every output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ParamsEcho {
    /// (φ_A1, φ_B1, φ_A2, φ_B2)
    pub phases: [f64; 4],
    /// (|Ω_A1|, |Ω_B1|, |Ω_A2|, |Ω_B2|)
    pub amplitudes: [f64; 4],
    pub phi: f64,
    pub theta: f64,
    pub probe_a: f64,
    pub probe_b: f64,
    pub l: i32,
    pub k: f64,
    pub waist: f64,
    pub delta: f64,
    pub delta2: f64,
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axis: Option<SweepAxis>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub range: Option<SweepRange>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverKind>,
}

impl ParamsEcho {
    pub fn new(fields: &ControlFieldSet, probes: &ProbeConfig, det: &DetuningConfig) -> Self {
        let (phi, theta) = fields.reduce_phases();
        Self {
            phases: fields.phases(),
            amplitudes: fields.amplitudes(),
            phi,
            theta,
            probe_a: probes.probe_a,
            probe_b: probes.probe_b,
            l: probes.l,
            k: probes.k,
            waist: probes.waist,
            delta: det.delta,
            delta2: det.two_photon,
            gamma: det.gamma,
            axis: None,
            range: None,
            solver: None,
        }
    }

    pub fn for_request(req: &SweepRequest) -> Self {
        Self {
            axis: Some(req.axis),
            range: Some(req.range),
            solver: Some(req.solver),
            ..Self::new(&req.fields, &req.probes, &req.detuning)
        }
    }
}

/// Fixed 17-significant-digit rendering used for every CSV float.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "NaN".to_string()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".to_string()
        } else {
            "-inf".to_string()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn csv_line(values: &[f64]) -> String {
    let mut line = values
        .iter()
        .map(|v| fmt_f64(*v))
        .collect::<Vec<_>>()
        .join(",");
    line.push('\n');
    line
}

#[derive(Serialize)]
struct JsonDoc<'a, R: Serialize> {
    params: &'a ParamsEcho,
    rows: &'a [R],
}

#[derive(Serialize)]
struct SpectrumRow {
    x: f64,
    tau: f64,
    im_rho_a: f64,
    im_rho_b: f64,
    re_rho_a: f64,
    re_rho_b: f64,
}

pub fn write_spectrum<W: Write>(
    spectrum: &TorqueSpectrum,
    echo: &ParamsEcho,
    format: OutputFormat,
    mut out: W,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut buf = format!(
                "{},tau,im_rho_a,im_rho_b,re_rho_a,re_rho_b\n",
                spectrum.axis
            );
            for p in &spectrum.points {
                buf.push_str(&csv_line(&[
                    p.x, p.tau, p.rho_a.im, p.rho_b.im, p.rho_a.re, p.rho_b.re,
                ]));
            }
            out.write_all(buf.as_bytes())?;
        }
        OutputFormat::Json => {
            let rows: Vec<SpectrumRow> = spectrum
                .points
                .iter()
                .map(|p| SpectrumRow {
                    x: p.x,
                    tau: p.tau,
                    im_rho_a: p.rho_a.im,
                    im_rho_b: p.rho_b.im,
                    re_rho_a: p.rho_a.re,
                    re_rho_b: p.rho_b.re,
                })
                .collect();
            serde_json::to_writer_pretty(
                &mut out,
                &JsonDoc {
                    params: echo,
                    rows: &rows,
                },
            )?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MapRow {
    pub r: f64,
    pub azimuth: f64,
    pub f_phi: f64,
    pub f_z: f64,
    pub t_z: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MapRequest {
    pub fields: ControlFieldSet,
    pub probes: ProbeConfig,
    pub detuning: DetuningConfig,
    /// Radial grid; must be strictly positive.
    pub radii: SweepRange,
    /// Number of azimuths, evenly spaced on [0, 2π).
    pub azimuths: usize,
    pub execution: Execution,
}

/// Force and torque on an (r, azimuth) grid in the waist plane.
pub fn run_map(req: &MapRequest) -> Result<Vec<MapRow>> {
    req.radii.validate()?;
    if !(req.radii.start > 0.0) {
        return Err(Error::InvalidRequest(
            "radial grid must be strictly positive".into(),
        ));
    }
    if req.azimuths == 0 {
        return Err(Error::InvalidRequest("need at least one azimuth".into()));
    }
    let tau = mechanics::torque_function(&req.fields, &req.probes, &req.detuning)?;
    let grid: Vec<(f64, f64)> = req
        .radii
        .values()
        .into_iter()
        .flat_map(|r| (0..req.azimuths).map(move |j| (r, TAU * j as f64 / req.azimuths as f64)))
        .collect();
    let rows = map_ordered(&grid, req.execution, |&(r, azimuth)| -> Result<MapRow> {
        let point = SpatialPoint::in_plane(r, azimuth)?;
        let f = mechanics::force(&req.fields, &req.probes, &req.detuning, &point)?;
        let t_z = mechanics::axial_torque(&req.probes, r, tau)?;
        Ok(MapRow {
            r,
            azimuth,
            f_phi: f.f_phi,
            f_z: f.f_z,
            t_z,
        })
    });
    rows.into_iter().collect()
}

pub fn write_map<W: Write>(
    rows: &[MapRow],
    echo: &ParamsEcho,
    format: OutputFormat,
    mut out: W,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut buf = String::from("r,azimuth,F_phi,F_z,T_z\n");
            for row in rows {
                buf.push_str(&csv_line(&[
                    row.r,
                    row.azimuth,
                    row.f_phi,
                    row.f_z,
                    row.t_z,
                ]));
            }
            out.write_all(buf.as_bytes())?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &JsonDoc { params: echo, rows })?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn run_classify(fields: &ControlFieldSet, det: &DetuningConfig) -> Result<RegimeReport> {
    regime::classify(fields, det)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvolveReport {
    pub final_state: CoherenceState,
    /// Steady state from the direct linear solve, when that system is regular.
    pub reference: Option<CoherenceState>,
    /// Largest componentwise deviation from `reference`.
    pub deviation: Option<f64>,
    pub t_final: f64,
    pub metric: f64,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    #[serde(skip)]
    pub trajectory: BlochTrajectory,
}

pub fn run_evolve(
    fields: &ControlFieldSet,
    probes: &ProbeConfig,
    det: &DetuningConfig,
    tol: f64,
    t_max: f64,
) -> Result<EvolveReport> {
    let unit = probes.unit_amplitudes();
    let trajectory = dynamics::integrate_to_steady(fields, &unit, det, tol, t_max)?;
    let final_state = *trajectory.final_state();
    let reference = steady::solve_general(fields, &unit, det).ok();
    Ok(EvolveReport {
        final_state,
        reference,
        deviation: reference.map(|r| r.max_diff(&final_state)),
        t_final: trajectory.final_time(),
        metric: trajectory.metric,
        accepted_steps: trajectory.accepted_steps,
        rejected_steps: trajectory.rejected_steps,
        trajectory,
    })
}

pub fn write_trajectory<W: Write>(traj: &BlochTrajectory, mut out: W) -> Result<()> {
    let mut buf =
        String::from("t,re_rho_a,im_rho_a,re_rho_b,im_rho_b,re_rho_1,im_rho_1,re_rho_2,im_rho_2\n");
    for (t, s) in traj.times.iter().zip(&traj.states) {
        let mut vals = vec![*t];
        for z in s.to_array() {
            vals.push(z.re);
            vals.push(z.im);
        }
        buf.push_str(&csv_line(&vals));
    }
    out.write_all(buf.as_bytes())?;
    Ok(())
}
