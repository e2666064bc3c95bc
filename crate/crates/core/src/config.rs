//! Run parameters: defaults, JSON parameter files and textual phase values.
//!
//! Later sources override earlier ones: built-in defaults, then a parameter
//! file, then individual command-line flags.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dynamics::DEFAULT_TOL;
use crate::error::{Error, Result};
use crate::model::{ControlFieldSet, DetuningConfig, ProbeConfig};
use crate::parallel::Execution;
use crate::steady::SolverKind;
use crate::sweep::{parse_solver, OutputFormat, SweepAxis, SweepRange, SweepRequest};

pub const DEFAULT_T_MAX: f64 = 1000.0;

/// Parses a real number or a multiple of π such as `pi`, `-pi/2`, `5pi/6`, `5*pi/6`.
pub fn parse_number(s: &str) -> Result<f64> {
    let bad = || Error::InvalidRequest(format!("cannot parse '{s}' as a number"));
    let t: String = s
        .trim()
        .to_ascii_lowercase()
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect();
    if t.is_empty() {
        return Err(bad());
    }
    let Some(pos) = t.find("pi").or_else(|| t.find('π')) else {
        return t.parse::<f64>().map_err(|_| bad());
    };
    let marker_len = if t[pos..].starts_with("pi") {
        2
    } else {
        'π'.len_utf8()
    };
    let head = t[..pos].trim_end_matches('*');
    let tail = &t[pos + marker_len..];
    let coef = match head {
        "" | "+" => 1.0,
        "-" => -1.0,
        h => h.parse::<f64>().map_err(|_| bad())?,
    };
    let den = match tail {
        "" => 1.0,
        d => d
            .strip_prefix('/')
            .ok_or_else(bad)?
            .parse::<f64>()
            .map_err(|_| bad())?,
    };
    if den == 0.0 {
        return Err(bad());
    }
    Ok(coef * PI / den)
}

/// Parses four comma-separated phases `φ_A1,φ_B1,φ_A2,φ_B2`.
pub fn parse_phases(s: &str) -> Result<[f64; 4]> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err(Error::InvalidRequest(format!(
            "expected four phases φ_A1,φ_B1,φ_A2,φ_B2, got '{s}'"
        )));
    }
    let mut out = [0.0; 4];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_number(p)?;
    }
    Ok(out)
}

/// A number or a π expression in a parameter file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PhaseValue {
    Number(f64),
    Text(String),
}

impl PhaseValue {
    pub fn value(&self) -> Result<f64> {
        match self {
            Self::Number(x) => Ok(*x),
            Self::Text(s) => parse_number(s),
        }
    }
}

/// Optional overrides; every field left as `None` keeps the previous value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsFile {
    pub phases: Option<[PhaseValue; 4]>,
    pub omega: Option<f64>,
    pub probe_a: Option<f64>,
    pub probe_b: Option<f64>,
    pub delta2: Option<f64>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub l: Option<i32>,
    pub k: Option<f64>,
    pub waist: Option<f64>,
    pub range: Option<String>,
    pub axis: Option<String>,
    pub format: Option<String>,
    pub solver: Option<String>,
    pub tol: Option<f64>,
    pub t_max: Option<f64>,
}

impl ParamsFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// Fully resolved parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    pub phases: [f64; 4],
    pub omega: f64,
    pub probe_a: f64,
    pub probe_b: f64,
    pub two_photon: f64,
    pub delta: f64,
    pub gamma: f64,
    pub l: i32,
    pub k: f64,
    pub waist: f64,
    pub range: SweepRange,
    pub axis: SweepAxis,
    pub format: OutputFormat,
    pub solver: SolverKind,
    pub tol: f64,
    pub t_max: f64,
}

impl Default for Params {
    /// φ = π, θ = 0, Ω = Γ, |Ω_A0| = |Ω_B0| = 0.1Γ, δ = Γ, Δ = 0.
    fn default() -> Self {
        Self {
            phases: [PI, 0.0, 0.0, 0.0],
            omega: 1.0,
            probe_a: 0.1,
            probe_b: 0.1,
            two_photon: 1.0,
            delta: 0.0,
            gamma: 1.0,
            l: 1,
            k: 1.0,
            waist: 1.0,
            range: SweepRange::default(),
            axis: SweepAxis::Delta,
            format: OutputFormat::Csv,
            solver: SolverKind::Auto,
            tol: DEFAULT_TOL,
            t_max: DEFAULT_T_MAX,
        }
    }
}

impl Params {
    pub fn apply(&mut self, o: &ParamsFile) -> Result<()> {
        if let Some(ph) = &o.phases {
            for (dst, v) in self.phases.iter_mut().zip(ph) {
                *dst = v.value()?;
            }
        }
        macro_rules! set {
            ($($f:ident => $g:ident),*) => { $( if let Some(v) = o.$f { self.$g = v; } )* };
        }
        set!(omega => omega, probe_a => probe_a, probe_b => probe_b, delta2 => two_photon,
             delta => delta, gamma => gamma, l => l, k => k, waist => waist, tol => tol, t_max => t_max);
        if let Some(r) = &o.range {
            self.range = SweepRange::parse(r)?;
        }
        if let Some(a) = &o.axis {
            self.axis = SweepAxis::parse(a)?;
        }
        if let Some(f) = &o.format {
            self.format = OutputFormat::parse(f)?;
        }
        if let Some(s) = &o.solver {
            self.solver = parse_solver(s)?;
        }
        Ok(())
    }

    pub fn fields(&self) -> Result<ControlFieldSet> {
        ControlFieldSet::equal_amplitude(self.omega, self.phases).map_err(invalid)
    }

    pub fn probes(&self) -> Result<ProbeConfig> {
        ProbeConfig::new(self.probe_a, self.probe_b, self.l, self.k, self.waist).map_err(invalid)
    }

    pub fn detuning(&self) -> Result<DetuningConfig> {
        DetuningConfig::new(self.delta, self.two_photon, self.gamma).map_err(invalid)
    }

    pub fn sweep_request(&self, execution: Execution) -> Result<SweepRequest> {
        let req = SweepRequest {
            axis: self.axis,
            range: self.range,
            fields: self.fields()?,
            probes: self.probes()?,
            detuning: self.detuning()?,
            format: self.format,
            solver: self.solver,
            execution,
        };
        req.validate()?;
        Ok(req)
    }
}

fn invalid(e: Error) -> Error {
    match e {
        Error::Domain(m) => Error::InvalidRequest(m),
        other => other,
    }
}
