use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use dt_torque::config::{parse_phases, Params, ParamsFile, PhaseValue};
use dt_torque::presets::FigurePreset;
use dt_torque::sweep::{self, MapRequest, OutputFormat, ParamsEcho, SweepRange};
use dt_torque::{Error, Execution};

const EXIT_IO: u8 = 1;
const EXIT_NAN_ROWS: u8 = 2;
const EXIT_INVALID: u8 = 3;
const EXIT_TIMEOUT: u8 = 4;

#[derive(Parser, Debug)]
#[command(
    name = "dt-torque",
    version,
    about = "Light-induced torque in a double-tripod atom"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sweep τ along one axis.
    Spectrum(Common),
    /// Force and axial torque on an (r, azimuth) grid.
    Map {
        #[command(flatten)]
        common: Common,
        /// Radial grid lo:hi:n (lo > 0).
        #[arg(long, default_value = "0.05:2.5:50", allow_hyphen_values = true)]
        r_range: String,
        /// Number of azimuths on [0, 2π).
        #[arg(long, default_value_t = 16)]
        azimuths: usize,
    },
    /// Print the regime report as JSON.
    Classify(Common),
    /// Integrate the Bloch equations to steady state.
    Evolve {
        #[command(flatten)]
        common: Common,
        /// Write the trajectory as CSV.
        #[arg(long)]
        trajectory: Option<PathBuf>,
    },
    /// Run the spectrum of a figure preset (fig2a..fig6b).
    Preset {
        id: String,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args, Debug, Default)]
struct Common {
    /// JSON parameter file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Control phases φ_A1,φ_B1,φ_A2,φ_B2 in radians (`pi`, `pi/6`, `5pi/6` accepted).
    #[arg(long, allow_hyphen_values = true)]
    phases: Option<String>,
    /// Common control Rabi frequency Ω.
    #[arg(long, allow_hyphen_values = true)]
    omega: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    probe_a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    probe_b: Option<f64>,
    /// Two-photon detuning δ.
    #[arg(long, allow_hyphen_values = true)]
    delta2: Option<f64>,
    /// Probe detuning Δ (fixed-Δ commands and non-Δ sweeps).
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    gamma: Option<f64>,
    /// Sweep range lo:hi:n.
    #[arg(long, allow_hyphen_values = true)]
    range: Option<String>,
    /// Sweep axis: delta, phi, theta or delta2.
    #[arg(long)]
    axis: Option<String>,
    /// Orbital angular momentum l of the probes.
    #[arg(long, allow_hyphen_values = true)]
    l: Option<i32>,
    #[arg(long, allow_hyphen_values = true)]
    k: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    waist: Option<f64>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// closed, general or auto.
    #[arg(long)]
    solver: Option<String>,
    /// Convergence tolerance for `evolve`.
    #[arg(long)]
    tol: Option<f64>,
    /// Time limit for `evolve`, in units of 1/Γ.
    #[arg(long)]
    t_max: Option<f64>,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Evaluate points on the current thread only.
    #[arg(long)]
    sequential: bool,
}

impl Common {
    fn overrides(&self) -> Result<ParamsFile, Error> {
        let phases = match &self.phases {
            Some(s) => Some(parse_phases(s)?.map(PhaseValue::Number)),
            None => None,
        };
        Ok(ParamsFile {
            phases,
            omega: self.omega,
            probe_a: self.probe_a,
            probe_b: self.probe_b,
            delta2: self.delta2,
            delta: self.delta,
            gamma: self.gamma,
            l: self.l,
            k: self.k,
            waist: self.waist,
            range: self.range.clone(),
            axis: self.axis.clone(),
            format: self.format.clone(),
            solver: self.solver.clone(),
            tol: self.tol,
            t_max: self.t_max,
        })
    }

    fn resolve(&self, base: Params) -> Result<Params, Error> {
        let mut p = base;
        if let Some(path) = &self.config {
            p.apply(&ParamsFile::load(path)?)?;
        }
        p.apply(&self.overrides()?)?;
        Ok(p)
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        }
    }
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>, Error> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn spectrum(common: &Common, base: Params) -> Result<u8, Error> {
    let params = common.resolve(base)?;
    let req = params.sweep_request(common.execution())?;
    let spectrum = sweep::run_spectrum(&req)?;
    let mut out = open_out(common.out.as_deref())?;
    sweep::write_spectrum(
        &spectrum,
        &ParamsEcho::for_request(&req),
        req.format,
        &mut out,
    )?;
    out.flush()?;
    let nan = spectrum.nan_count();
    if nan > 0 {
        log::warn!(
            "{nan} of {} points could not be evaluated and were written as NaN",
            spectrum.points.len()
        );
        return Ok(EXIT_NAN_ROWS);
    }
    Ok(0)
}

fn map(common: &Common, r_range: &str, azimuths: usize) -> Result<u8, Error> {
    let params = common.resolve(Params::default())?;
    let req = MapRequest {
        fields: params.fields()?,
        probes: params.probes()?,
        detuning: params.detuning()?,
        radii: SweepRange::parse(r_range)?,
        azimuths,
        execution: common.execution(),
    };
    let rows = sweep::run_map(&req)?;
    let mut out = open_out(common.out.as_deref())?;
    let echo = ParamsEcho::new(&req.fields, &req.probes, &req.detuning);
    sweep::write_map(&rows, &echo, params.format, &mut out)?;
    out.flush()?;
    Ok(0)
}

fn classify(common: &Common) -> Result<u8, Error> {
    let params = common.resolve(Params::default())?;
    let report = sweep::run_classify(&params.fields()?, &params.detuning()?)?;
    let mut out = open_out(common.out.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report)?;
    out.write_all(b"\n")?;
    out.flush()?;
    Ok(0)
}

fn evolve(common: &Common, trajectory: Option<&Path>) -> Result<u8, Error> {
    let params = common.resolve(Params::default())?;
    let report = sweep::run_evolve(
        &params.fields()?,
        &params.probes()?,
        &params.detuning()?,
        params.tol,
        params.t_max,
    )?;
    let mut out = open_out(common.out.as_deref())?;
    match params.format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, &report)?;
            out.write_all(b"\n")?;
        }
        OutputFormat::Csv => {
            let s = report.final_state;
            writeln!(out, "t_final={:.16e}", report.t_final)?;
            writeln!(out, "metric={:.16e}", report.metric)?;
            writeln!(
                out,
                "steps={} rejected={}",
                report.accepted_steps, report.rejected_steps
            )?;
            for (name, z) in [
                ("rho_a", s.rho_a),
                ("rho_b", s.rho_b),
                ("rho_1", s.rho_1),
                ("rho_2", s.rho_2),
            ] {
                writeln!(out, "{name}={:.16e}{:+.16e}i", z.re, z.im)?;
            }
            match report.deviation {
                Some(d) => writeln!(out, "deviation={d:.16e}")?,
                None => writeln!(out, "deviation=NaN")?,
            }
        }
    }
    out.flush()?;
    if let Some(path) = trajectory {
        let mut f = BufWriter::new(File::create(path)?);
        sweep::write_trajectory(&report.trajectory, &mut f)?;
        f.flush()?;
    }
    Ok(0)
}

fn preset_params(preset: &FigurePreset) -> Params {
    Params {
        phases: preset.phases,
        two_photon: preset.two_photon,
        ..Params::default()
    }
}

fn run(cli: &Cli) -> Result<u8, Error> {
    match &cli.command {
        Command::Spectrum(c) => spectrum(c, Params::default()),
        Command::Map {
            common,
            r_range,
            azimuths,
        } => map(common, r_range, *azimuths),
        Command::Classify(c) => classify(c),
        Command::Evolve { common, trajectory } => evolve(common, trajectory.as_deref()),
        Command::Preset { id, common } => {
            let preset = FigurePreset::lookup(id)?;
            spectrum(common, preset_params(&preset))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Timeout { .. } => EXIT_TIMEOUT,
        Error::Io(_) => EXIT_IO,
        _ => EXIT_INVALID,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
