//! Command-line front end. Every subcommand validates its inputs, computes
//! all results in memory, and only then writes output, so a failure never
//! leaves partial files behind.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 failed
//! numerical check.

use std::ffi::OsString;
use std::f64::consts::{FRAC_PI_2, SQRT_2, TAU};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::Error;
use crate::feasibility::{feasibility_report, CavityParams};
use crate::format::{fmt_f64, to_json_string};
use crate::model::{coherent_spin_state, sector_frequency, total_spins, SpinSector};
use crate::phase::{
    design_drive, phase_coefficients_closed, phase_coefficients_for, protocol_phases, CoefficientSource,
    PhaseCoefficients, PhaseTable,
};
use crate::quadrature::check_steps;
use crate::state::{
    apply_phase_gate, gate_phase_grid, log_negativity, negativity_sweep, reduced_density, EntanglementReport,
    RemnantModel,
};
use crate::trajectory::{closure_residual, closure_tolerance, integrate_trajectory, Trajectory};
use crate::validate::{run_validation, ValidationConfig};

/// Largest joint Hilbert-space dimension `(N₁+1)(N₂+1)` accepted by `entangle`.
pub const MAX_JOINT_DIM: usize = 1681;
const GRID_HARMONICS: [u32; 3] = [1, 3, 5];
const GRID_DETUNINGS: [i64; 5] = [1, 2, 3, 4, 5];

#[derive(Debug, Parser)]
#[command(name = "geophase", version, about = "Geometric phase gate between two collective spins via a driven cavity mode")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CommonArgs {
    /// Atoms in the first ensemble.
    #[arg(long, global = true, default_value_t = 20)]
    pub n1: usize,
    /// Atoms in the second ensemble.
    #[arg(long, global = true, default_value_t = 20)]
    pub n2: usize,
    /// Ac Stark coupling G (sets the unit of frequency).
    #[arg(long, global = true, default_value_t = 1.0)]
    pub g: f64,
    /// Drive amplitude F0 in units of G.
    #[arg(long, global = true, default_value_t = 1.0, allow_negative_numbers = true)]
    pub f0: f64,
    /// Drive harmonic m (odd).
    #[arg(long, global = true, default_value_t = 1)]
    pub m: u32,
    /// Detuning index n, Delta = 2 n G.
    #[arg(long, global = true, default_value_t = 1, allow_negative_numbers = true)]
    pub n: i64,
    /// Quadrature intervals over one pulse (even, >= 16).
    #[arg(long, global = true, default_value_t = 4096)]
    pub steps: usize,
    /// Remnant coherent amplitude.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub delta_alpha: f64,
    /// Remnant rotation per unit of total spin (radians).
    #[arg(long, global = true, default_value_t = 0.1, allow_negative_numbers = true)]
    pub delta_theta: f64,
    /// Polar angle of both initial spin coherent states.
    #[arg(long, global = true, default_value_t = FRAC_PI_2, allow_negative_numbers = true)]
    pub theta: f64,
    /// Azimuth of both initial spin coherent states.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub phi: f64,
    /// Lab-frame cavity frequency, in units of G.
    #[arg(long, global = true, default_value_t = 0.0, allow_negative_numbers = true)]
    pub omega0: f64,
    #[arg(long, global = true, value_enum)]
    #[serde(skip)]
    pub format: Option<Format>,
    /// Output file (a directory for CSV trajectories). Defaults to stdout.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    /// Aligned text (feasibility and validate only).
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Phase-space trajectories, one CSV per total spin.
    Trajectory,
    /// Stage, second-stage and total phase tables with coefficient comparison.
    Phases,
    /// Logarithmic negativity of the gated spin state.
    Entangle(EntangleArgs),
    /// Experimental feasibility bounds (inputs in MHz).
    Feasibility(FeasibilityArgs),
    /// Run the self-check suite.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EntangleArgs {
    /// Use the pure entangling table phi2 * s1 * s2 instead of the protocol phases.
    #[arg(long, allow_negative_numbers = true)]
    pub gate_phase: Option<f64>,
    /// Also write a gate-phase x delta-alpha sweep CSV here.
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Gate-phase grid points over [0, 2 pi / min(N1, N2)].
    #[arg(long, default_value_t = 32)]
    pub points: usize,
    /// Remnant amplitudes swept.
    #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.25, 0.5, 1.0])]
    pub sweep_delta_alpha: Vec<f64>,
    /// Write the reduced density matrix as JSON here.
    #[arg(long)]
    pub density_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FeasibilityArgs {
    #[arg(long, default_value_t = 1350.0)]
    pub g0_mhz: f64,
    #[arg(long, default_value_t = 330.0)]
    pub kappa_mhz: f64,
    #[arg(long, default_value_t = 19.0)]
    pub gamma_mhz: f64,
    #[arg(long, default_value_t = 1000)]
    pub atoms: u64,
    /// Requested photon number |alpha|^2.
    #[arg(long, default_value_t = 0.25)]
    pub alpha_sq: f64,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    /// Atoms per ensemble in the sector sweeps (<= 6).
    #[arg(long, default_value_t = 4)]
    pub validate_atoms: usize,
    /// Fock cutoff for the oracle check (<= 30).
    #[arg(long, default_value_t = 30)]
    pub cutoff: usize,
    #[arg(long, default_value_t = ValidationConfig::default().seed)]
    pub seed: u64,
    /// Replace the closure drive with an even harmonic (negative control).
    #[arg(long)]
    pub inject_even_m: bool,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Io(_) => 1,
            Self::Usage(_) => 2,
            Self::Numerical(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            Self::Usage(m) | Self::Numerical(m) | Self::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Self::Numerical(e.to_string())
        } else {
            Self::Usage(e.to_string())
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Where one piece of output goes.
#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Stdout,
    Stderr,
    File(PathBuf),
}

/// Everything a run will write, assembled before any I/O.
#[derive(Debug, Default)]
pub struct Output {
    pub writes: Vec<(Target, String)>,
    /// Set when the run completed but a check failed (exit 3).
    pub failure: Option<String>,
}

impl Output {
    fn push(&mut self, target: Target, text: String) {
        self.writes.push((target, text));
    }

    fn primary(&mut self, out: &Option<PathBuf>, text: String) {
        let target = out.clone().map_or(Target::Stdout, Target::File);
        self.push(target, text);
    }
}

/// Parses `args`, runs the command, writes output and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = run(&cli).and_then(|out| {
        write_output(&out)?;
        Ok(out)
    });
    match result {
        Ok(out) => match out.failure {
            Some(reason) => {
                eprintln!("error: {reason}");
                3
            }
            None => 0,
        },
        Err(e) => {
            eprintln!("error: {}", e.message().lines().next().unwrap_or(""));
            e.exit_code()
        }
    }
}

fn write_output(out: &Output) -> Result<(), CliError> {
    for (target, text) in &out.writes {
        match target {
            Target::Stdout => std::io::stdout().write_all(text.as_bytes()),
            Target::Stderr => std::io::stderr().write_all(text.as_bytes()),
            Target::File(path) => {
                if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                    std::fs::create_dir_all(parent).map_err(|e| CliError::Io(format!("{}: {e}", parent.display())))?;
                }
                std::fs::write(path, text)
            }
        }
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

/// Runs a parsed command without touching the filesystem.
pub fn run(cli: &Cli) -> Result<Output, CliError> {
    let c = &cli.common;
    check_common(c)?;
    match &cli.command {
        Command::Trajectory => {
            check_protocol(c)?;
            cmd_trajectory(c)
        }
        Command::Phases => {
            check_protocol(c)?;
            cmd_phases(c)
        }
        Command::Entangle(args) => cmd_entangle(c, args),
        Command::Feasibility(args) => cmd_feasibility(c, args),
        Command::Validate(args) => cmd_validate(c, args),
    }
}

fn check_finite(name: &str, x: f64) -> Result<(), CliError> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be finite")))
    }
}

fn check_common(c: &CommonArgs) -> Result<(), CliError> {
    if c.n1 == 0 || c.n2 == 0 {
        return Err(usage("--n1 and --n2 must be at least 1"));
    }
    if !(c.g.is_finite() && c.g > 0.0) {
        return Err(usage("--g must be positive"));
    }
    for (name, x) in [
        ("f0", c.f0),
        ("delta-alpha", c.delta_alpha),
        ("delta-theta", c.delta_theta),
        ("theta", c.theta),
        ("phi", c.phi),
        ("omega0", c.omega0),
    ] {
        check_finite(name, x)?;
    }
    check_steps(c.steps)?;
    Ok(())
}

/// Checks shared by commands that run the actual pulse sequence.
fn check_protocol(c: &CommonArgs) -> Result<(), CliError> {
    if c.m.is_multiple_of(2) {
        return Err(Error::EvenHarmonic(c.m).into());
    }
    if !(c.n1 + c.n2).is_multiple_of(2) {
        return Err(usage(
            "N1 and N2 must have equal parity so every sector frequency is an even multiple of G",
        ));
    }
    Ok(())
}

fn units_line(c: &CommonArgs) -> String {
    format!(
        "hbar = 1; frequencies in units of G = {}; times in 1/G; phases in radians",
        fmt_f64(c.g)
    )
}

fn params_line(c: &CommonArgs) -> String {
    format!(
        "N1 = {}, N2 = {}, F0/G = {}, m = {}, n = {} (Delta = 2 n G), omega0/G = {}, steps = {}",
        c.n1,
        c.n2,
        fmt_f64(c.f0),
        c.m,
        c.n,
        fmt_f64(c.omega0),
        c.steps
    )
}

/// A sector with total spin `total` (the path depends only on the total).
fn representative_sector(total: i32, n1: usize, n2: usize) -> SpinSector {
    let s1 = (-(n1 as i32)).max(total - n2 as i32);
    SpinSector { s1, s2: total - s1 }
}

#[derive(Serialize)]
struct TrajectoryJson<'a> {
    s_tot: i32,
    sector: SpinSector,
    omega_over_g: f64,
    closure_residual: f64,
    t: &'a [f64],
    re_alpha_c: Vec<f64>,
    im_alpha_c: Vec<f64>,
    phase: &'a [f64],
}

fn cmd_trajectory(c: &CommonArgs) -> Result<Output, CliError> {
    let (params, drive) = design_drive(c.g, c.n, c.m, c.f0 * c.g)?;
    let params = params.with_omega0(c.omega0 * c.g);
    let alpha0 = Complex64::new(0.0, c.f0 * c.g / (SQRT_2 * c.g));
    let unit = if alpha0.norm() > 0.0 { alpha0 } else { Complex64::new(1.0, 0.0) };
    let unit_note = if alpha0.norm() > 0.0 {
        "amplitudes in units of alpha0 = i F0 / (sqrt(2) G)"
    } else {
        "raw amplitudes (F0 = 0, alpha0 undefined)"
    };
    let tolerance = closure_tolerance(&drive, &params);

    let mut paths: Vec<(i32, Trajectory)> = Vec::new();
    for total in total_spins(c.n1, c.n2) {
        let sector = representative_sector(total, c.n1, c.n2);
        let traj = integrate_trajectory(&drive, &params, sector, c.steps)?;
        let residual = closure_residual(&traj);
        if residual > tolerance {
            return Err(CliError::Numerical(format!(
                "trajectory with S_tot = {total} does not close: |alpha_c(T)| = {} > {}",
                fmt_f64(residual),
                fmt_f64(tolerance)
            )));
        }
        paths.push((total, traj));
    }

    let mut out = Output::default();
    match c.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let docs: Vec<TrajectoryJson> = paths
                .iter()
                .map(|(total, t)| TrajectoryJson {
                    s_tot: *total,
                    sector: t.sector,
                    omega_over_g: sector_frequency(&params, t.sector) / c.g,
                    closure_residual: closure_residual(t) / unit.norm(),
                    t: &t.times,
                    re_alpha_c: t.alpha_c.iter().map(|a| (a / unit).re).collect(),
                    im_alpha_c: t.alpha_c.iter().map(|a| (a / unit).im).collect(),
                    phase: &t.phase,
                })
                .collect();
            #[derive(Serialize)]
            struct Doc<'a> {
                units: String,
                amplitude_unit: &'a str,
                parameters: &'a CommonArgs,
                trajectories: Vec<TrajectoryJson<'a>>,
            }
            let doc = Doc { units: units_line(c), amplitude_unit: unit_note, parameters: c, trajectories: docs };
            out.primary(&c.out, to_json_string(&doc));
        }
        Format::Csv => {
            for (total, traj) in &paths {
                let header = format!(
                    "geophase trajectory\nunits: {}; {unit_note}\n{}\nS_tot = {total}, sector (s1, s2) = ({}, {}), Omega/G = {}\nclosure |alpha_c(T)| / |alpha0| = {}",
                    units_line(c),
                    params_line(c),
                    traj.sector.s1,
                    traj.sector.s2,
                    fmt_f64(sector_frequency(&params, traj.sector) / c.g),
                    fmt_f64(closure_residual(traj) / unit.norm()),
                );
                let mut buf = Vec::new();
                traj.write_csv(&mut buf, unit, &header).map_err(|e| CliError::Io(e.to_string()))?;
                let text = String::from_utf8(buf).expect("CSV is UTF-8");
                match &c.out {
                    Some(dir) => out.push(Target::File(dir.join(format!("trajectory_stot{total:+04}.csv"))), text),
                    None => out.push(Target::Stdout, text + "\n"),
                }
            }
        }
        Format::Table => return Err(usage("trajectory supports --format csv or json")),
    }
    Ok(out)
}

#[derive(Serialize)]
struct RelativeErrors {
    phi0: f64,
    phi1: f64,
    phi2: f64,
}

fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

#[derive(Serialize)]
struct CoefficientComparison {
    m: u32,
    n: i64,
    closed: PhaseCoefficients,
    quadrature: PhaseCoefficients,
    relative_error: RelativeErrors,
}

fn compare_coefficients(c: &CommonArgs, m: u32, n: i64) -> Result<CoefficientComparison, CliError> {
    let (params, drive) = design_drive(c.g, n, m, c.f0 * c.g)?;
    let closed = phase_coefficients_closed(c.f0 * c.g, c.g, m, n)?;
    let quadrature = phase_coefficients_for(&drive, &params, c.steps)?;
    let relative_error = RelativeErrors {
        phi0: relative_error(quadrature.phi0, closed.phi0),
        phi1: relative_error(quadrature.phi1, closed.phi1),
        phi2: relative_error(quadrature.phi2, closed.phi2),
    };
    Ok(CoefficientComparison { m, n, closed, quadrature, relative_error })
}

fn cmd_phases(c: &CommonArgs) -> Result<Output, CliError> {
    let (params, drive) = design_drive(c.g, c.n, c.m, c.f0 * c.g)?;
    let phases = protocol_phases(&drive, &params, c.n1, c.n2, c.steps, CoefficientSource::Closed)?;
    let forward = compare_coefficients(c, c.m, c.n)?;
    let reversed = compare_coefficients(c, c.m, -c.n)?;
    let mut grid = Vec::new();
    for m in GRID_HARMONICS {
        for n in GRID_DETUNINGS {
            grid.push(compare_coefficients(c, m, n)?);
        }
    }

    let mut out = Output::default();
    match c.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                units: String,
                parameters: &'a CommonArgs,
                coefficient_source: &'static str,
                coefficients: CoefficientComparison,
                reversed_coefficients: CoefficientComparison,
                coefficient_grid: Vec<CoefficientComparison>,
                stage1: &'a PhaseTable,
                stage2: &'a PhaseTable,
                total: &'a PhaseTable,
            }
            let doc = Doc {
                units: units_line(c),
                parameters: c,
                coefficient_source: "closed form; quadrature shown for comparison",
                coefficients: forward,
                reversed_coefficients: reversed,
                coefficient_grid: grid,
                stage1: &phases.stage1,
                stage2: &phases.stage2,
                total: &phases.total,
            };
            out.primary(&c.out, to_json_string(&doc));
        }
        Format::Csv => {
            let mut text = String::new();
            let _ = writeln!(text, "# geophase phases\n# units: {}\n# {}", units_line(c), params_line(c));
            for (label, cmp) in [("forward", &forward), ("reversed", &reversed)] {
                let _ = writeln!(
                    text,
                    "# {label} closed: phi0 = {}, phi1 = {}, phi2 = {}; quadrature: phi0 = {}, phi1 = {}, phi2 = {}",
                    fmt_f64(cmp.closed.phi0),
                    fmt_f64(cmp.closed.phi1),
                    fmt_f64(cmp.closed.phi2),
                    fmt_f64(cmp.quadrature.phi0),
                    fmt_f64(cmp.quadrature.phi1),
                    fmt_f64(cmp.quadrature.phi2),
                );
            }
            let _ = writeln!(
                text,
                "# gauges: stage1 = {}, stage2 = {}, total = {}",
                fmt_f64(phases.stage1.gauge()),
                fmt_f64(phases.stage2.gauge()),
                fmt_f64(phases.total.gauge())
            );
            let _ = writeln!(text, "s1,s2,stage1,stage2,total");
            let rows = phases.stage1.iter().zip(phases.stage2.entries()).zip(phases.total.entries());
            for (((s, a), b), t) in rows {
                let _ = writeln!(text, "{},{},{},{},{}", s.s1, s.s2, fmt_f64(a), fmt_f64(*b), fmt_f64(*t));
            }
            out.primary(&c.out, text);
        }
        Format::Table => return Err(usage("phases supports --format json or csv")),
    }
    Ok(out)
}

fn cmd_entangle(c: &CommonArgs, args: &EntangleArgs) -> Result<Output, CliError> {
    let dim = (c.n1 + 1) * (c.n2 + 1);
    if dim > MAX_JOINT_DIM {
        return Err(usage(format!("(N1+1)(N2+1) = {dim} exceeds the supported {MAX_JOINT_DIM}")));
    }
    if let Some(p) = args.gate_phase {
        check_finite("gate-phase", p)?;
    } else {
        check_protocol(c)?;
    }
    if args.sweep.is_some() && args.points == 0 {
        return Err(usage("--points must be at least 1"));
    }
    for &da in &args.sweep_delta_alpha {
        check_finite("sweep-delta-alpha", da)?;
    }
    if c.format == Some(Format::Table) {
        return Err(usage("entangle supports --format json or csv"));
    }

    let psi1 = coherent_spin_state(c.n1, c.theta, c.phi);
    let psi2 = coherent_spin_state(c.n2, c.theta, c.phi);
    let (table, gate_kind) = match args.gate_phase {
        Some(phi2) => (PhaseTable::entangling((c.n1, c.n2), phi2), "entangling phi2 s1 s2"),
        None => {
            let (params, drive) = design_drive(c.g, c.n, c.m, c.f0 * c.g)?;
            let phases = protocol_phases(&drive, &params, c.n1, c.n2, c.steps, CoefficientSource::Closed)?;
            (phases.total, "protocol total phase (closed form)")
        }
    };
    let remnant = RemnantModel::new(Complex64::new(c.delta_alpha, 0.0), c.delta_theta)?;
    let joint = apply_phase_gate(&psi1, &psi2, &table)?;
    let rho = reduced_density(&joint, &remnant);
    let report = log_negativity(&rho)?;

    let sweep = match &args.sweep {
        Some(path) => {
            let upper = TAU / c.n1.min(c.n2) as f64;
            let grid = gate_phase_grid(upper, args.points);
            let points = negativity_sweep(&psi1, &psi2, &grid, &args.sweep_delta_alpha, c.delta_theta)?;
            let mut text = String::new();
            let _ = writeln!(
                text,
                "# geophase entangle sweep\n# units: phases in radians, E in bits; gate phi2 s1 s2 over [0, 2 pi / min(N1, N2)]\n# N1 = {}, N2 = {}, theta = {}, phi = {}, delta_theta = {}",
                c.n1,
                c.n2,
                fmt_f64(c.theta),
                fmt_f64(c.phi),
                fmt_f64(c.delta_theta)
            );
            let _ = writeln!(text, "phi2,delta_alpha,delta_theta,E,E_max,normalized");
            for p in &points {
                let _ = writeln!(
                    text,
                    "{},{},{},{},{},{}",
                    fmt_f64(p.phi2),
                    fmt_f64(p.delta_alpha),
                    fmt_f64(p.delta_theta),
                    fmt_f64(p.report.log_negativity),
                    fmt_f64(p.report.max_entanglement),
                    fmt_f64(p.report.normalized)
                );
            }
            Some((path.clone(), text))
        }
        None => None,
    };

    let mut out = Output::default();
    match c.format.unwrap_or(Format::Json) {
        Format::Csv => {
            let text = format!(
                "# geophase entangle\n# units: E in bits\n# gate: {gate_kind}\nE,E_max,normalized\n{},{},{}\n",
                fmt_f64(report.log_negativity),
                fmt_f64(report.max_entanglement),
                fmt_f64(report.normalized)
            );
            out.primary(&c.out, text);
        }
        _ => {
            #[derive(Serialize)]
            struct Doc<'a> {
                #[serde(flatten)]
                report: EntanglementReport,
                units: &'static str,
                gate: &'static str,
                gate_phase: Option<f64>,
                remnant: RemnantModel,
                parameters: &'a CommonArgs,
            }
            let doc = Doc {
                report,
                units: "E in bits; phases in radians",
                gate: gate_kind,
                gate_phase: args.gate_phase,
                remnant,
                parameters: c,
            };
            out.primary(&c.out, to_json_string(&doc));
        }
    }
    if let Some((path, text)) = sweep {
        out.push(Target::File(path), text);
    }
    if let Some(path) = &args.density_out {
        out.push(Target::File(path.clone()), to_json_string(&rho));
    }
    Ok(out)
}

fn cmd_feasibility(c: &CommonArgs, args: &FeasibilityArgs) -> Result<Output, CliError> {
    let cavity = CavityParams::new(args.g0_mhz, args.kappa_mhz, args.gamma_mhz, args.atoms)?;
    let report = feasibility_report(&cavity, args.alpha_sq)?;
    let mut out = Output::default();
    let table = report.to_table("MHz");
    match c.format.unwrap_or(Format::Json) {
        Format::Json => {
            #[derive(Serialize)]
            struct Doc<'a> {
                units: &'static str,
                #[serde(flatten)]
                report: &'a crate::feasibility::FeasibilityReport,
            }
            let doc = Doc { units: "rates in MHz (hbar = 1); times in 1/MHz", report: &report };
            out.primary(&c.out, to_json_string(&doc));
            out.push(Target::Stderr, table);
        }
        Format::Table => out.primary(&c.out, table),
        Format::Csv => {
            let mut text = String::from("# geophase feasibility\n# units: rates in MHz (hbar = 1); times in 1/MHz\nquantity,value\n");
            let v = serde_json::to_value(report).expect("report serializes");
            for (k, val) in v.as_object().expect("report is an object") {
                if let Some(x) = val.as_f64() {
                    let _ = writeln!(text, "{k},{}", fmt_f64(x));
                } else if let Some(b) = val.as_bool() {
                    let _ = writeln!(text, "{k},{b}");
                }
            }
            for (k, x) in [("g0", cavity.g0), ("kappa", cavity.kappa), ("gamma", cavity.gamma)] {
                let _ = writeln!(text, "{k},{}", fmt_f64(x));
            }
            let _ = writeln!(text, "atoms,{}", cavity.atoms);
            out.primary(&c.out, text);
        }
    }
    Ok(out)
}

fn cmd_validate(c: &CommonArgs, args: &ValidateArgs) -> Result<Output, CliError> {
    let config = ValidationConfig {
        atoms: args.validate_atoms,
        coupling: c.g,
        drive_amplitude: c.f0 * c.g,
        harmonic: c.m,
        detuning_index: c.n,
        steps: c.steps,
        fock_cutoff: args.cutoff,
        seed: args.seed,
        inject_even_harmonic: args.inject_even_m,
    };
    let report = run_validation(&config)?;
    let mut out = Output::default();
    let summary = report.summary();
    match c.format.unwrap_or(Format::Json) {
        Format::Json => {
            out.primary(&c.out, to_json_string(&report));
            out.push(Target::Stderr, summary);
        }
        Format::Table => out.primary(&c.out, summary),
        Format::Csv => {
            let mut text = String::from("name,passed,measured,tolerance,detail\n");
            for ch in &report.checks {
                let _ = writeln!(
                    text,
                    "{},{},{},{},\"{}\"",
                    ch.name,
                    ch.passed,
                    fmt_f64(ch.measured),
                    fmt_f64(ch.tolerance),
                    ch.detail.replace('"', "'")
                );
            }
            out.primary(&c.out, text);
        }
    }
    if !report.all_passed {
        let failed: Vec<&str> = report.checks.iter().filter(|ch| !ch.passed).map(|ch| ch.name.as_str()).collect();
        out.failure = Some(format!("validation failed: {}", failed.join(", ")));
    }
    Ok(out)
}
