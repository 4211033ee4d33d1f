//! Deterministic self-check suite behind `geophase validate`.
//!
//! Each check records the measured quantity next to its tolerance. Random
//! inputs come from a seeded ChaCha8 stream, so two runs with the same
//! config produce identical reports.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::drive::DrivePulse;
use crate::error::{invalid, Result};
use crate::fock::exact_oracle_evolve;
use crate::linalg::{eigh, random_hermitian, EigenMethod};
use crate::model::{coherent_spin_state, sectors, ProtocolParams, SpinSector};
use crate::phase::{
    design_drive, geometric_phase_quadrature, phase_coefficients_closed, phase_coefficients_for,
    protocol_phases, squeezing_residual_spread, CoefficientSource, PhaseCoefficients, PhaseTable,
};
use crate::quadrature::check_steps;
use crate::state::{apply_phase_gate, reduced_density, RemnantModel};
use crate::trajectory::{closure_residual, closure_tolerance, integrate_trajectory};

pub const MAX_VALIDATE_ATOMS: usize = 6;
pub const MAX_VALIDATE_CUTOFF: usize = 30;

const HARMONICS: [u32; 3] = [1, 3, 5];
const DETUNINGS: [i64; 5] = [1, 2, 3, 4, 5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationConfig {
    /// Atoms per ensemble for the sector sweeps (at most 6).
    pub atoms: usize,
    pub coupling: f64,
    pub drive_amplitude: f64,
    pub harmonic: u32,
    pub detuning_index: i64,
    pub steps: usize,
    pub fock_cutoff: usize,
    pub seed: u64,
    /// Swap the closure check's drive for an even harmonic (negative control).
    pub inject_even_harmonic: bool,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            atoms: 4,
            coupling: 1.0,
            drive_amplitude: 1.0,
            harmonic: 1,
            detuning_index: 1,
            steps: 4096,
            fock_cutoff: MAX_VALIDATE_CUTOFF,
            seed: 20_130_521,
            inject_even_harmonic: false,
        }
    }
}

impl ValidationConfig {
    pub fn check(&self) -> Result<()> {
        if self.atoms == 0 || self.atoms > MAX_VALIDATE_ATOMS {
            return Err(invalid("atoms", format!("validation runs 1..={MAX_VALIDATE_ATOMS} atoms, got {}", self.atoms)));
        }
        if self.fock_cutoff == 0 || self.fock_cutoff > MAX_VALIDATE_CUTOFF {
            return Err(invalid("fock_cutoff", format!("must be in 1..={MAX_VALIDATE_CUTOFF}")));
        }
        check_steps(self.steps)?;
        design_drive(self.coupling, self.detuning_index, self.harmonic, self.drive_amplitude).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn within(name: &str, measured: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed: measured <= tolerance, measured, tolerance, detail: detail.into() }
    }

    fn failed(name: &str, tolerance: f64, detail: impl Into<String>) -> Self {
        Self { name: name.to_string(), passed: false, measured: f64::NAN, tolerance, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub config: ValidationConfig,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

impl ValidationReport {
    /// One `PASS`/`FAIL` line per check.
    pub fn summary(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<width$}  measured {:>24}  tolerance {:>24}  {}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                crate::format::fmt_f64(c.measured),
                crate::format::fmt_f64(c.tolerance),
                c.detail
            );
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "{passed}/{} checks passed", self.checks.len());
        out
    }
}

/// Runs every check. Invalid configs are rejected before any work.
pub fn run_validation(config: &ValidationConfig) -> Result<ValidationReport> {
    config.check()?;
    let checks = vec![
        closure_check(config),
        closure_negative_control(config),
        coefficient_check(config),
        parity_check(config),
        cancellation_check(config),
        ode_vs_quadrature_check(config),
        fock_oracle_check(config),
        eigensolver_check(config),
        density_matrix_check(config),
        convergence_check(config),
    ];
    let all_passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport { config: *config, checks, all_passed })
}

fn grid() -> impl Iterator<Item = (u32, i64)> {
    HARMONICS.into_iter().flat_map(|m| DETUNINGS.into_iter().map(move |n| (m, n)))
}

fn relative_error(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }
}

fn worst_closure(params: &ProtocolParams, drive: &DrivePulse, atoms: usize, steps: usize) -> Result<(f64, f64)> {
    let mut worst = 0.0_f64;
    for sector in sectors(atoms, atoms) {
        worst = worst.max(closure_residual(&integrate_trajectory(drive, params, sector, steps)?));
    }
    Ok((worst, closure_tolerance(drive, params)))
}

fn closure_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "closure";
    let run = || -> Result<(f64, f64)> {
        if cfg.inject_even_harmonic {
            let (p, d) = even_fixture(cfg)?;
            return worst_closure(&p, &d, cfg.atoms, cfg.steps);
        }
        let mut worst = (0.0_f64, f64::INFINITY);
        for (m, n) in grid() {
            let (p, d) = design_drive(cfg.coupling, n, m, cfg.drive_amplitude)?;
            let (r, tol) = worst_closure(&p, &d, cfg.atoms, cfg.steps)?;
            worst = (worst.0.max(r), worst.1.min(tol));
        }
        Ok(worst)
    };
    let detail = if cfg.inject_even_harmonic {
        "max |alpha_c(T)| with the injected m=2 drive".to_string()
    } else {
        format!("max |alpha_c(T)| over m in {HARMONICS:?}, n in {DETUNINGS:?}, all sectors")
    };
    match run() {
        Ok((r, tol)) => CheckResult::within(NAME, r, tol, detail),
        Err(e) => CheckResult::failed(NAME, 0.0, e.to_string()),
    }
}

fn even_fixture(cfg: &ValidationConfig) -> Result<(ProtocolParams, DrivePulse)> {
    let amplitude = if cfg.drive_amplitude == 0.0 { cfg.coupling } else { cfg.drive_amplitude };
    let p = ProtocolParams::exact_unchecked(cfg.coupling, cfg.detuning_index, 2, amplitude)?;
    let d = DrivePulse::sinusoidal_unchecked(amplitude, 2, cfg.coupling)?;
    Ok((p, d))
}

/// The closure detector must flag an even harmonic.
fn closure_negative_control(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "closure_negative_control";
    let run = || -> Result<(f64, f64)> {
        let (p, d) = even_fixture(cfg)?;
        worst_closure(&p, &d, cfg.atoms, cfg.steps)
    };
    match run() {
        Ok((r, tol)) => CheckResult {
            name: NAME.to_string(),
            passed: r > tol,
            measured: r,
            tolerance: tol,
            detail: "m=2 fixture must leave |alpha_c(T)| above tolerance".to_string(),
        },
        Err(e) => CheckResult::failed(NAME, 0.0, e.to_string()),
    }
}

fn coefficient_errors(qc: &PhaseCoefficients, cc: &PhaseCoefficients) -> f64 {
    relative_error(qc.phi0, cc.phi0)
        .max(relative_error(qc.phi1, cc.phi1))
        .max(relative_error(qc.phi2, cc.phi2))
}

fn coefficient_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "coefficients_closed_vs_quadrature";
    let run = || -> Result<f64> {
        let mut worst = 0.0_f64;
        for (m, n) in grid() {
            let (p, d) = design_drive(cfg.coupling, n, m, cfg.drive_amplitude)?;
            let q = phase_coefficients_for(&d, &p, cfg.steps)?;
            let c = phase_coefficients_closed(cfg.drive_amplitude, cfg.coupling, m, n)?;
            worst = worst.max(coefficient_errors(&q, &c));
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => CheckResult::within(NAME, e, 1e-6, "max relative error of phi0, phi1, phi2"),
        Err(e) => CheckResult::failed(NAME, 1e-6, e.to_string()),
    }
}

fn parity_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "detuning_parity";
    let run = || -> Result<f64> {
        let mut worst = 0.0_f64;
        for (m, n) in grid() {
            let (p, d) = design_drive(cfg.coupling, n, m, cfg.drive_amplitude)?;
            let fwd = phase_coefficients_for(&d, &p, cfg.steps)?;
            let rev = phase_coefficients_for(&d, &p.reversed_detuning(), cfg.steps)?;
            worst = worst
                .max(relative_error(-rev.phi0, fwd.phi0))
                .max(relative_error(rev.phi1, fwd.phi1))
                .max(relative_error(-rev.phi2, fwd.phi2));
            let cf = phase_coefficients_closed(cfg.drive_amplitude, cfg.coupling, m, n)?;
            let cr = phase_coefficients_closed(cfg.drive_amplitude, cfg.coupling, m, -n)?;
            if cf.phi0 != -cr.phi0 || cf.phi1 != cr.phi1 || cf.phi2 != -cr.phi2 {
                return Ok(f64::INFINITY);
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => CheckResult::within(NAME, e, 1e-8, "phi0, phi2 odd and phi1 even under n -> -n"),
        Err(e) => CheckResult::failed(NAME, 1e-8, e.to_string()),
    }
}

fn cancellation_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "squeezing_cancellation";
    let run = || -> Result<f64> {
        let mut worst = 0.0_f64;
        for (m, n) in grid() {
            let (p, d) = design_drive(cfg.coupling, n, m, cfg.drive_amplitude)?;
            for source in [CoefficientSource::Closed, CoefficientSource::Quadrature] {
                let phases = protocol_phases(&d, &p, cfg.atoms, cfg.atoms, cfg.steps, source)?;
                worst = worst.max(squeezing_residual_spread(&phases.total, &phases.forward));
            }
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => CheckResult::within(NAME, e, 1e-10, "spread of Phi_tot - 2 phi1 S - phi2 s1 s2 over sectors"),
        Err(e) => CheckResult::failed(NAME, 1e-10, e.to_string()),
    }
}

fn config_drive(cfg: &ValidationConfig) -> Result<(ProtocolParams, DrivePulse)> {
    design_drive(cfg.coupling, cfg.detuning_index, cfg.harmonic, cfg.drive_amplitude)
}

fn ode_vs_quadrature_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "phase_ode_vs_quadrature";
    let run = || -> Result<f64> {
        let (p, d) = config_drive(cfg)?;
        let mut worst = 0.0_f64;
        for sector in sectors(cfg.atoms, cfg.atoms) {
            let ode = integrate_trajectory(&d, &p, sector, cfg.steps)?.final_phase();
            let quad = geometric_phase_quadrature(&d, &p, sector, cfg.steps)?;
            worst = worst.max((ode - quad).abs());
        }
        Ok(worst)
    };
    match run() {
        Ok(e) => CheckResult::within(NAME, e, 1e-8, "max |Phi_ode(T) - Phi_quad(T)| over sectors"),
        Err(e) => CheckResult::failed(NAME, 1e-8, e.to_string()),
    }
}

fn fock_oracle_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "fock_oracle";
    let atoms = cfg.atoms.min(2);
    let run = || -> Result<f64> {
        let (p, d) = config_drive(cfg)?;
        let mut worst = 0.0_f64;
        for sector in sectors(atoms, atoms) {
            let oracle = exact_oracle_evolve(&p, &d, sector, cfg.fock_cutoff, cfg.steps)?;
            let path = integrate_trajectory(&d, &p, sector, cfg.steps)?;
            for (a, b) in oracle.alpha_c.iter().zip(&path.alpha_c) {
                worst = worst.max((a - b).norm());
            }
            worst = worst.max((oracle.final_phase() - path.final_phase()).abs());
        }
        Ok(worst)
    };
    let detail = format!("max deviation of alpha_c(t) and Phi(T), N={atoms}, cutoff {}", cfg.fock_cutoff);
    match run() {
        Ok(e) => CheckResult::within(NAME, e, 1e-6, detail),
        Err(e) => CheckResult::failed(NAME, 1e-6, e.to_string()),
    }
}

fn eigensolver_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "eigensolver_reconstruction";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let d = (cfg.atoms + 1) * (cfg.atoms + 1);
    let run = |rng: &mut ChaCha8Rng| -> Result<f64> {
        let mut worst = 0.0_f64;
        for n in [2, 7, d] {
            let m = random_hermitian(n, rng.random());
            let jac = eigh(&m, EigenMethod::Jacobi, true)?;
            let tri = eigh(&m, EigenMethod::Tridiagonal, true)?;
            for eig in [&jac, &tri] {
                let back = eig.reconstruct().expect("vectors requested");
                worst = worst.max(back.max_abs_diff(&m));
            }
            for (a, b) in jac.values.iter().zip(&tri.values) {
                worst = worst.max((a - b).abs());
            }
        }
        Ok(worst)
    };
    match run(&mut rng) {
        Ok(e) => CheckResult::within(NAME, e, 1e-10, format!("max |V L V^H - M| and solver disagreement, sizes 2, 7, {d}")),
        Err(e) => CheckResult::failed(NAME, 1e-10, e.to_string()),
    }
}

fn density_matrix_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "density_matrix_physical";
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
    let n = cfg.atoms;
    let psi = coherent_spin_state(n, std::f64::consts::FRAC_PI_2, 0.0);
    let run = |rng: &mut ChaCha8Rng| -> Result<f64> {
        let mut worst = 0.0_f64;
        for _ in 0..8 {
            let phi2: f64 = rng.random::<f64>() * std::f64::consts::PI;
            let da = Complex64::new(rng.random::<f64>() * 1.5, rng.random::<f64>() - 0.5);
            let dt = rng.random::<f64>() - 0.5;
            let joint = apply_phase_gate(&psi, &psi, &PhaseTable::entangling((n, n), phi2))?;
            let rho = reduced_density(&joint, &RemnantModel::new(da, dt)?);
            let min_eig = rho.eigenvalues(EigenMethod::Tridiagonal)?[0];
            worst = worst
                .max(rho.hermiticity_defect() * 1e2)
                .max((rho.trace() - 1.0).norm())
                .max(-min_eig);
        }
        Ok(worst)
    };
    match run(&mut rng) {
        Ok(e) => CheckResult::within(NAME, e, 1e-10, "max of 100*|rho - rho^H|, |Tr rho - 1|, -min eigenvalue"),
        Err(e) => CheckResult::failed(NAME, 1e-10, e.to_string()),
    }
}

/// Richardson-style estimate: for an order-4 rule the error at `steps` is
/// about `16/15 · |Q(steps) − Q(2·steps)|`.
fn convergence_check(cfg: &ValidationConfig) -> CheckResult {
    const NAME: &str = "step_convergence";
    const TOL: f64 = 1e-8;
    let run = || -> Result<f64> {
        let (p, d) = config_drive(cfg)?;
        let mut worst = 0.0_f64;
        for sector in [SpinSector { s1: -(cfg.atoms as i32), s2: -(cfg.atoms as i32) }, SpinSector { s1: cfg.atoms as i32, s2: cfg.atoms as i32 }] {
            let coarse = integrate_trajectory(&d, &p, sector, cfg.steps)?;
            let fine = integrate_trajectory(&d, &p, sector, 2 * cfg.steps)?;
            let da = (coarse.final_alpha_c() - fine.final_alpha_c()).norm();
            let dphi = (coarse.final_phase() - fine.final_phase()).abs();
            let scale = fine.final_phase().abs().max(d.amplitude_scale() / p.coupling()).max(1.0);
            worst = worst.max(16.0 / 15.0 * da.max(dphi) / scale);
        }
        Ok(worst)
    };
    let detail = format!("order-4 error estimate at steps={} (extreme sectors, relative)", cfg.steps);
    match run() {
        Ok(e) => CheckResult::within(NAME, e, TOL, detail),
        Err(e) => CheckResult::failed(NAME, TOL, e.to_string()),
    }
}
