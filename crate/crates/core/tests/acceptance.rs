//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fail.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use geophase::feasibility::{feasibility_report, CavityParams};
use geophase::fock::exact_oracle_evolve;
use geophase::linalg::EigenMethod;
use geophase::model::{coherent_spin_state, sectors};
use geophase::phase::{
    design_drive, phase_coefficients_closed, phase_coefficients_for, protocol_phases, squeezing_residual_spread,
    CoefficientSource, PhaseTable,
};
use geophase::state::{
    apply_phase_gate, gate_phase_grid, log_negativity, log_negativity_with, negativity_sweep,
    pure_state_negativity_oracle, reduced_density, JointAmplitudes, RemnantModel,
};
use geophase::trajectory::{closure_residual, integrate_all_sectors, integrate_trajectory};
use num_complex::Complex64;

const HARMONICS: [u32; 3] = [1, 3, 5];
const DETUNINGS: [i64; 5] = [1, 2, 3, 4, 5];
const STEPS: usize = 4096;

/// Name, runtime limit in seconds, check.
type Criterion = (&'static str, Option<u64>, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn within(measured: f64, tolerance: f64, what: &str) -> Outcome {
    Outcome { passed: measured < tolerance, detail: format!("{what} = {measured:.3e} (tol {tolerance:.0e})") }
}

fn and(parts: Vec<Outcome>) -> Outcome {
    Outcome {
        passed: parts.iter().all(|p| p.passed),
        detail: parts.iter().map(|p| p.detail.as_str()).collect::<Vec<_>>().join("; "),
    }
}

fn timed(limit: Duration, o: Outcome, elapsed: Duration) -> Outcome {
    and(vec![
        o,
        Outcome {
            passed: elapsed < limit,
            detail: format!("runtime {:.2} s (limit {} s)", elapsed.as_secs_f64(), limit.as_secs()),
        },
    ])
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 { a.abs() } else { ((a - b) / b).abs() }
}

fn closure() -> Outcome {
    let mut worst = 0.0_f64;
    for m in HARMONICS {
        for n in DETUNINGS {
            let (p, d) = design_drive(1.0, n, m, 1.0).unwrap();
            for t in integrate_all_sectors(&d, &p, 20, 20, STEPS).unwrap() {
                worst = worst.max(closure_residual(&t));
            }
        }
    }
    within(worst, 1e-9, "max |alpha_c(T)| G/F0 over 15 designs x 441 sectors")
}

fn closed_forms() -> Outcome {
    let mut worst = 0.0_f64;
    for m in HARMONICS {
        for n in DETUNINGS {
            let (p, d) = design_drive(1.0, n, m, 1.0).unwrap();
            let q = phase_coefficients_for(&d, &p, STEPS).unwrap();
            let c = phase_coefficients_closed(1.0, 1.0, m, n).unwrap();
            worst = worst.max(rel(q.phi0, c.phi0)).max(rel(q.phi1, c.phi1)).max(rel(q.phi2, c.phi2));
        }
    }
    let c = phase_coefficients_closed(1.0, 1.0, 1, 1).unwrap();
    let triple = (c.phi0 - FRAC_PI_3).abs().max((c.phi1 + 7.0 * PI / 18.0).abs()).max((c.phi2 - 10.0 * PI / 9.0).abs());
    and(vec![
        within(worst, 1e-6, "max relative |quadrature - closed|"),
        within(triple, 1e-14, "|(phi0, phi1, phi2) - (pi/3, -7pi/18, 10pi/9)|"),
    ])
}

fn fock_oracle() -> Outcome {
    let (p, d) = design_drive(1.0, 1, 1, 1.0).unwrap();
    let (mut path_err, mut phase_err) = (0.0_f64, 0.0_f64);
    for sector in sectors(2, 2) {
        let oracle = exact_oracle_evolve(&p, &d, sector, 30, STEPS).unwrap();
        let path = integrate_trajectory(&d, &p, sector, STEPS).unwrap();
        for (a, b) in oracle.alpha_c.iter().zip(&path.alpha_c) {
            path_err = path_err.max((a - b).norm());
        }
        phase_err = phase_err.max((oracle.final_phase() - path.final_phase()).abs());
    }
    and(vec![
        within(path_err, 1e-6, "max |alpha_c fock - ansatz| over t and 9 sectors"),
        within(phase_err, 1e-6, "max |Phi(T) fock - ansatz|"),
    ])
}

fn cancellation() -> Outcome {
    let mut worst = 0.0_f64;
    for m in HARMONICS {
        for n in DETUNINGS {
            let (p, d) = design_drive(1.0, n, m, 1.0).unwrap();
            for source in [CoefficientSource::Closed, CoefficientSource::Quadrature] {
                let phases = protocol_phases(&d, &p, 20, 20, STEPS, source).unwrap();
                worst = worst.max(squeezing_residual_spread(&phases.total, &phases.forward));
            }
        }
    }
    within(worst, 1e-10, "max sector spread of the residual, closed and quadrature tables")
}

fn parity() -> Outcome {
    let (mut closed, mut quad) = (0.0_f64, 0.0_f64);
    for m in HARMONICS {
        for n in DETUNINGS {
            let a = phase_coefficients_closed(1.0, 1.0, m, n).unwrap();
            let b = phase_coefficients_closed(1.0, 1.0, m, -n).unwrap();
            closed = closed.max((a.phi0 + b.phi0).abs()).max((a.phi1 - b.phi1).abs()).max((a.phi2 + b.phi2).abs());
            let (p, d) = design_drive(1.0, n, m, 1.0).unwrap();
            let qa = phase_coefficients_for(&d, &p, STEPS).unwrap();
            let qb = phase_coefficients_for(&d, &p.reversed_detuning(), STEPS).unwrap();
            quad = quad.max(rel(-qb.phi0, qa.phi0)).max(rel(qb.phi1, qa.phi1)).max(rel(-qb.phi2, qa.phi2));
        }
    }
    and(vec![
        Outcome { passed: closed == 0.0, detail: format!("closed-form parity defect = {closed:e} (exact)") },
        within(quad, 1e-8, "quadrature relative parity defect"),
    ])
}

fn entanglement_sanity() -> Outcome {
    let plus = |n| coherent_spin_state(n, FRAC_PI_2, 0.0);
    let product = apply_phase_gate(&plus(3), &plus(2), &PhaseTable::zeros((3, 2), geophase::Stage::Total)).unwrap();
    let e_product = log_negativity(&reduced_density(&product, &RemnantModel::ideal())).unwrap().log_negativity;

    let bell = apply_phase_gate(&plus(1), &plus(1), &PhaseTable::entangling((1, 1), PI / 4.0)).unwrap();
    let e_bell = log_negativity(&reduced_density(&bell, &RemnantModel::ideal())).unwrap().log_negativity;

    let (p, d) = design_drive(1.0, 1, 1, 1.0).unwrap();
    let total = protocol_phases(&d, &p, 20, 20, STEPS, CoefficientSource::Closed).unwrap().total;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut oracle_gap = 0.0_f64;
    let e_max = 21f64.log2();
    let mut check = |joint: &JointAmplitudes| {
        let e = log_negativity(&reduced_density(joint, &RemnantModel::ideal())).unwrap().log_negativity;
        worst_excess = worst_excess.max(e - e_max);
        oracle_gap = oracle_gap.max((e - pure_state_negativity_oracle(joint).unwrap()).abs());
    };
    check(&apply_phase_gate(&plus(20), &plus(20), &total).unwrap());
    for phi2 in [TAU / 20.0 * 0.37, TAU / 80.0, 0.2432] {
        check(&apply_phase_gate(&plus(20), &plus(20), &PhaseTable::entangling((20, 20), phi2)).unwrap());
    }
    and(vec![
        within(e_product, 1e-8, "product-state E"),
        within((e_bell - 1.0).abs(), 1e-8, "|E_bell - 1|"),
        Outcome {
            passed: worst_excess <= 0.0,
            detail: format!("N=20 max E - log2 21 = {worst_excess:.4}"),
        },
        within(oracle_gap, 1e-8, "N=20 |E_rho - E_schmidt|"),
    ])
}

fn remnant_sweep() -> Outcome {
    let psi = coherent_spin_state(20, FRAC_PI_2, 0.0);
    let grid = gate_phase_grid(TAU / 20.0, 32);
    let deltas = [0.0, 0.25, 0.5, 1.0];
    let points = negativity_sweep(&psi, &psi, &grid, &deltas, 0.1).unwrap();
    let mut worst_excess = f64::NEG_INFINITY;
    let mut start = 0.0_f64;
    for column in points.chunks(deltas.len()) {
        let ideal = column[0].report.normalized;
        for p in &column[1..] {
            worst_excess = worst_excess.max(p.report.normalized - ideal);
        }
        if column[0].phi2 == 0.0 {
            start = column.iter().map(|p| p.report.normalized.abs()).fold(0.0, f64::max);
        }
    }
    // the production solver against Jacobi at the largest gate phase
    let joint = apply_phase_gate(&psi, &psi, &PhaseTable::entangling((20, 20), grid[31])).unwrap();
    let rho = reduced_density(&joint, &RemnantModel::new(Complex64::new(1.0, 0.0), 0.1).unwrap());
    let jacobi = log_negativity_with(&rho, EigenMethod::Jacobi).unwrap().log_negativity;
    let tri = log_negativity_with(&rho, EigenMethod::Tridiagonal).unwrap().log_negativity;
    and(vec![
        Outcome {
            passed: worst_excess <= 1e-12,
            detail: format!("max over grid of E_n(da>0) - E_n(da=0) = {worst_excess:.3e}"),
        },
        within(start, 1e-8, "max |E_n| at zero gate phase"),
        within((jacobi - tri).abs(), 1e-10, "|E_jacobi - E_tridiagonal| at 441 dims"),
    ])
}

fn feasibility() -> Outcome {
    let r = feasibility_report(&CavityParams::new(1350.0, 330.0, 19.0, 1000).unwrap(), 0.25).unwrap();
    and(vec![
        Outcome { passed: r.delta_min == 19000.0, detail: format!("Delta_min = {} MHz", r.delta_min) },
        within(rel(r.g_eff, 95.92), 1e-2, "relative |G - 95.92 MHz|"),
        within((r.alpha_sq_max - 0.2907).abs(), 1e-4, "| |alpha|^2_max - 0.2907 |"),
    ])
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_geophase"))
            .args(["validate", "--format", "json"])
            .output()
            .expect("run geophase validate")
    };
    let (a, b) = (run(), run());
    let ok = a.status.success() && b.status.success();
    Outcome {
        passed: ok && a.stdout == b.stdout && a.stderr == b.stderr && !a.stdout.is_empty(),
        detail: format!(
            "exit {:?}/{:?}, {} bytes, identical = {}",
            a.status.code(),
            b.status.code(),
            a.stdout.len(),
            a.stdout == b.stdout && a.stderr == b.stderr
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("closure", Some(5), closure),
        ("closed-form agreement", Some(10), closed_forms),
        ("fock oracle equivalence", Some(30), fock_oracle),
        ("squeezing cancellation", None, cancellation),
        ("parity", None, parity),
        ("entanglement sanity", None, entanglement_sanity),
        ("remnant sweep ordering", Some(60), remnant_sweep),
        ("feasibility arithmetic", None, feasibility),
        ("determinism", None, determinism),
    ];
    let mut failures = 0;
    for (i, (name, limit, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if let Some(secs) = limit {
            outcome = timed(Duration::from_secs(*secs), outcome, elapsed);
        }
        let verdict = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {name}: {verdict} ({})", i + 1, outcome.detail);
        failures += usize::from(!outcome.passed);
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
