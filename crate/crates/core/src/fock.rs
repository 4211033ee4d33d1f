//! Independent check of the coherent-state ansatz: direct Schrödinger
//! integration of one spin sector in a truncated photon-number basis.
//!
//! The lab-frame sector Hamiltonian is
//! `H = (ω₀ + G S) a†a − (F(t)/√2)(a e^{i(ω₀−Δ)t} + h.c.)`, integrated from
//! vacuum with classical RK4. Because the vacuum component of a displaced
//! state carries exactly the geometric phase, `Φ(t) = arg⟨0|ψ(t)⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;

use crate::drive::DrivePulse;
use crate::error::{Error, Result};
use crate::model::{ProtocolParams, SpinSector};
use crate::quadrature::{check_steps, uniform_grid};
use crate::trajectory::integrate_trajectory;

/// Largest tolerated top-level population or norm drift.
pub const LEAK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct FockEvolution {
    pub times: Vec<f64>,
    /// `⟨a⟩ e^{i[ω₀+G(s1+s2)]t}`.
    pub alpha_c: Vec<Complex64>,
    /// Unwrapped `arg⟨0|ψ⟩`.
    pub phase: Vec<f64>,
    /// Largest population seen in the top retained level.
    pub max_top_population: f64,
    pub norm_drift: f64,
}

impl FockEvolution {
    pub fn final_alpha_c(&self) -> Complex64 {
        self.alpha_c.last().copied().unwrap_or_default()
    }

    pub fn final_phase(&self) -> f64 {
        self.phase.last().copied().unwrap_or_default()
    }
}

/// Smallest cutoff accepted for a path reaching `max_photons = max|α_c|²`,
/// i.e. `⌈10·max|α_c|² + 10⌉`. The `1e-9` slack keeps quadrature round-off
/// from bumping a boundary case (|α_c|² = 2 exactly) to the next integer.
pub fn required_cutoff(max_photons: f64) -> usize {
    (10.0 * max_photons + 10.0 - 1e-9).ceil() as usize
}

/// Evolves vacuum over `[0, T]` keeping Fock levels `0..fock_cutoff`.
pub fn exact_oracle_evolve(
    params: &ProtocolParams,
    drive: &DrivePulse,
    sector: SpinSector,
    fock_cutoff: usize,
    steps: usize,
) -> Result<FockEvolution> {
    check_steps(steps)?;
    let path = integrate_trajectory(drive, params, sector, steps)?;
    let max_photons = path.alpha_c.iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    let required = required_cutoff(max_photons);
    if fock_cutoff < required {
        return Err(Error::CutoffGuard { cutoff: fock_cutoff, required, max_photons });
    }
    evolve(params, drive, sector, fock_cutoff, steps)
}

fn evolve(params: &ProtocolParams, drive: &DrivePulse, sector: SpinSector, dim: usize, steps: usize) -> Result<FockEvolution> {
    let energy = params.omega0() + params.coupling() * sector.total() as f64;
    let carrier = params.omega0() - params.detuning();
    let sqrt_n: Vec<f64> = (0..dim).map(|k| (k as f64).sqrt()).collect();
    // dc/dt = −i H c
    let rhs = |t: f64, c: &[Complex64], out: &mut [Complex64]| {
        let f = Complex64::cis(carrier * t) * (FRAC_1_SQRT_2 * drive.value(t));
        let fc = f.conj();
        for k in 0..dim {
            let mut h = c[k] * (energy * k as f64);
            if k + 1 < dim {
                h -= f * c[k + 1] * sqrt_n[k + 1];
            }
            if k > 0 {
                h -= fc * c[k - 1] * sqrt_n[k];
            }
            out[k] = Complex64::new(h.im, -h.re);
        }
    };

    let times = uniform_grid(params.duration(), steps);
    let h = params.duration() / steps as f64;
    let mut c = vec![Complex64::default(); dim];
    c[0] = Complex64::new(1.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) =
        (c.clone(), c.clone(), c.clone(), c.clone(), c.clone());

    let mut alpha_c = Vec::with_capacity(times.len());
    let mut phase = Vec::with_capacity(times.len());
    let mut max_top = 0.0_f64;
    let mut unwrap = PhaseUnwrap::default();

    let mut record = |t: f64, c: &[Complex64], max_top: &mut f64| {
        let mean_a: Complex64 = (1..dim).map(|k| c[k - 1].conj() * c[k] * sqrt_n[k]).sum();
        alpha_c.push(mean_a * Complex64::cis(energy * t));
        phase.push(unwrap.push(c[0].arg()));
        *max_top = max_top.max(c[dim - 1].norm_sqr());
    };
    record(times[0], &c, &mut max_top);

    for step in 0..steps {
        let t = times[step];
        rhs(t, &c, &mut k1);
        for i in 0..dim {
            tmp[i] = c[i] + k1[i] * (0.5 * h);
        }
        rhs(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = c[i] + k2[i] * (0.5 * h);
        }
        rhs(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = c[i] + k3[i] * h;
        }
        rhs(times[step + 1], &tmp, &mut k4);
        for i in 0..dim {
            c[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
        record(times[step + 1], &c, &mut max_top);
    }

    let norm_drift = (c.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs();
    let leak = max_top.max(norm_drift);
    if leak > LEAK_TOL {
        return Err(Error::NormLeak { leak });
    }
    Ok(FockEvolution { times, alpha_c, phase, max_top_population: max_top, norm_drift })
}

#[derive(Default)]
struct PhaseUnwrap {
    last: Option<f64>,
    offset: f64,
}

impl PhaseUnwrap {
    fn push(&mut self, wrapped: f64) -> f64 {
        if let Some(last) = self.last {
            let mut jump = wrapped - last;
            if jump > PI {
                self.offset -= TAU;
                jump -= TAU;
            } else if jump < -PI {
                self.offset += TAU;
                jump += TAU;
            }
            debug_assert!(jump.abs() <= PI);
        }
        self.last = Some(wrapped);
        wrapped + self.offset
    }
}
