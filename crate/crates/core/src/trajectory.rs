//! Coherent-state trajectories of the cavity mode, one per spin sector.
//!
//! In the rotating frame the amplitude obeys `α̇_c = (i/√2) F(t) e^{iΩt}` from
//! vacuum, and the accompanying phase obeys `Φ̇ = Im(α̇_c α_c*)`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::drive::DrivePulse;
use crate::error::Result;
use crate::format::fmt_f64;
use crate::model::{sector_frequency, sectors, ProtocolParams, SpinSector};
use crate::quadrature::{check_steps, cumulative_simpson, cumulative_trapezoid, uniform_grid};

/// Relative closure tolerance, in units of the drive scale `F₀/G`.
pub const CLOSURE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub sector: SpinSector,
    pub times: Vec<f64>,
    /// Rotating-frame amplitude α_c(t).
    pub alpha_c: Vec<Complex64>,
    /// Accumulated phase Φ(t).
    pub phase: Vec<f64>,
    /// Set when a tabulated drive leaves a remnant amplitude at `T`.
    pub closure_warning: Option<String>,
    params: ProtocolParams,
}

/// Integrates the sector trajectory over `[0, T]` on `steps` intervals.
pub fn integrate_trajectory(
    drive: &DrivePulse,
    params: &ProtocolParams,
    sector: SpinSector,
    steps: usize,
) -> Result<Trajectory> {
    check_steps(steps)?;
    drive.check_covers(params.duration())?;
    let omega = sector_frequency(params, sector);
    let times = uniform_grid(params.duration(), steps);
    let h = params.duration() / steps as f64;

    let rate: Vec<Complex64> = times
        .iter()
        .map(|&t| Complex64::new(0.0, FRAC_1_SQRT_2 * drive.value(t)) * Complex64::cis(omega * t))
        .collect();
    let alpha_c = cumulative_simpson(&rate, h);
    let phase_rate: Vec<f64> = rate.iter().zip(&alpha_c).map(|(r, a)| (r * a.conj()).im).collect();
    let phase = cumulative_trapezoid(&phase_rate, h);

    let mut traj = Trajectory { sector, times, alpha_c, phase, closure_warning: None, params: *params };
    if drive.is_tabulated() {
        let residual = closure_residual(&traj);
        let tolerance = closure_tolerance(drive, params);
        if residual > tolerance {
            traj.closure_warning = Some(format!(
                "tabulated drive leaves |alpha_c(T)| = {residual:e} > {tolerance:e} in sector ({}, {})",
                sector.s1, sector.s2
            ));
        }
    }
    Ok(traj)
}

/// Trajectories for every sector, in s1-major order.
pub fn integrate_all_sectors(
    drive: &DrivePulse,
    params: &ProtocolParams,
    n1: usize,
    n2: usize,
    steps: usize,
) -> Result<Vec<Trajectory>> {
    sectors(n1, n2)
        .map(|sector| integrate_trajectory(drive, params, sector, steps))
        .collect()
}

/// `|α_c(T)|`: distance from the vacuum at the end of the pulse.
pub fn closure_residual(traj: &Trajectory) -> f64 {
    traj.alpha_c.last().map_or(0.0, |a| a.norm())
}

/// Absolute closure tolerance `1e-9 · F₀/G`.
pub fn closure_tolerance(drive: &DrivePulse, params: &ProtocolParams) -> f64 {
    CLOSURE_TOL * drive.amplitude_scale() / params.coupling()
}

/// Lab-frame amplitude `α = α_c e^{−i[ω₀ + G(s1+s2)]t}`.
pub fn rotating_frame_convert(alpha_c: Complex64, t: f64, params: &ProtocolParams, sector: SpinSector) -> Complex64 {
    let frame = params.omega0() + params.coupling() * sector.total() as f64;
    alpha_c * Complex64::cis(-frame * t)
}

impl Trajectory {
    pub fn final_alpha_c(&self) -> Complex64 {
        self.alpha_c.last().copied().unwrap_or_default()
    }

    pub fn final_phase(&self) -> f64 {
        self.phase.last().copied().unwrap_or_default()
    }

    /// Lab-frame amplitude at the end of the pulse.
    pub fn final_alpha(&self) -> Complex64 {
        let t = self.times.last().copied().unwrap_or_default();
        rotating_frame_convert(self.final_alpha_c(), t, &self.params, self.sector)
    }

    pub fn params(&self) -> &ProtocolParams {
        &self.params
    }

    /// Writes `t, Re(alpha_c), Im(alpha_c), Re(alpha), Im(alpha), phase`.
    /// Amplitudes are divided by `unit` (pass `1` for raw values).
    pub fn write_csv<W: Write>(&self, mut out: W, unit: Complex64, header_comment: &str) -> io::Result<()> {
        for line in header_comment.lines() {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "t,re_alpha_c,im_alpha_c,re_alpha,im_alpha,phase")?;
        for ((&t, &ac), &phi) in self.times.iter().zip(&self.alpha_c).zip(&self.phase) {
            let lab = rotating_frame_convert(ac, t, &self.params, self.sector) / unit;
            let ac = ac / unit;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                fmt_f64(t),
                fmt_f64(ac.re),
                fmt_f64(ac.im),
                fmt_f64(lab.re),
                fmt_f64(lab.im),
                fmt_f64(phi)
            )?;
        }
        Ok(())
    }
}
