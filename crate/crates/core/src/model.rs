//! Parameter conventions, collective-spin ladders and spin coherent states.
//!
//! Units: ħ = 1 throughout, so every energy is an angular frequency. Sector
//! frequencies are kept as exact integer multiples of the Stark coupling `G`
//! whenever the detuning was built as `Δ = 2Gn`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Error, Result};

const CLOSURE_REL_TOL: f64 = 1e-12;

/// Physical parameters of one run of the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    coupling: f64,
    detuning: f64,
    omega0: f64,
    drive_amplitude: f64,
    detuning_index: i64,
    harmonic: u32,
    duration: f64,
    exact_closure: bool,
}

impl ProtocolParams {
    /// Parameters in exact-closure mode: `Δ = 2Gn`, `T = 2π/G`.
    pub fn exact(coupling: f64, detuning_index: i64, harmonic: u32, drive_amplitude: f64) -> Result<Self> {
        check_harmonic(harmonic)?;
        Self::exact_unchecked(coupling, detuning_index, harmonic, drive_amplitude)
    }

    /// Same as [`ProtocolParams::exact`] but accepts even harmonics. Only
    /// useful for negative controls of the closure check.
    pub fn exact_unchecked(
        coupling: f64,
        detuning_index: i64,
        harmonic: u32,
        drive_amplitude: f64,
    ) -> Result<Self> {
        check_coupling(coupling)?;
        check_finite("drive_amp_F0", drive_amplitude)?;
        if harmonic == 0 {
            return Err(invalid("integer_m", "must be >= 1"));
        }
        Ok(Self {
            coupling,
            detuning: 2.0 * coupling * detuning_index as f64,
            omega0: 0.0,
            drive_amplitude,
            detuning_index,
            harmonic,
            duration: 2.0 * PI / coupling,
            exact_closure: true,
        })
    }

    /// General parameters. Exact-closure mode is switched on when the
    /// detuning and duration satisfy `Δ = 2Gn` and `T = 2π/G` to 1e-12.
    pub fn new(
        coupling: f64,
        detuning: f64,
        omega0: f64,
        drive_amplitude: f64,
        detuning_index: i64,
        harmonic: u32,
        duration: f64,
    ) -> Result<Self> {
        check_harmonic(harmonic)?;
        check_coupling(coupling)?;
        check_finite("detuning_Delta", detuning)?;
        check_finite("omega0", omega0)?;
        check_finite("drive_amp_F0", drive_amplitude)?;
        if !(duration.is_finite() && duration > 0.0) {
            return Err(invalid("duration_T", format!("must be positive, got {duration}")));
        }
        let mut params = Self {
            coupling,
            detuning,
            omega0,
            drive_amplitude,
            detuning_index,
            harmonic,
            duration,
            exact_closure: false,
        };
        params.exact_closure = params.satisfies_closure_construction();
        Ok(params)
    }

    pub fn with_omega0(mut self, omega0: f64) -> Self {
        self.omega0 = omega0;
        self
    }

    /// Parameters of the second protocol stage: `n → −n`, `Δ → −Δ`.
    pub fn reversed_detuning(&self) -> Self {
        Self { detuning: -self.detuning, detuning_index: -self.detuning_index, ..*self }
    }

    fn satisfies_closure_construction(&self) -> bool {
        let target_delta = 2.0 * self.coupling * self.detuning_index as f64;
        let target_t = 2.0 * PI / self.coupling;
        let scale = self.coupling.abs().max(target_delta.abs());
        (self.detuning - target_delta).abs() <= CLOSURE_REL_TOL * scale
            && (self.duration - target_t).abs() <= CLOSURE_REL_TOL * target_t
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }
    pub fn detuning(&self) -> f64 {
        self.detuning
    }
    pub fn omega0(&self) -> f64 {
        self.omega0
    }
    pub fn drive_amplitude(&self) -> f64 {
        self.drive_amplitude
    }
    pub fn detuning_index(&self) -> i64 {
        self.detuning_index
    }
    pub fn harmonic(&self) -> u32 {
        self.harmonic
    }
    pub fn duration(&self) -> f64 {
        self.duration
    }
    pub fn is_exact_closure(&self) -> bool {
        self.exact_closure
    }
}

fn check_harmonic(m: u32) -> Result<()> {
    if m.is_multiple_of(2) {
        Err(Error::EvenHarmonic(m))
    } else {
        Ok(())
    }
}

fn check_coupling(g: f64) -> Result<()> {
    if g.is_finite() && g > 0.0 {
        Ok(())
    } else {
        Err(invalid("coupling_G", format!("must be positive and finite, got {g}")))
    }
}

fn check_finite(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, "must be finite"))
    }
}

/// A pair of S^z eigenvalues labelling one branch of the superposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpinSector {
    pub s1: i32,
    pub s2: i32,
}

impl SpinSector {
    pub fn new(s1: i32, s2: i32, n1: usize, n2: usize) -> Result<Self> {
        let sector = Self { s1, s2 };
        if sector.is_valid_for(n1, n2) {
            Ok(sector)
        } else {
            Err(invalid("sector", format!("({s1}, {s2}) is not on the ladders of N1={n1}, N2={n2}")))
        }
    }

    pub fn total(&self) -> i32 {
        self.s1 + self.s2
    }

    pub fn is_valid_for(&self, n1: usize, n2: usize) -> bool {
        on_ladder(self.s1, n1) && on_ladder(self.s2, n2)
    }
}

fn on_ladder(s: i32, n: usize) -> bool {
    let n = n as i64;
    let s = s as i64;
    s.abs() <= n && (s + n) % 2 == 0
}

/// The ladder of S^z eigenvalues `[−N, −N+2, …, N]`.
pub fn spin_levels(n: usize) -> Vec<i32> {
    (0..=n).map(|k| 2 * k as i32 - n as i32).collect()
}

/// All sectors in s1-major, s2-minor ascending order.
pub fn sectors(n1: usize, n2: usize) -> impl Iterator<Item = SpinSector> {
    let levels2 = spin_levels(n2);
    spin_levels(n1)
        .into_iter()
        .flat_map(move |s1| levels2.clone().into_iter().map(move |s2| SpinSector { s1, s2 }))
}

/// Distinct total spins `s1 + s2`, ascending.
pub fn total_spins(n1: usize, n2: usize) -> Vec<i32> {
    let mut totals: Vec<i32> = sectors(n1, n2).map(|s| s.total()).collect();
    totals.sort_unstable();
    totals.dedup();
    totals
}

/// Sector frequency Ω = Δ + G(s1 + s2), as an integer multiple of `G` when
/// the parameters are in exact-closure mode.
pub fn sector_frequency_multiple(params: &ProtocolParams, sector: SpinSector) -> Option<i64> {
    params
        .exact_closure
        .then(|| 2 * params.detuning_index + sector.total() as i64)
}

/// Sector frequency Ω = Δ + G(s1 + s2) (ħ = 1).
pub fn sector_frequency(params: &ProtocolParams, sector: SpinSector) -> f64 {
    match sector_frequency_multiple(params, sector) {
        Some(k) => params.coupling * k as f64,
        None => params.detuning + params.coupling * sector.total() as f64,
    }
}

/// A collective spin state written in the S^z basis; index `k` holds the
/// amplitude of `S^z = 2k − N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinState {
    atom_count: usize,
    amplitudes: Vec<Complex64>,
}

impl SpinState {
    pub fn new(atom_count: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != atom_count + 1 {
            return Err(invalid(
                "amplitudes",
                format!("expected {} entries for N = {atom_count}, got {}", atom_count + 1, amplitudes.len()),
            ));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(invalid("amplitudes", format!("squared norm {norm} differs from 1")));
        }
        Ok(Self { atom_count, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(atom_count: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(invalid("amplitudes", "cannot normalize a zero or non-finite vector"));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Self::new(atom_count, amplitudes)
    }

    pub fn atom_count(&self) -> usize {
        self.atom_count
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }
}

/// Spin coherent state pointing along polar angle `theta`, azimuth `phi`.
/// `theta = π/2, phi = 0` is the maximal S^x eigenstate.
pub fn coherent_spin_state(atom_count: usize, theta: f64, phi: f64) -> SpinState {
    let (sin_h, cos_h) = (theta / 2.0).sin_cos();
    let mut binom = 1.0_f64;
    let amplitudes: Vec<Complex64> = (0..=atom_count)
        .map(|k| {
            if k > 0 {
                binom *= (atom_count - k + 1) as f64 / k as f64;
            }
            let magnitude = binom.sqrt() * cos_h.powi((atom_count - k) as i32) * sin_h.powi(k as i32);
            Complex64::from_polar(magnitude, k as f64 * phi)
        })
        .collect();
    let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    SpinState {
        atom_count,
        amplitudes: amplitudes.into_iter().map(|a| a / norm).collect(),
    }
}
