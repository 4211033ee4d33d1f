//! Entangling phases and the two-stage cancellation protocol.
//!
//! The sector phase after one closed pulse is
//! `Φ(T) = ½ Im ∫₀ᵀ dτ₁ ∫₀^{τ₁} dτ₂ F(τ₁)F(τ₂) e^{iΩτ_r}` with `τ_r = τ₁ − τ₂`.
//! Expanding `e^{iΩτ_r}` to second order in `G` gives the template
//! `φ₀ + φ₁(s1+s2) + (φ₂/2)(s1² + s2²) + φ₂ s1 s2`. A second pulse applied to
//! each spin separately at `−Δ` removes the `s_i²` terms.
//!
//! All double integrals use one running inner integral, so their cost is
//! linear in the step count. Kernels depending on `τ_r` are split into
//! products of functions of `τ₁` and `τ₂`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::drive::DrivePulse;
use crate::error::{invalid, Error, Result};
use crate::model::{sector_frequency, sectors, ProtocolParams, SpinSector};
use crate::quadrature::{check_steps, cumulative_simpson, simpson, uniform_grid};

/// Taylor coefficients of the sector phase in the total spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhaseCoefficients {
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
    /// Sign of the detuning the coefficients were evaluated at (`+1` for `Δ = 0`).
    pub detuning_sign: i8,
}

impl PhaseCoefficients {
    pub const ZERO: Self = Self { phi0: 0.0, phi1: 0.0, phi2: 0.0, detuning_sign: 1 };

    pub fn is_finite(&self) -> bool {
        self.phi0.is_finite() && self.phi1.is_finite() && self.phi2.is_finite()
    }
}

fn sign_of(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else {
        1
    }
}

/// Samples shared by the double-integral routines.
struct Grid {
    times: Vec<f64>,
    drive: Vec<f64>,
    h: f64,
}

impl Grid {
    fn new(drive: &DrivePulse, duration: f64, steps: usize) -> Result<Self> {
        check_steps(steps)?;
        drive.check_covers(duration)?;
        let times = uniform_grid(duration, steps);
        let values = times.iter().map(|&t| drive.value(t)).collect();
        Ok(Self { times, drive: values, h: duration / steps as f64 })
    }

    /// `∫ dτ₁ F(τ₁) e^{iωτ₁} ∫^{τ₁} dτ₂ F(τ₂) e^{−iωτ₂}` for each kernel power.
    /// Returns the integrals of `τ_r^p e^{iωτ_r}` for `p = 0, 1, 2`.
    fn moments(&self, omega: f64, order: usize) -> [Complex64; 3] {
        let inner_integrand = |power: i32| -> Vec<Complex64> {
            self.times
                .iter()
                .zip(&self.drive)
                .map(|(&t, &f)| Complex64::cis(-omega * t) * (f * t.powi(power)))
                .collect()
        };
        let i0 = cumulative_simpson(&inner_integrand(0), self.h);
        let (i1, i2) = if order >= 1 {
            let i1 = cumulative_simpson(&inner_integrand(1), self.h);
            let i2 = if order >= 2 { cumulative_simpson(&inner_integrand(2), self.h) } else { Vec::new() };
            (i1, i2)
        } else {
            (Vec::new(), Vec::new())
        };

        let outer = |kernel: &dyn Fn(usize, f64) -> Complex64| -> Complex64 {
            let values: Vec<Complex64> = self
                .times
                .iter()
                .zip(&self.drive)
                .enumerate()
                .map(|(k, (&t, &f))| Complex64::cis(omega * t) * f * kernel(k, t))
                .collect();
            simpson(&values, self.h)
        };

        let m0 = outer(&|k, _| i0[k]);
        let m1 = if order >= 1 { outer(&|k, t| i0[k] * t - i1[k]) } else { Complex64::default() };
        let m2 = if order >= 2 {
            outer(&|k, t| i0[k] * (t * t) - i1[k] * (2.0 * t) + i2[k])
        } else {
            Complex64::default()
        };
        [m0, m1, m2]
    }
}

/// Sector phase `Φ(T)` by iterated quadrature of the double integral.
pub fn geometric_phase_quadrature(
    drive: &DrivePulse,
    params: &ProtocolParams,
    sector: SpinSector,
    steps: usize,
) -> Result<f64> {
    let grid = Grid::new(drive, params.duration(), steps)?;
    let omega = sector_frequency(params, sector);
    Ok(0.5 * grid.moments(omega, 0)[0].im)
}

/// `φ₀, φ₁, φ₂` at detuning `detuning` by quadrature of their kernel integrals.
pub fn phase_coefficients_numeric(
    drive: &DrivePulse,
    coupling: f64,
    detuning: f64,
    duration: f64,
    steps: usize,
) -> Result<PhaseCoefficients> {
    let grid = Grid::new(drive, duration, steps)?;
    let [m0, m1, m2] = grid.moments(detuning, 2);
    Ok(PhaseCoefficients {
        phi0: 0.5 * m0.im,
        phi1: 0.5 * coupling * m1.re,
        phi2: -0.5 * coupling * coupling * m2.im,
        detuning_sign: sign_of(detuning),
    })
}

/// [`phase_coefficients_numeric`] at the detuning carried by `params`.
pub fn phase_coefficients_for(drive: &DrivePulse, params: &ProtocolParams, steps: usize) -> Result<PhaseCoefficients> {
    phase_coefficients_numeric(drive, params.coupling(), params.detuning(), params.duration(), steps)
}

/// Exact coefficients for `F(τ) = F₀ sin(Gmτ)`, `Δ = 2Gn`, `T = 2π/G`.
pub fn phase_coefficients_closed(f0: f64, coupling: f64, m: u32, n: i64) -> Result<PhaseCoefficients> {
    if m.is_multiple_of(2) {
        return Err(Error::EvenHarmonic(m));
    }
    if !(coupling > 0.0) {
        return Err(invalid("coupling_G", "must be positive"));
    }
    let m2 = (m as f64).powi(2);
    let n = n as f64;
    let d = m2 - 4.0 * n * n;
    let scale = PI * f0 * f0 / (coupling * coupling);
    Ok(PhaseCoefficients {
        phi0: -scale * n / d,
        phi1: -scale * (3.0 * m2 + 4.0 * n * n) / (2.0 * d * d),
        phi2: -2.0 * scale * n * (11.0 * m2 + 4.0 * n * n) / (d * d * d),
        detuning_sign: sign_of(n),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Stage1,
    Stage2Bec1,
    Stage2Bec2,
    /// Sum of both per-spin second-stage phases.
    Stage2,
    Total,
}

/// Phase per sector over the full `(N₁+1)(N₂+1)` sector grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseTable {
    dims: (usize, usize),
    stage: Stage,
    gauge: f64,
    entries: Vec<f64>,
    coefficients: Option<PhaseCoefficients>,
}

impl PhaseTable {
    pub fn from_fn(dims: (usize, usize), stage: Stage, gauge: f64, f: impl Fn(SpinSector) -> f64) -> Self {
        Self { dims, stage, gauge, entries: sectors(dims.0, dims.1).map(f).collect(), coefficients: None }
    }

    /// Pure entangling table `Φ = φ₂ s1 s2`.
    pub fn entangling(dims: (usize, usize), phi2: f64) -> Self {
        Self::from_fn(dims, Stage::Total, 0.0, |s| phi2 * (s.s1 as f64) * (s.s2 as f64))
    }

    pub fn zeros(dims: (usize, usize), stage: Stage) -> Self {
        Self::from_fn(dims, stage, 0.0, |_| 0.0)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    /// Sector-independent part of the table.
    pub fn gauge(&self) -> f64 {
        self.gauge
    }

    pub fn coefficients(&self) -> Option<PhaseCoefficients> {
        self.coefficients
    }

    /// Entries in s1-major ascending order.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn index_of(&self, sector: SpinSector) -> Option<usize> {
        sector
            .is_valid_for(self.dims.0, self.dims.1)
            .then(|| {
                let i1 = ((sector.s1 + self.dims.0 as i32) / 2) as usize;
                let i2 = ((sector.s2 + self.dims.1 as i32) / 2) as usize;
                i1 * (self.dims.1 + 1) + i2
            })
    }

    pub fn get(&self, sector: SpinSector) -> Option<f64> {
        self.index_of(sector).map(|i| self.entries[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (SpinSector, f64)> + '_ {
        sectors(self.dims.0, self.dims.1).zip(self.entries.iter().copied())
    }

    /// Adds a sector-independent constant (changes only the global phase).
    pub fn shifted(&self, constant: f64) -> Self {
        Self {
            gauge: self.gauge + constant,
            entries: self.entries.iter().map(|e| e + constant).collect(),
            ..self.clone()
        }
    }
}

impl Serialize for PhaseTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Entry {
            s1: i32,
            s2: i32,
            phi: f64,
        }
        let entries: Vec<Entry> = self.iter().map(|(s, phi)| Entry { s1: s.s1, s2: s.s2, phi }).collect();
        let mut st = serializer.serialize_struct("PhaseTable", 4)?;
        st.serialize_field("dims", &[self.dims.0, self.dims.1])?;
        st.serialize_field("stage", &self.stage)?;
        st.serialize_field("gauge", &self.gauge)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

fn ensure_finite(coeffs: &PhaseCoefficients) -> Result<()> {
    if coeffs.is_finite() {
        Ok(())
    } else {
        Err(invalid("coefficients", "phase coefficients must be finite"))
    }
}

/// First stage: both spins share one pulse.
pub fn stage1_phase_table(coeffs: &PhaseCoefficients, n1: usize, n2: usize) -> Result<PhaseTable> {
    ensure_finite(coeffs)?;
    let c = *coeffs;
    let mut table = PhaseTable::from_fn((n1, n2), Stage::Stage1, c.phi0, |s| {
        let (a, b) = (s.s1 as f64, s.s2 as f64);
        c.phi0 + c.phi1 * (a + b) + 0.5 * c.phi2 * (a * a + b * b) + c.phi2 * a * b
    });
    table.coefficients = Some(c);
    Ok(table)
}

/// Phase `φ₀ + φ₁ s + (φ₂/2) s²` picked up by one spin driven alone.
fn single_spin_phase(c: &PhaseCoefficients, s: i32) -> f64 {
    let s = s as f64;
    c.phi0 + c.phi1 * s + 0.5 * c.phi2 * s * s
}

/// Second stage for one spin (`bec` is 1 or 2), laid out over the joint grid.
pub fn stage2_single_table(coeffs_at_minus_delta: &PhaseCoefficients, bec: u8, n1: usize, n2: usize) -> Result<PhaseTable> {
    ensure_finite(coeffs_at_minus_delta)?;
    let c = *coeffs_at_minus_delta;
    let (stage, pick): (Stage, fn(SpinSector) -> i32) = match bec {
        1 => (Stage::Stage2Bec1, |s| s.s1),
        2 => (Stage::Stage2Bec2, |s| s.s2),
        _ => return Err(invalid("bec", "must be 1 or 2")),
    };
    let mut table = PhaseTable::from_fn((n1, n2), stage, c.phi0, |s| single_spin_phase(&c, pick(s)));
    table.coefficients = Some(c);
    Ok(table)
}

/// Second stage: each spin driven separately at `Δ′ = −Δ`; per-sector sum `Φ′₁ + Φ′₂`.
pub fn stage2_phase_table(coeffs_at_minus_delta: &PhaseCoefficients, n1: usize, n2: usize) -> Result<PhaseTable> {
    ensure_finite(coeffs_at_minus_delta)?;
    let c = *coeffs_at_minus_delta;
    let mut table = PhaseTable::from_fn((n1, n2), Stage::Stage2, 2.0 * c.phi0, |s| {
        single_spin_phase(&c, s.s1) + single_spin_phase(&c, s.s2)
    });
    table.coefficients = Some(c);
    Ok(table)
}

/// Tolerance on the spread of `Φ_tot − 2φ₁(s1+s2) − φ₂ s1 s2`.
pub const CANCELLATION_TOL: f64 = 1e-10;

/// Sums both stages and checks that no `s_i²` dependence survives.
pub fn total_phase_table(stage1: &PhaseTable, stage2: &PhaseTable) -> Result<PhaseTable> {
    if stage1.dims != stage2.dims {
        return Err(Error::DimensionMismatch { expected: stage1.dims, got: stage2.dims });
    }
    let c1 = stage1
        .coefficients
        .ok_or_else(|| invalid("stage1", "table carries no phase coefficients"))?;
    let entries: Vec<f64> = stage1.entries.iter().zip(&stage2.entries).map(|(a, b)| a + b).collect();

    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut scale = 1.0_f64;
    for (s, &phi) in sectors(stage1.dims.0, stage1.dims.1).zip(&entries) {
        let residual = phi - 2.0 * c1.phi1 * s.total() as f64 - c1.phi2 * (s.s1 as f64) * (s.s2 as f64);
        lo = lo.min(residual);
        hi = hi.max(residual);
        scale = scale.max(phi.abs());
    }
    let spread = hi - lo;
    let tolerance = CANCELLATION_TOL * scale;
    if !(spread <= tolerance) {
        return Err(Error::CancellationViolation { spread, tolerance });
    }
    Ok(PhaseTable {
        dims: stage1.dims,
        stage: Stage::Total,
        gauge: stage1.gauge + stage2.gauge,
        entries,
        coefficients: Some(c1),
    })
}

/// Protocol parameters and pulse that close every sector trajectory:
/// `Δ = 2Gn`, `F(τ) = F₀ sin(Gmτ)`, `T = 2π/G`.
pub fn design_drive(coupling: f64, n: i64, m: u32, f0: f64) -> Result<(ProtocolParams, DrivePulse)> {
    let params = ProtocolParams::exact(coupling, n, m, f0)?;
    let drive = DrivePulse::sinusoidal(f0, m, coupling)?;
    Ok((params, drive))
}

/// Where stage coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientSource {
    Closed,
    Quadrature,
}

/// Stage tables and the coefficients behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolPhases {
    pub forward: PhaseCoefficients,
    pub reversed: PhaseCoefficients,
    pub stage1: PhaseTable,
    pub stage2: PhaseTable,
    pub total: PhaseTable,
}

/// Runs both protocol stages. `Closed` requires a sinusoidal drive in
/// exact-closure mode.
pub fn protocol_phases(
    drive: &DrivePulse,
    params: &ProtocolParams,
    n1: usize,
    n2: usize,
    steps: usize,
    source: CoefficientSource,
) -> Result<ProtocolPhases> {
    let reversed_params = params.reversed_detuning();
    let (forward, reversed) = match source {
        CoefficientSource::Quadrature => (
            phase_coefficients_for(drive, params, steps)?,
            phase_coefficients_for(drive, &reversed_params, steps)?,
        ),
        CoefficientSource::Closed => {
            if !(matches!(drive, DrivePulse::Sinusoidal { .. }) && params.is_exact_closure()) {
                return Err(invalid("drive", "closed forms need a sinusoidal drive with Δ = 2Gn and T = 2π/G"));
            }
            let (g, m, n, f0) = (params.coupling(), params.harmonic(), params.detuning_index(), drive.amplitude_scale());
            (phase_coefficients_closed(f0, g, m, n)?, phase_coefficients_closed(f0, g, m, -n)?)
        }
    };
    let stage1 = stage1_phase_table(&forward, n1, n2)?;
    let stage2 = stage2_phase_table(&reversed, n1, n2)?;
    let total = total_phase_table(&stage1, &stage2)?;
    Ok(ProtocolPhases { forward, reversed, stage1, stage2, total })
}

/// Spread over sectors of `Φ_tot − 2φ₁(s1+s2) − φ₂ s1 s2`; zero when the
/// squeezing terms cancel.
pub fn squeezing_residual_spread(total: &PhaseTable, forward: &PhaseCoefficients) -> f64 {
    let (lo, hi) = total.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (s, phi)| {
        let r = phi - 2.0 * forward.phi1 * s.total() as f64 - forward.phi2 * (s.s1 as f64) * (s.s2 as f64);
        (lo.min(r), hi.max(r))
    });
    if lo.is_finite() { hi - lo } else { 0.0 }
}

/// Largest gap between the exact sector phase and the second-order template.
pub fn taylor_truncation_residual(
    drive: &DrivePulse,
    params: &ProtocolParams,
    coeffs: &PhaseCoefficients,
    n1: usize,
    n2: usize,
    steps: usize,
) -> Result<f64> {
    let template = stage1_phase_table(coeffs, n1, n2)?;
    let mut worst = 0.0_f64;
    for (sector, approx) in template.iter() {
        let exact = geometric_phase_quadrature(drive, params, sector, steps)?;
        worst = worst.max((exact - approx).abs());
    }
    Ok(worst)
}
