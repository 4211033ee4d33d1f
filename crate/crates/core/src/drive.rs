//! Displacement drive `F(t)` applied to the cavity mode.

use serde::Serialize;

use crate::error::{invalid, Error, Result};

const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DrivePulse {
    /// `F(t) = F₀ sin(G m t)`, stored by parameters only.
    Sinusoidal { amplitude: f64, harmonic: u32, base_frequency: f64 },
    /// Uniformly spaced samples, linearly interpolated.
    Tabulated { start: f64, spacing: f64, values: Vec<f64> },
}

impl DrivePulse {
    pub fn sinusoidal(amplitude: f64, harmonic: u32, base_frequency: f64) -> Result<Self> {
        if harmonic.is_multiple_of(2) {
            return Err(Error::EvenHarmonic(harmonic));
        }
        Self::sinusoidal_unchecked(amplitude, harmonic, base_frequency)
    }

    /// Accepts even harmonics; used to build closure-violating fixtures.
    pub fn sinusoidal_unchecked(amplitude: f64, harmonic: u32, base_frequency: f64) -> Result<Self> {
        if !amplitude.is_finite() {
            return Err(invalid("drive_amp_F0", "must be finite"));
        }
        if !(base_frequency.is_finite() && base_frequency > 0.0) {
            return Err(invalid("coupling_G", "must be positive"));
        }
        Ok(Self::Sinusoidal { amplitude, harmonic, base_frequency })
    }

    /// Builds a tabulated drive from `(time, value)` pairs on a uniform grid.
    pub fn tabulated(samples: &[(f64, f64)]) -> Result<Self> {
        if samples.len() < 2 {
            return Err(invalid("samples", "need at least two samples"));
        }
        let start = samples[0].0;
        let end = samples[samples.len() - 1].0;
        let spacing = (end - start) / (samples.len() - 1) as f64;
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(invalid("samples", "times must increase"));
        }
        let span = end - start;
        for (index, &(t, value)) in samples.iter().enumerate() {
            let deviation = (t - (start + index as f64 * spacing)).abs();
            if deviation > GRID_TOL * span {
                return Err(Error::NonUniformGrid { index, deviation });
            }
            if !value.is_finite() {
                return Err(invalid("samples", format!("non-finite value at index {index}")));
            }
        }
        Ok(Self::Tabulated { start, spacing, values: samples.iter().map(|s| s.1).collect() })
    }

    /// Samples `f` on `steps + 1` uniform points over `[0, duration]`.
    pub fn tabulate(duration: f64, steps: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let samples: Vec<(f64, f64)> = crate::quadrature::uniform_grid(duration, steps)
            .into_iter()
            .map(|t| (t, f(t)))
            .collect();
        Self::tabulated(&samples)
    }

    pub fn value(&self, t: f64) -> f64 {
        match self {
            Self::Sinusoidal { amplitude, harmonic, base_frequency } => {
                amplitude * (base_frequency * *harmonic as f64 * t).sin()
            }
            Self::Tabulated { start, spacing, values } => {
                let x = ((t - start) / spacing).max(0.0);
                let last = values.len() - 1;
                let i = (x.floor() as usize).min(last - 1);
                let frac = (x - i as f64).min(1.0);
                values[i] * (1.0 - frac) + values[i + 1] * frac
            }
        }
    }

    /// Characteristic drive strength: `F₀`, or the largest tabulated magnitude.
    pub fn amplitude_scale(&self) -> f64 {
        match self {
            Self::Sinusoidal { amplitude, .. } => amplitude.abs(),
            Self::Tabulated { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    pub fn is_tabulated(&self) -> bool {
        matches!(self, Self::Tabulated { .. })
    }

    /// Checks that the drive is defined on `[0, duration]`.
    pub fn check_covers(&self, duration: f64) -> Result<()> {
        if let Self::Tabulated { start, spacing, values } = self {
            let end = start + spacing * (values.len() - 1) as f64;
            let slack = GRID_TOL * (end - start).abs();
            if *start > slack || end < duration - slack {
                return Err(Error::DriveCoverage { start: *start, end, required: duration });
            }
        }
        Ok(())
    }
}
