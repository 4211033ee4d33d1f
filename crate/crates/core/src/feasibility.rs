//! Experimental constraints for a cavity QED implementation.
//!
//! All rates share one frequency unit (the CLI uses MHz, ħ = 1).

use std::f64::consts::TAU;
use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityParams {
    /// Single-atom coupling g₀.
    pub g0: f64,
    /// Cavity decay rate κ.
    pub kappa: f64,
    /// Spontaneous emission rate Γ.
    pub gamma: f64,
    pub atoms: u64,
}

impl CavityParams {
    pub fn new(g0: f64, kappa: f64, gamma: f64, atoms: u64) -> Result<Self> {
        for (name, x) in [("g0", g0), ("kappa", kappa), ("gamma", gamma)] {
            if !(x.is_finite() && x >= 0.0) {
                return Err(invalid(name, format!("must be a finite non-negative rate, got {x}")));
            }
        }
        if atoms == 0 {
            return Err(invalid("atoms", "need at least one atom"));
        }
        Ok(Self { g0, kappa, gamma, atoms })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecoherenceRates {
    /// `Γ N g₀² / Δ²`.
    pub gamma_eff: f64,
    /// `G = g₀² / Δ`.
    pub coupling: f64,
}

pub fn effective_decoherence(g0: f64, delta: f64, gamma: f64, atoms: u64) -> Result<DecoherenceRates> {
    if !(delta > 0.0) {
        return Err(Error::NonPositiveDetuning(delta));
    }
    let coupling = g0 * g0 / delta;
    Ok(DecoherenceRates { gamma_eff: gamma * atoms as f64 * g0 * g0 / (delta * delta), coupling })
}

/// `Δ ≥ Γ N`.
pub fn min_detuning(gamma: f64, atoms: u64) -> f64 {
    gamma * atoms as f64
}

/// `|α|² ≤ g₀² / (κ Γ N)`.
pub fn max_photon_number(g0: f64, kappa: f64, gamma: f64, atoms: u64) -> Result<f64> {
    let denominator = kappa * gamma * atoms as f64;
    if denominator == 0.0 {
        return Err(Error::ZeroDenominator("kappa * gamma * N"));
    }
    Ok(g0 * g0 / denominator)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeasibilityReport {
    pub cavity: CavityParams,
    pub delta_min: f64,
    /// Ac Stark coupling at `Δ = delta_min`.
    pub g_eff: f64,
    pub gamma_eff: f64,
    pub alpha_sq_max: f64,
    pub requested_alpha_sq: f64,
    pub feasible: bool,
    /// `κ |α|²` for the requested brightness.
    pub kappa_eff: f64,
    /// Gate time taken as `1/G`.
    pub gate_time_short: f64,
    /// Gate time of the full pulse, `2π/G`.
    pub gate_time_pulse: f64,
    /// `Γ_eff / G`: expected emission events per `1/G`.
    pub emission_per_short_gate: f64,
    /// `2π Γ_eff / G`: the same per full pulse, about 6× worse.
    pub emission_per_pulse: f64,
}

pub fn feasibility_report(cavity: &CavityParams, requested_alpha_sq: f64) -> Result<FeasibilityReport> {
    if !(requested_alpha_sq.is_finite() && requested_alpha_sq >= 0.0) {
        return Err(invalid("alpha_sq", "requested photon number must be finite and non-negative"));
    }
    let delta_min = min_detuning(cavity.gamma, cavity.atoms);
    let rates = effective_decoherence(cavity.g0, delta_min, cavity.gamma, cavity.atoms)?;
    let alpha_sq_max = max_photon_number(cavity.g0, cavity.kappa, cavity.gamma, cavity.atoms)?;
    if rates.coupling == 0.0 {
        return Err(Error::ZeroDenominator("coupling G = g0^2 / delta"));
    }
    let gate_time_short = 1.0 / rates.coupling;
    Ok(FeasibilityReport {
        cavity: *cavity,
        delta_min,
        g_eff: rates.coupling,
        gamma_eff: rates.gamma_eff,
        alpha_sq_max,
        requested_alpha_sq,
        feasible: alpha_sq_max > 0.0 && requested_alpha_sq <= alpha_sq_max,
        kappa_eff: cavity.kappa * requested_alpha_sq,
        gate_time_short,
        gate_time_pulse: TAU * gate_time_short,
        emission_per_short_gate: rates.gamma_eff * gate_time_short,
        emission_per_pulse: rates.gamma_eff * TAU * gate_time_short,
    })
}

impl FeasibilityReport {
    /// Aligned two-column table; `unit` labels frequencies (times are `1/unit`).
    pub fn to_table(&self, unit: &str) -> String {
        let inverse = format!("1/{unit}");
        let rows: [(&str, f64, &str); 14] = [
            ("g0", self.cavity.g0, unit),
            ("kappa", self.cavity.kappa, unit),
            ("Gamma", self.cavity.gamma, unit),
            ("N", self.cavity.atoms as f64, ""),
            ("Delta_min = Gamma N", self.delta_min, unit),
            ("G = g0^2/Delta_min", self.g_eff, unit),
            ("Gamma_eff", self.gamma_eff, unit),
            ("|alpha|^2 max", self.alpha_sq_max, ""),
            ("|alpha|^2 requested", self.requested_alpha_sq, ""),
            ("kappa_eff = kappa |alpha|^2", self.kappa_eff, unit),
            ("gate time 1/G", self.gate_time_short, &inverse),
            ("gate time 2 pi/G", self.gate_time_pulse, &inverse),
            ("Gamma_eff / G", self.emission_per_short_gate, ""),
            ("2 pi Gamma_eff / G", self.emission_per_pulse, ""),
        ];
        let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0);
        let mut out = String::new();
        for (label, value, unit) in rows {
            let _ = writeln!(out, "{label:<width$}  {value:>16.6}  {unit}");
        }
        let _ = writeln!(out, "{:<width$}  {:>16}", "feasible", self.feasible);
        out
    }
}
