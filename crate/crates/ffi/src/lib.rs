//! C ABI over the `geophase` library.
//!
//! Conventions:
//! - Every fallible function returns a [`GpStatus`]; results go through out
//!   pointers that are written only on success.
//! - Objects are opaque handles created by `gp_*_new`-style functions and
//!   released with the matching `gp_*_free`. Passing NULL to a free function
//!   is a no-op.
//! - Handles are immutable after creation and may be shared across threads.
//! - `gp_last_error_message` returns a per-thread description of the most
//!   recent failure on that thread.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use geophase::feasibility::{feasibility_report, CavityParams};
use geophase::model::coherent_spin_state;
use geophase::phase::{
    design_drive, geometric_phase_quadrature, phase_coefficients_closed, phase_coefficients_for, protocol_phases,
    CoefficientSource,
};
use geophase::state::{apply_phase_gate, log_negativity, reduced_density};
use geophase::trajectory::{closure_residual, integrate_trajectory};
use geophase::{DrivePulse, Error, PhaseTable, ProtocolParams, RemnantModel, SpinSector};
use num_complex::Complex64;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    NumericalFailure = 3,
    Panic = 4,
}

/// Taylor coefficients of the sector phase.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GpCoefficients {
    pub phi0: f64,
    pub phi1: f64,
    pub phi2: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GpEntanglement {
    pub log_negativity: f64,
    pub max_entanglement: f64,
    pub normalized: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GpFeasibility {
    pub delta_min: f64,
    pub g_eff: f64,
    pub gamma_eff: f64,
    pub alpha_sq_max: f64,
    pub kappa_eff: f64,
    pub gate_time_short: f64,
    pub gate_time_pulse: f64,
    /// 1 when the requested photon number is within the bound.
    pub feasible: i32,
}

/// Selects how phase coefficients are computed.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GpCoefficientSource {
    Closed = 0,
    Quadrature = 1,
}

/// Opaque pulse design: `F(t) = F0 sin(G m t)`, `Delta = 2 n G`, `T = 2 pi / G`.
pub struct GpProtocol {
    params: ProtocolParams,
    drive: DrivePulse,
}

/// Opaque per-sector phase table.
pub struct GpPhaseTable {
    table: PhaseTable,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = clean);
}

fn from_error(e: &Error) -> GpStatus {
    set_error(&e.to_string());
    if e.is_numerical() {
        GpStatus::NumericalFailure
    } else {
        GpStatus::InvalidArgument
    }
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), GpStatus>) -> GpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GpStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            GpStatus::Panic
        }
    }
}

fn lift<T>(r: geophase::Result<T>) -> Result<T, GpStatus> {
    r.map_err(|e| from_error(&e))
}

fn null_error(what: &str) -> GpStatus {
    set_error(&format!("null pointer: {what}"));
    GpStatus::NullPointer
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, GpStatus> {
    // SAFETY: caller promises `p` is NULL or a valid handle from this library.
    unsafe { p.as_ref() }.ok_or_else(|| null_error(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), GpStatus> {
    if out.is_null() {
        return Err(null_error(what));
    }
    // SAFETY: non-null and, per the API contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn sector(s1: i32, s2: i32) -> SpinSector {
    SpinSector { s1, s2 }
}

/// Message for the last failure on the calling thread. The pointer stays
/// valid until the next failing call on this thread. Never NULL.
#[no_mangle]
pub extern "C" fn gp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates a protocol handle. `f0` is the absolute drive amplitude.
///
/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn gp_protocol_new(coupling: f64, n: i64, m: u32, f0: f64, out: *mut *mut GpProtocol) -> GpStatus {
    guard(|| {
        let (params, drive) = lift(design_drive(coupling, n, m, f0))?;
        let handle = Box::into_raw(Box::new(GpProtocol { params, drive }));
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, handle, "out") }.inspect_err(|_| {
            // SAFETY: `handle` was just created by Box::into_raw and never shared.
            drop(unsafe { Box::from_raw(handle) });
        })
    })
}

/// # Safety
/// `protocol` must be NULL or a handle from `gp_protocol_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gp_protocol_free(protocol: *mut GpProtocol) {
    if !protocol.is_null() {
        // SAFETY: per contract, the handle came from Box::into_raw.
        drop(unsafe { Box::from_raw(protocol) });
    }
}

/// `|alpha_c(T)|` for sector `(s1, s2)`.
///
/// # Safety
/// `protocol` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gp_protocol_closure_residual(
    protocol: *const GpProtocol,
    s1: i32,
    s2: i32,
    steps: usize,
    out: *mut f64,
) -> GpStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let p = unsafe { deref(protocol, "protocol") }?;
        let traj = lift(integrate_trajectory(&p.drive, &p.params, sector(s1, s2), steps))?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, closure_residual(&traj), "out") }
    })
}

/// Geometric phase of sector `(s1, s2)` after one pulse.
///
/// # Safety
/// `protocol` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gp_protocol_sector_phase(
    protocol: *const GpProtocol,
    s1: i32,
    s2: i32,
    steps: usize,
    out: *mut f64,
) -> GpStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let p = unsafe { deref(protocol, "protocol") }?;
        let phi = lift(geometric_phase_quadrature(&p.drive, &p.params, sector(s1, s2), steps))?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, phi, "out") }
    })
}

/// Phase coefficients at the protocol's detuning. `steps` is ignored for
/// the closed form.
///
/// # Safety
/// `protocol` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gp_protocol_coefficients(
    protocol: *const GpProtocol,
    source: GpCoefficientSource,
    steps: usize,
    out: *mut GpCoefficients,
) -> GpStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let p = unsafe { deref(protocol, "protocol") }?;
        let c = match source {
            GpCoefficientSource::Closed => lift(phase_coefficients_closed(
                p.drive.amplitude_scale(),
                p.params.coupling(),
                p.params.harmonic(),
                p.params.detuning_index(),
            ))?,
            GpCoefficientSource::Quadrature => lift(phase_coefficients_for(&p.drive, &p.params, steps))?,
        };
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, GpCoefficients { phi0: c.phi0, phi1: c.phi1, phi2: c.phi2 }, "out") }
    })
}

fn into_table_handle(table: PhaseTable, out: *mut *mut GpPhaseTable) -> Result<(), GpStatus> {
    let handle = Box::into_raw(Box::new(GpPhaseTable { table }));
    // SAFETY: forwarded caller contract of the public wrappers.
    unsafe { write_out(out, handle, "out") }.inspect_err(|_| {
        // SAFETY: just created, never shared.
        drop(unsafe { Box::from_raw(handle) });
    })
}

/// Total two-stage phase table (closed-form coefficients).
///
/// # Safety
/// `protocol` must be a live handle; `out` valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gp_phase_table_total(
    protocol: *const GpProtocol,
    n1: usize,
    n2: usize,
    out: *mut *mut GpPhaseTable,
) -> GpStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let p = unsafe { deref(protocol, "protocol") }?;
        let phases = lift(protocol_phases(&p.drive, &p.params, n1, n2, 0, CoefficientSource::Closed))?;
        into_table_handle(phases.total, out)
    })
}

/// Pure entangling table `phi2 * s1 * s2`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn gp_phase_table_entangling(n1: usize, n2: usize, phi2: f64, out: *mut *mut GpPhaseTable) -> GpStatus {
    guard(|| {
        if !phi2.is_finite() {
            set_error("phi2 must be finite");
            return Err(GpStatus::InvalidArgument);
        }
        into_table_handle(PhaseTable::entangling((n1, n2), phi2), out)
    })
}

/// Phase of sector `(s1, s2)`.
///
/// # Safety
/// `table` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gp_phase_table_get(table: *const GpPhaseTable, s1: i32, s2: i32, out: *mut f64) -> GpStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let t = unsafe { deref(table, "table") }?;
        let Some(phi) = t.table.get(sector(s1, s2)) else {
            set_error(&format!("sector ({s1}, {s2}) is not in the table"));
            return Err(GpStatus::InvalidArgument);
        };
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, phi, "out") }
    })
}

/// Sector-independent part of the table.
///
/// # Safety
/// `table` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gp_phase_table_gauge(table: *const GpPhaseTable, out: *mut f64) -> GpStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let t = unsafe { deref(table, "table") }?;
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, t.table.gauge(), "out") }
    })
}

/// # Safety
/// `table` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gp_phase_table_free(table: *mut GpPhaseTable) {
    if !table.is_null() {
        // SAFETY: per contract, the handle came from Box::into_raw.
        drop(unsafe { Box::from_raw(table) });
    }
}

/// Logarithmic negativity of spin coherent states `(theta, phi)` after
/// `table`, with remnant `(delta_alpha, delta_theta)`.
///
/// # Safety
/// `table` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gp_log_negativity(
    table: *const GpPhaseTable,
    theta: f64,
    phi: f64,
    delta_alpha: f64,
    delta_theta: f64,
    out: *mut GpEntanglement,
) -> GpStatus {
    guard(|| {
        // SAFETY: forwarded caller contract.
        let t = unsafe { deref(table, "table") }?;
        if !(theta.is_finite() && phi.is_finite()) {
            set_error("spin state angles must be finite");
            return Err(GpStatus::InvalidArgument);
        }
        let (n1, n2) = t.table.dims();
        let psi1 = coherent_spin_state(n1, theta, phi);
        let psi2 = coherent_spin_state(n2, theta, phi);
        let remnant = lift(RemnantModel::new(Complex64::new(delta_alpha, 0.0), delta_theta))?;
        let joint = lift(apply_phase_gate(&psi1, &psi2, &t.table))?;
        let r = lift(log_negativity(&reduced_density(&joint, &remnant)))?;
        let value = GpEntanglement {
            log_negativity: r.log_negativity,
            max_entanglement: r.max_entanglement,
            normalized: r.normalized,
        };
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, value, "out") }
    })
}

/// Feasibility bounds; all rates in one frequency unit.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn gp_feasibility(
    g0: f64,
    kappa: f64,
    gamma: f64,
    atoms: u64,
    requested_alpha_sq: f64,
    out: *mut GpFeasibility,
) -> GpStatus {
    guard(|| {
        let cavity = lift(CavityParams::new(g0, kappa, gamma, atoms))?;
        let r = lift(feasibility_report(&cavity, requested_alpha_sq))?;
        let value = GpFeasibility {
            delta_min: r.delta_min,
            g_eff: r.g_eff,
            gamma_eff: r.gamma_eff,
            alpha_sq_max: r.alpha_sq_max,
            kappa_eff: r.kappa_eff,
            gate_time_short: r.gate_time_short,
            gate_time_pulse: r.gate_time_pulse,
            feasible: i32::from(r.feasible),
        };
        // SAFETY: forwarded caller contract.
        unsafe { write_out(out, value, "out") }
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn gp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
