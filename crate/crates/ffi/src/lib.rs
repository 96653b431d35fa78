//! C ABI over `qfp`.
//!
//! Every function returns a [`QfpStatus`] and writes results through out-pointers.
//! Encodings are opaque handles released with [`qfp_encoding_free`]; strings returned by
//! the library are released with [`qfp_string_free`]. After a failure,
//! [`qfp_last_error`] describes it on the calling thread.
//!
//! Pointer arguments may be null (reported as [`QfpStatus::NullPointer`]); non-null
//! pointers must be valid for the access the function documents.

// Entry points null-check every pointer instead of being `unsafe fn`, as is usual for a C API.
#![allow(clippy::not_unsafe_ptr_arg_deref)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qfp::calib::{calibrate, parse_visibility_csv};
use qfp::classical::{best_success_shared_random, RogerClass};
use qfp::mc::{run_simulation, Adversary, SimConfig};
use qfp::protocol::{ProtocolKind, RogerStrategy};
use qfp::qstate::{overlap, search_encoding, tetrahedral_encoding, BlochState, Encoding};
use qfp::strategy::optimize_mixed;
use qfp::twophoton::{coincidence_probability, product_state, CoincidenceModel};
use qfp::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfpStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Parse = 3,
    Unsupported = 4,
    InvalidUtf8 = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfpProtocol {
    Unentangled = 0,
    Entangled = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QfpAdversary {
    Wcs = 0,
    Uniform = 1,
    /// Uses the `x`, `y` fields of [`QfpSimParams`].
    FixedPair = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QfpSimParams {
    pub protocol: QfpProtocol,
    pub trials: u64,
    pub seed: u64,
    pub dip_depth: f64,
    pub pi0: f64,
    pub pi1: f64,
    pub adversary: QfpAdversary,
    pub x: u32,
    pub y: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QfpCalibration {
    pub d: f64,
    pub v_off: f64,
    pub p_same_err: f64,
    pub p_diff_err: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QfpMixedStrategy {
    pub pi0: f64,
    pub pi1: f64,
    pub success: f64,
}

/// Opaque encoding handle.
pub struct QfpEncoding(Encoding);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: QfpStatus, msg: impl Into<String>) -> QfpStatus {
    set_last_error(msg.into());
    status
}

fn from_error(e: Error) -> QfpStatus {
    let status = match e {
        Error::Domain(_) => QfpStatus::Domain,
        Error::Parse { .. } => QfpStatus::Parse,
        Error::Unsupported(_) => QfpStatus::Unsupported,
    };
    fail(status, e.to_string())
}

/// Runs `f`, turning library errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), QfpStatus>) -> QfpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QfpStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(QfpStatus::Panic, "internal panic"),
    }
}

fn out<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, QfpStatus> {
    // SAFETY: callers pass either null or a valid, writable pointer.
    unsafe { p.as_mut() }.ok_or_else(|| fail(QfpStatus::NullPointer, format!("{name} is null")))
}

fn handle<'a>(h: *const QfpEncoding) -> Result<&'a Encoding, QfpStatus> {
    // SAFETY: non-null handles come from this library and are live until freed.
    unsafe { h.as_ref() }.map(|e| &e.0).ok_or_else(|| fail(QfpStatus::NullPointer, "encoding handle is null"))
}

fn c_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, QfpStatus> {
    if p.is_null() {
        return Err(fail(QfpStatus::NullPointer, format!("{name} is null")));
    }
    // SAFETY: non-null, and the caller guarantees NUL termination.
    unsafe { CStr::from_ptr(p) }.to_str().map_err(|e| fail(QfpStatus::InvalidUtf8, format!("{name}: {e}")))
}

fn state(theta: f64, phi: f64) -> Result<BlochState, QfpStatus> {
    BlochState::new(theta, phi).map_err(from_error)
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn qfp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must be null or a string obtained from this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qfp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}

/// The four tetrahedral states.
#[no_mangle]
pub extern "C" fn qfp_encoding_tetrahedral(out_handle: *mut *mut QfpEncoding) -> QfpStatus {
    guard(|| {
        *out(out_handle, "out_handle")? = Box::into_raw(Box::new(QfpEncoding(tetrahedral_encoding())));
        Ok(())
    })
}

/// Seeded search for `m` states with small maximum overlap.
#[no_mangle]
pub extern "C" fn qfp_encoding_search(
    m: u32,
    iterations: u32,
    seed: u64,
    out_handle: *mut *mut QfpEncoding,
) -> QfpStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let enc = search_encoding(m as usize, iterations as usize, seed).map_err(from_error)?;
        *slot = Box::into_raw(Box::new(QfpEncoding(enc)));
        Ok(())
    })
}

/// Releases an encoding. Null is ignored.
///
/// # Safety
/// `h` must be null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn qfp_encoding_free(h: *mut QfpEncoding) {
    if !h.is_null() {
        drop(unsafe { Box::from_raw(h) });
    }
}

#[no_mangle]
pub extern "C" fn qfp_encoding_m(h: *const QfpEncoding, out_m: *mut u32) -> QfpStatus {
    guard(|| {
        *out(out_m, "out_m")? = handle(h)?.m() as u32;
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qfp_encoding_delta_max(h: *const QfpEncoding, out_delta: *mut f64) -> QfpStatus {
    guard(|| {
        *out(out_delta, "out_delta")? = handle(h)?.delta_max();
        Ok(())
    })
}

/// Bloch angles of message `w`.
#[no_mangle]
pub extern "C" fn qfp_encoding_state(
    h: *const QfpEncoding,
    w: u32,
    out_theta: *mut f64,
    out_phi: *mut f64,
) -> QfpStatus {
    guard(|| {
        let enc = handle(h)?;
        let s = enc
            .state(w as usize)
            .ok_or_else(|| fail(QfpStatus::Domain, format!("message {w} outside 0..{}", enc.m())))?;
        *out(out_theta, "out_theta")? = s.theta();
        *out(out_phi, "out_phi")? = s.phi();
        Ok(())
    })
}

/// `|<a|b>|^2` for two states given by Bloch angles.
#[no_mangle]
pub extern "C" fn qfp_overlap(theta_a: f64, phi_a: f64, theta_b: f64, phi_b: f64, out_overlap: *mut f64) -> QfpStatus {
    guard(|| {
        let (a, b) = (state(theta_a, phi_a)?, state(theta_b, phi_b)?);
        *out(out_overlap, "out_overlap")? = overlap(&a, &b);
        Ok(())
    })
}

/// Coincidence probability at zero delay for one photon in each state.
#[no_mangle]
pub extern "C" fn qfp_coincidence_product(
    theta_a: f64,
    phi_a: f64,
    theta_b: f64,
    phi_b: f64,
    dip_depth: f64,
    out_probability: *mut f64,
) -> QfpStatus {
    guard(|| {
        let (a, b) = (state(theta_a, phi_a)?, state(theta_b, phi_b)?);
        let model = CoincidenceModel::with_dip_depth(dip_depth).map_err(from_error)?;
        *out(out_probability, "out_probability")? = coincidence_probability(&product_state(&a, &b), &model, 0.0);
        Ok(())
    })
}

#[no_mangle]
pub extern "C" fn qfp_optimize_mixed(
    p_same_err: f64,
    p_diff_err: f64,
    out_strategy: *mut QfpMixedStrategy,
) -> QfpStatus {
    guard(|| {
        let slot = out(out_strategy, "out_strategy")?;
        let s = optimize_mixed(p_same_err, p_diff_err).map_err(from_error)?;
        *slot = QfpMixedStrategy { pi0: s.pi0, pi1: s.pi1, success: s.success };
        Ok(())
    })
}

/// Calibrates from visibility-table CSV text (header `alice,0,1,...`).
#[no_mangle]
pub extern "C" fn qfp_calibrate_csv(csv: *const c_char, out_calibration: *mut QfpCalibration) -> QfpStatus {
    guard(|| {
        let text = c_str(csv, "csv")?;
        let slot = out(out_calibration, "out_calibration")?;
        let c = calibrate(&parse_visibility_csv(text).map_err(from_error)?);
        *slot = QfpCalibration { d: c.d, v_off: c.v_off, p_same_err: c.p_same_err, p_diff_err: c.p_diff_err };
        Ok(())
    })
}

/// Runs a simulation with the tetrahedral encoding and writes the report as JSON.
/// The string must be released with [`qfp_string_free`].
#[no_mangle]
pub extern "C" fn qfp_simulate_json(params: *const QfpSimParams, out_json: *mut *mut c_char) -> QfpStatus {
    guard(|| {
        // SAFETY: non-null pointers to params are valid for reads.
        let p = *unsafe { params.as_ref() }.ok_or_else(|| fail(QfpStatus::NullPointer, "params is null"))?;
        let slot = out(out_json, "out_json")?;
        let kind = match p.protocol {
            QfpProtocol::Unentangled => ProtocolKind::QuantumUnentangled,
            QfpProtocol::Entangled => ProtocolKind::QuantumEntangled,
        };
        let mut config = SimConfig::new(kind, p.trials, p.seed);
        config.model = CoincidenceModel::with_dip_depth(p.dip_depth).map_err(from_error)?;
        config.strategy = if p.pi0 == 0.0 && p.pi1 == 0.0 {
            RogerStrategy::Pure
        } else {
            RogerStrategy::mixed(p.pi0, p.pi1).map_err(from_error)?
        };
        config.adversary = match p.adversary {
            QfpAdversary::Wcs => Adversary::Wcs,
            QfpAdversary::Uniform => Adversary::Uniform,
            QfpAdversary::FixedPair => Adversary::FixedPair(p.x as usize, p.y as usize),
        };
        let json = run_simulation(&config).map_err(from_error)?.to_json();
        *slot = CString::new(json).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// Exact best classical one-bit success with `shared_bits` shared random bits, as a fraction.
#[no_mangle]
pub extern "C" fn qfp_classical_best_success(
    m: u32,
    shared_bits: u32,
    mixed_roger: bool,
    out_numer: *mut i64,
    out_denom: *mut i64,
) -> QfpStatus {
    guard(|| {
        let class = if mixed_roger { RogerClass::Mixed } else { RogerClass::Pure };
        let numer = out(out_numer, "out_numer")?;
        let denom = out(out_denom, "out_denom")?;
        let report = best_success_shared_random(m as usize, shared_bits, class).map_err(from_error)?;
        *numer = *report.best_success.numer();
        *denom = *report.best_success.denom();
        Ok(())
    })
}
