//! C ABI for `risfas`.
//!
//! Scenarios are opaque handles created by `risfas_scenario_new_default` or
//! `risfas_scenario_from_toml` and released with `risfas_scenario_free`.
//! Every fallible function returns a [`RisfasStatus`]; on failure the message
//! is available from `risfas_last_error_message` on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use risfas::cli::config::parse_config;
use risfas::cli::sweep::point_seeds;
use risfas::numerics::{gauss_laguerre, marcum_q_half};
use risfas::secrecy::{self, PdfMode, SecrecyScenario, SopPath};
use risfas::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisfasStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Panic = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisfasSopPath {
    Glq = 0,
    Reference = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisfasPdfMode {
    Paper = 0,
    Derivative = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RisfasNode {
    Legitimate = 0,
    Eavesdropper = 1,
}

/// Opaque scenario handle.
pub struct RisfasScenario {
    inner: SecrecyScenario,
}

/// Value with its absolute error estimate.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RisfasEstimate {
    pub value: f64,
    pub error: f64,
    /// Non-zero when the value lies below the numerical floor.
    pub below_floor: i32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RisfasStatus {
    match e {
        Error::Config(_) | Error::Io(_) => RisfasStatus::Config,
        Error::InvalidParameter { .. }
        | Error::Domain { .. }
        | Error::DimensionMismatch { .. }
        | Error::InvalidCorrelation(_) => RisfasStatus::InvalidArgument,
        Error::NotPositiveDefinite | Error::NonConvergent(_) => RisfasStatus::Numerical,
    }
}

fn guard<F: FnOnce() -> Result<(), RisfasStatus>>(f: F) -> RisfasStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RisfasStatus::Ok
        }
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            RisfasStatus::Panic
        }
    }
}

fn fail(e: Error) -> RisfasStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null(what: &str) -> RisfasStatus {
    set_error(&format!("{what} is null"));
    RisfasStatus::NullPointer
}

fn build(text: &str) -> Result<SecrecyScenario, Error> {
    let cfg = parse_config(text)?;
    let seeds = point_seeds(&cfg);
    cfg.scenario(seeds[0].axis_value, seeds[0].mvn)
}

unsafe fn store(out: *mut *mut RisfasScenario, s: SecrecyScenario) {
    *out = Box::into_raw(Box::new(RisfasScenario { inner: s }));
}

/// Creates the reference scenario.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn risfas_scenario_new_default(out: *mut *mut RisfasScenario) -> RisfasStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let s = build("").map_err(fail)?;
        store(out, s);
        Ok(())
    })
}

/// Creates a scenario from a TOML configuration string. A sweep section, if
/// present, selects its first axis value.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn risfas_scenario_from_toml(
    toml: *const c_char,
    out: *mut *mut RisfasScenario,
) -> RisfasStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml).to_str().map_err(|_| {
            set_error("toml is not valid UTF-8");
            RisfasStatus::InvalidArgument
        })?;
        let s = build(text).map_err(fail)?;
        store(out, s);
        Ok(())
    })
}

/// Releases a scenario. Null is ignored.
///
/// # Safety
/// `s` must come from a `risfas_scenario_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn risfas_scenario_free(s: *mut RisfasScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of ports of the selected node.
///
/// # Safety
/// `s` must be a live handle or null (returns 0).
#[no_mangle]
pub unsafe extern "C" fn risfas_scenario_ports(s: *const RisfasScenario, node: RisfasNode) -> usize {
    match s.as_ref() {
        None => 0,
        Some(s) => match node {
            RisfasNode::Legitimate => s.inner.bob.ports(),
            RisfasNode::Eavesdropper => s.inner.eve.ports(),
        },
    }
}

/// Secrecy outage probability.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn risfas_sop(
    s: *const RisfasScenario,
    path: RisfasSopPath,
    out: *mut RisfasEstimate,
) -> RisfasStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let path = match path {
            RisfasSopPath::Glq => SopPath::Glq,
            RisfasSopPath::Reference => SopPath::Reference,
        };
        let r = secrecy::sop(&s.inner, path).map_err(fail)?;
        *out = RisfasEstimate {
            value: r.value,
            error: r.error,
            below_floor: r.below_floor as i32,
        };
        Ok(())
    })
}

/// CDF of the selected-port SNR of `node` at `gamma`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn risfas_snr_cdf(
    s: *const RisfasScenario,
    node: RisfasNode,
    gamma: f64,
    out: *mut RisfasEstimate,
) -> RisfasStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let est = match node {
            RisfasNode::Legitimate => secrecy::cdf_gamma_b(gamma, &s.inner),
            RisfasNode::Eavesdropper => secrecy::cdf_gamma_e(gamma, &s.inner),
        }
        .map_err(fail)?;
        *out = RisfasEstimate {
            value: est.value,
            error: est.error,
            below_floor: 0,
        };
        Ok(())
    })
}

/// Density of the selected-port SNR of `node` at `gamma`.
///
/// # Safety
/// `s` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn risfas_snr_pdf(
    s: *const RisfasScenario,
    node: RisfasNode,
    gamma: f64,
    mode: RisfasPdfMode,
    out: *mut f64,
) -> RisfasStatus {
    guard(|| {
        let s = s.as_ref().ok_or_else(|| null("scenario"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let mode = match mode {
            RisfasPdfMode::Paper => PdfMode::Paper,
            RisfasPdfMode::Derivative => PdfMode::Derivative,
        };
        *out = match node {
            RisfasNode::Legitimate => secrecy::pdf_gamma_b(gamma, &s.inner, mode),
            RisfasNode::Eavesdropper => secrecy::pdf_gamma_e(gamma, &s.inner, mode),
        }
        .map_err(fail)?;
        Ok(())
    })
}

/// Writes the `order` Gauss–Laguerre nodes and weights.
///
/// # Safety
/// `nodes` and `weights` must each hold at least `order` doubles.
#[no_mangle]
pub unsafe extern "C" fn risfas_gauss_laguerre(order: usize, nodes: *mut f64, weights: *mut f64) -> RisfasStatus {
    guard(|| {
        if nodes.is_null() || weights.is_null() {
            return Err(null("nodes/weights"));
        }
        let rule = gauss_laguerre(order).map_err(fail)?;
        std::slice::from_raw_parts_mut(nodes, order).copy_from_slice(rule.nodes());
        std::slice::from_raw_parts_mut(weights, order).copy_from_slice(rule.weights());
        Ok(())
    })
}

/// Marcum Q-function of order one half.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn risfas_marcum_q_half(a: f64, b: f64, out: *mut f64) -> RisfasStatus {
    guard(|| {
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = marcum_q_half(a, b).map_err(fail)?;
        Ok(())
    })
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn risfas_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, statically allocated.
#[no_mangle]
pub extern "C" fn risfas_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
