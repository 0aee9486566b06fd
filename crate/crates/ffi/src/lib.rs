//! C interface to `pmbox`.
//!
//! Objects cross the boundary as opaque handles created by `*_builtin` /
//! `*_from_json` constructors and released with the matching `*_free`.
//! Every fallible call returns a [`PmboxStatus`]; on failure the message is
//! available from [`pmbox_last_error_message`] on the same thread.
//! Strings returned through `char **` belong to the caller and are released
//! with [`pmbox_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pmbox::classical;
use pmbox::infobound;
use pmbox::quantum::{self, NoiseKind, Protocol};
use pmbox::scenario::{builtin_inequality, Inequality, Scenario};
use pmbox::seesaw::{self, SeesawConfig};
use pmbox::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmboxStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// Malformed or inconsistent input (names, JSON, shapes, values).
    InvalidInput = 2,
    /// The request exceeds a size guard.
    GuardExceeded = 3,
    /// The protocol does not violate the inequality.
    NoViolation = 4,
    Io = 5,
    /// A Rust panic was caught at the boundary.
    Internal = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmboxNoise {
    Depolarizing = 0,
    Dephasing = 1,
}

/// See-saw settings; start from [`pmbox_seesaw_default_options`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PmboxSeesawOptions {
    pub dim_a: usize,
    pub dim_b: usize,
    pub restarts: usize,
    pub max_sweeps: usize,
    pub tol: f64,
    pub seed: u64,
    /// Nonzero for qubit messages.
    pub quantum_message: i32,
    /// 0 uses `PMBOX_THREADS` or all cores.
    pub threads: usize,
}

pub struct PmboxInequality(Inequality);

pub struct PmboxProtocol(Protocol);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure {
    status: PmboxStatus,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::GuardExceeded(_) => PmboxStatus::GuardExceeded,
            Error::NoViolation(_) => PmboxStatus::NoViolation,
            Error::Io(_) => PmboxStatus::Io,
            _ => PmboxStatus::InvalidInput,
        };
        Failure { status, message: e.to_string() }
    }
}

fn null(what: &str) -> Failure {
    Failure { status: PmboxStatus::NullArgument, message: format!("`{what}` is null") }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = c);
}

fn run(f: impl FnOnce() -> Result<(), Failure>) -> PmboxStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PmboxStatus::Ok,
        Ok(Err(fail)) => {
            set_last_error(&fail.message);
            fail.status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal error: {msg}"));
            PmboxStatus::Internal
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure {
        status: PmboxStatus::InvalidInput,
        message: format!("`{what}` is not UTF-8"),
    })
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message of the last failed call on this thread; empty if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pmbox_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn pmbox_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must be null or a string returned by this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn pmbox_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_inequality_builtin(name: *const c_char, out: *mut *mut PmboxInequality) -> PmboxStatus {
    run(|| {
        let (_, ineq) = builtin_inequality(text(name, "name")?)?;
        put(out, Box::into_raw(Box::new(PmboxInequality(ineq))), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_inequality_from_json(json: *const c_char, out: *mut *mut PmboxInequality) -> PmboxStatus {
    run(|| {
        let ineq = Inequality::from_json(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(PmboxInequality(ineq))), "out")
    })
}

/// # Safety
/// `ineq` must be a live handle; `out` receives a string for [`pmbox_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pmbox_inequality_to_json(ineq: *const PmboxInequality, out: *mut *mut c_char) -> PmboxStatus {
    run(|| {
        let i = handle(ineq, "ineq")?;
        put(out, owned_string(i.0.to_json()), "out")
    })
}

/// # Safety
/// `ineq` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn pmbox_inequality_free(ineq: *mut PmboxInequality) {
    if !ineq.is_null() {
        drop(Box::from_raw(ineq));
    }
}

/// Exact classical bound as a reduced fraction.
///
/// # Safety
/// `ineq` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_classical_bound(
    ineq: *const PmboxInequality,
    numerator: *mut i64,
    denominator: *mut i64,
) -> PmboxStatus {
    run(|| {
        let i = &handle(ineq, "ineq")?.0;
        let b = classical::classical_bound(i, &i.scenario)?;
        put(numerator, *b.numer(), "numerator")?;
        put(denominator, *b.denom(), "denominator")
    })
}

/// Facet certificate. `is_facet` is set to 0 or 1.
///
/// # Safety
/// `ineq` must be a live handle and the outputs writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_verify_facet(
    ineq: *const PmboxInequality,
    is_facet: *mut i32,
    saturating_count: *mut usize,
) -> PmboxStatus {
    run(|| {
        let i = &handle(ineq, "ineq")?.0;
        let r = classical::verify_facet(i, &i.scenario)?;
        put(is_facet, r.is_facet as i32, "is_facet")?;
        put(saturating_count, r.saturating_count, "saturating_count")
    })
}

/// Number of distinct vertices of the classical polytope.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_vertex_count(d: usize, n_x: usize, n_b: usize, out: *mut usize) -> PmboxStatus {
    run(|| {
        let s = Scenario::new(d, n_x, n_b)?;
        put(out, classical::enumerate_vertices(&s).vertices.len(), "out")
    })
}

/// Facet enumeration; writes the class list as JSON.
///
/// # Safety
/// `out` must be writable; the string is released with [`pmbox_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pmbox_enumerate_facets(d: usize, n_x: usize, n_b: usize, out: *mut *mut c_char) -> PmboxStatus {
    run(|| {
        let s = Scenario::new(d, n_x, n_b)?;
        let e = classical::enumerate_facets(&s)?;
        put(out, owned_string(e.to_json()), "out")
    })
}

/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_protocol_builtin(name: *const c_char, out: *mut *mut PmboxProtocol) -> PmboxStatus {
    run(|| {
        let p = quantum::builtin_protocol(text(name, "name")?)?;
        put(out, Box::into_raw(Box::new(PmboxProtocol(p))), "out")
    })
}

/// # Safety
/// `json` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_protocol_from_json(json: *const c_char, out: *mut *mut PmboxProtocol) -> PmboxStatus {
    run(|| {
        let p = Protocol::from_json(text(json, "json")?)?;
        put(out, Box::into_raw(Box::new(PmboxProtocol(p))), "out")
    })
}

/// # Safety
/// `p` must be a live handle; `out` receives a string for [`pmbox_string_free`].
#[no_mangle]
pub unsafe extern "C" fn pmbox_protocol_to_json(p: *const PmboxProtocol, out: *mut *mut c_char) -> PmboxStatus {
    run(|| {
        let p = handle(p, "protocol")?;
        put(out, owned_string(p.0.to_json()), "out")
    })
}

/// # Safety
/// `p` must be null or a handle from this library, freed at most once.
#[no_mangle]
pub unsafe extern "C" fn pmbox_protocol_free(p: *mut PmboxProtocol) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Value of the inequality on the protocol's behavior.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_protocol_score(
    p: *const PmboxProtocol,
    ineq: *const PmboxInequality,
    out: *mut f64,
) -> PmboxStatus {
    run(|| {
        let s = handle(p, "protocol")?.0.score(&handle(ineq, "ineq")?.0)?;
        put(out, s, "out")
    })
}

/// Smallest visibility at which the protocol still violates the inequality.
///
/// # Safety
/// Handles must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_noise_threshold(
    p: *const PmboxProtocol,
    ineq: *const PmboxInequality,
    kind: PmboxNoise,
    out: *mut f64,
) -> PmboxStatus {
    run(|| {
        let kind = match kind {
            PmboxNoise::Depolarizing => NoiseKind::Depolarizing,
            PmboxNoise::Dephasing => NoiseKind::Dephasing,
        };
        let t = quantum::noise_threshold(&handle(p, "protocol")?.0, &handle(ineq, "ineq")?.0, kind)?;
        put(out, t.visibility, "out")
    })
}

#[no_mangle]
pub extern "C" fn pmbox_seesaw_default_options() -> PmboxSeesawOptions {
    let c = SeesawConfig::default();
    PmboxSeesawOptions {
        dim_a: c.dim_a,
        dim_b: c.dim_b,
        restarts: c.restarts,
        max_sweeps: c.max_sweeps,
        tol: c.tol,
        seed: c.seed,
        quantum_message: 0,
        threads: 0,
    }
}

/// See-saw search. `protocol_out` may be null when only the value is wanted.
///
/// # Safety
/// `ineq` must be a live handle, `opts` readable and `best_value` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_seesaw(
    ineq: *const PmboxInequality,
    opts: *const PmboxSeesawOptions,
    best_value: *mut f64,
    protocol_out: *mut *mut PmboxProtocol,
) -> PmboxStatus {
    run(|| {
        let i = &handle(ineq, "ineq")?.0;
        let o = *handle(opts, "opts")?;
        let cfg = SeesawConfig {
            dim_a: o.dim_a,
            dim_b: o.dim_b,
            restarts: o.restarts,
            max_sweeps: o.max_sweeps,
            tol: o.tol,
            seed: o.seed,
            threads: (o.threads > 0).then_some(o.threads),
            ..SeesawConfig::default()
        };
        let res = if o.quantum_message != 0 {
            seesaw::qc::seesaw_qc(i, &cfg)?
        } else {
            seesaw::seesaw_cc(i, &cfg)?
        };
        put(best_value, res.best_value, "best_value")?;
        if !protocol_out.is_null() {
            protocol_out.write(Box::into_raw(Box::new(PmboxProtocol(res.best_protocol))));
        }
        Ok(())
    })
}

/// One-bit bound of the facet family, `n >= 3`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pmbox_info_bound(n: usize, out: *mut f64) -> PmboxStatus {
    run(|| put(out, infobound::info_bound_value(n)?, "out"))
}
