//! C ABI for `bvstar`.
//!
//! Objects cross the boundary as opaque handles created by a constructor
//! and released by the matching `*_free`. Every fallible call returns a
//! [`BvsStatus`]; on failure the message is available from
//! [`bvs_last_error_message`] on the same thread. Strings returned by the
//! library are released with [`bvs_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bvstar::bvcalc::PiecewiseBV;
use bvstar::claw::{riemann_solve, FluxModel, RiemannSolution, WaveKind, WaveSpeed};
use bvstar::cli::{self, DecomposeConfig, ScenarioConfig};
use bvstar::measures::Window;
use bvstar::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Config = 4,
    Vacuum = 5,
    Inadmissible = 6,
    NoConvergence = 7,
    OutOfRange = 8,
    CertificationFailed = 9,
    Internal = 10,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvsFlux {
    Burgers = 0,
    /// `p1` is the advection speed.
    LinearAdvection = 1,
    /// `p1 = k`, `p2 = gamma`.
    PSystem = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BvsWaveKind {
    Shock = 0,
    Rarefaction = 1,
    Contact = 2,
}

/// A wave of a Riemann solution. For jumps `speed_lo == speed_hi`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BvsWaveInfo {
    pub kind: BvsWaveKind,
    pub family: usize,
    pub speed_lo: f64,
    pub speed_hi: f64,
}

/// Opaque Riemann solution.
pub struct BvsRiemann {
    sol: RiemannSolution,
}

/// Opaque piecewise-polynomial BV function.
pub struct BvsBV {
    f: PiecewiseBV,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> BvsStatus {
    match e {
        Error::VacuumFormation => BvsStatus::Vacuum,
        Error::InadmissibleState(_) => BvsStatus::Inadmissible,
        Error::NoConvergence(_) | Error::QuadratureNonConvergent { .. } => BvsStatus::NoConvergence,
        Error::TimeOutOfRange { .. } | Error::WaveOutsideWindow { .. } | Error::SupportOutsideWindow { .. } => {
            BvsStatus::OutOfRange
        }
        Error::Config(_) | Error::InvalidSpec(_) => BvsStatus::Config,
        _ => BvsStatus::InvalidArgument,
    }
}

fn fail(status: BvsStatus, msg: &str) -> BvsStatus {
    set_error(msg);
    status
}

fn from_error(e: Error) -> BvsStatus {
    fail(status_of(&e), &e.to_string())
}

/// Runs `f`, turning panics into `Internal`.
fn guarded<F: FnOnce() -> BvsStatus>(f: F) -> BvsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(BvsStatus::Internal, "internal panic"),
    }
}

unsafe fn slice<'a>(p: *const f64, n: usize) -> Option<&'a [f64]> {
    if n == 0 {
        Some(&[])
    } else if p.is_null() {
        None
    } else {
        Some(std::slice::from_raw_parts(p, n))
    }
}

unsafe fn string<'a>(p: *const c_char) -> Result<&'a str, BvsStatus> {
    if p.is_null() {
        return Err(fail(BvsStatus::NullPointer, "null string"));
    }
    CStr::from_ptr(p).to_str().map_err(|_| fail(BvsStatus::InvalidUtf8, "string is not UTF-8"))
}

fn flux_model(model: BvsFlux, p1: f64, p2: f64) -> FluxModel {
    match model {
        BvsFlux::Burgers => FluxModel::Burgers,
        BvsFlux::LinearAdvection => FluxModel::LinearAdvection { a: p1 },
        BvsFlux::PSystem => FluxModel::PSystem { k: p1, gamma: p2 },
    }
}

/// Message of the last failure on this thread, or an empty string. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn bvs_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn bvs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bvs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Solves the Riemann problem with `n`-component states.
///
/// # Safety
/// `left` and `right` must point to `n` readable doubles; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn bvs_riemann_solve(
    model: BvsFlux,
    p1: f64,
    p2: f64,
    left: *const f64,
    right: *const f64,
    n: usize,
    out: *mut *mut BvsRiemann,
) -> BvsStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BvsStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let (Some(ul), Some(ur)) = (slice(left, n), slice(right, n)) else {
            return fail(BvsStatus::NullPointer, "null state");
        };
        let flux = flux_model(model, p1, p2);
        if let Err(e) = flux.validate() {
            return from_error(e);
        }
        match riemann_solve(&flux, ul, ur) {
            Ok(sol) => {
                *out = Box::into_raw(Box::new(BvsRiemann { sol }));
                BvsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bvs_riemann_free(h: *mut BvsRiemann) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of state components, 0 for a null handle.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bvs_riemann_dim(h: *const BvsRiemann) -> usize {
    h.as_ref().map_or(0, |h| h.sol.dim())
}

/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bvs_riemann_wave_count(h: *const BvsRiemann) -> usize {
    h.as_ref().map_or(0, |h| h.sol.waves.len())
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bvs_riemann_wave(h: *const BvsRiemann, index: usize, out: *mut BvsWaveInfo) -> BvsStatus {
    let (Some(h), false) = (h.as_ref(), out.is_null()) else {
        return fail(BvsStatus::NullPointer, "null handle or output");
    };
    let Some(w) = h.sol.waves.get(index) else {
        return fail(BvsStatus::OutOfRange, "wave index out of range");
    };
    let (speed_lo, speed_hi) = match w.speed {
        WaveSpeed::Jump(s) => (s, s),
        WaveSpeed::Fan { lo, hi } => (lo, hi),
    };
    let kind = match w.kind {
        WaveKind::Shock => BvsWaveKind::Shock,
        WaveKind::Rarefaction => BvsWaveKind::Rarefaction,
        WaveKind::Contact => BvsWaveKind::Contact,
    };
    *out = BvsWaveInfo { kind, family: w.family, speed_lo, speed_hi };
    BvsStatus::Ok
}

/// Writes `u(x, t)` into `out[0..n]`, `n` being the state dimension.
///
/// # Safety
/// `h` must be a live handle; `out` must have room for `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn bvs_riemann_sample(
    h: *const BvsRiemann,
    x: f64,
    t: f64,
    out: *mut f64,
    n: usize,
) -> BvsStatus {
    let (Some(h), false) = (h.as_ref(), out.is_null()) else {
        return fail(BvsStatus::NullPointer, "null handle or output");
    };
    if n != h.sol.dim() {
        return fail(BvsStatus::InvalidArgument, "output length differs from the state dimension");
    }
    let u = h.sol.sample(x, t);
    ptr::copy_nonoverlapping(u.as_ptr(), out, n);
    BvsStatus::Ok
}

/// Piecewise polynomial on `(a, b)` with `n_breakpoints` interior
/// breakpoints. Piece `i` has `lengths[i]` monomial coefficients in `x`,
/// stored consecutively in `coeffs`.
///
/// # Safety
/// `breakpoints` must hold `n_breakpoints` doubles, `lengths` must hold
/// `n_breakpoints + 1` entries and `coeffs` their sum; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bvs_bv_from_monomials(
    a: f64,
    b: f64,
    breakpoints: *const f64,
    n_breakpoints: usize,
    coeffs: *const f64,
    lengths: *const usize,
    out: *mut *mut BvsBV,
) -> BvsStatus {
    guarded(|| {
        if out.is_null() || lengths.is_null() {
            return fail(BvsStatus::NullPointer, "null output handle or lengths");
        }
        *out = ptr::null_mut();
        let lengths = std::slice::from_raw_parts(lengths, n_breakpoints + 1);
        let total = lengths.iter().sum();
        let (Some(bps), Some(flat)) = (slice(breakpoints, n_breakpoints), slice(coeffs, total)) else {
            return fail(BvsStatus::NullPointer, "null breakpoints or coefficients");
        };
        let mut pieces = Vec::with_capacity(lengths.len());
        let mut at = 0;
        for &len in lengths {
            pieces.push(flat[at..at + len].to_vec());
            at += len;
        }
        let built = Window::new(a, b).and_then(|w| PiecewiseBV::from_monomials(w, bps.to_vec(), &pieces, None));
        match built {
            Ok(f) => {
                *out = Box::into_raw(Box::new(BvsBV { f }));
                BvsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// BV function from a `decompose` JSON config, Cantor part included.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bvs_bv_from_json(json: *const c_char, out: *mut *mut BvsBV) -> BvsStatus {
    guarded(|| {
        if out.is_null() {
            return fail(BvsStatus::NullPointer, "null output handle");
        }
        *out = ptr::null_mut();
        let text = match string(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match DecomposeConfig::from_json(text).and_then(|c| c.function()) {
            Ok(f) => {
                *out = Box::into_raw(Box::new(BvsBV { f }));
                BvsStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bvs_bv_free(h: *mut BvsBV) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bvs_bv_total_variation(h: *const BvsBV, out: *mut f64) -> BvsStatus {
    let (Some(h), false) = (h.as_ref(), out.is_null()) else {
        return fail(BvsStatus::NullPointer, "null handle or output");
    };
    *out = h.f.total_variation();
    BvsStatus::Ok
}

/// Right-continuous value at `x`.
///
/// # Safety
/// `h` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bvs_bv_eval(h: *const BvsBV, x: f64, out: *mut f64) -> BvsStatus {
    let (Some(h), false) = (h.as_ref(), out.is_null()) else {
        return fail(BvsStatus::NullPointer, "null handle or output");
    };
    *out = h.f.eval(x);
    BvsStatus::Ok
}

/// Number of nonzero jumps.
///
/// # Safety
/// `h` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn bvs_bv_jump_count(h: *const BvsBV) -> usize {
    h.as_ref().map_or(0, |h| h.f.jumps().len())
}

/// Position and size of jump `index`.
///
/// # Safety
/// `h` must be a live handle; `x` and `size` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bvs_bv_jump(h: *const BvsBV, index: usize, x: *mut f64, size: *mut f64) -> BvsStatus {
    let (Some(h), false) = (h.as_ref(), x.is_null() || size.is_null()) else {
        return fail(BvsStatus::NullPointer, "null handle or output");
    };
    match h.f.jumps().get(index) {
        Some(&(at, s)) => {
            *x = at;
            *size = s;
            BvsStatus::Ok
        }
        None => fail(BvsStatus::OutOfRange, "jump index out of range"),
    }
}

/// Runs `command` (`"riemann"`, `"verify"` or `"decompose"`) on a JSON
/// config and stores the JSON report in `*out_json`. A negative `seed`
/// keeps the config's seed. A failed certification returns
/// `CertificationFailed` and still produces the report.
///
/// # Safety
/// `command` and `config_json` must be NUL-terminated strings; `out_json`
/// must be writable. The report must be released with [`bvs_string_free`].
#[no_mangle]
pub unsafe extern "C" fn bvs_run_json(
    command: *const c_char,
    config_json: *const c_char,
    seed: i64,
    out_json: *mut *mut c_char,
) -> BvsStatus {
    guarded(|| {
        if out_json.is_null() {
            return fail(BvsStatus::NullPointer, "null output string");
        }
        *out_json = ptr::null_mut();
        let (command, text) = match (string(command), string(config_json)) {
            (Ok(c), Ok(t)) => (c, t),
            (Err(s), _) | (_, Err(s)) => return s,
        };
        let seed = u64::try_from(seed).ok();
        let produced = match command {
            "riemann" => ScenarioConfig::from_json(text)
                .and_then(|c| cli::riemann_report(&c, c.name.as_deref().unwrap_or("scenario")))
                .map(|r| (cli::to_json(&r), true)),
            "verify" => ScenarioConfig::from_json(text)
                .and_then(|c| cli::verify_report(&c, c.name.as_deref().unwrap_or("scenario"), seed))
                .map(|r| (cli::to_json(&r), r.overall_pass)),
            "decompose" => DecomposeConfig::from_json(text)
                .and_then(|c| cli::decompose_report(&c, c.name.as_deref().unwrap_or("function")))
                .map(|(r, _)| (cli::to_json(&r), true)),
            other => return fail(BvsStatus::InvalidArgument, &format!("unknown command {other:?}")),
        };
        match produced {
            Ok((json, pass)) => {
                *out_json = CString::new(json).map_or(ptr::null_mut(), CString::into_raw);
                if pass {
                    BvsStatus::Ok
                } else {
                    fail(BvsStatus::CertificationFailed, "certification failed")
                }
            }
            Err(e) => from_error(e),
        }
    })
}
