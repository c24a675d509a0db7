//! C ABI over the `taumodel` engine.
//!
//! Every entry point returns a [`TmStatus`]. Strings handed out by the library
//! are NUL-terminated UTF-8 and must be released with [`tm_string_free`]. On
//! failure, [`tm_last_error`] describes what went wrong on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::json;
use taumodel::chain_eval::{chained_moment_matrix, z_bruteforce, z_bruteforce_desym, z_det};
use taumodel::cli::{error_exit_code, run, AnyChain, Command, Route, RunConfig, Status};
use taumodel::fock::{z_fock, FockOptions};
use taumodel::numerics::Field;
use taumodel::{Error, Mode};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmStatus {
    Ok = 0,
    /// The command ran but a check or cross-route agreement failed.
    Failed = 1,
    /// Malformed configuration or arguments.
    Config = 2,
    /// A computation could not be carried out.
    Compute = 3,
    /// A required pointer was null.
    NullArgument = 4,
    /// The library panicked; this is a bug.
    Panic = 5,
}

/// A chain built from a JSON configuration.
pub struct TmChain {
    cfg: RunConfig,
    chain: AnyChain,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(s));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> TmStatus {
    if error_exit_code(e) == 2 {
        TmStatus::Config
    } else {
        TmStatus::Compute
    }
}

fn guard(f: impl FnOnce() -> Result<TmStatus, (TmStatus, String)>) -> TmStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => s,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            TmStatus::Panic
        }
    }
}

fn fail(e: Error) -> (TmStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (TmStatus, String)> {
    if p.is_null() {
        return Err((TmStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (TmStatus::Config, format!("{what} is not valid UTF-8")))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), (TmStatus, String)> {
    let c = CString::new(s).map_err(|_| (TmStatus::Compute, "output contains a NUL byte".to_string()))?;
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut *mut T) -> Result<(), (TmStatus, String)> {
    if out.is_null() {
        return Err((TmStatus::NullArgument, "output pointer is null".into()));
    }
    // SAFETY: checked non-null above; the caller owns the slot.
    unsafe { *out = ptr::null_mut() };
    Ok(())
}

/// Message for the last failed call on this thread, or null. The pointer
/// stays valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn tm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a chain from a JSON configuration (the same schema as the command
/// line tool). `mode` may be null, `"exact"` or `"float"`.
///
/// # Safety
/// `config_json` and `mode` must be null or NUL-terminated; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn tm_chain_new(
    config_json: *const c_char,
    mode: *const c_char,
    out: *mut *mut TmChain,
) -> TmStatus {
    guard(|| {
        check_out(out)?;
        let text = read_str(config_json, "config_json")?;
        let mut cfg = RunConfig::from_json(text).map_err(fail)?;
        if !mode.is_null() {
            cfg.mode = Some(read_str(mode, "mode")?.parse::<Mode>().map_err(fail)?);
        }
        let chain = AnyChain::from_config(&cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(TmChain { cfg, chain }));
        Ok(TmStatus::Ok)
    })
}

/// Destroys a chain. Null is ignored.
///
/// # Safety
/// `chain` must come from [`tm_chain_new`] and must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn tm_chain_free(chain: *mut TmChain) {
    if !chain.is_null() {
        drop(Box::from_raw(chain));
    }
}

/// Number of components, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tm_chain_p(chain: *const TmChain) -> usize {
    chain.as_ref().map_or(0, |c| c.chain.p())
}

/// Matrix size `N`, or 0 for a null handle.
///
/// # Safety
/// `chain` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn tm_chain_n(chain: *const TmChain) -> usize {
    chain.as_ref().map_or(0, |c| c.chain.n())
}

fn z_route<F: Field>(route: Route, c: &taumodel::ensemble::ChainSpec<F>, cfg: &RunConfig) -> taumodel::Result<F> {
    match route {
        Route::Brute => z_bruteforce(c),
        Route::Desym => z_bruteforce_desym(c),
        Route::Det => z_det(c),
        Route::Fock => {
            let opts: FockOptions =
                cfg.fock_options().ok_or_else(|| Error::Config("the fermionic route needs a `fock` section".into()))?;
            z_fock(c, &cfg.gspecs()?, &opts)
        }
        Route::All => Err(Error::Config("pick a single route: brute, desym, det or fock".into())),
    }
}

/// Evaluates the partition function along `route` (`brute`, `desym`, `det`
/// or `fock`). Exact values come back as `"num/den"` strings, float values
/// in shortest round-trip decimal form.
///
/// # Safety
/// `chain` must be a live handle, `route` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tm_chain_z(chain: *const TmChain, route: *const c_char, out: *mut *mut c_char) -> TmStatus {
    guard(|| {
        check_out(out)?;
        let c = chain.as_ref().ok_or((TmStatus::NullArgument, "chain is null".to_string()))?;
        let route: Route = read_str(route, "route")?.parse().map_err(fail)?;
        let value = match &c.chain {
            AnyChain::Exact(ch) => z_route(route, ch, &c.cfg).map(|v| v.to_scalar()),
            AnyChain::Float(ch) => z_route(route, ch, &c.cfg).map(|v| v.to_scalar()),
        }
        .map_err(fail)?;
        write_string(out, value.to_string())?;
        Ok(TmStatus::Ok)
    })
}

/// The chained moment matrix as a JSON array of rows of value strings.
///
/// # Safety
/// `chain` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn tm_chain_moment_matrix(chain: *const TmChain, out: *mut *mut c_char) -> TmStatus {
    guard(|| {
        check_out(out)?;
        let c = chain.as_ref().ok_or((TmStatus::NullArgument, "chain is null".to_string()))?;
        let rows = match &c.chain {
            AnyChain::Exact(ch) => chained_moment_matrix(ch).map(|g| g.to_strings()),
            AnyChain::Float(ch) => chained_moment_matrix(ch).map(|g| g.to_strings()),
        }
        .map_err(fail)?;
        write_string(out, json!(rows).to_string())?;
        Ok(TmStatus::Ok)
    })
}

/// Runs a command (`compute`, `verify`, `deform`, `toda` or `loop`) and
/// writes the JSON report to `out`. `mode` may be null; a negative `seed`
/// keeps the configured one. The report is written whenever the command ran,
/// including when it returns [`TmStatus::Failed`] or [`TmStatus::Compute`]
/// because a check or route failed.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tm_run(
    command: *const c_char,
    config_json: *const c_char,
    mode: *const c_char,
    seed: i64,
    out: *mut *mut c_char,
) -> TmStatus {
    guard(|| {
        check_out(out)?;
        let command: Command = read_str(command, "command")?.parse().map_err(fail)?;
        let mut cfg = RunConfig::from_json(read_str(config_json, "config_json")?).map_err(fail)?;
        if !mode.is_null() {
            cfg.mode = Some(read_str(mode, "mode")?.parse::<Mode>().map_err(fail)?);
        }
        if seed >= 0 {
            cfg.seed = Some(seed as u64);
        }
        let report = run(command, &cfg).map_err(fail)?;
        write_string(out, report.json.to_string())?;
        match report.status {
            Status::Ok => Ok(TmStatus::Ok),
            Status::Failed => {
                set_error("a check failed; see the report");
                Ok(TmStatus::Failed)
            }
            Status::RouteError => {
                set_error("a route could not be evaluated; see the report");
                Ok(TmStatus::Compute)
            }
        }
    })
}
