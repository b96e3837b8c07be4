//! C ABI for the enzlogic simulation core.
//!
//! Scenarios and traces are exposed as opaque handles; every fallible call
//! returns an [`EzlStatus`] (mirroring the CLI exit codes) and stores a
//! human-readable message retrievable with [`ezl_last_error`]. Strings
//! returned as `*mut c_char` are owned by the caller and must be released
//! with [`ezl_string_free`]; `*const c_char` results are borrowed and live
//! as long as the handle they came from (or, for `ezl_last_error`, until
//! the next failing call on the same thread).
//!
//! The header `include/enzlogic.h` is generated at build time by cbindgen.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;

use enzlogic::cli;
use enzlogic::config::ScenarioConfig;
use enzlogic::gates::{threshold, LogicLevel, NotGateParams, ThresholdConfig};
use enzlogic::kinetics::{michaelis_rate, Trace};
use enzlogic::seqmap::not_gate_bounds;

/// Status codes shared with the CLI exit-code contract.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EzlStatus {
    /// Success (for checks: the property holds).
    Ok = 0,
    /// The operation ran but the logic property failed.
    LogicFail = 1,
    /// Configuration or argument error.
    ConfigError = 2,
    /// Numerical failure (integration breakdown, non-settling bound).
    NumericError = 3,
    /// A required pointer argument was null.
    NullPointer = 4,
}

/// Opaque parsed scenario.
pub struct EzlScenario {
    config: ScenarioConfig,
}

/// Opaque sampled trace.
pub struct EzlTrace {
    trace: Trace,
}

/// Closed-form NOT-gate settle bounds.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct EzlNotGateBounds {
    pub t_plus: f64,
    /// NaN when the formula's domain condition fails.
    pub t_minus: f64,
    /// Nonzero when `kappa <= (1 + K_m) * p` invalidates the fall formula.
    pub t_minus_domain_violated: u8,
    /// Measured fall settle time when the formula domain fails, else NaN.
    pub t_minus_empirical: f64,
    pub t_max: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Message from the most recent failing call on this thread. Borrowed;
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ezl_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Crate version as a static string.
#[no_mangle]
pub extern "C" fn ezl_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}

/// Release a string returned by a `*mut c_char` API.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn ezl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn str_arg<'a>(ptr: *const c_char) -> Result<&'a str, EzlStatus> {
    if ptr.is_null() {
        set_error("null pointer argument");
        return Err(EzlStatus::NullPointer);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("argument is not valid UTF-8");
        EzlStatus::ConfigError
    })
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " "))
        .map(CString::into_raw)
        .unwrap_or(std::ptr::null_mut())
}

/// Parse a scenario from configuration text. Returns null on error (see
/// [`ezl_last_error`]).
///
/// # Safety
/// `text` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ezl_scenario_parse_str(text: *const c_char) -> *mut EzlScenario {
    let Ok(text) = str_arg(text) else {
        return std::ptr::null_mut();
    };
    match ScenarioConfig::parse(text, Path::new(".")) {
        Ok(config) => Box::into_raw(Box::new(EzlScenario { config })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// Parse a scenario file. Returns null on error.
///
/// # Safety
/// `path` must be a valid NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ezl_scenario_parse_file(path: *const c_char) -> *mut EzlScenario {
    let Ok(path) = str_arg(path) else {
        return std::ptr::null_mut();
    };
    match ScenarioConfig::from_file(Path::new(path)) {
        Ok(config) => Box::into_raw(Box::new(EzlScenario { config })),
        Err(e) => {
            set_error(&e.to_string());
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `scenario` must come from a parse call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ezl_scenario_free(scenario: *mut EzlScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Simulate a scenario; returns a trace handle or null on error.
///
/// # Safety
/// `scenario` must be a live handle from a parse call.
#[no_mangle]
pub unsafe extern "C" fn ezl_simulate(scenario: *const EzlScenario) -> *mut EzlTrace {
    let Some(sc) = scenario.as_ref() else {
        set_error("null scenario");
        return std::ptr::null_mut();
    };
    match cli::simulate_scenario(&sc.config, None) {
        Ok(trace) => Box::into_raw(Box::new(EzlTrace { trace })),
        Err(f) => {
            set_error(&f.message);
            std::ptr::null_mut()
        }
    }
}

/// # Safety
/// `trace` must come from [`ezl_simulate`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn ezl_trace_free(trace: *mut EzlTrace) {
    if !trace.is_null() {
        drop(Box::from_raw(trace));
    }
}

/// Number of time samples in a trace (0 for a null handle).
///
/// # Safety
/// `trace` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ezl_trace_num_samples(trace: *const EzlTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.trace.times().len())
}

/// Number of data columns (species, enzymes, output aliases).
///
/// # Safety
/// `trace` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ezl_trace_num_series(trace: *const EzlTrace) -> usize {
    trace.as_ref().map_or(0, |t| t.trace.column_names().len())
}

/// Sample instants; borrowed, `ezl_trace_num_samples` entries.
///
/// # Safety
/// `trace` must be a live handle or null; the pointer is valid while the
/// trace is alive.
#[no_mangle]
pub unsafe extern "C" fn ezl_trace_times(trace: *const EzlTrace) -> *const f64 {
    trace
        .as_ref()
        .map_or(std::ptr::null(), |t| t.trace.times().as_ptr())
}

/// Name of column `index`, not NUL-terminated; its byte length is written
/// to `out_len`. Returns null if out of range.
///
/// # Safety
/// `trace` must be a live handle or null; `out_len` may be null. The
/// returned pointer is only valid while the trace is alive.
#[no_mangle]
pub unsafe extern "C" fn ezl_trace_series_name(
    trace: *const EzlTrace,
    index: usize,
    out_len: *mut usize,
) -> *const c_char {
    let Some(t) = trace.as_ref() else {
        return std::ptr::null();
    };
    let Some((name, _)) = t.trace.column(index) else {
        return std::ptr::null();
    };
    if !out_len.is_null() {
        *out_len = name.len();
    }
    name.as_ptr().cast()
}

/// Values of column `index`; borrowed, `ezl_trace_num_samples` entries.
///
/// # Safety
/// `trace` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ezl_trace_series(trace: *const EzlTrace, index: usize) -> *const f64 {
    let Some(t) = trace.as_ref() else {
        return std::ptr::null();
    };
    match t.trace.column(index) {
        Some((_, values)) => values.as_ptr(),
        None => std::ptr::null(),
    }
}

/// Render the trace as CSV (`t,<species...>,<enzyme...>`). Caller frees the
/// string with [`ezl_string_free`].
///
/// # Safety
/// `trace` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn ezl_trace_to_csv(trace: *const EzlTrace) -> *mut c_char {
    let Some(t) = trace.as_ref() else {
        set_error("null trace");
        return std::ptr::null_mut();
    };
    owned_string(t.trace.to_csv_string())
}

fn report_call(
    scenario: *const EzlScenario,
    out_report: *mut *mut c_char,
    f: impl Fn(&ScenarioConfig, &mut Vec<u8>) -> cli::CmdResult,
) -> EzlStatus {
    let sc = unsafe { scenario.as_ref() };
    let Some(sc) = sc else {
        set_error("null scenario");
        return EzlStatus::NullPointer;
    };
    let mut buf = Vec::new();
    let result = f(&sc.config, &mut buf);
    if !out_report.is_null() {
        unsafe {
            *out_report = owned_string(String::from_utf8_lossy(&buf).into_owned());
        }
    }
    match result {
        Ok(0) => EzlStatus::Ok,
        Ok(_) => EzlStatus::LogicFail,
        Err(failure) => {
            set_error(&failure.message);
            match failure.code {
                3 => EzlStatus::NumericError,
                _ => EzlStatus::ConfigError,
            }
        }
    }
}

/// Equilibrium truth table against the Boolean reference. `out_report`
/// (optional) receives the printed rows; free it with [`ezl_string_free`].
/// Returns `Ok` when every row matches, `LogicFail` otherwise.
///
/// # Safety
/// `scenario` must be a live handle; `out_report` may be null.
#[no_mangle]
pub unsafe extern "C" fn ezl_truth_table(
    scenario: *const EzlScenario,
    out_report: *mut *mut c_char,
) -> EzlStatus {
    report_call(scenario, out_report, |cfg, buf| {
        cli::truth_table_scenario(cfg, buf)
    })
}

/// Simulate and check the delayed-recovery property. `out_report` receives
/// the PASS/FAIL report. Returns `Ok` on pass, `LogicFail` on fail.
///
/// # Safety
/// `scenario` must be a live handle; `out_report` may be null.
#[no_mangle]
pub unsafe extern "C" fn ezl_check_seqmap(
    scenario: *const EzlScenario,
    out_report: *mut *mut c_char,
) -> EzlStatus {
    report_call(scenario, out_report, |cfg, buf| {
        cli::check_seqmap_scenario(cfg, None, buf)
    })
}

/// Michaelis-Menten rate `k_cat * e * s / (K_m + s)`.
///
/// # Safety
/// `out_rate` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ezl_michaelis_rate(
    k_cat: f64,
    e_conc: f64,
    k_m: f64,
    s_conc: f64,
    out_rate: *mut f64,
) -> EzlStatus {
    if out_rate.is_null() {
        set_error("null out_rate");
        return EzlStatus::NullPointer;
    }
    match michaelis_rate(k_cat, e_conc, k_m, s_conc) {
        Ok(v) => {
            *out_rate = v;
            EzlStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            EzlStatus::ConfigError
        }
    }
}

/// Threshold a concentration: 0, 1, or 2 for the invalid band; -1 on a
/// domain error.
#[no_mangle]
pub extern "C" fn ezl_threshold(x: f64, tau0: f64, tau1: f64) -> i32 {
    let Ok(cfg) = ThresholdConfig::new(tau0, tau1) else {
        set_error("thresholds must satisfy 0 < tau0 < tau1 < 1");
        return -1;
    };
    match threshold(x, &cfg) {
        Ok(LogicLevel::Zero) => 0,
        Ok(LogicLevel::One) => 1,
        Ok(LogicLevel::Invalid) => 2,
        Err(e) => {
            set_error(&e.to_string());
            -1
        }
    }
}

/// Closed-form NOT-gate settle bounds for an input enzyme (`kcat_e`,
/// `km_e`), a bias enzyme with effective rate `p_rate` and Michaelis
/// constant `km_p`, and error bound `kappa`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ezl_not_gate_bounds(
    kcat_e: f64,
    km_e: f64,
    p_rate: f64,
    km_p: f64,
    kappa: f64,
    out: *mut EzlNotGateBounds,
) -> EzlStatus {
    if out.is_null() {
        set_error("null out");
        return EzlStatus::NullPointer;
    }
    if !(kcat_e > 0.0 && km_e > 0.0 && p_rate > 0.0 && km_p > 0.0) {
        set_error("rates and Michaelis constants must be > 0");
        return EzlStatus::ConfigError;
    }
    let params = NotGateParams {
        input: enzlogic::gates::EnzymeKinetics::new(kcat_e, km_e),
        bias: enzlogic::gates::BiasEnzyme::from_effective_rate(p_rate, km_p),
    };
    match not_gate_bounds(&params, kappa) {
        Ok(b) => {
            *out = EzlNotGateBounds {
                t_plus: b.t_plus,
                t_minus: b.t_minus,
                t_minus_domain_violated: u8::from(b.t_minus_domain_violated),
                t_minus_empirical: b.t_minus_empirical.unwrap_or(f64::NAN),
                t_max: b.t_max,
            };
            EzlStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            match e {
                enzlogic::seqmap::SeqmapError::NonSettling { .. } => EzlStatus::NumericError,
                _ => EzlStatus::ConfigError,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const NOT_CFG: &str = "\
[circuit]
type = gate
gate = not

[inputs]
E1 = 0@0, 1@40

[simulation]
t_end = 80
dt_out = 0.5

[seqmap]
kappa = 0.05
tau = auto
";

    #[test]
    fn parse_simulate_and_read_back() {
        let text = CString::new(NOT_CFG).unwrap();
        let sc = unsafe { ezl_scenario_parse_str(text.as_ptr()) };
        assert!(!sc.is_null());
        let trace = unsafe { ezl_simulate(sc) };
        assert!(!trace.is_null());
        let n = unsafe { ezl_trace_num_samples(trace) };
        assert_eq!(n, 161);
        let n_series = unsafe { ezl_trace_num_series(trace) };
        assert_eq!(n_series, 4); // S1, S1p, E1, P1
        let times = unsafe { std::slice::from_raw_parts(ezl_trace_times(trace), n) };
        assert_eq!(times[0], 0.0);
        assert_eq!(*times.last().unwrap(), 80.0);
        let s1 = unsafe { std::slice::from_raw_parts(ezl_trace_series(trace, 0), n) };
        assert!(s1.iter().all(|v| (0.0..=1.0).contains(v)));
        let mut name_len = 0usize;
        let name_ptr = unsafe { ezl_trace_series_name(trace, 0, &mut name_len) };
        let name = unsafe {
            std::str::from_utf8(std::slice::from_raw_parts(name_ptr.cast(), name_len)).unwrap()
        };
        assert_eq!(name, "S1");
        let csv = unsafe { ezl_trace_to_csv(trace) };
        let text = unsafe { CStr::from_ptr(csv) }.to_str().unwrap();
        assert!(text.starts_with("t,S1,S1p,E1,P1\n"));
        unsafe {
            ezl_string_free(csv);
            ezl_trace_free(trace);
            ezl_scenario_free(sc);
        }
    }

    #[test]
    fn parse_error_sets_message() {
        let text = CString::new("[circuit]\ntype = bogus\n").unwrap();
        let sc = unsafe { ezl_scenario_parse_str(text.as_ptr()) };
        assert!(sc.is_null());
        let err = unsafe { CStr::from_ptr(ezl_last_error()) }
            .to_str()
            .unwrap();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn truth_table_status_and_report() {
        let text = CString::new(NOT_CFG).unwrap();
        let sc = unsafe { ezl_scenario_parse_str(text.as_ptr()) };
        let mut report: *mut c_char = std::ptr::null_mut();
        let status = unsafe { ezl_truth_table(sc, &mut report) };
        assert_eq!(status, EzlStatus::Ok);
        let text_report = unsafe { CStr::from_ptr(report) }
            .to_str()
            .unwrap()
            .to_owned();
        assert!(text_report.contains("match=yes"), "{text_report}");
        unsafe {
            ezl_string_free(report);
            ezl_scenario_free(sc);
        }
    }

    #[test]
    fn check_seqmap_passes_for_default_not() {
        let text = CString::new(NOT_CFG).unwrap();
        let sc = unsafe { ezl_scenario_parse_str(text.as_ptr()) };
        let mut report: *mut c_char = std::ptr::null_mut();
        let status = unsafe { ezl_check_seqmap(sc, &mut report) };
        assert_eq!(status, EzlStatus::Ok);
        let text_report = unsafe { CStr::from_ptr(report) }
            .to_str()
            .unwrap()
            .to_owned();
        assert!(text_report.contains("PASS"), "{text_report}");
        unsafe {
            ezl_string_free(report);
            ezl_scenario_free(sc);
        }
    }

    #[test]
    fn scalar_helpers() {
        let mut rate = 0.0;
        let status = unsafe { ezl_michaelis_rate(1.0, 1.0, 0.1, 0.1, &mut rate) };
        assert_eq!(status, EzlStatus::Ok);
        assert!((rate - 0.5).abs() < 1e-12);
        assert_eq!(
            unsafe { ezl_michaelis_rate(1.0, 1.0, -0.1, 0.1, &mut rate) },
            EzlStatus::ConfigError
        );

        assert_eq!(ezl_threshold(0.05, 0.2, 0.8), 0);
        assert_eq!(ezl_threshold(0.95, 0.2, 0.8), 1);
        assert_eq!(ezl_threshold(0.5, 0.2, 0.8), 2);
        assert_eq!(ezl_threshold(0.5, 0.8, 0.2), -1);

        let mut bounds = EzlNotGateBounds {
            t_plus: 0.0,
            t_minus: 0.0,
            t_minus_domain_violated: 0,
            t_minus_empirical: 0.0,
            t_max: 0.0,
        };
        let status = unsafe { ezl_not_gate_bounds(1.0, 0.1, 0.2, 0.1, 0.05, &mut bounds) };
        assert_eq!(status, EzlStatus::Ok);
        assert!((bounds.t_plus - 16.4765).abs() < 1e-3);
        assert_eq!(bounds.t_minus_domain_violated, 1);
        assert!(bounds.t_minus.is_nan());
        assert!(bounds.t_minus_empirical.is_finite());
    }
}
