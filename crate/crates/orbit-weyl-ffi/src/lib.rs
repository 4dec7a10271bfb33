//! C ABI for the verification engine: opaque engine handles, status codes,
//! and JSON/text results as caller-freed C strings, so other languages can
//! drive the suites and dumps without linking Rust directly.
//!
//! Every entry point catches panics (nothing unwinds across the boundary)
//! and records a thread-local message retrievable with
//! `orbit_weyl_last_error`.

use orbit_weyl::lie::Family;
use orbit_weyl::report::{dump, run, PairSampling, Suite, SuiteConfig};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Copy, Clone, PartialEq, Eq, Debug)]
pub enum OrbitWeylStatus {
    /// The call succeeded (for runs: every requested check passed).
    Ok = 0,
    /// The run completed but at least one verification check failed;
    /// the report is still produced.
    ChecksFailed = 1,
    /// Invalid family/rank/object/configuration.
    InvalidArgument = 2,
    /// A required pointer argument was null.
    NullPointer = 3,
    /// Unexpected internal failure (see `orbit_weyl_last_error`).
    Internal = 4,
}

/// Opaque verification engine bound to one algebra.
pub struct OrbitWeylEngine {
    family: Family,
    n: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("").unwrap());
}

fn set_error(msg: &str) {
    let cleaned: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(cleaned).unwrap());
}

/// Message for the most recent error on this thread. Borrowed pointer, valid
/// until the next failing call on the same thread; do not free.
#[no_mangle]
pub extern "C" fn orbit_weyl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

fn parse_family(s: &str) -> Result<Family, String> {
    match s {
        "sl" => Ok(Family::Sl),
        "so" => Ok(Family::So),
        "sp" => Err("the sp family is excluded (its operator algebra is an even Weyl algebra)"
            .to_string()),
        other => Err(format!("unknown family `{other}` (expected sl or so)")),
    }
}

/// Create an engine for family ("sl" or "so") and rank N. On success writes
/// the handle to `out` and returns Ok; the handle must be released with
/// `orbit_weyl_engine_free`.
///
/// # Safety
/// `family` must be a valid NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn orbit_weyl_engine_new(
    family: *const c_char,
    n: u32,
    out: *mut *mut OrbitWeylEngine,
) -> OrbitWeylStatus {
    if family.is_null() || out.is_null() {
        set_error("null pointer argument");
        return OrbitWeylStatus::NullPointer;
    }
    let family_str = match CStr::from_ptr(family).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("family is not valid UTF-8");
            return OrbitWeylStatus::InvalidArgument;
        }
    };
    let family = match parse_family(family_str) {
        Ok(f) => f,
        Err(e) => {
            set_error(&e);
            return OrbitWeylStatus::InvalidArgument;
        }
    };
    match orbit_weyl::lie::build_algebra(family, n as usize) {
        Ok(_) => {
            let engine = Box::new(OrbitWeylEngine {
                family,
                n: n as usize,
            });
            *out = Box::into_raw(engine);
            OrbitWeylStatus::Ok
        }
        Err(e) => {
            set_error(&e.to_string());
            OrbitWeylStatus::InvalidArgument
        }
    }
}

/// Release an engine handle. Null is tolerated.
///
/// # Safety
/// `engine` must come from `orbit_weyl_engine_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn orbit_weyl_engine_free(engine: *mut OrbitWeylEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// Optional JSON overrides accepted by `orbit_weyl_run_json`:
/// {"suites": [...], "k_max": 8, "gram_degree_max": 2, "seed": 12648430,
///  "pairs": "all" | <count>}.
#[derive(serde::Deserialize, Default)]
struct ConfigOverride {
    suites: Option<Vec<String>>,
    k_max: Option<u32>,
    gram_degree_max: Option<usize>,
    seed: Option<u64>,
    pairs: Option<serde_json::Value>,
}

fn build_config(engine: &OrbitWeylEngine, overrides: Option<&str>) -> Result<SuiteConfig, String> {
    let mut cfg = SuiteConfig::new(engine.family, engine.n);
    let Some(text) = overrides else {
        return Ok(cfg);
    };
    if text.trim().is_empty() {
        return Ok(cfg);
    }
    let ov: ConfigOverride =
        serde_json::from_str(text).map_err(|e| format!("invalid config JSON: {e}"))?;
    if let Some(names) = ov.suites {
        let mut suites = Vec::new();
        for name in names {
            suites.push(Suite::parse(&name).ok_or_else(|| format!("unknown suite `{name}`"))?);
        }
        cfg.suites = suites;
    }
    if let Some(k) = ov.k_max {
        cfg.k_max = k;
    }
    if let Some(g) = ov.gram_degree_max {
        cfg.gram_degree_max = g;
    }
    if let Some(s) = ov.seed {
        cfg.seed = s;
    }
    if let Some(p) = ov.pairs {
        cfg.pair_sampling = match p {
            serde_json::Value::String(ref s) if s == "all" => PairSampling::All,
            serde_json::Value::Number(n) => PairSampling::Count(
                n.as_u64().ok_or("pairs count must be a non-negative integer")? as usize,
            ),
            _ => return Err("pairs must be \"all\" or a count".to_string()),
        };
    }
    Ok(cfg)
}

fn export_string(s: String) -> *mut c_char {
    let cleaned: String = s.chars().filter(|&c| c != '\0').collect();
    CString::new(cleaned).unwrap().into_raw()
}

/// Run the verification suites. `config_json` may be null or empty for the
/// defaults. On Ok or ChecksFailed, `out_report` receives the JSON report
/// (free with `orbit_weyl_string_free`).
///
/// # Safety
/// `engine` and `out_report` must be valid; `config_json` null or valid.
#[no_mangle]
pub unsafe extern "C" fn orbit_weyl_run_json(
    engine: *const OrbitWeylEngine,
    config_json: *const c_char,
    out_report: *mut *mut c_char,
) -> OrbitWeylStatus {
    if engine.is_null() || out_report.is_null() {
        set_error("null pointer argument");
        return OrbitWeylStatus::NullPointer;
    }
    let engine = &*engine;
    let overrides = if config_json.is_null() {
        None
    } else {
        match CStr::from_ptr(config_json).to_str() {
            Ok(s) => Some(s),
            Err(_) => {
                set_error("config is not valid UTF-8");
                return OrbitWeylStatus::InvalidArgument;
            }
        }
    };
    let cfg = match build_config(engine, overrides) {
        Ok(c) => c,
        Err(e) => {
            set_error(&e);
            return OrbitWeylStatus::InvalidArgument;
        }
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| run(&cfg, false)));
    match outcome {
        Err(_) => {
            set_error("panic inside the engine");
            OrbitWeylStatus::Internal
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            OrbitWeylStatus::InvalidArgument
        }
        Ok(Ok(report)) => {
            let passed = report.passed();
            *out_report = export_string(report.to_json());
            if passed {
                OrbitWeylStatus::Ok
            } else {
                OrbitWeylStatus::ChecksFailed
            }
        }
    }
}

/// Canonical text dump of D0, A, B, C, S, f_psi, or gram:<p>.
///
/// # Safety
/// `engine`, `object`, and `out_text` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn orbit_weyl_dump(
    engine: *const OrbitWeylEngine,
    object: *const c_char,
    out_text: *mut *mut c_char,
) -> OrbitWeylStatus {
    if engine.is_null() || object.is_null() || out_text.is_null() {
        set_error("null pointer argument");
        return OrbitWeylStatus::NullPointer;
    }
    let engine = &*engine;
    let object = match CStr::from_ptr(object).to_str() {
        Ok(s) => s,
        Err(_) => {
            set_error("object is not valid UTF-8");
            return OrbitWeylStatus::InvalidArgument;
        }
    };
    let cfg = SuiteConfig::new(engine.family, engine.n);
    let outcome = catch_unwind(AssertUnwindSafe(|| dump(&cfg, object)));
    match outcome {
        Err(_) => {
            set_error("panic inside the engine");
            OrbitWeylStatus::Internal
        }
        Ok(Err(e)) => {
            set_error(&e.to_string());
            OrbitWeylStatus::InvalidArgument
        }
        Ok(Ok(text)) => {
            *out_text = export_string(text);
            OrbitWeylStatus::Ok
        }
    }
}

/// Free a string produced by this library. Null is tolerated.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn orbit_weyl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
