//! C ABI over `meridian-core`.
//!
//! Surfaces are opaque `MsSurface` handles built from a JSON config (same
//! schema as the CLI). Every call returns an `MsStatus`; on failure the
//! message is kept per thread and can be fetched with
//! `ms_last_error_message`. Strings handed out by the library must be
//! released with `ms_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use meridian_core::classifier::{classify_meridian, MeridianCase, SemiParallelBranch};
use meridian_core::config::{Analysis, AnalysisConfig, ConfigError};
use meridian_core::report::{evaluate_point, run_analysis, write_csv};
use meridian_core::GeomError;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Config did not parse or failed validation.
    Config = 3,
    /// The point is outside the surface domain (pole guard, singular chart, stencil).
    Domain = 4,
    /// Any other evaluation failure.
    Evaluation = 5,
    NotAMeridian = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsCase {
    CaseI = 1,
    CaseII = 2,
    CaseIII = 3,
    Degenerate = 4,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MsBranch {
    /// Straight profile.
    BranchCaseI = 1,
    /// Great circle with `kappa_alpha = g'/f`.
    BranchCaseII = 2,
    NotSemiParallel = 3,
    Inconsistent = 4,
}

/// Opaque surface handle.
pub struct MsSurface {
    analysis: Analysis,
}

/// Invariants and residuals at one parameter point.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MsPointReport {
    pub e: f64,
    pub f: f64,
    pub g: f64,
    pub k: f64,
    pub k_n: f64,
    pub h_norm: f64,
    pub umbilicity_deviation: f64,
    pub isotropy_deviation: f64,
    pub h_h2_minus_3k: f64,
    pub sp_residual: f64,
    pub gauss_res: f64,
    pub ricci_res: f64,
    pub codazzi_res: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MsClassification {
    pub case_: MsCase,
    pub branch: MsBranch,
    pub kappa_is_zero: bool,
    pub kappa_alpha_is_zero: bool,
    pub kappa_constant: bool,
    pub semi_parallel: bool,
    pub hyperplanar: bool,
    pub ode_residual_max: f64,
    pub ode_residual_alt_max: f64,
    pub semiparallel_residual_max: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn geom_status(e: &GeomError) -> MsStatus {
    match e {
        GeomError::NotAMeridian => MsStatus::NotAMeridian,
        GeomError::InvalidSpec(_) => MsStatus::Config,
        e if e.is_domain_error() || matches!(e, GeomError::StencilOutOfDomain { .. }) => {
            MsStatus::Domain
        }
        _ => MsStatus::Evaluation,
    }
}

/// Runs `body`, recording the error message and converting panics.
fn guard(body: impl FnOnce() -> Result<(), (MsStatus, String)>) -> MsStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => MsStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            MsStatus::Panic
        }
    }
}

fn null() -> (MsStatus, String) {
    (MsStatus::NullPointer, "null pointer argument".into())
}

fn from_geom(e: GeomError) -> (MsStatus, String) {
    (geom_status(&e), e.to_string())
}

/// Builds a surface from a NUL-terminated JSON config and stores the new
/// handle in `*out`. The handle must be released with `ms_surface_free`.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_surface_from_json(
    json: *const c_char,
    out: *mut *mut MsSurface,
) -> MsStatus {
    guard(|| {
        if json.is_null() || out.is_null() {
            return Err(null());
        }
        *out = ptr::null_mut();
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (MsStatus::InvalidUtf8, e.to_string()))?;
        let analysis = AnalysisConfig::from_json(text)
            .and_then(AnalysisConfig::build)
            .map_err(|e: ConfigError| (MsStatus::Config, e.to_string()))?;
        *out = Box::into_raw(Box::new(MsSurface { analysis }));
        Ok(())
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `surface` must be null or a handle from `ms_surface_from_json` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_surface_free(surface: *mut MsSurface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

/// Number of grid points in the handle's config.
///
/// # Safety
/// `surface` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_surface_grid_len(surface: *const MsSurface) -> usize {
    surface.as_ref().map_or(0, |s| s.analysis.grid.len())
}

/// Whether the surface carries a meridian description.
///
/// # Safety
/// `surface` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ms_surface_is_meridian(surface: *const MsSurface) -> bool {
    surface
        .as_ref()
        .is_some_and(|s| s.analysis.handle.meridian().is_some())
}

/// Evaluates every invariant at `(u, v)`.
///
/// # Safety
/// `surface` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_surface_evaluate(
    surface: *const MsSurface,
    u: f64,
    v: f64,
    out: *mut MsPointReport,
) -> MsStatus {
    guard(|| {
        let (Some(s), false) = (surface.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let r = evaluate_point(&s.analysis, u, v).map_err(from_geom)?;
        *out = MsPointReport {
            e: r[2],
            f: r[3],
            g: r[4],
            k: r[5],
            k_n: r[6],
            h_norm: r[7],
            umbilicity_deviation: r[8],
            isotropy_deviation: r[9],
            h_h2_minus_3k: r[10],
            sp_residual: r[11],
            gauss_res: r[12],
            ricci_res: r[13],
            codazzi_res: r[14],
        };
        Ok(())
    })
}

/// Classifies a meridian surface over the handle's grid.
///
/// # Safety
/// `surface` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_surface_classify(
    surface: *const MsSurface,
    out: *mut MsClassification,
) -> MsStatus {
    guard(|| {
        let (Some(s), false) = (surface.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let a = &s.analysis;
        let r = classify_meridian(&a.handle, &a.grid, &a.policy).map_err(from_geom)?;
        *out = MsClassification {
            case_: match r.case {
                MeridianCase::I => MsCase::CaseI,
                MeridianCase::II => MsCase::CaseII,
                MeridianCase::III => MsCase::CaseIII,
                MeridianCase::Degenerate => MsCase::Degenerate,
            },
            branch: match r.theorem2_branch {
                SemiParallelBranch::CaseI => MsBranch::BranchCaseI,
                SemiParallelBranch::CaseII => MsBranch::BranchCaseII,
                SemiParallelBranch::NotSemiParallel => MsBranch::NotSemiParallel,
                SemiParallelBranch::Inconsistent => MsBranch::Inconsistent,
            },
            kappa_is_zero: r.kappa_is_zero,
            kappa_alpha_is_zero: r.kappa_alpha_is_zero,
            kappa_constant: r.kappa_constant,
            semi_parallel: r.semi_parallel,
            hyperplanar: r.hyperplanar,
            ode_residual_max: r.ode_residual_max,
            ode_residual_alt_max: r.ode_residual_alt_max,
            semiparallel_residual_max: r.semiparallel_residual_max,
        };
        Ok(())
    })
}

/// Runs the grid analysis and returns the CSV report in `*out`
/// (release with `ms_string_free`).
///
/// # Safety
/// `surface` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn ms_surface_analyze_csv(
    surface: *const MsSurface,
    out: *mut *mut c_char,
) -> MsStatus {
    guard(|| {
        let (Some(s), false) = (surface.as_ref(), out.is_null()) else {
            return Err(null());
        };
        *out = ptr::null_mut();
        let report =
            run_analysis(&s.analysis).map_err(|e| (geom_status(&e.source), e.to_string()))?;
        let mut buf = Vec::new();
        write_csv(&report, &mut buf).map_err(|e| (MsStatus::Evaluation, e.to_string()))?;
        let text = CString::new(buf).map_err(|e| (MsStatus::Evaluation, e.to_string()))?;
        *out = text.into_raw();
        Ok(())
    })
}

/// Copy of the calling thread's last error message, or null if the last
/// call succeeded. Release with `ms_string_free`.
#[no_mangle]
pub extern "C" fn ms_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| {
        e.borrow()
            .as_ref()
            .map_or(ptr::null_mut(), |m| m.clone().into_raw())
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ms_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn ms_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
