//! C interface to `swred`.
//!
//! Every fallible function returns a [`SwredStatus`]. On anything other than
//! `SWRED_STATUS_OK` a message is stored per thread and can be read with
//! [`swred_last_error_message`]. Panics are caught at the boundary and
//! reported as `SWRED_STATUS_PANIC`.
//!
//! Field data crosses the boundary as interleaved `(re, im)` doubles, `2 n²`
//! of them, in the grid's storage order (`x1` index major).

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use swred::equations::ResidualBundle;
use swred::fields::{explicit_torus_solution, perturbed_configuration, random_bandlimited_configuration};
use swred::io::{load_configuration, save_configuration, Manifest};
use swred::linear::{dimension_formulas, DimensionCase};
use swred::solver::{solve, Method, SolveOptions, SolveReport};
use swred::{Configuration, ScalarField, SwError, TorusGrid, C64};

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwredStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidGrid = 3,
    NonPeriodic = 4,
    NotASolution = 5,
    NoConvergence = 6,
    Io = 7,
    Parse = 8,
    Panic = 9,
    Other = 10,
}

/// Which field of a configuration.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwredField {
    A = 0,
    Psi1 = 1,
    Psi2 = 2,
    Phi = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwredMethod {
    GaussNewton = 0,
    GradientFlow = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SwredDimensionCase {
    Moduli = 0,
    FixedSpinor = 1,
    VortexPsi1Zero = 2,
    VortexPsi2Zero = 3,
}

/// Sup and L² norms of the four residuals, and the energy.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SwredResiduals {
    pub r1_max: f64,
    pub r1_l2: f64,
    pub r2_max: f64,
    pub r2_l2: f64,
    pub r3a_max: f64,
    pub r3a_l2: f64,
    pub r3b_max: f64,
    pub r3b_l2: f64,
    pub energy: f64,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SwredSolveSummary {
    pub iterations: usize,
    pub final_energy: f64,
    pub max_residual: f64,
    pub converged: bool,
}

/// Opaque configuration handle.
pub struct SwredConfiguration {
    inner: Configuration,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &SwError) -> SwredStatus {
    match e {
        SwError::InvalidGrid(_) | SwError::GridMismatch => SwredStatus::InvalidGrid,
        SwError::NonPeriodicParameter { .. } => SwredStatus::NonPeriodic,
        SwError::NotASolution { .. } => SwredStatus::NotASolution,
        SwError::StalledLineSearch(_) | SwError::MaxItersExceeded(_) => SwredStatus::NoConvergence,
        SwError::InvalidArgument(_) | SwError::Config(_) => SwredStatus::InvalidArgument,
        SwError::Io(_) => SwredStatus::Io,
        SwError::Parse(_) | SwError::Json(_) => SwredStatus::Parse,
        _ => SwredStatus::Other,
    }
}

struct Failure(SwredStatus, String);

impl From<SwError> for Failure {
    fn from(e: SwError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SwredStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            SwredStatus::Ok
        }
        Ok(Err(Failure(s, msg))) => {
            set_last_error(msg);
            s
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            SwredStatus::Panic
        }
    }
}

fn null(name: &str) -> Failure {
    Failure(SwredStatus::NullPointer, format!("{name} is null"))
}

unsafe fn handle<'a>(p: *const SwredConfiguration) -> Result<&'a Configuration, Failure> {
    p.as_ref().map(|h| &h.inner).ok_or_else(|| null("configuration"))
}

unsafe fn emit(out: *mut *mut SwredConfiguration, c: Configuration) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(SwredConfiguration { inner: c }));
    Ok(())
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a Path, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| Failure(SwredStatus::InvalidArgument, "path is not UTF-8".into()))
}

fn field_of(c: &Configuration, which: SwredField) -> &ScalarField {
    match which {
        SwredField::A => c.a(),
        SwredField::Psi1 => c.psi1(),
        SwredField::Psi2 => c.psi2(),
        SwredField::Phi => c.phi(),
    }
}

/// Version string; static storage.
#[no_mangle]
pub extern "C" fn swred_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!("swred ", env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version string"),
    };
    V.as_ptr()
}

/// Message of the last failed call on this thread, or null. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn swred_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Explicit solution on an `n × n` grid of a torus with side `side`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn swred_explicit_solution(
    n: usize,
    side: f64,
    c2: f64,
    phase: f64,
    out: *mut *mut SwredConfiguration,
) -> SwredStatus {
    guard(|| {
        let c = explicit_torus_solution(TorusGrid::new(n, side)?, c2, phase)?;
        emit(out, c)
    })
}

/// Random configuration with Fourier modes up to `max_mode`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage.
#[no_mangle]
pub unsafe extern "C" fn swred_random_configuration(
    n: usize,
    side: f64,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
    out: *mut *mut SwredConfiguration,
) -> SwredStatus {
    guard(|| {
        let c = random_bandlimited_configuration(TorusGrid::new(n, side)?, seed, max_mode, amplitude)?;
        emit(out, c)
    })
}

/// Adds band-limited noise of pointwise size `amplitude`.
///
/// # Safety
/// `c` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn swred_perturb(
    c: *const SwredConfiguration,
    seed: u64,
    max_mode: usize,
    amplitude: f64,
    out: *mut *mut SwredConfiguration,
) -> SwredStatus {
    guard(|| {
        let p = perturbed_configuration(handle(c)?, seed, max_mode, amplitude)?;
        emit(out, p)
    })
}

/// Builds a configuration from four interleaved complex arrays of `2 n²`
/// doubles each.
///
/// # Safety
/// Each pointer must reference `2 n²` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn swred_configuration_new(
    n: usize,
    side: f64,
    a: *const f64,
    psi1: *const f64,
    psi2: *const f64,
    phi: *const f64,
    out: *mut *mut SwredConfiguration,
) -> SwredStatus {
    guard(|| {
        let grid = TorusGrid::new(n, side)?;
        let read = |p: *const f64, name: &str| -> Result<ScalarField, Failure> {
            if p.is_null() {
                return Err(null(name));
            }
            let raw = std::slice::from_raw_parts(p, 2 * grid.len());
            let v = raw.chunks_exact(2).map(|z| C64::new(z[0], z[1])).collect();
            Ok(ScalarField::from_values(grid, v)?)
        };
        let c = Configuration::new(read(a, "a")?, read(psi1, "psi1")?, read(psi2, "psi2")?, read(phi, "phi")?)?;
        emit(out, c)
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `c` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn swred_configuration_free(c: *mut SwredConfiguration) {
    if !c.is_null() {
        let _ = catch_unwind(AssertUnwindSafe(|| drop(Box::from_raw(c))));
    }
}

/// Grid points per side and side length.
///
/// # Safety
/// `c` must be a live handle; `n` and `side` may be null.
#[no_mangle]
pub unsafe extern "C" fn swred_configuration_grid(
    c: *const SwredConfiguration,
    n: *mut usize,
    side: *mut f64,
) -> SwredStatus {
    guard(|| {
        let g = handle(c)?.grid();
        if !n.is_null() {
            *n = g.n();
        }
        if !side.is_null() {
            *side = g.side();
        }
        Ok(())
    })
}

/// Copies one field into `buf`, which holds `len` doubles (at least `2 n²`).
///
/// # Safety
/// `c` must be a live handle and `buf` must reference `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn swred_configuration_field(
    c: *const SwredConfiguration,
    which: SwredField,
    buf: *mut f64,
    len: usize,
) -> SwredStatus {
    guard(|| {
        let f = field_of(handle(c)?, which);
        if buf.is_null() {
            return Err(null("buf"));
        }
        let need = 2 * f.grid().len();
        if len < need {
            return Err(Failure(SwredStatus::InvalidArgument, format!("buffer holds {len} doubles, need {need}")));
        }
        let out = std::slice::from_raw_parts_mut(buf, need);
        for (dst, z) in out.chunks_exact_mut(2).zip(f.values()) {
            dst[0] = z.re;
            dst[1] = z.im;
        }
        Ok(())
    })
}

/// Residual norms of the four equations.
///
/// # Safety
/// `c` must be a live handle and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn swred_residuals(c: *const SwredConfiguration, out: *mut SwredResiduals) -> SwredStatus {
    guard(|| {
        let r = ResidualBundle::evaluate(handle(c)?).report();
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = SwredResiduals {
            r1_max: r.r1_max,
            r1_l2: r.r1_l2,
            r2_max: r.r2_max,
            r2_l2: r.r2_l2,
            r3a_max: r.r3a_max,
            r3a_l2: r.r3a_l2,
            r3b_max: r.r3b_max,
            r3b_l2: r.r3b_l2,
            energy: r.energy,
        };
        Ok(())
    })
}

fn summary(r: &SolveReport) -> SwredSolveSummary {
    SwredSolveSummary {
        iterations: r.iterations,
        final_energy: r.final_energy,
        max_residual: r.residuals.as_ref().map_or(f64::NAN, |x| x.max_residual()),
        converged: r.converged,
    }
}

/// Minimises the residual energy from `initial`. On success `*out` receives
/// the result; on `SWRED_STATUS_NO_CONVERGENCE` `*summary` is still filled
/// and `*out` is left untouched. `summary` may be null.
///
/// # Safety
/// `initial` must be a live handle; `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn swred_solve(
    initial: *const SwredConfiguration,
    method: SwredMethod,
    max_iters: usize,
    energy_tol: f64,
    out: *mut *mut SwredConfiguration,
    summary_out: *mut SwredSolveSummary,
) -> SwredStatus {
    guard(|| {
        let c = handle(initial)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = SolveOptions {
            max_iters,
            energy_tol,
            method: match method {
                SwredMethod::GaussNewton => Method::GaussNewton,
                SwredMethod::GradientFlow => Method::GradientFlow,
            },
            ..SolveOptions::for_grid(c.grid().n())
        };
        match solve(c, &opts) {
            Ok((sol, rep)) => {
                if let Some(s) = summary_out.as_mut() {
                    *s = summary(&rep);
                }
                emit(out, sol)
            }
            Err(e) => {
                if let (SwError::MaxItersExceeded(r) | SwError::StalledLineSearch(r), Some(s)) =
                    (&e, summary_out.as_mut())
                {
                    *s = summary(r);
                }
                Err(e.into())
            }
        }
    })
}

/// Writes a configuration container.
///
/// # Safety
/// `c` must be a live handle and `path` a NUL-terminated UTF-8 string.
#[no_mangle]
pub unsafe extern "C" fn swred_configuration_save(c: *const SwredConfiguration, path: *const c_char) -> SwredStatus {
    guard(|| {
        let c = handle(c)?;
        save_configuration(path_arg(path)?, c, &Manifest::new(c.grid(), "ffi"))?;
        Ok(())
    })
}

/// Reads a configuration container.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string and `out` valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn swred_configuration_load(
    path: *const c_char,
    out: *mut *mut SwredConfiguration,
) -> SwredStatus {
    guard(|| {
        let (c, _) = load_configuration(path_arg(path)?)?;
        emit(out, c)
    })
}

/// Closed-form moduli dimension for genus `g` and degree `c1`.
///
/// # Safety
/// `out` must be valid writable storage.
#[no_mangle]
pub unsafe extern "C" fn swred_dimension(g: i64, c1: i64, case_: SwredDimensionCase, out: *mut i64) -> SwredStatus {
    guard(|| {
        let case = match case_ {
            SwredDimensionCase::Moduli => DimensionCase::N,
            SwredDimensionCase::FixedSpinor => DimensionCase::Sigma,
            SwredDimensionCase::VortexPsi1Zero => DimensionCase::VortexPsi1Zero,
            SwredDimensionCase::VortexPsi2Zero => DimensionCase::VortexPsi2Zero,
        };
        let d = dimension_formulas(g, c1, case)?;
        *out.as_mut().ok_or_else(|| null("out"))? = d;
        Ok(())
    })
}
