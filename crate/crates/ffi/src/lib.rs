//! C ABI for `wavewalk`.
//!
//! Domains and boundary data are opaque handles created by `ww_*` constructors
//! and released with the matching `*_free`. Every fallible call returns a
//! [`WwStatus`]; on failure `ww_last_error_message` describes the error on the
//! calling thread.
//!
//! The generated header is `include/wavewalk.h`.

use std::cell::RefCell;
use std::ffi::{c_char, c_void, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use wavewalk::boundary::{BoundaryData, TabulatedData};
use wavewalk::estimator::{estimate_u, estimate_v, Backend, EstimatorConfig, Method, QueryPoint};
use wavewalk::geometry::{Domain, Point, Region};
use wavewalk::{Error, Estimate, SeedSpec};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotInterior = 4,
    Truncated = 5,
    BoundViolation = 6,
    TailTooLarge = 7,
    Io = 8,
    Panic = 9,
}

pub const WW_METHOD_DIRECT: u32 = 0;
pub const WW_METHOD_MIXED: u32 = 1;
pub const WW_METHOD_QUADRATURE: u32 = 2;

pub const WW_BACKEND_EM: u32 = 0;
pub const WW_BACKEND_WOS: u32 = 1;

/// Opaque domain handle.
pub struct WwDomain(Domain);

/// Opaque boundary-data handle.
pub struct WwBoundary(BoundaryData);

/// Monte Carlo estimate with the seed triple of its first replicate.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WwEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
    pub base_seed: u64,
    pub stream_id: u64,
    pub sample_index: u64,
}

/// Sampler settings. Fill with `ww_sampler_options_default`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct WwSamplerOptions {
    pub em_base_step: f64,
    pub em_boundary_slowdown: f64,
    pub em_max_steps: u64,
    pub em_snap_tolerance: f64,
    pub wos_epsilon: f64,
    pub wos_max_jumps: u64,
    pub quad_radius: f64,
    pub quad_nodes: u64,
    pub quad_max_tail: f64,
    pub n_inner: u64,
    /// Fixed partition count; results are reproducible for a given value.
    pub partitions: u64,
}

/// `f(s, y)` supplied by the caller. Called concurrently from worker threads.
pub type WwBoundaryFn = Option<extern "C" fn(user_data: *mut c_void, s: f64, y: *const f64, dim: usize) -> f64>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WwStatus {
    match e {
        Error::DimensionMismatch { .. } => WwStatus::DimensionMismatch,
        Error::NotInterior(_) => WwStatus::NotInterior,
        Error::Truncated { .. } => WwStatus::Truncated,
        Error::BoundViolation { .. } => WwStatus::BoundViolation,
        Error::TailTooLarge { .. } => WwStatus::TailTooLarge,
        Error::Tabulated(_) => WwStatus::Io,
        Error::InvalidDomain(_) | Error::InvalidArgument(_) => WwStatus::InvalidArgument,
    }
}

/// Runs `body`, recording errors and converting panics.
fn guarded<F>(body: F) -> WwStatus
where
    F: FnOnce() -> Result<(), (WwStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => WwStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            WwStatus::Panic
        }
    }
}

fn lib(e: Error) -> (WwStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (WwStatus, String) {
    (WwStatus::NullPointer, format!("{what} is null"))
}

unsafe fn slice<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], (WwStatus, String)> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (WwStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ww_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ww_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// The open interval `(lo, hi)`.
///
/// # Safety
/// `out` must be a valid pointer to a `WwDomain*`.
#[no_mangle]
pub unsafe extern "C" fn ww_domain_interval(lo: f64, hi: f64, out: *mut *mut WwDomain) -> WwStatus {
    guarded(|| put(out, WwDomain(Domain::interval(lo, hi).map_err(lib)?)))
}

/// The open ball of `radius` around `center[0..dim]`.
///
/// # Safety
/// `center` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_domain_ball(center: *const f64, dim: usize, radius: f64, out: *mut *mut WwDomain) -> WwStatus {
    guarded(|| {
        let c = slice(center, dim, "center")?.to_vec();
        put(out, WwDomain(Domain::ball(c, radius).map_err(lib)?))
    })
}

/// The open box `Π (lo_i, hi_i)`.
///
/// # Safety
/// `lo` and `hi` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_domain_box(lo: *const f64, hi: *const f64, dim: usize, out: *mut *mut WwDomain) -> WwStatus {
    guarded(|| {
        let lo = slice(lo, dim, "lo")?.to_vec();
        let hi = slice(hi, dim, "hi")?.to_vec();
        put(out, WwDomain(Domain::cuboid(lo, hi).map_err(lib)?))
    })
}

/// Releases a domain. NULL is ignored.
///
/// # Safety
/// `domain` must come from a `ww_domain_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ww_domain_free(domain: *mut WwDomain) {
    if !domain.is_null() {
        drop(Box::from_raw(domain));
    }
}

/// Spatial dimension, or 0 for NULL.
///
/// # Safety
/// `domain` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ww_domain_dim(domain: *const WwDomain) -> usize {
    domain.as_ref().map_or(0, |d| d.0.dim())
}

/// Distance from interior point `x` to the boundary.
///
/// # Safety
/// `x` must point to `dim` doubles; `domain` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_domain_distance(domain: *const WwDomain, x: *const f64, dim: usize, out: *mut f64) -> WwStatus {
    guarded(|| {
        let d = domain.as_ref().ok_or_else(|| null("domain"))?;
        let p = Point::new(slice(x, dim, "x")?.to_vec()).map_err(lib)?;
        let dist = d.0.distance_to_boundary(&p).map_err(lib)?;
        *out.as_mut().ok_or_else(|| null("out"))? = dist;
        Ok(())
    })
}

/// `f(s, y) = e^{y_1} cos s`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_boundary_paper(out: *mut *mut WwBoundary) -> WwStatus {
    guarded(|| put(out, WwBoundary(BoundaryData::Paper)))
}

/// `f(s, y) = e^{⟨a, y⟩} cos(|a| s)`.
///
/// # Safety
/// `a` must point to `dim` doubles; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_boundary_exp_cos(a: *const f64, dim: usize, out: *mut *mut WwBoundary) -> WwStatus {
    guarded(|| {
        let a = slice(a, dim, "a")?.to_vec();
        if a.is_empty() || a.iter().any(|c| !c.is_finite()) {
            return Err((WwStatus::InvalidArgument, "a must be a non-empty finite vector".into()));
        }
        put(out, WwBoundary(BoundaryData::ExpCos { a }))
    })
}

/// `f ≡ value`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_boundary_constant(value: f64, out: *mut *mut WwBoundary) -> WwStatus {
    guarded(|| {
        if !value.is_finite() {
            return Err((WwStatus::InvalidArgument, "value must be finite".into()));
        }
        put(out, WwBoundary(BoundaryData::Constant { value }))
    })
}

/// `f(s, y) = 1` if `y[axis] > threshold`, else 0.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_boundary_indicator(axis: usize, threshold: f64, out: *mut *mut WwBoundary) -> WwStatus {
    guarded(|| put(out, WwBoundary(BoundaryData::Indicator { axis, threshold })))
}

/// Tabulated data from a JSON file `{bound, s, points, values}`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_boundary_tabulated_json(path: *const c_char, out: *mut *mut WwBoundary) -> WwStatus {
    guarded(|| {
        if path.is_null() {
            return Err(null("path"));
        }
        let path = CStr::from_ptr(path).to_str().map_err(|e| (WwStatus::InvalidArgument, e.to_string()))?;
        let table = TabulatedData::from_json_file(path).map_err(lib)?;
        put(out, WwBoundary(BoundaryData::Tabulated(table)))
    })
}

struct Callback {
    func: extern "C" fn(*mut c_void, f64, *const f64, usize) -> f64,
    user_data: *mut c_void,
}

// The caller guarantees the callback and its data are usable from any thread.
unsafe impl Send for Callback {}
unsafe impl Sync for Callback {}

impl Callback {
    fn call(&self, s: f64, y: &[f64]) -> f64 {
        (self.func)(self.user_data, s, y.as_ptr(), y.len())
    }
}

/// Boundary data evaluated by a C callback with declared bound `|f| ≤ bound`.
/// A value beyond the bound aborts the estimate with `BOUND_VIOLATION`.
///
/// # Safety
/// `func` must be thread-safe and `user_data` must outlive the handle.
#[no_mangle]
pub unsafe extern "C" fn ww_boundary_callback(
    func: WwBoundaryFn,
    user_data: *mut c_void,
    bound: f64,
    out: *mut *mut WwBoundary,
) -> WwStatus {
    guarded(|| {
        let func = func.ok_or_else(|| null("func"))?;
        if !(bound.is_finite() && bound > 0.0) {
            return Err((WwStatus::InvalidArgument, "bound must be positive and finite".into()));
        }
        let cb = Callback { func, user_data };
        let data = BoundaryData::custom("callback", bound, move |s, y| cb.call(s, y));
        put(out, WwBoundary(data))
    })
}

/// Releases boundary data. NULL is ignored.
///
/// # Safety
/// `boundary` must come from a `ww_boundary_*` constructor and not be used again.
#[no_mangle]
pub unsafe extern "C" fn ww_boundary_free(boundary: *mut WwBoundary) {
    if !boundary.is_null() {
        drop(Box::from_raw(boundary));
    }
}

fn to_options(c: &EstimatorConfig) -> WwSamplerOptions {
    WwSamplerOptions {
        em_base_step: c.em.base_step,
        em_boundary_slowdown: c.em.boundary_slowdown,
        em_max_steps: c.em.max_steps,
        em_snap_tolerance: c.em.snap_tolerance,
        wos_epsilon: c.wos.epsilon,
        wos_max_jumps: c.wos.max_jumps,
        quad_radius: c.quadrature.radius,
        quad_nodes: c.quadrature.nodes as u64,
        quad_max_tail: c.quadrature.max_tail,
        n_inner: c.n_inner,
        partitions: c.partitions as u64,
    }
}

fn from_options(o: &WwSamplerOptions) -> Result<EstimatorConfig, (WwStatus, String)> {
    let mut c = EstimatorConfig::for_domain(&Domain::interval(0.0, 1.0).map_err(lib)?);
    c.em.base_step = o.em_base_step;
    c.em.boundary_slowdown = o.em_boundary_slowdown;
    c.em.max_steps = o.em_max_steps;
    c.em.snap_tolerance = o.em_snap_tolerance;
    c.wos.epsilon = o.wos_epsilon;
    c.wos.max_jumps = o.wos_max_jumps;
    c.quadrature.radius = o.quad_radius;
    c.quadrature.nodes = usize::try_from(o.quad_nodes).map_err(|_| (WwStatus::InvalidArgument, "quad_nodes too large".into()))?;
    c.quadrature.max_tail = o.quad_max_tail;
    c.n_inner = o.n_inner;
    c.partitions = usize::try_from(o.partitions).map_err(|_| (WwStatus::InvalidArgument, "partitions too large".into()))?;
    if c.partitions == 0 {
        return Err((WwStatus::InvalidArgument, "partitions must be >= 1".into()));
    }
    c.validate().map_err(lib)?;
    Ok(c)
}

/// Default sampler settings for `domain`.
///
/// # Safety
/// `domain` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_sampler_options_default(domain: *const WwDomain, out: *mut WwSamplerOptions) -> WwStatus {
    guarded(|| {
        let d = domain.as_ref().ok_or_else(|| null("domain"))?;
        *out.as_mut().ok_or_else(|| null("out"))? = to_options(&EstimatorConfig::for_domain(&d.0));
        Ok(())
    })
}

fn write_estimate(out: *mut WwEstimate, e: Estimate) -> Result<(), (WwStatus, String)> {
    // SAFETY: callers pass a pointer checked by the public entry point.
    let out = unsafe { out.as_mut() }.ok_or_else(|| null("out"))?;
    *out = WwEstimate {
        mean: e.mean,
        std_error: e.stderr,
        n: e.n,
        base_seed: e.seed.base_seed,
        stream_id: e.seed.stream_id,
        sample_index: e.seed.sample_index,
    };
    Ok(())
}

unsafe fn resolve_options(domain: &Domain, opts: *const WwSamplerOptions) -> Result<EstimatorConfig, (WwStatus, String)> {
    match opts.as_ref() {
        Some(o) => from_options(o),
        None => Ok(EstimatorConfig::for_domain(domain)),
    }
}

/// Estimates `u(t, x)` with `n` samples.
///
/// `method` is one of `WW_METHOD_*`; `opts` may be NULL for defaults.
///
/// # Safety
/// Handles must be live, `x` must point to `dim` doubles, `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn ww_estimate_u(
    domain: *const WwDomain,
    boundary: *const WwBoundary,
    t: f64,
    x: *const f64,
    dim: usize,
    n: u64,
    method: u32,
    opts: *const WwSamplerOptions,
    base_seed: u64,
    out: *mut WwEstimate,
) -> WwStatus {
    guarded(|| {
        let d = domain.as_ref().ok_or_else(|| null("domain"))?;
        let f = boundary.as_ref().ok_or_else(|| null("boundary"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let method = match method {
            WW_METHOD_DIRECT => Method::Direct,
            WW_METHOD_MIXED => Method::Mixed,
            WW_METHOD_QUADRATURE => Method::Quadrature,
            m => return Err((WwStatus::InvalidArgument, format!("unknown method {m}"))),
        };
        let cfg = resolve_options(&d.0, opts)?;
        let q = QueryPoint::new(t, Point::new(slice(x, dim, "x")?.to_vec()).map_err(lib)?);
        let e = estimate_u(&d.0, &f.0, &q, n, method, &cfg, SeedSpec::from_base(base_seed)).map_err(lib)?;
        write_estimate(out, e)
    })
}

/// Estimates the harmonic lift `v(s, x)`; `backend` is one of `WW_BACKEND_*`.
///
/// # Safety
/// As for [`ww_estimate_u`].
#[no_mangle]
pub unsafe extern "C" fn ww_estimate_v(
    domain: *const WwDomain,
    boundary: *const WwBoundary,
    s: f64,
    x: *const f64,
    dim: usize,
    n: u64,
    backend: u32,
    opts: *const WwSamplerOptions,
    base_seed: u64,
    out: *mut WwEstimate,
) -> WwStatus {
    guarded(|| {
        let d = domain.as_ref().ok_or_else(|| null("domain"))?;
        let f = boundary.as_ref().ok_or_else(|| null("boundary"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let backend = match backend {
            WW_BACKEND_EM => Backend::Em,
            WW_BACKEND_WOS => Backend::Wos,
            b => return Err((WwStatus::InvalidArgument, format!("unknown backend {b}"))),
        };
        let cfg = resolve_options(&d.0, opts)?;
        let x = Point::new(slice(x, dim, "x")?.to_vec()).map_err(lib)?;
        let e = estimate_v(&d.0, &f.0, s, &x, n, backend, &cfg, SeedSpec::from_base(base_seed)).map_err(lib)?;
        write_estimate(out, e)
    })
}
