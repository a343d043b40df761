//! C ABI for percolab.
//!
//! Graphs are opaque handles created by `percolab_graph_*` and released with
//! [`percolab_graph_free`]. Every fallible call returns a [`PercolabStatus`];
//! on failure [`percolab_last_error`] describes the most recent error on the
//! calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use percolab::analytic;
use percolab::estimator::{self, EstimateWithCI, McParams, PcSearchParams, Precision};
use percolab::{BitConfig, ClosureEngine, Error, GraphTopology, LatticeKind};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PercolabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    SizeCap = 3,
    Degenerate = 4,
    RetryCapExhausted = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PercolabLattice {
    Torus = 0,
    Box = 1,
    Cycle = 2,
}

/// Opaque graph handle.
pub struct PercolabGraph {
    inner: GraphTopology,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PercolabEstimate {
    pub mean: f64,
    pub ci_half_width: f64,
    pub z: f64,
    pub trials: u64,
    pub seed: u64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct PercolabPcResult {
    pub p_c_hat: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub total_trials: u64,
    pub steps: u32,
    pub degraded: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(err: &Error) -> PercolabStatus {
    match err {
        Error::SizeCap { .. } => PercolabStatus::SizeCap,
        Error::Degenerate(_) => PercolabStatus::Degenerate,
        Error::RetryCapExhausted { .. } => PercolabStatus::RetryCapExhausted,
        _ => PercolabStatus::InvalidArgument,
    }
}

struct Failure(PercolabStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(PercolabStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PercolabStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            PercolabStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PercolabStatus::Panic
        }
    }
}

unsafe fn graph_ref<'a>(g: *const PercolabGraph) -> Result<&'a GraphTopology, Failure> {
    // SAFETY: the caller passes a handle from percolab_graph_* that has not been freed.
    unsafe { g.as_ref() }.map(|g| &g.inner).ok_or_else(|| null("graph"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    // SAFETY: non-null and, by contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

fn publish(out: *mut *mut PercolabGraph, g: GraphTopology) -> Result<(), Failure> {
    let handle = Box::into_raw(Box::new(PercolabGraph { inner: g }));
    // SAFETY: `out` was checked non-null by the caller of `publish`.
    unsafe { out.write(handle) };
    Ok(())
}

/// NUL-terminated version string with static lifetime.
#[no_mangle]
pub extern "C" fn percolab_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(s) => s,
        Err(_) => panic!("version contains a nul byte"),
    };
    VERSION.as_ptr()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn percolab_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn percolab_graph_lattice(
    kind: PercolabLattice,
    n: usize,
    d: usize,
    out: *mut *mut PercolabGraph,
) -> PercolabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let kind = match kind {
            PercolabLattice::Torus => LatticeKind::Torus,
            PercolabLattice::Box => LatticeKind::Box,
            PercolabLattice::Cycle => LatticeKind::Cycle,
        };
        publish(out, percolab::build_lattice(kind, n, d)?)
    })
}

/// # Safety
/// `out` must be valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn percolab_graph_random_regular(
    n: usize,
    d: usize,
    seed: u64,
    out: *mut *mut PercolabGraph,
) -> PercolabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        publish(out, percolab::build_random_regular(n, d, seed)?)
    })
}

/// # Safety
/// `g` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn percolab_graph_free(g: *mut PercolabGraph) {
    if !g.is_null() {
        // SAFETY: handles are created by Box::into_raw in `publish`.
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Number of vertices, or 0 for a NULL handle.
///
/// # Safety
/// `g` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn percolab_graph_vertex_count(g: *const PercolabGraph) -> usize {
    // SAFETY: forwarded caller contract.
    unsafe { g.as_ref() }.map_or(0, |g| g.inner.vertex_count())
}

/// # Safety
/// `g` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn percolab_graph_degree(g: *const PercolabGraph, v: usize, out: *mut usize) -> PercolabStatus {
    guard(|| {
        let g = unsafe { graph_ref(g)? };
        if v >= g.vertex_count() {
            return Err(Failure(
                PercolabStatus::InvalidArgument,
                format!("vertex {v} out of range for {} vertices", g.vertex_count()),
            ));
        }
        unsafe { write_out(out, g.degree(v)) }
    })
}

/// Runs the `k`-neighbour closure from `init` (`len` bytes, nonzero meaning
/// occupied). When `final_occupied` is non-NULL it receives `len` bytes of
/// 0/1 flags.
///
/// # Safety
/// `init` must point to `len` readable bytes, `final_occupied` to `len`
/// writable bytes or be NULL, and `complete` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn percolab_closure(
    g: *const PercolabGraph,
    k: usize,
    init: *const u8,
    len: usize,
    final_occupied: *mut u8,
    complete: *mut bool,
) -> PercolabStatus {
    guard(|| {
        let g = unsafe { graph_ref(g)? };
        if init.is_null() {
            return Err(null("init"));
        }
        // SAFETY: caller guarantees `len` readable bytes.
        let bytes = unsafe { std::slice::from_raw_parts(init, len) };
        let flags: Vec<bool> = bytes.iter().map(|&b| b != 0).collect();
        let result = ClosureEngine::new().closure(g, k, &BitConfig::from_bools(&flags))?;
        if !final_occupied.is_null() {
            // SAFETY: caller guarantees `len` writable bytes.
            let dst = unsafe { std::slice::from_raw_parts_mut(final_occupied, len) };
            for (v, slot) in dst.iter_mut().enumerate() {
                *slot = result.occupied[v] as u8;
            }
        }
        unsafe { write_out(complete, result.complete) }
    })
}

fn to_c(e: &EstimateWithCI) -> PercolabEstimate {
    PercolabEstimate {
        mean: e.mean,
        ci_half_width: e.ci_half_width,
        z: e.z,
        trials: e.trials,
        seed: e.seed,
    }
}

/// # Safety
/// `g` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn percolab_estimate_success(
    g: *const PercolabGraph,
    k: usize,
    p: f64,
    trials: u64,
    seed: u64,
    out: *mut PercolabEstimate,
) -> PercolabStatus {
    guard(|| {
        let g = unsafe { graph_ref(g)? };
        let e = estimator::estimate_success(g, k, p, &McParams::new(trials, seed))?;
        unsafe { write_out(out, to_c(&e)) }
    })
}

/// # Safety
/// `g` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn percolab_estimate_noise_corr(
    g: *const PercolabGraph,
    k: usize,
    p: f64,
    eps: f64,
    trials: u64,
    seed: u64,
    out: *mut PercolabEstimate,
) -> PercolabStatus {
    guard(|| {
        let g = unsafe { graph_ref(g)? };
        let e = estimator::estimate_noise_corr(g, k, p, eps, &McParams::new(trials, seed))?;
        unsafe { write_out(out, to_c(&e)) }
    })
}

/// # Safety
/// `g` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn percolab_estimate_influence(
    g: *const PercolabGraph,
    k: usize,
    p: f64,
    vertex: usize,
    trials: u64,
    seed: u64,
    out: *mut PercolabEstimate,
) -> PercolabStatus {
    guard(|| {
        let g = unsafe { graph_ref(g)? };
        let e = estimator::estimate_influence(g, k, p, vertex, &McParams::new(trials, seed))?;
        unsafe { write_out(out, to_c(&e)) }
    })
}

/// Critical density at `target` with absolute bracket width `precision`.
///
/// # Safety
/// `g` must be a live handle and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn percolab_estimate_pc(
    g: *const PercolabGraph,
    k: usize,
    target: f64,
    precision: f64,
    trials_per_step: u64,
    seed: u64,
    out: *mut PercolabPcResult,
) -> PercolabStatus {
    guard(|| {
        let g = unsafe { graph_ref(g)? };
        let params = PcSearchParams::new(target, Precision::Absolute(precision), trials_per_step, seed);
        let r = estimator::estimate_pc(g, k, &params)?;
        unsafe {
            write_out(
                out,
                PercolabPcResult {
                    p_c_hat: r.p_c_hat,
                    p_lo: r.p_lo,
                    p_hi: r.p_hi,
                    total_trials: r.total_trials,
                    steps: r.steps,
                    degraded: r.degraded,
                },
            )
        }
    })
}

/// Tree critical density. `y_star` receives NaN when the infimum is
/// attained only in the limit `y -> 0`.
///
/// # Safety
/// `y_star` and `p_star` must be valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn percolab_p_star(d: usize, k: usize, y_star: *mut f64, p_star: *mut f64) -> PercolabStatus {
    guard(|| {
        let c = analytic::p_star(d, k)?;
        unsafe {
            write_out(y_star, c.y_star.unwrap_or(f64::NAN))?;
            write_out(p_star, c.p_star)
        }
    })
}
