//! C ABI over `scfdma_nbi`.
//!
//! Every fallible call returns an [`NbiStatus`]; on failure the message is
//! available from [`nbi_last_error_message`] on the same thread. Objects are
//! opaque handles created by `*_new`/`*_solve`/`*_run` style calls and
//! released with the matching `*_free`. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use num_complex::Complex64;
use scfdma_nbi::gini::gini_index;
use scfdma_nbi::harness::{
    emit_csv, emit_success_csv, parse_config, parse_ebn0_grid, preset, run_scenario, write_csv, ScenarioConfig,
    ScenarioOutput,
};
use scfdma_nbi::linalg::CMat;
use scfdma_nbi::sabmp::{default_t_max, greedy_search, SabmpParams, SparseEstimate};
use scfdma_nbi::sparsify::{haar_forward, haar_inverse};
use scfdma_nbi::Error;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NbiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Dimension = 3,
    Numeric = 4,
    Config = 5,
    Io = 6,
    Panic = 7,
}

/// Complex sample, layout-compatible with `double _Complex`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NbiComplex {
    pub re: f64,
    pub im: f64,
}

impl From<NbiComplex> for Complex64 {
    fn from(c: NbiComplex) -> Self {
        Complex64::new(c.re, c.im)
    }
}

impl From<Complex64> for NbiComplex {
    fn from(c: Complex64) -> Self {
        NbiComplex { re: c.re, im: c.im }
    }
}

/// One BER point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NbiBerRecord {
    pub ebn0_db: f64,
    pub trials: u64,
    pub bit_errors: u64,
    pub total_bits: u64,
    pub ber: f64,
    pub wall_time_ms: u64,
}

/// One reliable-carrier success-rate point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NbiSuccessRecord {
    pub ebn0_db: f64,
    pub trials: u64,
    pub correct: u64,
    pub selected: u64,
    pub success_rate: f64,
}

/// Output of [`nbi_sabmp_solve`].
pub struct NbiEstimate {
    inner: SparseEstimate,
}

/// A configured experiment.
pub struct NbiScenario {
    inner: ScenarioConfig,
}

/// Records produced by [`nbi_scenario_run`].
pub struct NbiResults {
    inner: ScenarioOutput,
    labels: Vec<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(NbiStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Config { .. } => NbiStatus::Config,
            Error::Dimension { .. } | Error::BitLength { .. } => NbiStatus::Dimension,
            Error::SingularChannel { .. }
            | Error::RankDeficient { .. }
            | Error::Degenerate { .. }
            | Error::ZeroVector => NbiStatus::Numeric,
            Error::Io(_) => NbiStatus::Io,
            _ => NbiStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(NbiStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(NbiStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> NbiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            NbiStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("internal panic: {msg}"));
            NbiStatus::Panic
        }
    }
}

/// Borrow `len` elements; a null pointer is accepted only for `len == 0`.
unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        Ok(&[])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts(p, len))
    }
}

unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, what: &str) -> Result<&'a mut [T], Fail> {
    if len == 0 {
        Ok(&mut [])
    } else if p.is_null() {
        Err(null(what))
    } else {
        Ok(std::slice::from_raw_parts_mut(p, len))
    }
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn reference<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn string(p: *const c_char, what: &str) -> Result<String, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(str::to_owned)
        .map_err(|_| invalid(format!("{what} is not valid UTF-8")))
}

/// Message for the most recent failure on this thread; empty after a
/// success. The pointer stays valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn nbi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nbi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Solve `x = psi s + z` for sparse `s`.
///
/// `psi` is `m x n`, row-major. `lambda` holds either one broadcast value or
/// `n` per-index values. A `t_max` of zero selects the two-sigma default.
///
/// # Safety
/// Pointers must be valid for the stated lengths; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_sabmp_solve(
    x: *const NbiComplex,
    m: usize,
    psi: *const NbiComplex,
    n: usize,
    lambda: *const f64,
    lambda_len: usize,
    noise_var: f64,
    t_max: usize,
    out: *mut *mut NbiEstimate,
) -> NbiStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        if m == 0 || n == 0 {
            return Err(invalid("m and n must be positive"));
        }
        let cells = m.checked_mul(n).ok_or_else(|| invalid("m * n overflows"))?;
        let x: Vec<Complex64> = slice(x, m, "x")?.iter().map(|&c| c.into()).collect();
        let psi = slice(psi, cells, "psi")?;
        let psi = CMat::from_fn(m, n, |r, c| psi[r * n + c].into());
        let lambda = slice(lambda, lambda_len, "lambda")?.to_vec();
        if lambda.len() != 1 && lambda.len() != n {
            return Err(Fail(
                NbiStatus::Dimension,
                format!("lambda has {} entries, expected 1 or {n}", lambda.len()),
            ));
        }
        let t_max = if t_max == 0 {
            default_t_max(n, lambda.iter().sum::<f64>() / lambda.len() as f64, m)
        } else {
            t_max
        };
        let params = SabmpParams {
            lambda,
            noise_var,
            t_max,
            normalize_posteriors: true,
        };
        let inner = greedy_search(&x, &psi, &params)?;
        *out = Box::into_raw(Box::new(NbiEstimate { inner }));
        Ok(())
    })
}

/// Length of the estimate (the `n` passed to the solver), or 0 for null.
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nbi_estimate_len(est: *const NbiEstimate) -> usize {
    est.as_ref().map_or(0, |e| e.inner.n())
}

/// Copy the AMMSE estimate into `values` (capacity `len`, at least the
/// estimate length).
///
/// # Safety
/// `est` must be a live handle and `values` writable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn nbi_estimate_values(est: *const NbiEstimate, values: *mut NbiComplex, len: usize) -> NbiStatus {
    guard(|| {
        let est = &reference(est, "estimate")?.inner;
        if len < est.n() {
            return Err(Fail(NbiStatus::Dimension, format!("buffer holds {len}, need {}", est.n())));
        }
        let dst = slice_mut(values, len, "values")?;
        for (d, s) in dst.iter_mut().zip(&est.estimate) {
            *d = (*s).into();
        }
        Ok(())
    })
}

/// Number of supports in the dominant chain.
///
/// # Safety
/// `est` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nbi_estimate_support_count(est: *const NbiEstimate) -> usize {
    est.as_ref().map_or(0, |e| e.inner.dominant.len())
}

/// Describe the `k`-th dominant support. Up to `cap` indices are written to
/// `indices`; `size` receives the full support size. `weight` and `nu` may
/// be null.
///
/// # Safety
/// `est` must be a live handle; `indices` writable for `cap` elements;
/// `size` writable; `weight` and `nu` null or writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_estimate_support(
    est: *const NbiEstimate,
    k: usize,
    indices: *mut usize,
    cap: usize,
    size: *mut usize,
    weight: *mut f64,
    nu: *mut f64,
) -> NbiStatus {
    guard(|| {
        let est = &reference(est, "estimate")?.inner;
        let d = est
            .dominant
            .get(k)
            .ok_or_else(|| invalid(format!("support {k} of {}", est.dominant.len())))?;
        *out_ptr(size, "size")? = d.support.len();
        let dst = slice_mut(indices, cap, "indices")?;
        for (o, &i) in dst.iter_mut().zip(&d.support) {
            *o = i;
        }
        if let Some(w) = weight.as_mut() {
            *w = d.weight;
        }
        if let Some(v) = nu.as_mut() {
            *v = d.nu;
        }
        Ok(())
    })
}

/// Trace of the solver's error covariance.
///
/// # Safety
/// `est` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_estimate_error_trace(est: *const NbiEstimate, out: *mut f64) -> NbiStatus {
    guard(|| {
        let est = &reference(est, "estimate")?.inner;
        *out_ptr(out, "out")? = est.covariance.trace();
        Ok(())
    })
}

/// # Safety
/// `est` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nbi_estimate_free(est: *mut NbiEstimate) {
    if !est.is_null() {
        drop(Box::from_raw(est));
    }
}

/// Gini index of the magnitudes of `v`.
///
/// # Safety
/// `v` must be readable for `n` elements and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_gini_index(v: *const NbiComplex, n: usize, out: *mut f64) -> NbiStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        if n == 0 {
            return Err(invalid("empty vector"));
        }
        let v: Vec<Complex64> = slice(v, n, "v")?.iter().map(|&c| c.into()).collect();
        *out = gini_index(&v)?;
        Ok(())
    })
}

unsafe fn haar_in_place(v: *mut NbiComplex, n: usize, forward: bool) -> NbiStatus {
    guard(|| {
        if !n.is_power_of_two() {
            return Err(invalid(format!("length {n} is not a power of two")));
        }
        let buf = slice_mut(v, n, "v")?;
        let mut c: Vec<Complex64> = buf.iter().map(|&x| x.into()).collect();
        if forward {
            haar_forward(&mut c);
        } else {
            haar_inverse(&mut c);
        }
        for (d, s) in buf.iter_mut().zip(c) {
            *d = s.into();
        }
        Ok(())
    })
}

/// Orthonormal Haar transform in place; `n` must be a power of two.
///
/// # Safety
/// `v` must be valid for reads and writes of `n` elements.
#[no_mangle]
pub unsafe extern "C" fn nbi_haar_forward(v: *mut NbiComplex, n: usize) -> NbiStatus {
    haar_in_place(v, n, true)
}

/// Inverse of [`nbi_haar_forward`].
///
/// # Safety
/// `v` must be valid for reads and writes of `n` elements.
#[no_mangle]
pub unsafe extern "C" fn nbi_haar_inverse(v: *mut NbiComplex, n: usize) -> NbiStatus {
    haar_in_place(v, n, false)
}

fn boxed_scenario(cfg: ScenarioConfig, out: &mut *mut NbiScenario) {
    *out = Box::into_raw(Box::new(NbiScenario { inner: cfg }));
}

/// Built-in preset at `n` subcarriers (0 selects 128).
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_scenario_preset(name: *const c_char, n: usize, out: *mut *mut NbiScenario) -> NbiStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let name = string(name, "name")?;
        boxed_scenario(preset(&name, if n == 0 { 128 } else { n })?, out);
        Ok(())
    })
}

/// Scenario file; `n` of 0 keeps the file's (or the default) size.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_scenario_from_file(path: *const c_char, n: usize, out: *mut *mut NbiScenario) -> NbiStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let path = string(path, "path")?;
        let text = std::fs::read_to_string(&path).map_err(|e| Fail(NbiStatus::Io, format!("{path}: {e}")))?;
        let mut cfg = parse_config(&text, if n == 0 { 128 } else { n })?;
        if n != 0 {
            cfg = cfg.with_n(n);
        }
        boxed_scenario(cfg, out);
        Ok(())
    })
}

unsafe fn with_scenario(s: *mut NbiScenario, f: impl FnOnce(&mut ScenarioConfig) -> Result<(), Fail>) -> NbiStatus {
    guard(|| {
        let s = s.as_mut().ok_or_else(|| null("scenario"))?;
        let mut next = s.inner.clone();
        f(&mut next)?;
        next.validate()?;
        s.inner = next;
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nbi_scenario_set_trials(s: *mut NbiScenario, trials: usize) -> NbiStatus {
    with_scenario(s, |c| {
        c.trials = trials;
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nbi_scenario_set_seed(s: *mut NbiScenario, seed: u64) -> NbiStatus {
    with_scenario(s, |c| {
        c.seed = seed;
        Ok(())
    })
}

/// Replace the Eb/N0 grid with `len` values in dB.
///
/// # Safety
/// `s` must be a live handle and `ebn0_db` readable for `len` elements.
#[no_mangle]
pub unsafe extern "C" fn nbi_scenario_set_ebn0(s: *mut NbiScenario, ebn0_db: *const f64, len: usize) -> NbiStatus {
    with_scenario(s, |c| {
        c.ebn0_db = slice(ebn0_db, len, "ebn0_db")?.to_vec();
        Ok(())
    })
}

/// Replace the Eb/N0 grid from `start:stop:step` or a comma list.
///
/// # Safety
/// `s` must be a live handle and `grid` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nbi_scenario_set_ebn0_grid(s: *mut NbiScenario, grid: *const c_char) -> NbiStatus {
    with_scenario(s, |c| {
        c.ebn0_db = parse_ebn0_grid(&string(grid, "grid")?)?;
        Ok(())
    })
}

/// # Safety
/// `s` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_scenario_run(s: *const NbiScenario, out: *mut *mut NbiResults) -> NbiStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let s = reference(s, "scenario")?;
        let inner = run_scenario(&s.inner)?;
        let labels = inner
            .records
            .iter()
            .map(|r| r.scenario.as_str())
            .chain(inner.success.iter().map(|r| r.scenario.as_str()))
            .map(|l| CString::new(l.replace('\0', " ")).unwrap_or_default())
            .collect();
        *out = Box::into_raw(Box::new(NbiResults { inner, labels }));
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nbi_scenario_free(s: *mut NbiScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of BER records.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nbi_results_count(r: *const NbiResults) -> usize {
    r.as_ref().map_or(0, |r| r.inner.records.len())
}

/// Number of success-rate records (nonzero only for success-rate scenarios).
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nbi_results_success_count(r: *const NbiResults) -> usize {
    r.as_ref().map_or(0, |r| r.inner.success.len())
}

/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_results_get(r: *const NbiResults, index: usize, out: *mut NbiBerRecord) -> NbiStatus {
    guard(|| {
        let r = &reference(r, "results")?.inner;
        let rec = r
            .records
            .get(index)
            .ok_or_else(|| invalid(format!("record {index} of {}", r.records.len())))?;
        *out_ptr(out, "out")? = NbiBerRecord {
            ebn0_db: rec.ebn0_db,
            trials: rec.trials,
            bit_errors: rec.bit_errors,
            total_bits: rec.total_bits,
            ber: rec.ber,
            wall_time_ms: rec.wall_time_ms,
        };
        Ok(())
    })
}

/// # Safety
/// `r` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nbi_results_get_success(
    r: *const NbiResults,
    index: usize,
    out: *mut NbiSuccessRecord,
) -> NbiStatus {
    guard(|| {
        let r = &reference(r, "results")?.inner;
        let rec = r
            .success
            .get(index)
            .ok_or_else(|| invalid(format!("success record {index} of {}", r.success.len())))?;
        *out_ptr(out, "out")? = NbiSuccessRecord {
            ebn0_db: rec.ebn0_db,
            trials: rec.trials,
            correct: rec.correct,
            selected: rec.selected,
            success_rate: rec.success_rate,
        };
        Ok(())
    })
}

/// `scenario/curve` label of a record, owned by the results handle; BER
/// records come first, then success records. Null when out of range.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nbi_results_label(r: *const NbiResults, index: usize) -> *const c_char {
    r.as_ref()
        .and_then(|r| r.labels.get(index))
        .map_or(ptr::null(), |l| l.as_ptr())
}

/// Write the records as CSV. With `deterministic`, wall times are zero.
///
/// # Safety
/// `r` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn nbi_results_write_csv(r: *const NbiResults, path: *const c_char, deterministic: bool) -> NbiStatus {
    guard(|| {
        let r = &reference(r, "results")?.inner;
        let path = string(path, "path")?;
        let text = if r.success.is_empty() {
            emit_csv(&r.records, deterministic)
        } else {
            emit_success_csv(&r.success, deterministic)
        };
        write_csv(&text, Path::new(&path))?;
        Ok(())
    })
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nbi_results_free(r: *mut NbiResults) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
