//! C ABI over `phdim`.
//!
//! Objects are opaque handles created by `phdim_*_new`/`_load`/`_fit_*`
//! functions and released with the matching `_free`. Every fallible call
//! returns a [`PhdimStatus`]; on failure a message is available from
//! [`phdim_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use phdim::detector::DecisionRule;
use phdim::{DetectorModel, DimensionEstimate, Error, Label, PhdParams, PointCloud};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhdimStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    SizeError = 3,
    ParamError = 4,
    TooFewPoints = 5,
    UnstableEstimate = 6,
    DegenerateCloud = 7,
    DataError = 8,
    FormatError = 9,
    IoError = 10,
    Panic = 11,
}

impl From<&Error> for PhdimStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Size(_) => PhdimStatus::SizeError,
            Error::Param(_) => PhdimStatus::ParamError,
            Error::TooFewPoints { .. } => PhdimStatus::TooFewPoints,
            Error::UnstableEstimate(_) => PhdimStatus::UnstableEstimate,
            Error::DegenerateCloud(_) => PhdimStatus::DegenerateCloud,
            Error::Data(_) => PhdimStatus::DataError,
            Error::Io { .. } => PhdimStatus::IoError,
            Error::BadMagic { .. }
            | Error::BadHeader { .. }
            | Error::TruncatedFile { .. }
            | Error::TrailingBytes { .. }
            | Error::NonFiniteValue { .. }
            | Error::Parse { .. } => PhdimStatus::FormatError,
        }
    }
}

/// PHD estimator parameters. Obtain defaults from [`phdim_phd_params_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PhdimPhdParams {
    pub alpha: f64,
    pub k_grid: usize,
    pub j_samples: usize,
    pub rounds: usize,
    pub min_subsample: usize,
    pub seed: u64,
    /// Nonzero to sample from lexicographically sorted points.
    pub canonical_order: u8,
}

impl From<&PhdimPhdParams> for PhdParams {
    fn from(p: &PhdimPhdParams) -> Self {
        PhdParams {
            alpha: p.alpha,
            k_grid: p.k_grid,
            j_samples: p.j_samples,
            rounds: p.rounds,
            min_subsample: p.min_subsample,
            seed: p.seed,
            canonical_order: p.canonical_order != 0,
        }
    }
}

/// Opaque point cloud.
pub struct PhdimCloud(PointCloud);

/// Opaque PHD result.
pub struct PhdimEstimate(DimensionEstimate);

/// Opaque detector model.
pub struct PhdimModel(DetectorModel);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: PhdimStatus, msg: impl Into<String>) -> PhdimStatus {
    set_error(msg.into());
    status
}

fn guard<F>(f: F) -> PhdimStatus
where
    F: FnOnce() -> Result<(), PhdimStatus>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PhdimStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(PhdimStatus::Panic, "internal panic"),
    }
}

fn lib_err(e: Error) -> PhdimStatus {
    let status = PhdimStatus::from(&e);
    fail(status, e.to_string())
}

unsafe fn nonnull<'a, T>(p: *const T, what: &str) -> Result<&'a T, PhdimStatus> {
    p.as_ref().ok_or_else(|| fail(PhdimStatus::NullPointer, format!("{what} is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, PhdimStatus> {
    p.as_mut().ok_or_else(|| fail(PhdimStatus::NullPointer, format!("{what} is null")))
}

unsafe fn floats<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], PhdimStatus> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(fail(PhdimStatus::NullPointer, format!("{what} is null")));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, PhdimStatus> {
    if p.is_null() {
        return Err(fail(PhdimStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(PhdimStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn phdim_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn phdim_status_name(status: PhdimStatus) -> *const c_char {
    let s: &'static CStr = match status {
        PhdimStatus::Ok => c"Ok",
        PhdimStatus::NullPointer => c"NullPointer",
        PhdimStatus::InvalidUtf8 => c"InvalidUtf8",
        PhdimStatus::SizeError => c"SizeError",
        PhdimStatus::ParamError => c"ParamError",
        PhdimStatus::TooFewPoints => c"TooFewPoints",
        PhdimStatus::UnstableEstimate => c"UnstableEstimate",
        PhdimStatus::DegenerateCloud => c"DegenerateCloud",
        PhdimStatus::DataError => c"DataError",
        PhdimStatus::FormatError => c"FormatError",
        PhdimStatus::IoError => c"IoError",
        PhdimStatus::Panic => c"Panic",
    };
    s.as_ptr()
}

#[no_mangle]
pub extern "C" fn phdim_phd_params_default() -> PhdimPhdParams {
    let p = PhdParams::default();
    PhdimPhdParams {
        alpha: p.alpha,
        k_grid: p.k_grid,
        j_samples: p.j_samples,
        rounds: p.rounds,
        min_subsample: p.min_subsample,
        seed: p.seed,
        canonical_order: 0,
    }
}

/// Copies `n_points * dim` row-major coordinates into a new cloud.
///
/// # Safety
/// `coords` must point to `n_points * dim` doubles; `id` must be a
/// NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_cloud_new(
    coords: *const f64,
    n_points: usize,
    dim: usize,
    id: *const c_char,
    out: *mut *mut PhdimCloud,
) -> PhdimStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let id = str_arg(id, "id")?;
        let len = n_points
            .checked_mul(dim)
            .ok_or_else(|| fail(PhdimStatus::SizeError, "n_points * dim overflows"))?;
        let data = floats(coords, len, "coords")?;
        let cloud = PointCloud::from_flat(id, dim, data.to_vec()).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PhdimCloud(cloud)));
        Ok(())
    })
}

/// Reads an EMB1 file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_cloud_read_emb(path: *const c_char, out: *mut *mut PhdimCloud) -> PhdimStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let path = str_arg(path, "path")?;
        let cloud = phdim::io::read_embeddings(Path::new(path)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PhdimCloud(cloud)));
        Ok(())
    })
}

/// Writes a cloud as EMB1 (coordinates narrowed to float).
///
/// # Safety
/// `cloud` must come from this library; `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn phdim_cloud_write_emb(cloud: *const PhdimCloud, path: *const c_char) -> PhdimStatus {
    guard(|| {
        let cloud = nonnull(cloud, "cloud")?;
        let path = str_arg(path, "path")?;
        phdim::io::write_embeddings(Path::new(path), &cloud.0).map_err(lib_err)
    })
}

/// # Safety
/// `cloud` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn phdim_cloud_len(cloud: *const PhdimCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.0.len())
}

/// # Safety
/// `cloud` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn phdim_cloud_dim(cloud: *const PhdimCloud) -> usize {
    cloud.as_ref().map_or(0, |c| c.0.dim())
}

/// # Safety
/// `cloud` must come from this library or be NULL; it must not be used after.
#[no_mangle]
pub unsafe extern "C" fn phdim_cloud_free(cloud: *mut PhdimCloud) {
    if !cloud.is_null() {
        drop(Box::from_raw(cloud));
    }
}

/// Total weight of the Euclidean minimum spanning tree.
///
/// # Safety
/// `cloud` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_mst_total_weight(cloud: *const PhdimCloud, out: *mut f64) -> PhdimStatus {
    guard(|| {
        let cloud = nonnull(cloud, "cloud")?;
        let out = out_ptr(out, "out")?;
        *out = phdim::euclidean_mst(&cloud.0).map_err(lib_err)?.total_weight;
        Ok(())
    })
}

/// Sum of MST edge lengths raised to `alpha`.
///
/// # Safety
/// `cloud` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_persistence_score(cloud: *const PhdimCloud, alpha: f64, out: *mut f64) -> PhdimStatus {
    guard(|| {
        let cloud = nonnull(cloud, "cloud")?;
        let out = out_ptr(out, "out")?;
        let mst = phdim::euclidean_mst(&cloud.0).map_err(lib_err)?;
        *out = phdim::persistence_score(&mst, alpha).map_err(lib_err)?;
        Ok(())
    })
}

/// PHD estimate. `params` may be NULL for defaults.
///
/// # Safety
/// `cloud` must come from this library; `params` NULL or valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_phd_estimate(
    cloud: *const PhdimCloud,
    params: *const PhdimPhdParams,
    out: *mut *mut PhdimEstimate,
) -> PhdimStatus {
    guard(|| {
        let cloud = nonnull(cloud, "cloud")?;
        let out = out_ptr(out, "out")?;
        let params = params.as_ref().map(PhdParams::from).unwrap_or_default();
        let est = phdim::phd_estimate(&cloud.0, &params).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PhdimEstimate(est)));
        Ok(())
    })
}

/// # Safety
/// `est` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn phdim_estimate_value(est: *const PhdimEstimate) -> f64 {
    est.as_ref().map_or(f64::NAN, |e| e.0.value)
}

/// Number of per-round slopes.
///
/// # Safety
/// `est` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn phdim_estimate_slope_count(est: *const PhdimEstimate) -> usize {
    est.as_ref().map_or(0, |e| e.0.slopes.len())
}

/// Copies up to `len` slopes into `buf`; returns the number copied.
///
/// # Safety
/// `est` must come from this library or be NULL; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn phdim_estimate_slopes(est: *const PhdimEstimate, buf: *mut f64, len: usize) -> usize {
    let Some(est) = est.as_ref() else { return 0 };
    if buf.is_null() {
        return 0;
    }
    let n = len.min(est.0.slopes.len());
    ptr::copy_nonoverlapping(est.0.slopes.as_ptr(), buf, n);
    n
}

/// # Safety
/// `est` must come from this library or be NULL; it must not be used after.
#[no_mangle]
pub unsafe extern "C" fn phdim_estimate_free(est: *mut PhdimEstimate) {
    if !est.is_null() {
        drop(Box::from_raw(est));
    }
}

/// Levina–Bickel MLE dimension with `k_neighbors` neighbours.
///
/// # Safety
/// `cloud` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_mle_estimate(cloud: *const PhdimCloud, k_neighbors: usize, out: *mut f64) -> PhdimStatus {
    guard(|| {
        let cloud = nonnull(cloud, "cloud")?;
        let out = out_ptr(out, "out")?;
        *out = phdim::mle_estimate(&cloud.0, k_neighbors).map_err(lib_err)?;
        Ok(())
    })
}

/// ROC-AUC with generated texts as the positive class at low scores.
///
/// # Safety
/// The score pointers must hold the given number of doubles; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_roc_auc(
    human: *const f64,
    n_human: usize,
    generated: *const f64,
    n_generated: usize,
    out: *mut f64,
) -> PhdimStatus {
    guard(|| {
        let h = floats(human, n_human, "human")?;
        let g = floats(generated, n_generated, "generated")?;
        let out = out_ptr(out, "out")?;
        *out = phdim::roc_auc(h, g).map_err(lib_err)?;
        Ok(())
    })
}

/// Threshold flagging at most `target_fpr` of the human scores.
///
/// # Safety
/// `human` must hold `n_human` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_model_fit_fpr(
    human: *const f64,
    n_human: usize,
    target_fpr: f64,
    out: *mut *mut PhdimModel,
) -> PhdimStatus {
    guard(|| {
        let h = floats(human, n_human, "human")?;
        let out = out_ptr(out, "out")?;
        let m = phdim::fit_threshold_at_fpr(h, target_fpr).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PhdimModel(m)));
        Ok(())
    })
}

/// Equal-error-rate threshold; writes the achieved EER to `eer` if non-NULL.
///
/// # Safety
/// Score pointers must hold the given counts; `out` writable; `eer` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_model_fit_eer(
    human: *const f64,
    n_human: usize,
    generated: *const f64,
    n_generated: usize,
    out: *mut *mut PhdimModel,
    eer: *mut f64,
) -> PhdimStatus {
    guard(|| {
        let h = floats(human, n_human, "human")?;
        let g = floats(generated, n_generated, "generated")?;
        let out = out_ptr(out, "out")?;
        let (m, e) = phdim::fit_threshold_eer(h, g).map_err(lib_err)?;
        if let Some(eer) = eer.as_mut() {
            *eer = e;
        }
        *out = Box::into_raw(Box::new(PhdimModel(m)));
        Ok(())
    })
}

/// Loads a model document written by `phdim fit`.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_model_load(path: *const c_char, out: *mut *mut PhdimModel) -> PhdimStatus {
    guard(|| {
        let path = str_arg(path, "path")?;
        let out = out_ptr(out, "out")?;
        let m = phdim::cli::read_model(Path::new(path)).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(PhdimModel(m)));
        Ok(())
    })
}

/// Decision threshold of a threshold model; NaN for logistic models.
///
/// # Safety
/// `model` must come from this library or be NULL.
#[no_mangle]
pub unsafe extern "C" fn phdim_model_threshold(model: *const PhdimModel) -> f64 {
    match model.as_ref().map(|m| m.0.rule) {
        Some(DecisionRule::Threshold { threshold }) => threshold,
        _ => f64::NAN,
    }
}

/// Writes 1 to `is_generated` if the score is classified as generated, else 0.
///
/// # Safety
/// `model` must come from this library; `is_generated` must be writable.
#[no_mangle]
pub unsafe extern "C" fn phdim_model_classify(
    model: *const PhdimModel,
    score: f64,
    is_generated: *mut i32,
) -> PhdimStatus {
    guard(|| {
        let model = nonnull(model, "model")?;
        let out = out_ptr(is_generated, "is_generated")?;
        *out = i32::from(phdim::classify(&model.0, score) == Label::Generated);
        Ok(())
    })
}

/// # Safety
/// `model` must come from this library or be NULL; it must not be used after.
#[no_mangle]
pub unsafe extern "C" fn phdim_model_free(model: *mut PhdimModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
