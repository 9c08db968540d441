//! C ABI for the Schmidt-number evaluators.
//!
//! The surface is a single opaque model handle plus one evaluation call per
//! route. Every fallible call returns a `PdcStatus`; a non-OK status leaves
//! a human-readable message retrievable with `pdc_last_error` (per thread,
//! overwritten by the next failure on that thread).
//!
//! The header `include/pdc_schmidt.h` is regenerated by the build script.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};

use pdc_schmidt::phasematch::{BandwidthLimits, Dimension};
use pdc_schmidt::pump::PumpConfig;
use pdc_schmidt::sellmeier::SellmeierSet;
use pdc_schmidt::dispersion::{derive_scales, CrystalConfig, Tuning};
use pdc_schmidt::schmidt::{
    schmidt_analytic, schmidt_mc, schmidt_npwpa_integral, SchmidtError, SchmidtResult,
};
use pdc_schmidt::{McParams, MismatchForm, ModelSpec};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PdcStatus {
    Ok = 0,
    /// Null pointer, bad enum value, malformed string, non-finite input.
    InvalidArgument = 1,
    /// Sellmeier evaluation or angle solve failed.
    DispersionError = 2,
    /// Phase-matching evaluation failed (dimension mismatch, divergence).
    PhaseMatchError = 3,
    /// Monte Carlo engine refused the request (sample count, dimensions).
    McError = 4,
    /// The model needs a finite spectral cutoff omega_max.
    SpectralCutoffRequired = 5,
    /// The closed-form route needs the quadratic mismatch model.
    AnalyticNeedsQuadratic = 6,
    /// The normalization estimate was consistent with zero.
    NormalizationZero = 7,
}

/// One Schmidt-number evaluation. `n_rel`/`b_rel` and their errors are NaN
/// for the deterministic routes; all values carry relative units (the
/// constant g^2/(2 pi)^3 is dropped).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PdcResult {
    pub k: f64,
    pub k_err: f64,
    pub n_rel: f64,
    pub n_err: f64,
    pub b_rel: f64,
    pub b_err: f64,
    /// Pump focusing parameter of the model's pump.
    pub beta: f64,
    /// 1 when both nearly-plane-wave-pump margins clear the floor.
    pub npwpa_satisfied: c_int,
    /// 1 when satisfied but below the comfortable margin.
    pub npwpa_marginal: c_int,
}

/// Opaque model handle; create with `pdc_model_new`, release with
/// `pdc_model_free`.
pub struct PdcModel {
    spec: ModelSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: PdcStatus, msg: String) -> PdcStatus {
    set_last_error(msg);
    status
}

fn schmidt_status(e: &SchmidtError) -> PdcStatus {
    match e {
        SchmidtError::Dispersion(_) => PdcStatus::DispersionError,
        SchmidtError::PhaseMatch(_) => PdcStatus::PhaseMatchError,
        SchmidtError::Mc(_) => PdcStatus::McError,
        SchmidtError::SpectralCutoffRequired => PdcStatus::SpectralCutoffRequired,
        SchmidtError::AnalyticNeedsQuadratic => PdcStatus::AnalyticNeedsQuadratic,
        SchmidtError::NormalizationZero { .. } => PdcStatus::NormalizationZero,
    }
}

fn write_result(r: &SchmidtResult, out: &mut PdcResult) {
    *out = PdcResult {
        k: r.k,
        k_err: r.k_err,
        n_rel: r.n_rel.unwrap_or(f64::NAN),
        n_err: r.n_err.unwrap_or(f64::NAN),
        b_rel: r.b_rel.unwrap_or(f64::NAN),
        b_err: r.b_err.unwrap_or(f64::NAN),
        beta: r.npwpa.beta,
        npwpa_satisfied: r.npwpa.satisfied as c_int,
        npwpa_marginal: r.npwpa.marginal as c_int,
    };
}

/// Build a model handle.
///
/// `dimension` is 1, 2 or 3; `exact_dispersion` 0 for the quadratic
/// mismatch, 1 for full Sellmeier dispersion. `sellmeier` is "kato",
/// "eimerl", or NULL for the default set. A finite `theta_deg` pins the
/// crystal angle; pass NaN to use the collinear mismatch `delta0_lc`
/// instead (0 for exact collinear phase matching). `q_max_rel` and
/// `omega_max_rel` are the collection cutoffs in units of the derived
/// scales q0 and Omega0; `inf` is accepted. `alpha` is the box surrogate
/// width; pass NaN for the default 3 pi / 2.
///
/// On success writes the handle to `*out` and returns `Ok`; the handle
/// must be released with `pdc_model_free`.
///
/// # Safety
/// `out` must be a valid pointer; `sellmeier` must be NULL or a
/// NUL-terminated string.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn pdc_model_new(
    dimension: c_int,
    exact_dispersion: c_int,
    length_mm: f64,
    lambda_p_nm: f64,
    sellmeier: *const c_char,
    theta_deg: f64,
    delta0_lc: f64,
    sigma_um: f64,
    tau_fs: f64,
    gain: f64,
    q_max_rel: f64,
    omega_max_rel: f64,
    alpha: f64,
    out: *mut *mut PdcModel,
) -> PdcStatus {
    if out.is_null() {
        return fail(PdcStatus::InvalidArgument, "out is NULL".into());
    }
    let dim = match dimension {
        1 => Dimension::One,
        2 => Dimension::Two,
        3 => Dimension::Three,
        d => {
            return fail(
                PdcStatus::InvalidArgument,
                format!("dimension must be 1, 2 or 3, got {d}"),
            )
        }
    };
    let form = match exact_dispersion {
        0 => MismatchForm::Quadratic,
        1 => MismatchForm::Exact,
        v => {
            return fail(
                PdcStatus::InvalidArgument,
                format!("exact_dispersion must be 0 or 1, got {v}"),
            )
        }
    };
    let set = if sellmeier.is_null() {
        pdc_schmidt::sellmeier::KATO
    } else {
        let name = match CStr::from_ptr(sellmeier).to_str() {
            Ok(s) => s,
            Err(_) => {
                return fail(
                    PdcStatus::InvalidArgument,
                    "sellmeier is not valid UTF-8".into(),
                )
            }
        };
        match SellmeierSet::by_name(name) {
            Some(s) => s,
            None => {
                return fail(
                    PdcStatus::InvalidArgument,
                    format!("unknown sellmeier set `{name}` (kato, eimerl)"),
                )
            }
        }
    };
    for (name, v) in [
        ("length_mm", length_mm),
        ("lambda_p_nm", lambda_p_nm),
        ("sigma_um", sigma_um),
        ("tau_fs", tau_fs),
        ("gain", gain),
    ] {
        if !(v.is_finite() && v > 0.0) {
            return fail(
                PdcStatus::InvalidArgument,
                format!("{name} must be finite and positive, got {v}"),
            );
        }
    }
    for (name, v) in [("q_max_rel", q_max_rel), ("omega_max_rel", omega_max_rel)] {
        if v.is_nan() || v < 0.0 {
            return fail(
                PdcStatus::InvalidArgument,
                format!("{name} must be >= 0, got {v}"),
            );
        }
    }
    let tuning = if theta_deg.is_finite() {
        Tuning::AngleDeg(theta_deg)
    } else if delta0_lc.is_finite() {
        Tuning::CollinearMismatch(delta0_lc)
    } else {
        return fail(
            PdcStatus::InvalidArgument,
            "theta_deg and delta0_lc are both non-finite".into(),
        );
    };
    let crystal = CrystalConfig {
        length_mm,
        lambda_p_nm,
        tuning,
        sellmeier: set,
    };
    // The limits are relative to the derived scales; resolve them now so a
    // bad crystal fails at construction, not at evaluation.
    let scales = match derive_scales(&crystal) {
        Ok((s, _)) => s,
        Err(e) => return fail(PdcStatus::DispersionError, e.to_string()),
    };
    let limits = BandwidthLimits::new(q_max_rel * scales.q0, omega_max_rel * scales.omega0);
    let pump = PumpConfig::new(sigma_um, tau_fs, gain);
    let mut spec = ModelSpec::new(dim, crystal, form, pump, limits);
    if alpha.is_finite() {
        if alpha <= 0.0 {
            return fail(
                PdcStatus::InvalidArgument,
                format!("alpha must be positive, got {alpha}"),
            );
        }
        spec = spec.with_alpha(alpha);
    } else if !alpha.is_nan() {
        return fail(
            PdcStatus::InvalidArgument,
            "alpha must be finite or NaN (default)".into(),
        );
    }
    *out = Box::into_raw(Box::new(PdcModel { spec }));
    PdcStatus::Ok
}

/// Release a model handle. NULL is ignored.
///
/// # Safety
/// `model` must be NULL or a pointer from `pdc_model_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pdc_model_free(model: *mut PdcModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

unsafe fn eval_common(
    model: *const PdcModel,
    out: *mut PdcResult,
    f: impl FnOnce(&ModelSpec) -> Result<SchmidtResult, SchmidtError>,
) -> PdcStatus {
    if model.is_null() || out.is_null() {
        return fail(PdcStatus::InvalidArgument, "model or out is NULL".into());
    }
    match f(&(*model).spec) {
        Ok(r) => {
            write_result(&r, &mut *out);
            PdcStatus::Ok
        }
        Err(e) => fail(schmidt_status(&e), e.to_string()),
    }
}

/// Schmidt number by Monte Carlo of the exact integral pair K = N^2/B.
/// Deterministic in (samples, seed, shards) regardless of thread count.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pdc_schmidt_mc(
    model: *const PdcModel,
    samples: u64,
    seed: u64,
    shards: u32,
    out: *mut PdcResult,
) -> PdcStatus {
    if shards == 0 {
        return fail(PdcStatus::InvalidArgument, "shards must be >= 1".into());
    }
    eval_common(model, out, |spec| {
        schmidt_mc(
            spec,
            &McParams {
                n_samples: samples,
                seed,
                shards,
            },
        )
    })
}

/// Schmidt number by deterministic quadrature of the factorized
/// nearly-plane-wave-pump formula.
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pdc_schmidt_npwpa(
    model: *const PdcModel,
    out: *mut PdcResult,
) -> PdcStatus {
    eval_common(model, out, schmidt_npwpa_integral)
}

/// Schmidt number by the closed-form box approximation (quadratic mismatch
/// model only).
///
/// # Safety
/// `model` and `out` must be valid pointers.
#[no_mangle]
pub unsafe extern "C" fn pdc_schmidt_analytic(
    model: *const PdcModel,
    out: *mut PdcResult,
) -> PdcStatus {
    eval_common(model, out, schmidt_analytic)
}

/// Copy the current thread's last error message into `buf` (NUL-terminated,
/// truncated to `cap`). Returns the full message length in bytes, excluding
/// the NUL; 0 when no error has occurred on this thread.
///
/// # Safety
/// `buf` must point to `cap` writable bytes, or `cap` must be 0.
#[no_mangle]
pub unsafe extern "C" fn pdc_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            std::ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pdc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}
