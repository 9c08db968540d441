#ifndef PDC_SCHMIDT_H
#define PDC_SCHMIDT_H

/* Generated by cbindgen from pdc-schmidt-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum {
  PDC_STATUS_OK = 0,
  /**
   * Null pointer, bad enum value, malformed string, non-finite input.
   */
  PDC_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Sellmeier evaluation or angle solve failed.
   */
  PDC_STATUS_DISPERSION_ERROR = 2,
  /**
   * Phase-matching evaluation failed (dimension mismatch, divergence).
   */
  PDC_STATUS_PHASE_MATCH_ERROR = 3,
  /**
   * Monte Carlo engine refused the request (sample count, dimensions).
   */
  PDC_STATUS_MC_ERROR = 4,
  /**
   * The model needs a finite spectral cutoff omega_max.
   */
  PDC_STATUS_SPECTRAL_CUTOFF_REQUIRED = 5,
  /**
   * The closed-form route needs the quadratic mismatch model.
   */
  PDC_STATUS_ANALYTIC_NEEDS_QUADRATIC = 6,
  /**
   * The normalization estimate was consistent with zero.
   */
  PDC_STATUS_NORMALIZATION_ZERO = 7,
} PdcStatus;

/**
 * Opaque model handle; create with `pdc_model_new`, release with
 * `pdc_model_free`.
 */
typedef struct PdcModel PdcModel;

/**
 * One Schmidt-number evaluation. `n_rel`/`b_rel` and their errors are NaN
 * for the deterministic routes; all values carry relative units (the
 * constant g^2/(2 pi)^3 is dropped).
 */
typedef struct {
  double k;
  double k_err;
  double n_rel;
  double n_err;
  double b_rel;
  double b_err;
  /**
   * Pump focusing parameter of the model's pump.
   */
  double beta;
  /**
   * 1 when both nearly-plane-wave-pump margins clear the floor.
   */
  int npwpa_satisfied;
  /**
   * 1 when satisfied but below the comfortable margin.
   */
  int npwpa_marginal;
} PdcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Build a model handle.
 *
 * `dimension` is 1, 2 or 3; `exact_dispersion` 0 for the quadratic
 * mismatch, 1 for full Sellmeier dispersion. `sellmeier` is "kato",
 * "eimerl", or NULL for the default set. A finite `theta_deg` pins the
 * crystal angle; pass NaN to use the collinear mismatch `delta0_lc`
 * instead (0 for exact collinear phase matching). `q_max_rel` and
 * `omega_max_rel` are the collection cutoffs in units of the derived
 * scales q0 and Omega0; `inf` is accepted. `alpha` is the box surrogate
 * width; pass NaN for the default 3 pi / 2.
 *
 * On success writes the handle to `*out` and returns `Ok`; the handle
 * must be released with `pdc_model_free`.
 *
 * # Safety
 * `out` must be a valid pointer; `sellmeier` must be NULL or a
 * NUL-terminated string.
 */
PdcStatus pdc_model_new(int dimension,
                        int exact_dispersion,
                        double length_mm,
                        double lambda_p_nm,
                        const char *sellmeier,
                        double theta_deg,
                        double delta0_lc,
                        double sigma_um,
                        double tau_fs,
                        double gain,
                        double q_max_rel,
                        double omega_max_rel,
                        double alpha,
                        PdcModel **out);

/**
 * Release a model handle. NULL is ignored.
 *
 * # Safety
 * `model` must be NULL or a pointer from `pdc_model_new` not yet freed.
 */
void pdc_model_free(PdcModel *model);

/**
 * Schmidt number by Monte Carlo of the exact integral pair K = N^2/B.
 * Deterministic in (samples, seed, shards) regardless of thread count.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
PdcStatus pdc_schmidt_mc(const PdcModel *model,
                         uint64_t samples,
                         uint64_t seed,
                         uint32_t shards,
                         PdcResult *out);

/**
 * Schmidt number by deterministic quadrature of the factorized
 * nearly-plane-wave-pump formula.
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
PdcStatus pdc_schmidt_npwpa(const PdcModel *model, PdcResult *out);

/**
 * Schmidt number by the closed-form box approximation (quadratic mismatch
 * model only).
 *
 * # Safety
 * `model` and `out` must be valid pointers.
 */
PdcStatus pdc_schmidt_analytic(const PdcModel *model, PdcResult *out);

/**
 * Copy the current thread's last error message into `buf` (NUL-terminated,
 * truncated to `cap`). Returns the full message length in bytes, excluding
 * the NUL; 0 when no error has occurred on this thread.
 *
 * # Safety
 * `buf` must point to `cap` writable bytes, or `cap` must be 0.
 */
uintptr_t pdc_last_error(char *buf, uintptr_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pdc_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PDC_SCHMIDT_H */
