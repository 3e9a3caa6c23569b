#ifndef COSFIT_H
#define COSFIT_H

/* Generated from src/lib.rs by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes of all fallible functions.
 */
typedef enum CosfitStatus {
  COSFIT_STATUS_OK = 0,
  COSFIT_STATUS_NULL_POINTER = 1,
  COSFIT_STATUS_INVALID_INPUT = 2,
  COSFIT_STATUS_DEGENERATE_SPAN = 3,
  COSFIT_STATUS_DOMAIN = 4,
  COSFIT_STATUS_INVALID_CONFIG = 5,
  COSFIT_STATUS_NON_FINITE_COST = 6,
  COSFIT_STATUS_IO = 7,
  COSFIT_STATUS_BUFFER_TOO_SMALL = 8,
  COSFIT_STATUS_PANIC = 9,
} CosfitStatus;

/**
 * Opaque signal handle.
 */
typedef struct CosfitSignal CosfitSignal;

/**
 * Parameters of `y = a1 + a2·cos(a3·x + a4)`.
 */
typedef struct CosfitParams {
  double a1;
  double a2;
  double a3;
  double a4;
} CosfitParams;

typedef struct CosfitFitResult {
  struct CosfitParams params;
  double chi2;
  uint32_t iterations;
  /**
   * Non-zero when the step-size criterion ended the run.
   */
  uint8_t converged;
} CosfitFitResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. The pointer is
 * valid until the next failing call on the same thread.
 */
const char *cosfit_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *cosfit_version(void);

/**
 * Creates a signal from `n` pairs. Rows are sorted by `x`.
 *
 * # Safety
 * `x` and `y` must point to `n` readable doubles; `out` must be writable.
 */
enum CosfitStatus cosfit_signal_new(const double *x,
                                    const double *y,
                                    size_t n,
                                    struct CosfitSignal **out);

/**
 * Generates a jittered noisy cosine signal. `jitter` is the fraction of the
 * mean spacing, in `[0, 0.5)`.
 *
 * # Safety
 * `truth` must be readable and `out` writable.
 */
enum CosfitStatus cosfit_signal_synth(const struct CosfitParams *truth,
                                      double periods,
                                      double fs,
                                      double sigma,
                                      double jitter,
                                      uint64_t seed,
                                      struct CosfitSignal **out);

/**
 * Releases a signal. NULL is ignored.
 *
 * # Safety
 * `signal` must come from this library and not be used afterwards.
 */
void cosfit_signal_free(struct CosfitSignal *signal);

/**
 * Number of samples, 0 for NULL.
 *
 * # Safety
 * `signal` must be NULL or a live handle.
 */
size_t cosfit_signal_len(const struct CosfitSignal *signal);

/**
 * Copies the samples into caller buffers of capacity `cap`.
 *
 * # Safety
 * `x_out` and `y_out` must be writable for `cap` doubles.
 */
enum CosfitStatus cosfit_signal_copy(const struct CosfitSignal *signal,
                                     double *x_out,
                                     double *y_out,
                                     size_t cap);

/**
 * Crossing-based initial parameter estimate.
 *
 * # Safety
 * `signal` must be a live handle and `out` writable.
 */
enum CosfitStatus cosfit_estimate(const struct CosfitSignal *signal, struct CosfitParams *out);

/**
 * Initial parameter estimate with the frequency from the periodogram peak.
 *
 * # Safety
 * `signal` must be a live handle and `out` writable.
 */
enum CosfitStatus cosfit_estimate_lombscargle(const struct CosfitSignal *signal,
                                              struct CosfitParams *out);

/**
 * Frequency (cycles per unit x) of the Lomb-Scargle periodogram peak.
 *
 * # Safety
 * `signal` must be a live handle and `f_out` writable.
 */
enum CosfitStatus cosfit_lombscargle_peak(const struct CosfitSignal *signal, double *f_out);

/**
 * Levenberg-Marquardt refinement from `init`. `max_iterations = 0` uses
 * the default cap. Running out of iterations is not an error; check
 * `converged`.
 *
 * # Safety
 * `signal` must be a live handle, `init` readable and `out` writable.
 */
enum CosfitStatus cosfit_fit(const struct CosfitSignal *signal,
                             const struct CosfitParams *init,
                             uint32_t max_iterations,
                             struct CosfitFitResult *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COSFIT_H */
