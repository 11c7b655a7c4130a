#ifndef DIRAC_POLLUTION_H
#define DIRAC_POLLUTION_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible function.
 */
typedef enum DpStatus {
  DP_STATUS_OK = 0,
  DP_STATUS_NULL_POINTER = 1,
  DP_STATUS_INVALID_UTF8 = 2,
  DP_STATUS_CONFIG = 3,
  DP_STATUS_PARAMETER = 4,
  DP_STATUS_NUMERICAL = 5,
  DP_STATUS_IO = 6,
  DP_STATUS_OUT_OF_RANGE = 7,
  DP_STATUS_PANIC = 8,
} DpStatus;

/**
 * Run configuration.
 */
typedef struct DpConfig DpConfig;

/**
 * Result of a single pencil solve.
 */
typedef struct DpSpectrum DpSpectrum;

/**
 * Classified parameter sweep.
 */
typedef struct DpSweep DpSweep;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *dp_last_error(void);

/**
 * Default configuration.
 */
struct DpConfig *dp_config_new(void);

/**
 * Parse configuration text (`key = value` lines).
 *
 * # Safety
 * `text` must be a nul-terminated string; `out` a valid pointer.
 */
enum DpStatus dp_config_parse(const char *text, struct DpConfig **out_cfg);

/**
 * Set one dotted key.
 *
 * # Safety
 * `cfg` must come from this library; `key` and `value` must be
 * nul-terminated strings.
 */
enum DpStatus dp_config_set(struct DpConfig *cfg, const char *key, const char *value);

/**
 * # Safety
 * `cfg` must come from this library (or be null) and not be used afterwards.
 */
void dp_config_free(struct DpConfig *cfg);

/**
 * Energy of level `n` (n ≥ 1) of the point-Coulomb problem.
 *
 * # Safety
 * `out_value` must be a valid pointer.
 */
enum DpStatus dp_exact_level(double alpha, double z, uint32_t n, double *out_value);

/**
 * Solve the configured pencil.
 *
 * # Safety
 * `cfg` must come from this library; `out` must be a valid pointer.
 */
enum DpStatus dp_spectrum_run(const struct DpConfig *cfg, struct DpSpectrum **out_spec);

/**
 * Number of eigenvalues (retained overlap directions).
 *
 * # Safety
 * `spec` must come from this library.
 */
size_t dp_spectrum_len(const struct DpSpectrum *spec);

/**
 * Copy up to `cap` ascending eigenvalues into `buf`; returns the count
 * written.
 *
 * # Safety
 * `spec` must come from this library; `buf` must hold `cap` doubles.
 */
size_t dp_spectrum_eigenvalues(const struct DpSpectrum *spec, double *buf, size_t cap);

/**
 * Number of eigenvalues inside the gap.
 *
 * # Safety
 * `spec` must come from this library.
 */
size_t dp_spectrum_gap_len(const struct DpSpectrum *spec);

/**
 * Gap eigenvalue `i` and its distance to the nearest reference level.
 *
 * # Safety
 * `spec` must come from this library; output pointers may be null.
 */
enum DpStatus dp_spectrum_gap(const struct DpSpectrum *spec,
                              size_t i,
                              double *out_value,
                              double *out_distance);

/**
 * # Safety
 * `spec` must come from this library (or be null) and not be used afterwards.
 */
void dp_spectrum_free(struct DpSpectrum *spec);

/**
 * Run and classify the configured sweep.
 *
 * # Safety
 * `cfg` must come from this library; `out` must be a valid pointer.
 */
enum DpStatus dp_sweep_run(const struct DpConfig *cfg, struct DpSweep **out_sweep);

/**
 * # Safety
 * `sweep` must come from this library.
 */
size_t dp_sweep_steps(const struct DpSweep *sweep);

/**
 * # Safety
 * `sweep` must come from this library.
 */
size_t dp_sweep_trajectories(const struct DpSweep *sweep);

/**
 * Value of trajectory `traj` at grid point `step`; NaN where absent.
 *
 * # Safety
 * `sweep` must come from this library; `out_value` must be valid.
 */
enum DpStatus dp_sweep_value(const struct DpSweep *sweep,
                             size_t traj,
                             size_t step,
                             double *out_value);

/**
 * 1 if trajectory `traj` is flagged spurious, 0 if not, −1 if out of range.
 *
 * # Safety
 * `sweep` must come from this library.
 */
int32_t dp_sweep_is_spurious(const struct DpSweep *sweep, size_t traj);

/**
 * CSV rendering; release with [`dp_string_free`].
 *
 * # Safety
 * `sweep` must come from this library.
 */
char *dp_sweep_csv(const struct DpSweep *sweep);

/**
 * # Safety
 * `sweep` must come from this library (or be null) and not be used afterwards.
 */
void dp_sweep_free(struct DpSweep *sweep);

/**
 * # Safety
 * `s` must come from this library (or be null) and not be used afterwards.
 */
void dp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DIRAC_POLLUTION_H */
