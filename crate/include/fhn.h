#ifndef FHN_H
#define FHN_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FhnOutcome {
  FHN_OUTCOME_FRONT_RIGHT = 0,
  FHN_OUTCOME_FRONT_LEFT = 1,
  FHN_OUTCOME_PULSE = 2,
  FHN_OUTCOME_COLLAPSED = 3,
  FHN_OUTCOME_UNDETERMINED = 4,
} FhnOutcome;

typedef enum FhnSimKind {
  FHN_SIM_KIND_FRONT = 0,
  FHN_SIM_KIND_REVERSED = 1,
  FHN_SIM_KIND_PULSE = 2,
} FhnSimKind;

typedef enum FhnStatus {
  FHN_STATUS_OK = 0,
  FHN_STATUS_NULL_POINTER = 1,
  FHN_STATUS_INVALID_INPUT = 2,
  FHN_STATUS_INADMISSIBLE = 3,
  FHN_STATUS_SOLVER_FAILURE = 4,
  FHN_STATUS_IO = 5,
  FHN_STATUS_PANIC = 6,
  FHN_STATUS_BUFFER_TOO_SMALL = 7,
} FhnStatus;

typedef enum FhnWaveKind {
  FHN_WAVE_KIND_FRONT = 0,
  FHN_WAVE_KIND_REVERSED_FRONT = 1,
  FHN_WAVE_KIND_PULSE = 2,
} FhnWaveKind;

/**
 * Opaque wave solution.
 */
typedef struct FhnWave FhnWave;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *fhn_last_error(void);

/**
 * Library version as a static string.
 */
const char *fhn_version(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fhn_string_free(char *s);

/**
 * Regime report and closed-form constants as JSON.
 *
 * # Safety
 * `out` must be a valid pointer to a `char *`.
 */
enum FhnStatus fhn_regime_json(double beta, double gamma, double d, char **out);

/**
 * Whether the regime at (β, γ, d) admits `kind`; writes 1 or 0.
 *
 * # Safety
 * `admissible` must be a valid pointer.
 */
enum FhnStatus fhn_regime_admits(double beta,
                                 double gamma,
                                 double d,
                                 enum FhnWaveKind kind,
                                 int32_t *admissible);

/**
 * Computes a wave with default options. On success `*out` owns a handle.
 *
 * # Safety
 * `out` must be a valid pointer to an `FhnWave *`.
 */
enum FhnStatus fhn_solve_wave(double beta,
                              double gamma,
                              double d,
                              enum FhnWaveKind kind,
                              struct FhnWave **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `w` must come from this library and not have been freed.
 */
void fhn_wave_free(struct FhnWave *w);

/**
 * Speed c and κ = dc².
 *
 * # Safety
 * `w` must be a live handle; `c` and `kappa` valid pointers.
 */
enum FhnStatus fhn_wave_speed(const struct FhnWave *w, double *c, double *kappa);

/**
 * 1 if every validation check passed, else 0.
 *
 * # Safety
 * `w` must be a live handle; `accepted` a valid pointer.
 */
enum FhnStatus fhn_wave_accepted(const struct FhnWave *w, int32_t *accepted);

/**
 * Number of profile nodes.
 *
 * # Safety
 * `w` must be a live handle; `len` a valid pointer.
 */
enum FhnStatus fhn_wave_len(const struct FhnWave *w, size_t *len);

/**
 * Copies z, u, v into caller buffers of length `cap` (at least
 * `fhn_wave_len`).
 *
 * # Safety
 * `w` must be a live handle; each buffer must hold `cap` doubles.
 */
enum FhnStatus fhn_wave_profile(const struct FhnWave *w,
                                double *z,
                                double *u,
                                double *v,
                                size_t cap);

/**
 * Full report as JSON.
 *
 * # Safety
 * `w` must be a live handle; `out` a valid pointer to a `char *`.
 */
enum FhnStatus fhn_wave_report_json(const struct FhnWave *w, char **out);

/**
 * Writes `wave.json` and `profile.csv` into `dir`.
 *
 * # Safety
 * `w` must be a live handle; `dir` a NUL-terminated path.
 */
enum FhnStatus fhn_wave_save(const struct FhnWave *w, const char *dir);

/**
 * Loads a directory written by `fhn_wave_save`.
 *
 * # Safety
 * `dir` a NUL-terminated path; `out` a valid pointer to an `FhnWave *`.
 */
enum FhnStatus fhn_wave_load(const char *dir, struct FhnWave **out);

/**
 * Direct simulation from step initial data with `n` nodes and step `dtau`;
 * writes the measured rescaled speed and the outcome.
 *
 * # Safety
 * `sigma` and `outcome` must be valid pointers.
 */
enum FhnStatus fhn_simulate(double beta,
                            double gamma,
                            double d,
                            enum FhnSimKind kind,
                            size_t n,
                            double dtau,
                            double *sigma,
                            enum FhnOutcome *outcome);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FHN_H */
