#ifndef RDCARLEMAN_H
#define RDCARLEMAN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RdcBreakpoint {
  RDC_BREAKPOINT_SHARP = 0,
  RDC_BREAKPOINT_LOOSE = 1,
} RdcBreakpoint;

typedef enum RdcStatus {
  RDC_STATUS_OK = 0,
  RDC_STATUS_NULL_POINTER = 1,
  RDC_STATUS_INVALID_ARGUMENT = 2,
  RDC_STATUS_NOT_DISSIPATIVE = 3,
  RDC_STATUS_SIZE_CAP = 4,
  RDC_STATUS_NUMERICAL = 5,
  RDC_STATUS_IO = 6,
  RDC_STATUS_CONFIG = 7,
  RDC_STATUS_OUT_OF_RANGE = 8,
  RDC_STATUS_PANIC = 9,
} RdcStatus;

/**
 * Opaque preset handle.
 */
typedef struct RdcPreset RdcPreset;

/**
 * Opaque handle to a finished run.
 */
typedef struct RdcRun RdcRun;

typedef struct RdcRadii {
  double r;
  double r_d;
  double r_d_sharp;
  double lambda1;
  double lambda_used;
  double c_lambda;
  double gamma;
} RdcRadii;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length, 0 if
 * there is none.
 *
 * # Safety
 * `buf` must be null or valid for `len` bytes.
 */
size_t rdc_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rdc_version(void);

/**
 * Loads a built-in preset by name.
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum RdcStatus rdc_preset_load(const char *name, struct RdcPreset **out);

/**
 * Parses a preset from TOML text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum RdcStatus rdc_preset_parse(const char *toml, struct RdcPreset **out);

/**
 * Applies one `key=value` override in place (e.g. `rd.D=0.2`).
 *
 * # Safety
 * `preset` must come from `rdc_preset_load`/`rdc_preset_parse`.
 */
enum RdcStatus rdc_preset_set(struct RdcPreset *preset, const char *kv);

/**
 * # Safety
 * `preset` must be null or a live handle; it is invalid afterwards.
 */
void rdc_preset_free(struct RdcPreset *preset);

/**
 * Runs a preset. With a non-null `out_dir` the artifacts are written
 * there as well.
 *
 * # Safety
 * `preset` must be a live handle, `out_dir` null or a NUL-terminated path,
 * `out` writable.
 */
enum RdcStatus rdc_run(const struct RdcPreset *preset, const char *out_dir, struct RdcRun **out);

/**
 * Number of truncation orders in a run.
 *
 * # Safety
 * `run` must be null or a live handle.
 */
size_t rdc_run_len(const struct RdcRun *run);

/**
 * Truncation order and max_t ||η1||_inf of entry `i`.
 *
 * # Safety
 * `run` must be a live handle; `n_trunc` and `max_err` writable.
 */
enum RdcStatus rdc_run_max_error(const struct RdcRun *run,
                                 size_t i,
                                 size_t *n_trunc,
                                 double *max_err);

/**
 * Radii of a run; `RDC_STATUS_NOT_DISSIPATIVE` when λ1 >= 0.
 *
 * # Safety
 * `run` must be a live handle; `out` writable.
 */
enum RdcStatus rdc_run_radii(const struct RdcRun *run, struct RdcRadii *out);

/**
 * 1 if every bound check of the run passed, 0 otherwise (or for null).
 *
 * # Safety
 * `run` must be null or a live handle.
 */
int32_t rdc_run_checks_ok(const struct RdcRun *run);

/**
 * # Safety
 * `run` must be null or a live handle; it is invalid afterwards.
 */
void rdc_run_free(struct RdcRun *run);

/**
 * R and R_D for U' = (D Δ_h + a) U + b U^M on an all-Dirichlet grid,
 * with λ = λ1 / `lambda_ratio` (or optimized when `lambda_ratio` <= 0).
 * `u_in` holds the n^d initial values.
 *
 * # Safety
 * `u_in` must point to `len` doubles; `out` must be writable.
 */
enum RdcStatus rdc_compute_radii(double diff,
                                 double a,
                                 double b,
                                 size_t m,
                                 size_t n,
                                 size_t d,
                                 const double *u_in,
                                 size_t len,
                                 double lambda_ratio,
                                 enum RdcBreakpoint breakpoint,
                                 struct RdcRadii *out);

/**
 * Runs the bound audit for `scope` ("all" or a module name) and stores
 * the number of failed checks in `failures`.
 *
 * # Safety
 * `scope` must be a NUL-terminated string; `failures` writable.
 */
enum RdcStatus rdc_audit(const char *scope, size_t *failures);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RDCARLEMAN_H */
