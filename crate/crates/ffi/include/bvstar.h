#ifndef BVSTAR_H
#define BVSTAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BvsStatus {
  BVS_STATUS_OK = 0,
  BVS_STATUS_NULL_POINTER = 1,
  BVS_STATUS_INVALID_UTF8 = 2,
  BVS_STATUS_INVALID_ARGUMENT = 3,
  BVS_STATUS_CONFIG = 4,
  BVS_STATUS_VACUUM = 5,
  BVS_STATUS_INADMISSIBLE = 6,
  BVS_STATUS_NO_CONVERGENCE = 7,
  BVS_STATUS_OUT_OF_RANGE = 8,
  BVS_STATUS_CERTIFICATION_FAILED = 9,
  BVS_STATUS_INTERNAL = 10,
} BvsStatus;

typedef enum BvsFlux {
  BVS_FLUX_BURGERS = 0,
  /**
   * `p1` is the advection speed.
   */
  BVS_FLUX_LINEAR_ADVECTION = 1,
  /**
   * `p1 = k`, `p2 = gamma`.
   */
  BVS_FLUX_P_SYSTEM = 2,
} BvsFlux;

typedef enum BvsWaveKind {
  BVS_WAVE_KIND_SHOCK = 0,
  BVS_WAVE_KIND_RAREFACTION = 1,
  BVS_WAVE_KIND_CONTACT = 2,
} BvsWaveKind;

/**
 * Opaque piecewise-polynomial BV function.
 */
typedef struct BvsBV BvsBV;

/**
 * Opaque Riemann solution.
 */
typedef struct BvsRiemann BvsRiemann;

/**
 * A wave of a Riemann solution. For jumps `speed_lo == speed_hi`.
 */
typedef struct BvsWaveInfo {
  enum BvsWaveKind kind;
  uintptr_t family;
  double speed_lo;
  double speed_hi;
} BvsWaveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or an empty string. The
 * pointer stays valid until the next failing call on the same thread.
 */
const char *bvs_last_error_message(void);

/**
 * Library version as a static string.
 */
const char *bvs_version(void);

/**
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void bvs_string_free(char *s);

/**
 * Solves the Riemann problem with `n`-component states.
 *
 * # Safety
 * `left` and `right` must point to `n` readable doubles; `out` must be
 * writable.
 */
enum BvsStatus bvs_riemann_solve(enum BvsFlux model,
                                 double p1,
                                 double p2,
                                 const double *left,
                                 const double *right,
                                 uintptr_t n,
                                 struct BvsRiemann **out);

/**
 * # Safety
 * `h` must be a live handle or null.
 */
void bvs_riemann_free(struct BvsRiemann *h);

/**
 * Number of state components, 0 for a null handle.
 *
 * # Safety
 * `h` must be a live handle or null.
 */
uintptr_t bvs_riemann_dim(const struct BvsRiemann *h);

/**
 * # Safety
 * `h` must be a live handle or null.
 */
uintptr_t bvs_riemann_wave_count(const struct BvsRiemann *h);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum BvsStatus bvs_riemann_wave(const struct BvsRiemann *h,
                                uintptr_t index,
                                struct BvsWaveInfo *out);

/**
 * Writes `u(x, t)` into `out[0..n]`, `n` being the state dimension.
 *
 * # Safety
 * `h` must be a live handle; `out` must have room for `n` doubles.
 */
enum BvsStatus bvs_riemann_sample(const struct BvsRiemann *h,
                                  double x,
                                  double t,
                                  double *out,
                                  uintptr_t n);

/**
 * Piecewise polynomial on `(a, b)` with `n_breakpoints` interior
 * breakpoints. Piece `i` has `lengths[i]` monomial coefficients in `x`,
 * stored consecutively in `coeffs`.
 *
 * # Safety
 * `breakpoints` must hold `n_breakpoints` doubles, `lengths` must hold
 * `n_breakpoints + 1` entries and `coeffs` their sum; `out` must be writable.
 */
enum BvsStatus bvs_bv_from_monomials(double a,
                                     double b,
                                     const double *breakpoints,
                                     uintptr_t n_breakpoints,
                                     const double *coeffs,
                                     const uintptr_t *lengths,
                                     struct BvsBV **out);

/**
 * BV function from a `decompose` JSON config, Cantor part included.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum BvsStatus bvs_bv_from_json(const char *json, struct BvsBV **out);

/**
 * # Safety
 * `h` must be a live handle or null.
 */
void bvs_bv_free(struct BvsBV *h);

/**
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum BvsStatus bvs_bv_total_variation(const struct BvsBV *h, double *out);

/**
 * Right-continuous value at `x`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be writable.
 */
enum BvsStatus bvs_bv_eval(const struct BvsBV *h, double x, double *out);

/**
 * Number of nonzero jumps.
 *
 * # Safety
 * `h` must be a live handle or null.
 */
uintptr_t bvs_bv_jump_count(const struct BvsBV *h);

/**
 * Position and size of jump `index`.
 *
 * # Safety
 * `h` must be a live handle; `x` and `size` must be writable.
 */
enum BvsStatus bvs_bv_jump(const struct BvsBV *h, uintptr_t index, double *x, double *size);

/**
 * Runs `command` (`"riemann"`, `"verify"` or `"decompose"`) on a JSON
 * config and stores the JSON report in `*out_json`. A negative `seed`
 * keeps the config's seed. A failed certification returns
 * `CertificationFailed` and still produces the report.
 *
 * # Safety
 * `command` and `config_json` must be NUL-terminated strings; `out_json`
 * must be writable. The report must be released with [`bvs_string_free`].
 */
enum BvsStatus bvs_run_json(const char *command,
                            const char *config_json,
                            int64_t seed,
                            char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BVSTAR_H */
