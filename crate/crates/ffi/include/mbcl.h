#ifndef MBCL_H
#define MBCL_H

/* Generated with cbindgen:0.27.0 */

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MbclScheme {
  MBCL_SCHEME_CRANK_NICOLSON = 0,
  MBCL_SCHEME_PAPER_EXPLICIT = 1,
} MbclScheme;

typedef enum MbclStatus {
  MBCL_STATUS_OK = 0,
  MBCL_STATUS_INVALID_ARGUMENT = 1,
  MBCL_STATUS_NULL_POINTER = 2,
  MBCL_STATUS_COMPUTATION_FAILED = 3,
  MBCL_STATUS_BUFFER_TOO_SMALL = 4,
  MBCL_STATUS_PANIC = 5,
} MbclStatus;

/**
 * Barrier geometry.
 */
typedef struct MbclLayout MbclLayout;

/**
 * Sorted energy levels.
 */
typedef struct MbclLevelSet MbclLevelSet;

/**
 * Correlation record of one `(N, c)` run.
 */
typedef struct MbclRecord MbclRecord;

/**
 * `num / den` with `den != 0`.
 */
typedef struct MbclRational {
  int64_t num;
  int64_t den;
} MbclRational;

typedef struct MbclPhysics {
  struct MbclRational length;
  struct MbclRational height;
  struct MbclRational t_final;
  struct MbclRational dx;
  struct MbclRational dt;
  struct MbclRational x_min;
  struct MbclRational x_max;
  struct MbclRational x0;
  struct MbclRational p0;
  struct MbclRational w0;
  struct MbclRational mass;
  enum MbclScheme scheme;
} MbclPhysics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *mbcl_version(void);

/**
 * Length in bytes of the last error message on this thread, excluding the
 * terminator; 0 if the last call succeeded.
 */
size_t mbcl_last_error_length(void);

/**
 * Copies the last error message, NUL-terminated and truncated to `cap`
 * bytes. Returns the number of bytes written excluding the terminator.
 *
 * # Safety
 * `buf` must be NULL or point to `cap` writable bytes.
 */
size_t mbcl_last_error_message(char *buf, size_t cap);

/**
 * Fills `out` with the default physical and numerical parameters.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum MbclStatus mbcl_physics_default(struct MbclPhysics *out);

/**
 * Builds the layout of `n` barriers with gap ratio `c` over `length`.
 *
 * # Safety
 * `out` must be NULL or valid for writes.
 */
enum MbclStatus mbcl_layout_new(size_t n,
                                struct MbclRational c,
                                double length,
                                struct MbclLayout **out);

/**
 * # Safety
 * `layout` must be NULL or a handle from [`mbcl_layout_new`] not yet freed.
 */
void mbcl_layout_free(struct MbclLayout *layout);

/**
 * Writes `(a, b, barrier_width, gap_width)`: total barrier width, total
 * gap width, and the widths of one barrier and one gap.
 *
 * # Safety
 * `layout` must be a live handle; `out` must point to 4 writable doubles.
 */
enum MbclStatus mbcl_layout_widths(const struct MbclLayout *layout, double *out);

/**
 * Number of barriers, or 0 for a NULL handle.
 *
 * # Safety
 * `layout` must be NULL or a live handle.
 */
size_t mbcl_layout_barrier_count(const struct MbclLayout *layout);

/**
 * Start and end of barrier `index`.
 *
 * # Safety
 * `layout` must be a live handle; `start` and `end` valid for writes.
 */
enum MbclStatus mbcl_layout_interval(const struct MbclLayout *layout,
                                     size_t index,
                                     double *start,
                                     double *end);

/**
 * Potential at `x` for barriers of `height`; 0 for a NULL handle.
 *
 * # Safety
 * `layout` must be NULL or a live handle.
 */
double mbcl_layout_potential_at(const struct MbclLayout *layout, double x, double height);

/**
 * Transmission and reflection probabilities of the array at `energy`.
 *
 * # Safety
 * `layout` must be a live handle; `transmission` and `reflection` valid
 * for writes.
 */
enum MbclStatus mbcl_scatter(const struct MbclLayout *layout,
                             double energy,
                             double height,
                             double *transmission,
                             double *reflection);

/**
 * Runs the evolution for `(n, c)` and reduces it to a record. `physics`
 * may be NULL for the defaults.
 *
 * # Safety
 * `physics` must be NULL or valid for reads; `out` valid for writes.
 */
enum MbclStatus mbcl_record_compute(size_t n,
                                    struct MbclRational c,
                                    const struct MbclPhysics *physics,
                                    struct MbclRecord **out);

/**
 * # Safety
 * `record` must be NULL or a handle from [`mbcl_record_compute`] not yet
 * freed.
 */
void mbcl_record_free(struct MbclRecord *record);

/**
 * The correlation `C` (last diagonal entry), NaN for a NULL handle.
 *
 * # Safety
 * `record` must be NULL or a live handle.
 */
double mbcl_record_correlation(const struct MbclRecord *record);

/**
 * Tridiagonal entries `alpha[3]`, `beta[2]` and the Krylov order reached
 * (3 unless the recurrence broke down).
 *
 * # Safety
 * `record` must be a live handle; `alpha` must point to 3 doubles, `beta`
 * to 2, `order` to one `size_t`.
 */
enum MbclStatus mbcl_record_matrix(const struct MbclRecord *record,
                                   double *alpha,
                                   double *beta,
                                   size_t *order);

/**
 * Hex fingerprint of the inputs, owned by the record.
 *
 * # Safety
 * `record` must be NULL or a live handle.
 */
const char *mbcl_record_fingerprint(const struct MbclRecord *record);

/**
 * Levels of the array (barrier `height`, 0 for the free ring) in a ring
 * of `radius`, for energies in `(e_min, e_max]`.
 *
 * # Safety
 * `layout` must be a live handle; `out` valid for writes.
 */
enum MbclStatus mbcl_levels_find(const struct MbclLayout *layout,
                                 double height,
                                 double e_min,
                                 double e_max,
                                 double radius,
                                 size_t resolution,
                                 struct MbclLevelSet **out);

/**
 * # Safety
 * `set` must be NULL or a handle from [`mbcl_levels_find`] not yet freed.
 */
void mbcl_levels_free(struct MbclLevelSet *set);

/**
 * Number of levels, 0 for a NULL handle.
 *
 * # Safety
 * `set` must be NULL or a live handle.
 */
size_t mbcl_levels_count(const struct MbclLevelSet *set);

/**
 * Copies the energies into `buf`. Fails with `BUFFER_TOO_SMALL` (writing
 * nothing) when `cap` is less than the level count.
 *
 * # Safety
 * `set` must be a live handle; `buf` must point to `cap` doubles.
 */
enum MbclStatus mbcl_levels_energies(const struct MbclLevelSet *set, double *buf, size_t cap);

/**
 * Wigner surmise `(pi s / 2) exp(-pi s^2 / 4)`.
 */
double mbcl_wigner_pdf(double s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MBCL_H */
