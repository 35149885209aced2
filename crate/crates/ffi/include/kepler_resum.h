#ifndef KEPLER_RESUM_H
#define KEPLER_RESUM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Sequence transformation selector.
typedef enum KrKind {
  KR_KIND_LEVIN_D = 0,
  KR_KIND_WENIGER_DELTA = 1,
} KrKind;

// Solver selector for [`kr_solve`].
typedef enum KrMethod {
  KR_METHOD_NEWTON = 0,
  KR_METHOD_LEVIN = 1,
  KR_METHOD_WENIGER = 2,
} KrMethod;

// Result codes of every fallible call.
typedef enum KrStatus {
  KR_STATUS_OK = 0,
  KR_STATUS_NULL_POINTER = 1,
  KR_STATUS_INVALID_ARGUMENT = 2,
  KR_STATUS_DOMAIN = 3,
  KR_STATUS_NO_CONVERGENCE = 4,
  KR_STATUS_RANGE = 5,
  KR_STATUS_BUFFER_TOO_SMALL = 6,
  KR_STATUS_INTERNAL = 7,
} KrStatus;

// Working precision plus the last error message.
typedef struct KrContext KrContext;

// Exact Debye polynomial coefficients up to some order.
typedef struct KrDebyeTable KrDebyeTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a context of `digits` decimal digits (at least 50). Returns NULL
// when the precision is out of range.
struct KrContext *kr_context_new(uint32_t digits);

// Destroys a context; NULL is ignored.
void kr_context_free(struct KrContext *ctx);

// Working precision of the context in decimal digits, 0 for NULL.
uint32_t kr_context_digits(const struct KrContext *ctx);

// Copies the last error message of `ctx` (empty after a success).
enum KrStatus kr_last_error(const struct KrContext *ctx, char *buf, size_t len, size_t *needed);

// Solves `psi - eps sin psi = M` with `eps`, `M` given as decimal or
// `p/q` strings; writes `psi` with `sig` significant digits into `buf`.
// `order` is ignored by Newton.
enum KrStatus kr_solve(struct KrContext *ctx,
                       const char *eps,
                       const char *m,
                       enum KrMethod method,
                       size_t order,
                       size_t sig,
                       char *buf,
                       size_t len,
                       size_t *needed);

// [`kr_solve`] with `double` arguments and result.
enum KrStatus kr_solve_f64(struct KrContext *ctx,
                           double eps,
                           double m,
                           enum KrMethod method,
                           size_t order,
                           double *psi);

// Transforms the partial sums of `terms[0..n]` and writes the order-`order`
// estimate to `*out`. The arithmetic runs at the context precision.
enum KrStatus kr_transform_f64(struct KrContext *ctx,
                               const double *terms,
                               size_t n,
                               enum KrKind kind,
                               size_t order,
                               double *out);

// Generates the Debye coefficient table `U_0 ..= U_{k_max}`. Never fails;
// free with [`kr_debye_free`].
struct KrDebyeTable *kr_debye_new(size_t k_max);

// Destroys a Debye table; NULL is ignored.
void kr_debye_free(struct KrDebyeTable *table);

// Highest order held by the table.
size_t kr_debye_k_max(const struct KrDebyeTable *table);

// Writes the exact coefficient `a^k_m` as `"p/q"` (or `"p"`) into `buf`.
enum KrStatus kr_debye_coeff(struct KrContext *ctx,
                             const struct KrDebyeTable *table,
                             size_t k,
                             size_t m,
                             char *buf,
                             size_t len,
                             size_t *needed);

// Evaluates `U_k(t)` at the context precision.
enum KrStatus kr_debye_eval_f64(struct KrContext *ctx,
                                const struct KrDebyeTable *table,
                                size_t k,
                                double t,
                                double *out);

// Regenerates a table or figure (`"table1"` .. `"fig10"`) and sets
// `*passed` to 1 when every printed golden matches, 0 otherwise.
enum KrStatus kr_reproduce(struct KrContext *ctx, const char *target, int32_t *passed);

// Runs the invariant suite; `*passed` is 1 when nothing failed.
enum KrStatus kr_selfcheck(struct KrContext *ctx, int32_t *passed);

// Library version as a static NUL-terminated string.
const char *kr_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* KEPLER_RESUM_H */
