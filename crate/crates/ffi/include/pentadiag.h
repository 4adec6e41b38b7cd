#ifndef PENTADIAG_H
#define PENTADIAG_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PdStatus {
  PD_STATUS_OK = 0,
  PD_STATUS_NULL_POINTER = 1,
  PD_STATUS_INVALID_ARGUMENT = 2,
  PD_STATUS_NON_FINITE = 3,
  PD_STATUS_ORDER_TOO_SMALL = 4,
  PD_STATUS_NEGATIVE_DIAGONAL = 5,
  PD_STATUS_REQUIRES_R_EQUAL_P_MINUS_S = 6,
  PD_STATUS_NON_INVERTIBLE = 7,
  PD_STATUS_HYPOTHESIS = 8,
  PD_STATUS_QUADRATURE = 9,
  PD_STATUS_OVERFLOW = 10,
  PD_STATUS_INTERNAL = 11,
  PD_STATUS_PANIC = 12,
} PdStatus;

/**
 * Closed-form case, named as in [`CaseId`].
 */
typedef enum PdCase {
  PD_CASE_NONE = -1,
  PD_CASE_GEN_DISTINCT = 0,
  PD_CASE_Q2_4S_P_GT_6S = 1,
  PD_CASE_Q2_4S_P_LT_6S = 2,
  PD_CASE_Q2_QUARTER_P_NE_6S = 3,
  PD_CASE_ALL_EQUAL_P_6S = 4,
  PD_CASE_QZERO_GEN = 5,
  PD_CASE_QZERO_P_2S = 6,
  PD_CASE_QZERO_P_NEG2S = 7,
  PD_CASE_SZERO_GEN = 8,
  PD_CASE_SZERO_P2_4Q2 = 9,
  PD_CASE_DIAG = 10,
} PdCase;

typedef enum PdRegion {
  PD_REGION_D1 = 1,
  PD_REGION_D2 = 2,
  PD_REGION_D3 = 3,
  PD_REGION_D4 = 4,
  PD_REGION_D0 = 0,
  PD_REGION_OUTSIDE = -1,
} PdRegion;

/**
 * Opaque MA(1) point `(phi, lambda1, lambda2)`.
 */
typedef struct PdMa1Point PdMa1Point;

/**
 * Opaque parameter set `(p, q, r, s)`.
 */
typedef struct PdParams PdParams;

/**
 * Determinant as `sign * exp(log_abs)`, also split as
 * `mantissa10 * 10^exponent10`. A zero determinant has `sign == 0`,
 * `log_abs == -inf` and a zero mantissa.
 */
typedef struct PdDet {
  int32_t sign;
  double log_abs;
  double mantissa10;
  int64_t exponent10;
  enum PdCase case_id;
} PdDet;

typedef struct PdClassification {
  enum PdRegion region;
  /**
   * Null eigenvalue witness for `D0`, zero otherwise.
   */
  uint64_t witness_k;
  uint64_t witness_n;
} PdClassification;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a parameter handle. All four values must be finite.
 *
 * # Safety
 * `out` must be valid for writes of one pointer.
 */
enum PdStatus pd_params_new(double p, double q, double r, double s, struct PdParams **out);

/**
 * # Safety
 * `params` must be null or a handle from [`pd_params_new`] not yet freed.
 */
void pd_params_free(struct PdParams *params);

/**
 * `det D_n` by the closed form, for any `n >= 3`.
 *
 * # Safety
 * `params` must be a live handle and `out` valid for writes.
 */
enum PdStatus pd_det_closed(const struct PdParams *params, uint64_t n, struct PdDet *out);

/**
 * `det D_n` by the order-five recurrence, linear in `n`.
 *
 * # Safety
 * `params` must be a live handle and `out` valid for writes.
 */
enum PdStatus pd_det_recurrence(const struct PdParams *params, uint64_t n, struct PdDet *out);

/**
 * Definiteness region of the parameter set; requires `p >= 0`.
 *
 * # Safety
 * `params` must be a live handle and `out` valid for writes.
 */
enum PdStatus pd_classify(const struct PdParams *params, struct PdClassification *out);

/**
 * Creates an MA(1) point handle; requires `|phi| < 1`.
 *
 * # Safety
 * `out` must be valid for writes of one pointer.
 */
enum PdStatus pd_ma1_new(double phi, double lambda1, double lambda2, struct PdMa1Point **out);

/**
 * # Safety
 * `point` must be null or a handle from [`pd_ma1_new`] not yet freed.
 */
void pd_ma1_free(struct PdMa1Point *point);

/**
 * Finite-sample cumulant `L_n`, `n >= 2`. Writes `+inf` when it diverges.
 *
 * # Safety
 * `point` must be a live handle and `out` valid for writes.
 */
enum PdStatus pd_ma1_l_n(const struct PdMa1Point *point, uint64_t n, double *out);

/**
 * Limit of `L_n` as `n -> inf`. Writes `+inf` outside the domain.
 *
 * # Safety
 * `point` must be a live handle and `out` valid for writes.
 */
enum PdStatus pd_ma1_limit(const struct PdMa1Point *point, double *out);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *pd_last_error(void);

/**
 * Static description of a status code.
 */
const char *pd_status_str(enum PdStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PENTADIAG_H */
