#ifndef QFP_H
#define QFP_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QfpStatus {
  QFP_STATUS_OK = 0,
  QFP_STATUS_NULL_POINTER = 1,
  QFP_STATUS_DOMAIN = 2,
  QFP_STATUS_PARSE = 3,
  QFP_STATUS_UNSUPPORTED = 4,
  QFP_STATUS_INVALID_UTF8 = 5,
  QFP_STATUS_PANIC = 6,
} QfpStatus;

typedef enum QfpProtocol {
  QFP_PROTOCOL_UNENTANGLED = 0,
  QFP_PROTOCOL_ENTANGLED = 1,
} QfpProtocol;

typedef enum QfpAdversary {
  QFP_ADVERSARY_WCS = 0,
  QFP_ADVERSARY_UNIFORM = 1,
  /**
   * Uses the `x`, `y` fields of [`QfpSimParams`].
   */
  QFP_ADVERSARY_FIXED_PAIR = 2,
} QfpAdversary;

/**
 * Opaque encoding handle.
 */
typedef struct QfpEncoding QfpEncoding;

typedef struct QfpMixedStrategy {
  double pi0;
  double pi1;
  double success;
} QfpMixedStrategy;

typedef struct QfpCalibration {
  double d;
  double v_off;
  double p_same_err;
  double p_diff_err;
} QfpCalibration;

typedef struct QfpSimParams {
  enum QfpProtocol protocol;
  uint64_t trials;
  uint64_t seed;
  double dip_depth;
  double pi0;
  double pi1;
  enum QfpAdversary adversary;
  uint32_t x;
  uint32_t y;
} QfpSimParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. Valid until the next failing call.
 */
const char *qfp_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a string obtained from this library and not yet freed.
 */
void qfp_string_free(char *s);

/**
 * The four tetrahedral states.
 */
enum QfpStatus qfp_encoding_tetrahedral(struct QfpEncoding **out_handle);

/**
 * Seeded search for `m` states with small maximum overlap.
 */
enum QfpStatus qfp_encoding_search(uint32_t m,
                                   uint32_t iterations,
                                   uint64_t seed,
                                   struct QfpEncoding **out_handle);

/**
 * Releases an encoding. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle from this library that has not been freed.
 */
void qfp_encoding_free(struct QfpEncoding *h);

enum QfpStatus qfp_encoding_m(const struct QfpEncoding *h, uint32_t *out_m);

enum QfpStatus qfp_encoding_delta_max(const struct QfpEncoding *h, double *out_delta);

/**
 * Bloch angles of message `w`.
 */
enum QfpStatus qfp_encoding_state(const struct QfpEncoding *h,
                                  uint32_t w,
                                  double *out_theta,
                                  double *out_phi);

/**
 * `|<a|b>|^2` for two states given by Bloch angles.
 */
enum QfpStatus qfp_overlap(double theta_a,
                           double phi_a,
                           double theta_b,
                           double phi_b,
                           double *out_overlap);

/**
 * Coincidence probability at zero delay for one photon in each state.
 */
enum QfpStatus qfp_coincidence_product(double theta_a,
                                       double phi_a,
                                       double theta_b,
                                       double phi_b,
                                       double dip_depth,
                                       double *out_probability);

enum QfpStatus qfp_optimize_mixed(double p_same_err,
                                  double p_diff_err,
                                  struct QfpMixedStrategy *out_strategy);

/**
 * Calibrates from visibility-table CSV text (header `alice,0,1,...`).
 */
enum QfpStatus qfp_calibrate_csv(const char *csv, struct QfpCalibration *out_calibration);

/**
 * Runs a simulation with the tetrahedral encoding and writes the report as JSON.
 * The string must be released with [`qfp_string_free`].
 */
enum QfpStatus qfp_simulate_json(const struct QfpSimParams *params, char **out_json);

/**
 * Exact best classical one-bit success with `shared_bits` shared random bits, as a fraction.
 */
enum QfpStatus qfp_classical_best_success(uint32_t m,
                                          uint32_t shared_bits,
                                          bool mixed_roger,
                                          int64_t *out_numer,
                                          int64_t *out_denom);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QFP_H */
