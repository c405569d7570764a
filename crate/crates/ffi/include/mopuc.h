#ifndef MOPUC_H
#define MOPUC_H

#include <stddef.h>
#include <stdint.h>

typedef enum MopucStatus {
  MOPUC_STATUS_OK = 0,
  MOPUC_STATUS_NULL_POINTER = 1,
  MOPUC_STATUS_INVALID_ARGUMENT = 2,
  MOPUC_STATUS_DIMENSION_MISMATCH = 3,
  /**
   * Input is not Hermitian, positive, unitary or inside the unit ball.
   */
  MOPUC_STATUS_INVALID_INPUT = 4,
  /**
   * The measure or sequence degenerates before the requested length.
   */
  MOPUC_STATUS_DEGENERATE = 5,
  /**
   * Ill-conditioned or non-convergent computation.
   */
  MOPUC_STATUS_NUMERICAL = 6,
  MOPUC_STATUS_INTERNAL = 7,
  MOPUC_STATUS_PANIC = 8,
} MopucStatus;

typedef enum MopucMethod {
  MOPUC_METHOD_MOMENTS = 0,
  MOPUC_METHOD_DEFLATION = 1,
} MopucMethod;

typedef struct MopucMatrix MopucMatrix;

typedef struct MopucRng MopucRng;

typedef struct MopucVerblunsky MopucVerblunsky;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Length in bytes of the last error message on this thread, including the
 * terminating nul, or 0 if there is none.
 */
size_t mopuc_last_error_length(void);

/**
 * Copies the last error message into `buf`, truncating to `len - 1` bytes.
 * Returns the number of bytes written excluding the nul.
 *
 * # Safety
 * `buf` must be valid for writes of `len` bytes.
 */
size_t mopuc_last_error_message(char *buf, size_t len);

/**
 * Builds a `rows x cols` matrix from `2 * rows * cols` interleaved values.
 *
 * # Safety
 * `data` must point to `2 * rows * cols` doubles and `out` must be writable.
 */
enum MopucStatus mopuc_matrix_new(size_t rows,
                                  size_t cols,
                                  const double *data,
                                  struct MopucMatrix **out);

/**
 * # Safety
 * `m` must be null or a handle from this library not yet freed.
 */
void mopuc_matrix_free(struct MopucMatrix *m);

/**
 * # Safety
 * `m` must be null or a live handle.
 */
size_t mopuc_matrix_rows(const struct MopucMatrix *m);

/**
 * # Safety
 * `m` must be null or a live handle.
 */
size_t mopuc_matrix_cols(const struct MopucMatrix *m);

/**
 * # Safety
 * `m` must be a live handle; `re` and `im` must be writable.
 */
enum MopucStatus mopuc_matrix_get(const struct MopucMatrix *m,
                                  size_t row,
                                  size_t col,
                                  double *re,
                                  double *im);

/**
 * Copies all entries into `data`, interleaved row-major.
 *
 * # Safety
 * `data` must be valid for writes of `len` doubles.
 */
enum MopucStatus mopuc_matrix_copy(const struct MopucMatrix *m, double *data, size_t len);

/**
 * Seeded random stream; distinct `stream` values give independent streams.
 */
struct MopucRng *mopuc_rng_new(uint64_t seed, uint64_t stream);

/**
 * # Safety
 * `rng` must be null or a live handle.
 */
void mopuc_rng_free(struct MopucRng *rng);

/**
 * Haar unitary of size `n`.
 *
 * # Safety
 * `rng` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_sample_haar(struct MopucRng *rng, size_t n, struct MopucMatrix **out);

/**
 * Ginibre matrix of size `n` with unit-variance complex entries.
 *
 * # Safety
 * `rng` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_sample_ginibre(struct MopucRng *rng, size_t n, struct MopucMatrix **out);

/**
 * Top-left `p x p` corner of a Haar unitary of size `n`, `n > 2p`.
 *
 * # Safety
 * `rng` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_sample_corner(struct MopucRng *rng,
                                     size_t n,
                                     size_t p,
                                     struct MopucMatrix **out);

/**
 * First `count` Verblunsky coefficients of `(u, span{e_1..e_p})`.
 *
 * # Safety
 * `u` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_verblunsky_from_unitary(const struct MopucMatrix *u,
                                               size_t p,
                                               size_t count,
                                               enum MopucMethod method,
                                               struct MopucVerblunsky **out);

/**
 * Sequence from `count` coefficient handles of size `p x p`.
 *
 * # Safety
 * `coeffs` must point to `count` live matrix handles and `out` be writable.
 */
enum MopucStatus mopuc_verblunsky_new(size_t p,
                                      const struct MopucMatrix *const *coeffs,
                                      size_t count,
                                      struct MopucVerblunsky **out);

/**
 * # Safety
 * `seq` must be null or a live handle.
 */
void mopuc_verblunsky_free(struct MopucVerblunsky *seq);

/**
 * # Safety
 * `seq` must be null or a live handle.
 */
size_t mopuc_verblunsky_len(const struct MopucVerblunsky *seq);

/**
 * # Safety
 * `seq` must be null or a live handle.
 */
size_t mopuc_verblunsky_dim(const struct MopucVerblunsky *seq);

/**
 * Copy of coefficient `index`.
 *
 * # Safety
 * `seq` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_verblunsky_get(const struct MopucVerblunsky *seq,
                                      size_t index,
                                      struct MopucMatrix **out);

/**
 * The `2p x 2p` unitary rotation built from a strict contraction.
 *
 * # Safety
 * `alpha` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_theta(const struct MopucMatrix *alpha, struct MopucMatrix **out);

/**
 * Leading `blocks x blocks` block section of the GGT matrix, the sequence
 * padded with zeros.
 *
 * # Safety
 * `seq` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_ggt(const struct MopucVerblunsky *seq,
                           size_t blocks,
                           struct MopucMatrix **out);

/**
 * `-log det(I - vv^*)`, `+INFINITY` on or outside the unit ball.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_rate_ball(const struct MopucMatrix *v, double *out);

/**
 * Sum of the ball rates of the coefficients.
 *
 * # Safety
 * `seq` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_rate_seq(const struct MopucVerblunsky *seq, double *out);

/**
 * Log-density of the `p x p` corner law of a Haar unitary of size `n > 2p`;
 * `-INFINITY` outside the ball.
 *
 * # Safety
 * `v` must be a live handle and `out` writable.
 */
enum MopucStatus mopuc_corner_log_density(const struct MopucMatrix *v,
                                          size_t n,
                                          size_t p,
                                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MOPUC_H */
