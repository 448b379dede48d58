#ifndef COVQEC_H
#define COVQEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

// Result of a call.
typedef enum CovqecStatus {
  COVQEC_STATUS_OK = 0,
  COVQEC_STATUS_NULL_POINTER = 1,
  COVQEC_STATUS_INVALID_ARGUMENT = 2,
  COVQEC_STATUS_DIMENSION_CAP = 3,
  COVQEC_STATUS_SHAPE = 4,
  COVQEC_STATUS_INVALID_STATE = 5,
  COVQEC_STATUS_NUMERICAL = 6,
  COVQEC_STATUS_CONTAINER = 7,
  COVQEC_STATUS_IO = 8,
  COVQEC_STATUS_PANIC = 9,
} CovqecStatus;

// A Schur–Weyl decomposition of `(C^d)^{⊗n}`.
typedef struct CovqecSchur CovqecSchur;

// A sampled U(1)-covariant code.
typedef struct CovqecU1Code CovqecU1Code;

// Error bounds of one sampled code with the first `t` qubits erased.
typedef struct CovqecErrorReport {
  double eps_choi_upper;
  double decoupling_term;
  double decoupling_trace_norm;
  double symmetry_term;
  double eps_worst_upper;
  double choi_lower_bound;
  double worst_lower_bound;
} CovqecErrorReport;

// Distances of the averaged U(1) code state from the product reference.
typedef struct CovqecSymmetryTerm {
  double fidelity;
  double purified;
  double trace_distance;
} CovqecSymmetryTerm;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *covqec_last_error(void);

// Library version as a static NUL-terminated string.
const char *covqec_version(void);

// Samples a U(1)-covariant code of `k` logical qubits in `n` physical
// qubits with ancilla weight `alpha`.
//
// # Safety
// `out_code` must be a valid pointer to writable storage.
enum CovqecStatus covqec_u1_code_sample(uint32_t n,
                                        uint32_t k,
                                        uint32_t alpha,
                                        uint64_t seed,
                                        struct CovqecU1Code **out_code);

// Releases a code; NULL is ignored.
//
// # Safety
// `code` must be NULL or a handle from this library not yet freed.
void covqec_u1_code_free(struct CovqecU1Code *code);

// Error bounds of the code with its first `t` qubits erased.
//
// # Safety
// `code` must be a live handle and `report` writable.
enum CovqecStatus covqec_u1_code_errors(const struct CovqecU1Code *code,
                                        uint32_t t,
                                        struct CovqecErrorReport *report);

// Writes the code to `path` in the covqec container format.
//
// # Safety
// `code` must be a live handle and `path` a NUL-terminated string.
enum CovqecStatus covqec_u1_code_save(const struct CovqecU1Code *code, const char *path);

// Reads a code written by [`covqec_u1_code_save`].
//
// # Safety
// `path` must be a NUL-terminated string and `out_code` writable.
enum CovqecStatus covqec_u1_code_load(const char *path, struct CovqecU1Code **out_code);

// Closed-form Choi symmetry term of the averaged U(1) code.
//
// # Safety
// `result` must be writable.
enum CovqecStatus covqec_u1_choi_symmetry_term(uint32_t n,
                                               uint32_t k,
                                               uint32_t t,
                                               uint32_t alpha,
                                               struct CovqecSymmetryTerm *result);

// Worst-case (over logical basis inputs) purified symmetry term.
//
// # Safety
// `result` must be writable.
enum CovqecStatus covqec_u1_worst_symmetry_term(uint32_t n,
                                                uint32_t k,
                                                uint32_t t,
                                                uint32_t alpha,
                                                double *result);

// Bracket `lower <= H_min(A*|RE) <= upper` for the U(1) Choi state.
//
// # Safety
// `lower` and `upper` must be writable.
enum CovqecStatus covqec_u1_hmin_bounds(uint32_t n,
                                        uint32_t k,
                                        uint32_t t,
                                        uint32_t alpha,
                                        double *lower,
                                        double *upper);

// `H_min(P|Q)` of a positive operator on `P ⊗ Q` given as row-major real
// and imaginary parts of length `(p q)²`.
//
// # Safety
// `re` and `im` must point to `(p q)²` readable doubles and `result`
// must be writable.
enum CovqecStatus covqec_hmin_sdp(const double *re,
                                  const double *im,
                                  uint32_t p,
                                  uint32_t q,
                                  double *result);

// Builds the Schur–Weyl decomposition of `n` qudits of dimension `d`.
//
// # Safety
// `out_schur` must be writable.
enum CovqecStatus covqec_schur_new(uint32_t n, uint32_t d, struct CovqecSchur **out_schur);

// Releases a decomposition; NULL is ignored.
//
// # Safety
// `schur` must be NULL or a handle from this library not yet freed.
void covqec_schur_free(struct CovqecSchur *schur);

// Number of irreps `λ` in the decomposition.
//
// # Safety
// `schur` must be a live handle and `count` writable.
enum CovqecStatus covqec_schur_block_count(const struct CovqecSchur *schur, uintptr_t *count);

// Dimensions `l_λ` (SU(d) irrep) and `r_λ` (multiplicity) of block `index`.
//
// # Safety
// `schur` must be a live handle; `l` and `r` must be writable.
enum CovqecStatus covqec_schur_block_dims(const struct CovqecSchur *schur,
                                          uintptr_t index,
                                          uintptr_t *l,
                                          uintptr_t *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* COVQEC_H */
