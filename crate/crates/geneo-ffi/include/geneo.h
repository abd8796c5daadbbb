#ifndef GENEO_H
#define GENEO_H

/* Generated by cbindgen from the geneo-ffi crate; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code of every fallible call.
typedef enum GeneoStatus {
  GENEO_STATUS_OK = 0,
  // A required pointer argument was null.
  GENEO_STATUS_NULL_ARGUMENT = 1,
  // A string argument was not valid UTF-8.
  GENEO_STATUS_INVALID_UTF8 = 2,
  // Malformed input (bad JSON, bad matrix shape, bad weights, ...).
  GENEO_STATUS_INVALID_INPUT = 3,
  // Operands have different degrees.
  GENEO_STATUS_DEGREE_MISMATCH = 4,
  // The group does not act transitively on the domain.
  GENEO_STATUS_NOT_TRANSITIVE = 5,
  // The matrix does not commute with the group action.
  GENEO_STATUS_NOT_EQUIVARIANT = 6,
  // Internal verification failed (tolerances too tight for the input).
  GENEO_STATUS_VERIFICATION_FAILED = 7,
  // A panic was caught at the boundary.
  GENEO_STATUS_PANIC = 8,
} GeneoStatus;

// Opaque handle to a finite permutation group.
typedef struct GeneoGroup GeneoGroup;

// Opaque handle to a dense operator matrix.
typedef struct GeneoMatrix GeneoMatrix;

// Opaque handle to a finitely supported signed measure on permutations.
typedef struct GeneoMeasure GeneoMeasure;

// Certification summary of a matrix under a group.
typedef struct GeneoCheckResult {
  bool transitive;
  bool equivariant;
  bool nonexpansive;
  double inf_norm;
} GeneoCheckResult;

// Verified decomposition certificate.
typedef struct GeneoCertificate {
  bool is_geneo;
  double total_variation;
  double reconstruction_gap;
  double norm_identity_gap;
} GeneoCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the most recent failure on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *geneo_last_error_message(void);

// Parses group JSON `{ "degree": n, "generators": [[...] | "(1 2)"] }` and
// closes the generators. On success writes a handle the caller must free
// with [`geneo_group_free`].
//
// # Safety
// `json` must be a valid NUL-terminated C string and `out` a valid pointer.
enum GeneoStatus geneo_group_parse(const char *json, struct GeneoGroup **out);

// # Safety
// `group` must be null or a pointer from [`geneo_group_parse`], not yet
// freed.
void geneo_group_free(struct GeneoGroup *group);

// Number of points the group acts on; 0 for null.
//
// # Safety
// `group` must be null or a live handle.
size_t geneo_group_degree(const struct GeneoGroup *group);

// Number of group elements; 0 for null.
//
// # Safety
// `group` must be null or a live handle.
size_t geneo_group_order(const struct GeneoGroup *group);

// # Safety
// `group` must be null or a live handle.
bool geneo_group_is_transitive(const struct GeneoGroup *group);

// Wraps `n*n` row-major entries into a matrix handle; the buffer is copied.
// Free with [`geneo_matrix_free`].
//
// # Safety
// `entries` must point to `n*n` readable doubles and `out` must be valid.
enum GeneoStatus geneo_matrix_create(size_t n, const double *entries, struct GeneoMatrix **out);

// # Safety
// `matrix` must be null or a pointer from [`geneo_matrix_create`], not yet
// freed.
void geneo_matrix_free(struct GeneoMatrix *matrix);

// Certifies transitivity, equivariance and non-expansiveness.
//
// # Safety
// All pointers must be live handles / valid out-pointers.
enum GeneoStatus geneo_check(const struct GeneoMatrix *matrix,
                             const struct GeneoGroup *group,
                             double tol,
                             struct GeneoCheckResult *out);

// Recovers the conjugation-invariant measure representing an equivariant
// matrix under a transitive group. On success writes a measure handle
// (free with [`geneo_measure_free`]) and fills the certificate.
//
// # Safety
// All pointers must be live handles / valid out-pointers.
enum GeneoStatus geneo_decompose(const struct GeneoMatrix *matrix,
                                 const struct GeneoGroup *group,
                                 double tol,
                                 struct GeneoMeasure **out_measure,
                                 struct GeneoCertificate *out_certificate);

// # Safety
// `measure` must be null or a pointer from [`geneo_decompose`], not yet
// freed.
void geneo_measure_free(struct GeneoMeasure *measure);

// # Safety
// `measure` must be null or a live handle.
size_t geneo_measure_degree(const struct GeneoMeasure *measure);

// # Safety
// `measure` must be null or a live handle.
size_t geneo_measure_support_size(const struct GeneoMeasure *measure);

// # Safety
// `measure` must be null or a live handle.
double geneo_measure_total_variation(const struct GeneoMeasure *measure);

// Copies the `index`-th support entry (canonical order): the image array
// into `out_images` (`degree` slots) and its weight into `out_weight`.
//
// # Safety
// `out_images` must point to `geneo_measure_degree(measure)` writable
// `size_t` slots; the other pointers must be valid.
enum GeneoStatus geneo_measure_entry(const struct GeneoMeasure *measure,
                                     size_t index,
                                     size_t *out_images,
                                     double *out_weight);

// Serializes a measure as JSON; free the string with [`geneo_string_free`].
//
// # Safety
// `measure` must be a live handle and `out` a valid pointer.
enum GeneoStatus geneo_measure_to_json(const struct GeneoMeasure *measure, char **out);

// Dimension of the space of conjugation-invariant measures under the
// group, as a decimal string (the value can exceed any fixed-width
// integer). Free with [`geneo_string_free`].
//
// # Safety
// `group` must be a live handle and `out` a valid pointer.
enum GeneoStatus geneo_dim_pm(const struct GeneoGroup *group, char **out);

// Frees a string returned by this library.
//
// # Safety
// `text` must be null or a string returned by this library, not yet freed.
void geneo_string_free(char *text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GENEO_H */
