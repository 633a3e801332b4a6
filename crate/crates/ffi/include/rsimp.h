#ifndef RSIMP_H
#define RSIMP_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum RsimpStatus {
  RSIMP_STATUS_OK = 0,
  RSIMP_STATUS_NULL_POINTER = 1,
  RSIMP_STATUS_INVALID_ARGUMENT = 2,
  RSIMP_STATUS_EMPTY_INPUT = 3,
  RSIMP_STATUS_INDEX_OUT_OF_RANGE = 4,
  RSIMP_STATUS_PARSE = 5,
  RSIMP_STATUS_IO = 6,
  RSIMP_STATUS_CHECKPOINT = 7,
  RSIMP_STATUS_DIGEST_MISMATCH = 8,
  RSIMP_STATUS_VERSION_MISMATCH = 9,
  RSIMP_STATUS_NUMERIC = 10,
  RSIMP_STATUS_STRUCTURE = 11,
  RSIMP_STATUS_BUFFER_TOO_SMALL = 12,
  RSIMP_STATUS_PANIC = 13,
} RsimpStatus;

/**
 * Opaque triangle mesh.
 */
typedef struct RsimpMesh RsimpMesh;

/**
 * Opaque simplified mesh plus run statistics.
 */
typedef struct RsimpResult RsimpResult;

/**
 * Opaque simplification state that can be refined or checkpointed.
 */
typedef struct RsimpState RsimpState;

/**
 * Sampled surface error between two meshes.
 */
typedef struct RsimpErrorReport {
  double mean_forward;
  double mean_backward;
  double mean_symmetric;
  /**
   * Bounding-box diagonal of the original mesh.
   */
  double diagonal;
  double percent;
  size_t samples;
  uint64_t seed;
  /**
   * Nonzero when the simplified mesh had no usable faces.
   */
  uint8_t degenerate;
} RsimpErrorReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or an empty string.
 * The pointer stays valid until the next call into the library on the
 * same thread.
 */
const char *rsimp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rsimp_version(void);

/**
 * Builds a mesh from `vertex_count` xyz triples and `face_count` index
 * triples.
 *
 * # Safety
 * `positions` must point to `3 * vertex_count` doubles and `indices` to
 * `3 * face_count` integers.
 */
enum RsimpStatus rsimp_mesh_from_arrays(const double *positions,
                                        size_t vertex_count,
                                        const uint32_t *indices,
                                        size_t face_count,
                                        struct RsimpMesh **out);

/**
 * Reads an OBJ or PLY file, chosen by extension.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum RsimpStatus rsimp_mesh_read(const char *path, struct RsimpMesh **out);

/**
 * # Safety
 * `mesh` must be null or a handle from this library.
 */
size_t rsimp_mesh_vertex_count(const struct RsimpMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a handle from this library.
 */
size_t rsimp_mesh_face_count(const struct RsimpMesh *mesh);

/**
 * # Safety
 * `mesh` must be null or a handle from this library not yet freed.
 */
void rsimp_mesh_free(struct RsimpMesh *mesh);

/**
 * Simplifies `mesh` to at least `target_vertices` vertices.
 *
 * A negative `time_budget_ms` means no budget. `state_out` may be null if
 * the state is not needed for later refinement.
 *
 * # Safety
 * Handles must come from this library; out-pointers must be valid or null
 * where allowed.
 */
enum RsimpStatus rsimp_simplify(const struct RsimpMesh *mesh,
                                size_t target_vertices,
                                int64_t time_budget_ms,
                                bool topology_check,
                                struct RsimpState **state_out,
                                struct RsimpResult **result_out);

/**
 * Continues `state` (updated in place) to `target_vertices` vertices.
 *
 * # Safety
 * Handles must come from this library and `state` must have been made for
 * `mesh`.
 */
enum RsimpStatus rsimp_refine(struct RsimpState *state,
                              const struct RsimpMesh *mesh,
                              size_t target_vertices,
                              int64_t time_budget_ms,
                              struct RsimpResult **result_out);

/**
 * Number of clusters (output vertices) in a state.
 *
 * # Safety
 * `state` must be null or a handle from this library.
 */
size_t rsimp_state_cluster_count(const struct RsimpState *state);

/**
 * # Safety
 * `state` must be null or a handle from this library not yet freed.
 */
void rsimp_state_free(struct RsimpState *state);

/**
 * Writes a checkpoint file atomically.
 *
 * # Safety
 * `state` must be a handle from this library and `path` NUL-terminated.
 */
enum RsimpStatus rsimp_checkpoint_save(const struct RsimpState *state, const char *path);

/**
 * Loads a checkpoint made for `mesh`.
 *
 * # Safety
 * `mesh` must be a handle from this library, `path` NUL-terminated and
 * `out` valid.
 */
enum RsimpStatus rsimp_checkpoint_load(const char *path,
                                       const struct RsimpMesh *mesh,
                                       struct RsimpState **out);

/**
 * Uniform-grid vertex clustering with `resolution` cells along the longest
 * axis.
 *
 * # Safety
 * `mesh` must be a handle from this library and `result_out` valid.
 */
enum RsimpStatus rsimp_vertex_cluster(const struct RsimpMesh *mesh,
                                      uint32_t resolution,
                                      struct RsimpResult **result_out);

/**
 * # Safety
 * `result` must be null or a handle from this library.
 */
size_t rsimp_result_vertex_count(const struct RsimpResult *result);

/**
 * # Safety
 * `result` must be null or a handle from this library.
 */
size_t rsimp_result_face_count(const struct RsimpResult *result);

/**
 * Number of splits performed by the run that produced `result`.
 *
 * # Safety
 * `result` must be null or a handle from this library.
 */
size_t rsimp_result_split_count(const struct RsimpResult *result);

/**
 * Whether the run stopped because its time budget ran out.
 *
 * # Safety
 * `result` must be null or a handle from this library.
 */
bool rsimp_result_stopped_by_budget(const struct RsimpResult *result);

/**
 * Copies `3 * vertex_count` doubles (xyz per vertex) into `out`.
 *
 * # Safety
 * `out` must have room for `capacity` doubles.
 */
enum RsimpStatus rsimp_result_copy_vertices(const struct RsimpResult *result,
                                            double *out,
                                            size_t capacity);

/**
 * Copies `3 * face_count` vertex indices into `out`.
 *
 * # Safety
 * `out` must have room for `capacity` integers.
 */
enum RsimpStatus rsimp_result_copy_faces(const struct RsimpResult *result,
                                         uint32_t *out,
                                         size_t capacity);

/**
 * Copies the output vertex of every input vertex (one integer per input
 * vertex) into `out`.
 *
 * # Safety
 * `out` must have room for `capacity` integers.
 */
enum RsimpStatus rsimp_result_copy_vertex_map(const struct RsimpResult *result,
                                              uint32_t *out,
                                              size_t capacity);

/**
 * Writes the simplified mesh atomically; format from the extension.
 *
 * # Safety
 * `result` must be a handle from this library and `path` NUL-terminated.
 */
enum RsimpStatus rsimp_result_write(const struct RsimpResult *result, const char *path);

/**
 * # Safety
 * `result` must be null or a handle from this library not yet freed.
 */
void rsimp_result_free(struct RsimpResult *result);

/**
 * Sampled mean error of `simplified` against `original`. `samples` of 0
 * selects the default (100 per original face, capped).
 *
 * # Safety
 * Handles must come from this library and `out` must be valid.
 */
enum RsimpStatus rsimp_measure(const struct RsimpMesh *original,
                               const struct RsimpResult *simplified,
                               size_t samples,
                               uint64_t seed,
                               struct RsimpErrorReport *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RSIMP_H */
