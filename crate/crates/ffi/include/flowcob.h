/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef FLOWCOB_H
#define FLOWCOB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Reduction order for [`flowcob_skeleton_reduce`]: all sink merges first.
#define FLOWCOB_STRATEGY_PHASED 0

// Reduction order for [`flowcob_skeleton_reduce`]: alternate merge kinds.
#define FLOWCOB_STRATEGY_INTERLEAVED 1

typedef enum FlowcobStatus {
  FLOWCOB_STATUS_OK = 0,
  FLOWCOB_STATUS_NULL_POINTER = 1,
  FLOWCOB_STATUS_INVALID_UTF8 = 2,
  // Input is not valid JSON or does not have the expected fields.
  FLOWCOB_STATUS_PARSE = 3,
  // Input parsed but does not describe a valid map, field graph or skeleton.
  FLOWCOB_STATUS_INVALID_MAP = 4,
  // The operation is not defined for this input.
  FLOWCOB_STATUS_DOMAIN = 5,
  // The caller's buffer is too small; the required size was written.
  FLOWCOB_STATUS_BUFFER_TOO_SMALL = 6,
  // Internal error; the library state is unaffected.
  FLOWCOB_STATUS_PANIC = 7,
} FlowcobStatus;

// Opaque field graph.
typedef struct FlowcobFieldGraph FlowcobFieldGraph;

// Opaque combinatorial map.
typedef struct FlowcobMap FlowcobMap;

// Opaque skeleton map (sink or source role, with optional marks).
typedef struct FlowcobSkeleton FlowcobSkeleton;

typedef struct FlowcobMapCounts {
  size_t vertices;
  size_t edges;
  size_t faces;
  size_t genus;
} FlowcobMapCounts;

typedef struct FlowcobZeroCounts {
  size_t sources;
  size_t sinks;
  size_t saddles;
  size_t genus;
} FlowcobZeroCounts;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failing call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *flowcob_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string returned by this library, not yet freed.
void flowcob_string_free(char *s);

// Parses a map from JSON (`n_darts`, `alpha`, `sigma`, optional
// `isolated_vertices`).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum FlowcobStatus flowcob_map_from_json(const char *json, struct FlowcobMap **out);

// # Safety
// `map` must be null or a handle from this library, not yet freed.
void flowcob_map_free(struct FlowcobMap *map);

// # Safety
// `map` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_map_counts(const struct FlowcobMap *map, struct FlowcobMapCounts *out);

// Dual map on the same surface; the result is a new handle.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_map_dual(const struct FlowcobMap *map, struct FlowcobMap **out);

// Writes whether an orientation-preserving isomorphism exists.
//
// # Safety
// `a` and `b` must be live handles; `out` must be writable.
enum FlowcobStatus flowcob_map_isomorphic(const struct FlowcobMap *a,
                                          const struct FlowcobMap *b,
                                          bool *out);

// Copies the canonical form into `buf`. `len` is always set to the full
// size; if `capacity` is smaller, nothing is copied and
// `FLOWCOB_STATUS_BUFFER_TOO_SMALL` is returned. `buf` may be null when
// `capacity` is zero.
//
// # Safety
// `map` must be a live handle; `buf` must have room for `capacity` bytes;
// `len` must be writable.
enum FlowcobStatus flowcob_map_canonical_form(const struct FlowcobMap *map,
                                              uint8_t *buf,
                                              size_t capacity,
                                              size_t *len);

// # Safety
// `map` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_map_to_json(const struct FlowcobMap *map, char **out);

// Parses a field graph from JSON (map fields plus `kinds` and `tail`).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum FlowcobStatus flowcob_field_graph_from_json(const char *json, struct FlowcobFieldGraph **out);

// # Safety
// `fg` must be null or a handle from this library, not yet freed.
void flowcob_field_graph_free(struct FlowcobFieldGraph *fg);

// # Safety
// `fg` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_field_graph_counts(const struct FlowcobFieldGraph *fg,
                                              struct FlowcobZeroCounts *out);

// Writes `valid`, the Poincare-Hopf residual and, if `report` is non-null,
// the full validation report as JSON.
//
// # Safety
// `fg` must be a live handle; `valid` and `residual` must be writable;
// `report` must be null or writable.
enum FlowcobStatus flowcob_field_graph_validate(const struct FlowcobFieldGraph *fg,
                                                bool *valid,
                                                int64_t *residual,
                                                char **report);

// # Safety
// `fg` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_field_graph_to_json(const struct FlowcobFieldGraph *fg, char **out);

// Sink skeleton of a field graph.
//
// # Safety
// `fg` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_field_graph_sink_skeleton(const struct FlowcobFieldGraph *fg,
                                                     struct FlowcobSkeleton **out);

// Source skeleton of a field graph.
//
// # Safety
// `fg` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_field_graph_source_skeleton(const struct FlowcobFieldGraph *fg,
                                                       struct FlowcobSkeleton **out);

// Parses a skeleton from JSON (map fields plus optional `role`,
// `marked_vertices`, `marked_faces`).
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum FlowcobStatus flowcob_skeleton_from_json(const char *json, struct FlowcobSkeleton **out);

// # Safety
// `s` must be null or a handle from this library, not yet freed.
void flowcob_skeleton_free(struct FlowcobSkeleton *s);

// # Safety
// `s` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_skeleton_to_json(const struct FlowcobSkeleton *s, char **out);

// Copy of the skeleton's underlying map.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_skeleton_map(const struct FlowcobSkeleton *s, struct FlowcobMap **out);

// Field graph whose sink (or source) skeleton is `s`.
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_skeleton_reconstruct(const struct FlowcobSkeleton *s,
                                                struct FlowcobFieldGraph **out);

// Reduction trace of an unmarked skeleton, as JSON lines (one move per line).
//
// # Safety
// `s` must be a live handle; `out` must be writable.
enum FlowcobStatus flowcob_skeleton_reduce(const struct FlowcobSkeleton *s,
                                           uint32_t strategy,
                                           char **out);

// Twist word for the determinant-one matrix `[[a, b], [c, d]]`, written as
// text, for example `"G1 G2^-1"`, or `"(empty)"` for the identity.
//
// # Safety
// `out` must be writable.
enum FlowcobStatus flowcob_torus_decompose(int64_t a, int64_t b, int64_t c, int64_t d, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FLOWCOB_H */
