/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef RESPART_H
#define RESPART_H

#include <stddef.h>
#include <stdint.h>

// Two-part parity condition for `q = 2`.
typedef enum RpCondition {
  RP_CONDITION_EVEN_EVEN = 0,
  RP_CONDITION_EVEN_ODD = 1,
  RP_CONDITION_ODD_ODD = 2,
} RpCondition;

// Limiting law selector.
typedef enum RpLimitKind {
  RP_LIMIT_KIND_X = 0,
  RP_LIMIT_KIND_Z = 1,
} RpLimitKind;

typedef enum RpStatus {
  RP_STATUS_OK = 0,
  RP_STATUS_NULL_POINTER = 1,
  RP_STATUS_INVALID_ARGUMENT = 2,
  RP_STATUS_PARSE = 3,
  RP_STATUS_SCALE_GUARD = 4,
  RP_STATUS_OVERFLOW = 5,
  RP_STATUS_PANIC = 6,
} RpStatus;

// A simple graph.
typedef struct RpGraph RpGraph;

// A finite distribution over non-negative integers, ascending by value.
typedef struct RpPmf RpPmf;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failure on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *rp_last_error_message(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void rp_string_free(char *s);

// Library version as a static string.
const char *rp_version(void);

// Samples `G(n, p_num/p_den)` from `seed`.
//
// # Safety
// `out` must be a valid pointer.
enum RpStatus rp_graph_sample_gnp(size_t n,
                                  uint64_t p_num,
                                  uint64_t p_den,
                                  uint64_t seed,
                                  struct RpGraph **out);

// Parses the edge-list text format.
//
// # Safety
// `text` must be a NUL-terminated string and `out` a valid pointer.
enum RpStatus rp_graph_parse_edge_list(const char *text, struct RpGraph **out);

// Builds a graph from `m` 0-indexed pairs stored as `edges[2i], edges[2i+1]`.
//
// # Safety
// `edges` must point to `2 * m` values (may be null when `m == 0`) and
// `out` must be valid.
enum RpStatus rp_graph_from_edges(size_t n, const uint32_t *edges, size_t m, struct RpGraph **out);

// Releases a graph. Null is ignored.
//
// # Safety
// `g` must come from this library and not have been freed.
void rp_graph_free(struct RpGraph *g);

// Number of vertices, or 0 for null.
//
// # Safety
// `g` must be null or a live graph.
size_t rp_graph_vertex_count(const struct RpGraph *g);

// Number of edges, or 0 for null.
//
// # Safety
// `g` must be null or a live graph.
size_t rp_graph_edge_count(const struct RpGraph *g);

// Canonical edge-list text of `g`, freed with `rp_string_free`.
//
// # Safety
// `g` must be a live graph and `out` valid.
enum RpStatus rp_graph_to_edge_list(const struct RpGraph *g, char **out);

// Number of two-part partitions of `g` under `cond`, as a decimal string.
//
// # Safety
// `g` must be a live graph and `out` valid.
enum RpStatus rp_count_partitions_q2(const struct RpGraph *g, enum RpCondition cond, char **out);

// `log2` of the two-part partition count, or -1 when there are none.
//
// # Safety
// `g` must be a live graph and `out` valid.
enum RpStatus rp_count_partitions_q2_log2(const struct RpGraph *g,
                                          enum RpCondition cond,
                                          int64_t *out);

// Brute-force count of good partitions for the spec `(q; a[0..a_len])`.
//
// # Safety
// `g` must be a live graph, `a` must point to `a_len` values and `out`
// must be valid.
enum RpStatus rp_count_good(const struct RpGraph *g,
                            uint32_t q,
                            const uint32_t *a,
                            size_t a_len,
                            uint64_t *out);

// Exact distribution of the `q = 2` count in `G(n, 1/2)`.
//
// # Safety
// `out` must be valid.
enum RpStatus rp_dist_q2(enum RpCondition cond, uint32_t n, struct RpPmf **out);

// Limiting law truncated at `2^k_max`.
//
// # Safety
// `out` must be valid.
enum RpStatus rp_limit_dist(enum RpLimitKind kind, uint32_t k_max, struct RpPmf **out);

// Number of support points, or 0 for null.
//
// # Safety
// `pmf` must be null or a live distribution.
size_t rp_pmf_len(const struct RpPmf *pmf);

// Upper bound on the mass a truncated distribution omits (0 when exact).
//
// # Safety
// `pmf` must be null or a live distribution.
double rp_pmf_tail_bound(const struct RpPmf *pmf);

// Entry `index` as a value and a double-precision mass. Values that do not
// fit in 64 bits give `RP_STATUS_OVERFLOW`; use `rp_pmf_get_exact`.
//
// # Safety
// `pmf` must be a live distribution; `value` and `mass` must be valid.
enum RpStatus rp_pmf_get(const struct RpPmf *pmf, size_t index, uint64_t *value, double *mass);

// Entry `index` as decimal strings for the value and the reduced mass
// numerator and denominator; each is freed with `rp_string_free`.
//
// # Safety
// `pmf` must be a live distribution and the out pointers valid.
enum RpStatus rp_pmf_get_exact(const struct RpPmf *pmf,
                               size_t index,
                               char **value,
                               char **mass_num,
                               char **mass_den);

// Releases a distribution. Null is ignored.
//
// # Safety
// `pmf` must come from this library and not have been freed.
void rp_pmf_free(struct RpPmf *pmf);

// Exact `E[X_n]` for the spec `(q; a[0..a_len])` in `G(n, 1/2)`, as a
// reduced fraction of decimal strings plus a double approximation. Any
// of the out pointers may be null.
//
// # Safety
// `a` must point to `a_len` values; non-null out pointers must be valid.
enum RpStatus rp_expected_count(size_t n,
                                uint32_t q,
                                const uint32_t *a,
                                size_t a_len,
                                char **num,
                                char **den,
                                double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RESPART_H */
