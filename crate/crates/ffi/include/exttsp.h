#ifndef EXTTSP_H
#define EXTTSP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ExttspStatus {
  EXTTSP_STATUS_OK = 0,
  EXTTSP_STATUS_NULL_POINTER = 1,
  // Malformed graph, discount, layout or parameter.
  EXTTSP_STATUS_INVALID_INPUT = 2,
  // Well-formed request the solver refuses (non-tree, size limit, budget).
  EXTTSP_STATUS_INFEASIBLE = 3,
  EXTTSP_STATUS_INTERNAL = 4,
  // The output buffer is too short; the required length was written.
  EXTTSP_STATUS_BUFFER_TOO_SMALL = 5,
} ExttspStatus;

// Algorithm codes for `exttsp_solve`.
typedef enum ExttspAlgorithm {
  EXTTSP_ALGORITHM_GREEDY = 0,
  EXTTSP_ALGORITHM_CYCLE_COVER = 1,
  EXTTSP_ALGORITHM_LOCAL_SEARCH = 2,
  EXTTSP_ALGORITHM_TREE_EXACT = 3,
  EXTTSP_ALGORITHM_BRUTE_FORCE = 4,
} ExttspAlgorithm;

// Discount kinds for `exttsp_discount_new`.
typedef enum ExttspDiscountKind {
  EXTTSP_DISCOUNT_KIND_STEP = 0,
  EXTTSP_DISCOUNT_KIND_LINEAR = 1,
} ExttspDiscountKind;

typedef struct ExttspDiscount ExttspDiscount;

typedef struct ExttspGraph ExttspGraph;

typedef struct ExttspReport ExttspReport;

// Solver settings. Zero fields select the defaults.
typedef struct ExttspSolveOptions {
  // Greedy start vertex, 0 for automatic.
  size_t start;
  // Local-search subset size, 0 for min(2k, n).
  size_t ell;
  // Local-search improvement threshold.
  double delta;
  // Brute-force vertex limit, 0 for the default.
  size_t brute_force_limit;
  // Tree-exact work budget, 0 for the default.
  double budget;
} ExttspSolveOptions;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Static description of a status code.
const char *exttsp_status_message(uint32_t status);

// Copies the last error message of this thread, NUL terminated, into `buf`.
// `len` receives the message length without the terminator.
enum ExttspStatus exttsp_last_error(char *buf, size_t cap, size_t *len);

// Builds a graph on vertices `1..=n` from `m` edges. With `directed` set,
// opposite arcs are merged by adding their weights.
enum ExttspStatus exttsp_graph_new(size_t n,
                                   const size_t *us,
                                   const size_t *vs,
                                   const double *ws,
                                   size_t m,
                                   bool directed,
                                   struct ExttspGraph **out);

// Parses an instance in the text format. Vertex ids must be `1..=n`.
enum ExttspStatus exttsp_graph_parse(const char *text, struct ExttspGraph **out);

void exttsp_graph_free(struct ExttspGraph *g);

enum ExttspStatus exttsp_graph_size(const struct ExttspGraph *g, size_t *n, size_t *m);

enum ExttspStatus exttsp_discount_new(uint32_t kind, size_t k, struct ExttspDiscount **out);

// Discount with values `f(1) .. f(k)`, `k = len`.
enum ExttspStatus exttsp_discount_from_table(const double *values,
                                             size_t len,
                                             struct ExttspDiscount **out);

void exttsp_discount_free(struct ExttspDiscount *f);

// Scores the ordering `order[0..n]` of all vertices.
enum ExttspStatus exttsp_score(const struct ExttspGraph *g,
                               const struct ExttspDiscount *f,
                               const size_t *order,
                               size_t n,
                               double *value);

// Runs a solver. `options` may be null for the defaults.
enum ExttspStatus exttsp_solve(const struct ExttspGraph *g,
                               const struct ExttspDiscount *f,
                               uint32_t algorithm,
                               const struct ExttspSolveOptions *options,
                               struct ExttspReport **out);

enum ExttspStatus exttsp_report_value(const struct ExttspReport *r, double *value);

// Copies the layout (vertex ids in position order) into `buf`. `len`
// receives the vertex count; a short buffer yields `BufferTooSmall`.
enum ExttspStatus exttsp_report_layout(const struct ExttspReport *r,
                                       size_t *buf,
                                       size_t cap,
                                       size_t *len);

// Named counter of the run, for example `millis` or `moves_accepted`.
enum ExttspStatus exttsp_report_stat(const struct ExttspReport *r,
                                     const char *name,
                                     uint64_t *value);

void exttsp_report_free(struct ExttspReport *r);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* EXTTSP_H */
