/*
 * cascade_lab: C interface to the cascade simulation and fitting library.
 *
 * Objects are opaque handles released with the matching *_free function.
 * Every fallible call returns a cl_status; on failure cl_last_error() holds a
 * message for the calling thread until its next failing call.
 */
#ifndef CASCADE_LAB_H
#define CASCADE_LAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CL_API __declspec(dllexport)
#else
#define CL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cl_status {
  CL_OK = 0,
  CL_ERR_INVALID_ARGUMENT = 1,
  CL_ERR_IO = 2,
  CL_ERR_FORMAT = 3, /* malformed binary graph file */
  CL_ERR_PARSE = 4,  /* malformed text input */
  CL_ERR_DOMAIN = 5, /* empty histogram, all grid points diverged, overflow */
  CL_ERR_INTERNAL = 6
} cl_status;

typedef enum cl_direction {
  CL_DIRECTION_FORWARD = 0,
  CL_DIRECTION_REVERSE = 1,
  CL_DIRECTION_UNDIRECTED = 2
} cl_direction;

typedef enum cl_model {
  CL_MODEL_CGM = 0,
  CL_MODEL_ALPHA = 1,
  CL_MODEL_ALPHA_K = 2,
  CL_MODEL_MULTI_EXACT = 3,
  CL_MODEL_COMPOUND = 4 /* fitting only */
} cl_model;

typedef struct cl_graph cl_graph;
typedef struct cl_histogram cl_histogram;
typedef struct cl_table cl_table;

CL_API const char* cl_last_error(void);
CL_API const char* cl_status_name(cl_status status);
/* Parses "cgm", "alpha", "alpha-k", "multi-exact", "compound". */
CL_API cl_status cl_model_parse(const char* name, cl_model* out);

/* ---- graphs ------------------------------------------------------------ */

CL_API cl_status cl_graph_load(const char* path, cl_graph** out);
CL_API cl_status cl_graph_save(const cl_graph* graph, const char* path);
/* Text edge list of decimal ids; ids are densified in ascending order and the
 * mapping written to id_map_path when it is not NULL. */
CL_API cl_status cl_graph_from_edge_list(const char* path, cl_direction direction, const char* id_map_path,
                                         cl_graph** out);
CL_API cl_status cl_graph_star(uint64_t leaves, cl_graph** out);
CL_API cl_status cl_graph_path(uint64_t n, cl_graph** out);
CL_API cl_status cl_graph_erdos_renyi(uint64_t n, double p, uint64_t seed, cl_graph** out);
CL_API uint64_t cl_graph_num_nodes(const cl_graph* graph);
CL_API uint64_t cl_graph_num_edges(const cl_graph* graph);
CL_API cl_direction cl_graph_direction(const cl_graph* graph);
/* Borrowed view into the graph; valid until the graph is freed. */
CL_API cl_status cl_graph_neighbors(const cl_graph* graph, uint32_t node, const uint32_t** neighbors, size_t* count);
CL_API void cl_graph_free(cl_graph* graph);

/* ---- ingestion --------------------------------------------------------- */

typedef struct cl_ingest_options {
  const char* events_path;    /* event TSV, required */
  const char* graph_out;      /* binary graph, required */
  const char* id_map_out;     /* NULL: "<graph_out>.ids.tsv" */
  const char* popularity_out; /* NULL: skipped */
  const char* split_out;      /* NULL: skipped */
  unsigned fresh_days;        /* full days in the fresh window, >= 1 */
  int strict;                 /* nonzero: malformed lines are errors */
} cl_ingest_options;

typedef struct cl_ingest_summary {
  uint64_t events;
  uint64_t malformed;
  uint64_t nodes;
  uint64_t edges;
  uint64_t hashtags; /* fresh hashtags in the popularity distribution */
  uint64_t train_days;
  uint64_t test_days;
} cl_ingest_summary;

CL_API void cl_ingest_options_init(cl_ingest_options* options);
CL_API cl_status cl_ingest(const cl_ingest_options* options, cl_ingest_summary* summary);

/* ---- simulation -------------------------------------------------------- */

#define CL_NO_SIZE_CAP UINT64_MAX

typedef struct cl_sim_options {
  cl_model model; /* CGM, ALPHA, ALPHA_K or MULTI_EXACT */
  double alpha;
  double lambda; /* MULTI_EXACT only */
  uint64_t runs;
  uint64_t seed;
  unsigned workers;    /* 0: CASCADE_LAB_WORKERS or hardware concurrency */
  uint64_t max_rounds; /* 0: 10000 */
  uint64_t size_cap;   /* 0: 1000 for ALPHA, none otherwise; CL_NO_SIZE_CAP: none */
  int64_t start;       /* < 0: uniform random start per run */
} cl_sim_options;

typedef struct cl_cascade_outcome {
  uint64_t spreaders;
  uint64_t informed;
  uint64_t rounds;
  int truncated;
} cl_cascade_outcome;

CL_API void cl_sim_options_init(cl_sim_options* options);
/* Run `stream_index` of a batch with these options, on its own. */
CL_API cl_status cl_simulate_one(const cl_graph* graph, const cl_sim_options* options, uint64_t stream_index,
                                 cl_cascade_outcome* out);
/* table_out may be NULL. */
CL_API cl_status cl_simulate_batch(const cl_graph* graph, const cl_sim_options* options, cl_histogram** hist_out,
                                   cl_table** table_out);

/* ---- histograms and statistics ------------------------------------------ */

CL_API cl_status cl_histogram_new(cl_histogram** out);
CL_API cl_status cl_histogram_add(cl_histogram* hist, uint64_t size, uint64_t count);
CL_API cl_status cl_histogram_load(const char* path, cl_histogram** out);
/* size<TAB>count rows after a "# runs=.. truncated=.." header when the
 * histogram came from a simulation. */
CL_API cl_status cl_histogram_save(const cl_histogram* hist, const char* path);
CL_API cl_status cl_histogram_save_cdf(const cl_histogram* hist, const char* path);
CL_API cl_status cl_histogram_merge(const cl_histogram* a, const cl_histogram* b, cl_histogram** out);
CL_API uint64_t cl_histogram_total(const cl_histogram* hist);
CL_API uint64_t cl_histogram_count(const cl_histogram* hist, uint64_t size);
CL_API uint64_t cl_histogram_truncated(const cl_histogram* hist);
CL_API uint64_t cl_histogram_diverged(const cl_histogram* hist);
CL_API void cl_histogram_free(cl_histogram* hist);

CL_API cl_status cl_ks(const cl_histogram* a, const cl_histogram* b, double* statistic, uint64_t* location);
CL_API cl_status cl_bucketize_save(const cl_histogram* hist, double base, const char* path);

/* ---- property tables and the compound sampler --------------------------- */

CL_API cl_status cl_table_load(const char* path, cl_table** out);
CL_API cl_status cl_table_save(const cl_table* table, const char* path);
CL_API uint64_t cl_table_entries(const cl_table* table);
CL_API uint64_t cl_table_total(const cl_table* table);
CL_API void cl_table_free(cl_table* table);

typedef struct cl_compound_options {
  double lambda;
  uint64_t runs;
  uint64_t seed;
  unsigned workers;   /* 0: default */
  uint64_t round_cap; /* 0: 1000000 */
} cl_compound_options;

CL_API void cl_compound_options_init(cl_compound_options* options);
CL_API cl_status cl_compound_batch(const cl_table* table, const cl_compound_options* options, cl_histogram** out);

/* ---- fitting ------------------------------------------------------------ */

typedef struct cl_fit_options {
  cl_model model;
  double alpha_lo, alpha_hi;
  double lambda_lo, lambda_hi; /* two-parameter models only */
  double step;
  uint64_t runs_per_point;
  unsigned refinement_levels; /* default 3; 0: flat sweep */
  uint64_t seed;
  unsigned workers;
  uint64_t max_rounds; /* 0: default */
  uint64_t size_cap;   /* as in cl_sim_options */
  uint64_t round_cap;  /* 0: default */
} cl_fit_options;

typedef struct cl_fit_summary {
  double best_alpha;
  int has_lambda;
  double best_lambda;
  double best_ks;
  uint64_t evaluations;
  uint64_t diverged_points;
} cl_fit_summary;

CL_API void cl_fit_options_init(cl_fit_options* options);
/* Writes the fit report TSV to report_path unless it is NULL. */
CL_API cl_status cl_fit(const cl_graph* graph, const cl_histogram* target, const cl_fit_options* options,
                        const char* report_path, cl_fit_summary* out);
CL_API cl_status cl_validate(const cl_graph* graph, const cl_fit_options* options, const cl_fit_summary* fit,
                             const cl_histogram* test_target, uint64_t runs, uint64_t seed, double* test_ks,
                             double* difference);

#ifdef __cplusplus
}
#endif

#endif /* CASCADE_LAB_H */
