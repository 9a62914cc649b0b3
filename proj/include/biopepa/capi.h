/* C API of the biopepa toolkit shared library.
 *
 * All objects are opaque handles created and destroyed here. Functions
 * return BP_OK (0) on success; on failure they return a status code and
 * leave a message retrievable with bp_last_error() (thread-local). Output
 * handles and strings are only written on success; strings returned through
 * char** are released with bp_string_free().
 */
#ifndef BIOPEPA_CAPI_H
#define BIOPEPA_CAPI_H

#include <stdint.h>

#if defined(_WIN32)
#define BP_API __declspec(dllexport)
#else
#define BP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bp_status {
  BP_OK = 0,
  BP_E_SEMANTIC = 1, /* model/query/partition is wrong */
  BP_E_IO = 2,       /* file missing or unreadable */
  BP_E_CAP = 3,      /* state-space cap exceeded */
  BP_E_PARSE = 4,    /* malformed text */
  BP_E_EVAL = 5,     /* numeric failure evaluating an expression */
  BP_E_INVALID = 6   /* bad argument (null handle, unknown name, ...) */
} bp_status;

typedef struct bp_system bp_system;
typedef struct bp_network bp_network;
typedef struct bp_trace bp_trace;
typedef struct bp_ctmc bp_ctmc;
typedef struct bp_partition bp_partition;
typedef struct bp_stubset bp_stubset;
typedef struct bp_table bp_table;

BP_API const char* bp_version(void);
BP_API const char* bp_last_error(void);
BP_API void bp_string_free(char* s);

/* ---- model ---- */
BP_API bp_status bp_system_parse_file(const char* path, bp_system** out);
BP_API bp_status bp_system_parse_string(const char* text, const char* name, bp_system** out);
BP_API bp_status bp_system_serialize(const bp_system* sys, char** out);
/* Well-formedness report: one diagnostic per line; counts always written. */
BP_API bp_status bp_system_check(const bp_system* sys, int* errors, int* warnings, char** report);
BP_API void bp_system_free(bp_system* sys);

/* ---- reaction network ---- */
BP_API bp_status bp_network_build(const bp_system* sys, bp_network** out);
BP_API int bp_network_species_count(const bp_network* net);
BP_API int bp_network_reaction_count(const bp_network* net);
BP_API const char* bp_network_species_name(const bp_network* net, int i);
BP_API const char* bp_network_reaction_name(const bp_network* net, int i);
BP_API bp_status bp_network_set_parameter(bp_network* net, const char* name, double value);
/* Installs/overrides the derived maximum amount used for level bounds. */
BP_API bp_status bp_network_set_max_amount(bp_network* net, const char* species, double max_amount);
BP_API void bp_network_free(bp_network* net);

/* ---- stochastic simulation ---- */
BP_API bp_status bp_ensemble_run(const bp_network* net, double t_end, int grid_points, int runs,
                                 uint64_t base_seed, int threads, bp_trace** out);
BP_API int bp_trace_species_count(const bp_trace* tr);
BP_API int bp_trace_point_count(const bp_trace* tr);
BP_API int bp_trace_runs(const bp_trace* tr);
BP_API const char* bp_trace_species_name(const bp_trace* tr, int sp);
BP_API double bp_trace_time(const bp_trace* tr, int i);
BP_API double bp_trace_mean(const bp_trace* tr, int sp, int i);
BP_API double bp_trace_variance(const bp_trace* tr, int sp, int i);
/* max over the grid of mean + 3*stderr, the simulation-derived max amount */
BP_API double bp_trace_derived_max(const bp_trace* tr, int sp);
BP_API bp_status bp_trace_write_csv(const bp_trace* tr, const char* path);
BP_API bp_status bp_trace_read_csv(const char* path, bp_trace** out);
BP_API void bp_trace_free(bp_trace* tr);

/* Mean firing counts per reaction over [0, t_end]; columns reaction,count. */
BP_API bp_status bp_firing_counts(const bp_network* net, double t_end, int runs,
                                  uint64_t base_seed, bp_table** out);

/* ---- CTMC with levels ---- */
BP_API bp_status bp_ctmc_build(const bp_network* net, long long state_cap, bp_ctmc** out);
BP_API long long bp_ctmc_state_count(const bp_ctmc* c);
BP_API long long bp_ctmc_transition_count(const bp_ctmc* c);
BP_API int bp_ctmc_max_level(const bp_ctmc* c, const char* species);
/* Evaluates a query file (text, one query per line); columns query,time,value. */
BP_API bp_status bp_ctmc_eval(const bp_ctmc* c, const char* query_text, bp_table** out);
BP_API void bp_ctmc_free(bp_ctmc* c);

/* Rebuilds the chain per parameter value; columns query,parameter,time,value. */
BP_API bp_status bp_sweep(const bp_network* net, const char* parameter, const double* values,
                          int n_values, const char* query_text, long long state_cap,
                          bp_table** out);

/* ---- decomposed analysis ---- */
BP_API bp_status bp_partition_read(const char* path, bp_partition** out);
BP_API bp_status bp_partition_validate(const bp_partition* p, const bp_network* net);
BP_API void bp_partition_free(bp_partition* p);
/* Columns module,species,class,foreign_modules. */
BP_API bp_status bp_classify(const bp_network* net, const bp_partition* p, bp_table** out);
BP_API bp_status bp_stubset_read(const char* path, bp_stubset** out);
BP_API void bp_stubset_free(bp_stubset* s);
BP_API bp_status bp_extract_module(const bp_system* sys, const bp_partition* p,
                                   const char* module, const bp_stubset* stubs, bp_system** out);
/* strategy: "zero_order_creation" or "fixed_initial". Returns the fitted
 * strategy (may degrade), rate, initial amount and a provenance note. */
BP_API bp_status bp_fit_stub(const bp_trace* reference, const char* species, const char* strategy,
                             char** fitted_strategy, double* rate, double* initial, char** note);
/* species_csv: comma-separated "name@loc" list; empty = all shared species.
 * Columns species,rmse,normalized_rmse,max_abs_deviation,peak_time_diff. */
BP_API bp_status bp_compare_traces(const bp_trace* candidate, const bp_trace* reference,
                                   const char* species_csv, double* worst_normalized_rmse,
                                   bp_table** out);

/* ---- result tables ---- */
BP_API int bp_table_rows(const bp_table* t);
BP_API int bp_table_cols(const bp_table* t);
BP_API const char* bp_table_header(const bp_table* t, int col);
BP_API const char* bp_table_cell(const bp_table* t, int row, int col);
BP_API bp_status bp_table_write_csv(const bp_table* t, const char* path);
BP_API void bp_table_free(bp_table* t);

#ifdef __cplusplus
}
#endif

#endif /* BIOPEPA_CAPI_H */
