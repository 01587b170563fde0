#ifndef CARLESON_CARLESON_H
#define CARLESON_CARLESON_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CARLESON_BUILDING)
#    define CRL_API __declspec(dllexport)
#  else
#    define CRL_API __declspec(dllimport)
#  endif
#else
#  define CRL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum crl_status {
  CRL_OK = 0,
  CRL_ERR_SIZE = 1,
  CRL_ERR_SHAPE_MISMATCH = 2,
  CRL_ERR_INVALID_NODE = 3,
  CRL_ERR_DOMAIN = 4,
  CRL_ERR_PRECONDITION = 5,
  CRL_ERR_NORMALIZATION = 6,
  CRL_ERR_PARSE = 7,
  CRL_ERR_VALIDATION = 8,
  CRL_ERR_INVALID_ARGUMENT = 9,
  CRL_ERR_INTERNAL = 10,
  CRL_ERR_NULL = 11
} crl_status;

typedef enum crl_support_mode {
  CRL_SUPPORT_ALL_NODES = 0,
  CRL_SUPPORT_BOUNDARY_ONLY = 1
} crl_support_mode;

typedef struct crl_tree_measure crl_tree_measure;
typedef struct crl_bi_measure crl_bi_measure;
typedef struct crl_run_config crl_run_config;
typedef struct crl_report crl_report;

/* Message of the last failing call on this thread; "" when none. */
CRL_API const char* crl_last_error(void);
CRL_API const char* crl_status_name(crl_status status);
CRL_API int crl_format_version(void);

/* Strings returned through char** are owned by the caller. */
CRL_API void crl_string_free(char* s);

/* Tree measures. masses are in heap order, 2^(depth+1)-1 values. */
CRL_API crl_status crl_tree_measure_create(int depth, crl_support_mode mode, const double* masses, size_t count,
                                           crl_tree_measure** out);
CRL_API void crl_tree_measure_free(crl_tree_measure* mu);
CRL_API crl_status crl_tree_measure_depth(const crl_tree_measure* mu, int* out);
CRL_API crl_status crl_tree_measure_to_json(const crl_tree_measure* mu, char** out);

CRL_API crl_status crl_tree_test_constant(const crl_tree_measure* mu, double* constant, size_t* argmax_node);
CRL_API crl_status crl_tree_embedding_constant(const crl_tree_measure* mu, double tol, int max_iter, double* constant,
                                               int* converged);
/* out = I I* mu, heap order, same length as the masses. */
CRL_API crl_status crl_tree_potential(const crl_tree_measure* mu, double* out, size_t count);

/* B(F, f, A, v) on the admissible domain. */
CRL_API crl_status crl_bellman_value(double F, double f, double A, double v, double* out);

/* Bi-tree measures on the 2^n x 2^m grid of boundary cells, row-major. */
CRL_API crl_status crl_bi_measure_create(int n, int m, const double* cells, size_t count, crl_bi_measure** out);
CRL_API void crl_bi_measure_free(crl_bi_measure* mu);
CRL_API crl_status crl_bi_measure_to_json(const crl_bi_measure* mu, char** out);
CRL_API crl_status crl_bi_one_box(const crl_bi_measure* mu, double* out);
CRL_API crl_status crl_bi_embedding_constant(const crl_bi_measure* mu, double tol, int max_iter, double* out);
/* Requires one-box constant <= 1. */
CRL_API crl_status crl_bi_cube_check(const crl_bi_measure* mu, const double* phi, size_t count, double* lhs,
                                     double* rhs);

/* Parses a measure file; exactly one of *tree_out / *bi_out is set. */
CRL_API crl_status crl_measure_parse(const char* bytes, size_t len, crl_tree_measure** tree_out,
                                     crl_bi_measure** bi_out);

/* Harness. Keys mirror the CLI flags (seed, trials, depth, depths, tol,
   format, mode, strategy, optimizer, restarts, signed, input). */
CRL_API crl_status crl_run_config_create(crl_run_config** out);
CRL_API void crl_run_config_free(crl_run_config* cfg);
CRL_API crl_status crl_run_config_set(crl_run_config* cfg, const char* key, const char* value);

CRL_API crl_status crl_run(const char* command, const crl_run_config* cfg, crl_report** out);
CRL_API void crl_report_free(crl_report* report);
CRL_API const char* crl_report_output(const crl_report* report);
CRL_API int crl_report_passed(const crl_report* report);
CRL_API size_t crl_report_artifact_count(const crl_report* report);
CRL_API const char* crl_report_artifact_name(const crl_report* report, size_t i);
CRL_API const char* crl_report_artifact_content(const crl_report* report, size_t i);

/* NULL-terminated list of subcommand names. */
CRL_API const char* const* crl_command_names(void);

#ifdef __cplusplus
}
#endif

#endif
