#ifndef POLYCRIT_POLYCRIT_H
#define POLYCRIT_POLYCRIT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PCRIT_API __declspec(dllexport)
#else
#define PCRIT_API __attribute__((visibility("default")))
#endif

/* Status codes. Every fallible call returns one; details via pcrit_last_error(). */
typedef enum pcrit_status {
  PCRIT_OK = 0,
  PCRIT_INVALID_ARGUMENT = 1,
  PCRIT_SYNTAX_ERROR = 2,
  PCRIT_UNKNOWN_VARIABLE = 3,
  PCRIT_NON_INTEGER_EXPONENT = 4,
  PCRIT_DOMAIN_ERROR = 5,
  PCRIT_DIMENSION_MISMATCH = 6,
  PCRIT_NOT_ON_GRAPH = 7,
  PCRIT_BASE_NOT_IN_SET = 8,
  PCRIT_UNSUPPORTED = 9,
  PCRIT_NOT_STATIONARY = 10,
  PCRIT_NOT_A_MULTIPLIER = 11,
  PCRIT_NOT_IN_DOMAIN = 12,
  PCRIT_BRANCH_LIMIT_EXCEEDED = 13,
  PCRIT_SINGULAR_SYSTEM = 14,
  PCRIT_NOT_EQUALITY_ONLY = 15,
  PCRIT_UNKNOWN_EXPERIMENT = 16,
  PCRIT_SCHEMA_ERROR = 17,
  PCRIT_IO_ERROR = 18,
  PCRIT_INTERNAL_ERROR = 19
} pcrit_status;

typedef enum pcrit_mode { PCRIT_MODE_AT = 0, PCRIT_MODE_AROUND = 1 } pcrit_mode;
typedef enum pcrit_format { PCRIT_FORMAT_TEXT = 0, PCRIT_FORMAT_JSON = 1 } pcrit_format;
typedef enum pcrit_method { PCRIT_METHOD_SSN = 0, PCRIT_METHOD_NEWTON = 1 } pcrit_method;

typedef enum pcrit_solve_status {
  PCRIT_SOLVED = 0,
  PCRIT_MAX_ITER = 1,
  PCRIT_SINGULAR = 2,
  PCRIT_DIVERGED = 3
} pcrit_solve_status;

typedef struct pcrit_problem pcrit_problem;
typedef struct pcrit_trace pcrit_trace;

typedef struct pcrit_solver_options {
  double tol;
  int max_iter;
  int branch_retries;
  double kappa;
  double beta;
  double divergence;
} pcrit_solver_options;

PCRIT_API const char* pcrit_version(void);
PCRIT_API const char* pcrit_status_name(pcrit_status status);
/* Message of the last failed call on this thread; empty after success. */
PCRIT_API const char* pcrit_last_error(void);
/* Releases strings returned through char** out-parameters. */
PCRIT_API void pcrit_free_string(char* s);

PCRIT_API pcrit_status pcrit_problem_parse(const char* json_text, pcrit_problem** out);
PCRIT_API pcrit_status pcrit_problem_load(const char* path, pcrit_problem** out);
PCRIT_API void pcrit_problem_free(pcrit_problem* p);
PCRIT_API int pcrit_problem_n(const pcrit_problem* p);
PCRIT_API int pcrit_problem_m(const pcrit_problem* p);
PCRIT_API int pcrit_problem_equality_only(const pcrit_problem* p);
/* Copies the named point; y is written only when the file provides it (*has_y = 1). */
PCRIT_API pcrit_status pcrit_problem_point(const pcrit_problem* p, const char* name, double* x, double* y,
                                           int* has_y);

PCRIT_API pcrit_status pcrit_residual(const pcrit_problem* p, const double* x, const double* y, double* r_grad,
                                      double* r_graph);
/* y may be NULL. *inconclusive is set when any verdict is Inconclusive. */
PCRIT_API pcrit_status pcrit_analyze(const pcrit_problem* p, const double* x, const double* y, pcrit_mode mode,
                                     pcrit_format format, char** out, int* inconclusive);

PCRIT_API pcrit_solver_options pcrit_solver_options_default(void);
PCRIT_API pcrit_status pcrit_solve(const pcrit_problem* p, pcrit_method method, const double* x0, const double* y0,
                                   const pcrit_solver_options* opts, pcrit_trace** out);
PCRIT_API pcrit_solve_status pcrit_trace_status(const pcrit_trace* t);
PCRIT_API int pcrit_trace_length(const pcrit_trace* t);
PCRIT_API int pcrit_trace_newton_steps(const pcrit_trace* t);
PCRIT_API pcrit_status pcrit_trace_iterate(const pcrit_trace* t, int k, double* x, double* y, double* r_grad,
                                           double* r_graph);
PCRIT_API pcrit_status pcrit_trace_csv(const pcrit_trace* t, char** out);
/* JSON summary: status, iterations, final residual, rate ratios, order estimate. */
PCRIT_API pcrit_status pcrit_trace_summary(const pcrit_trace* t, char** out);
PCRIT_API void pcrit_trace_free(pcrit_trace* t);

/* y may be NULL. */
PCRIT_API pcrit_status pcrit_verify(const pcrit_problem* p, const double* x, const double* y, int samples,
                                    uint64_t seed, char** report_json, int* passed);
/* options_json may be NULL; keys: method, x, y, grid_points, samples, radius, seed, tol, max_iter. */
PCRIT_API pcrit_status pcrit_experiment(const pcrit_problem* p, const char* name, const char* options_json,
                                        char** csv, char** summary_json, int* passed);

#ifdef __cplusplus
}
#endif

#endif
