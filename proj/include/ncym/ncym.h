#ifndef NCYM_H
#define NCYM_H

/* C interface to the ncym library. Every call returns a status code; on
 * failure ncym_last_error() holds a message for the calling thread. Strings
 * returned through handles stay valid until the handle is freed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NCYM_API __declspec(dllexport)
#else
#define NCYM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ncym_status {
  NCYM_OK = 0,
  NCYM_ERR_INVALID_RANK = 1,
  NCYM_ERR_UNSUPPORTED_REP = 2,
  NCYM_ERR_SHAPE = 3,
  NCYM_ERR_AXIS = 4,
  NCYM_ERR_MISSING_CHART = 5,
  NCYM_ERR_UNSUPPORTED_DIM = 6,
  NCYM_ERR_SINGULAR_METRIC = 7,
  NCYM_ERR_SINGULAR_FIBER_METRIC = 8,
  NCYM_ERR_NOT_SPD = 9,
  NCYM_ERR_NON_UNITARY = 10,
  NCYM_ERR_REFERENCE_MISMATCH = 11,
  NCYM_ERR_CLASSIFICATION_REFUSED = 12,
  NCYM_ERR_DEGREE = 13,
  NCYM_ERR_VALIDATION = 14,
  NCYM_ERR_IO = 15,
  NCYM_ERR_MISSING_ARTIFACT = 16,
  NCYM_ERR_NULL_ARGUMENT = 17,
  NCYM_ERR_PARSE = 18,
  NCYM_ERR_INTERNAL = 99
} ncym_status;

/* Process exit codes of a run. */
enum { NCYM_EXIT_OK = 0, NCYM_EXIT_ERROR = 1, NCYM_EXIT_VALIDATION = 2, NCYM_EXIT_NONCONVERGENCE = 3 };

typedef struct ncym_run ncym_run;         /* finished run: report and artifacts */
typedef struct ncym_problem ncym_problem; /* assembled geometry, connection and initial state */

NCYM_API const char* ncym_version(void);
NCYM_API const char* ncym_last_error(void);
NCYM_API const char* ncym_status_name(ncym_status s);

/* Worker-count hint; results do not depend on it. n <= 0 selects one worker. */
NCYM_API void ncym_set_threads(int n);
NCYM_API int ncym_get_threads(void);

/* Runs a configuration given as JSON text. A negative seed keeps the
 * configuration's own seed. Validation and numerical failures still produce
 * a run whose exit code and report describe the problem; only malformed
 * JSON or bad arguments return an error status. */
NCYM_API ncym_status ncym_run_json(const char* config_json, int64_t seed, ncym_run** out);
NCYM_API ncym_status ncym_run_file(const char* path, int64_t seed, ncym_run** out);
/* Invariant suite; filter is a module name, NULL or "" for all. */
NCYM_API ncym_status ncym_selfcheck(const char* filter, ncym_run** out);

NCYM_API int ncym_run_exit_code(const ncym_run* run);
NCYM_API const char* ncym_run_report(const ncym_run* run);
/* Short human-readable summary (the pass/fail table for a selfcheck). */
NCYM_API const char* ncym_run_summary(const ncym_run* run);
NCYM_API size_t ncym_run_file_count(const ncym_run* run);
NCYM_API const char* ncym_run_file_name(const ncym_run* run, size_t i);
NCYM_API const char* ncym_run_file_data(const ncym_run* run, size_t i);
/* Writes every artifact into dir, creating it when needed. */
NCYM_API ncym_status ncym_run_write(const ncym_run* run, const char* dir);
NCYM_API void ncym_run_free(ncym_run* run);

/* Column data from a report: kind is "trace", "slice" or "profile".
 * The result must be released with ncym_string_free. */
NCYM_API ncym_status ncym_plot_csv(const char* report_json, const char* kind, char** out_csv);
NCYM_API void ncym_string_free(char* s);

NCYM_API ncym_status ncym_problem_create(const char* config_json, ncym_problem** out);
/* out[0..3] = total, horizontal, mixed and vertical action of the initial state. */
NCYM_API ncym_status ncym_problem_action(const ncym_problem* p, double out[4]);
/* Euclidean norm of the action gradient at the initial state. */
NCYM_API ncym_status ncym_problem_gradient_norm(const ncym_problem* p, double* out);
/* Integral of the top Chern-Weil form of the reference connection (2q = dim). */
NCYM_API ncym_status ncym_problem_chern(const ncym_problem* p, int q, double* out);
NCYM_API void ncym_problem_free(ncym_problem* p);

#ifdef __cplusplus
}
#endif

#endif
