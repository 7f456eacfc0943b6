/* weakreg: exact toolkit for weak regularity of polynomials over prime
 * fields. C interface of the shared library; everything behind it is
 * implemented in C++ and reached only through these opaque handles.
 *
 * Conventions:
 *   - functions returning wr_status yield WR_OK (0) on success;
 *   - result objects own their strings; free them with wr_result_free;
 *   - exit codes inside results follow the tool convention:
 *       0 success / certified, 2 honest non-certification, 1 error.
 */
#ifndef WEAKREG_H
#define WEAKREG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
    WR_OK = 0,
    WR_ERR_PARSE = 1,
    WR_ERR_INVALID = 2,
    WR_ERR_BUDGET = 3,
    WR_ERR_NOT_CERTIFIED = 4, /* escalation exhausted / oracle inconclusive */
    WR_ERR_VERIFICATION = 5,
    WR_ERR_INTERNAL = 6
} wr_status;

typedef struct wr_problem wr_problem;
typedef struct wr_result wr_result;

/* Library version string, static storage. */
const char* wr_version(void);

/* Thread-local message of the last failed call. */
const char* wr_last_error(void);

/* Parse a problem file (field/vars/poly/eps/... directives). */
wr_status wr_problem_parse(const char* text, wr_problem** out);
void wr_problem_free(wr_problem* p);

unsigned wr_problem_field(const wr_problem* p);
unsigned wr_problem_nvars(const wr_problem* p);
unsigned wr_problem_npolys(const wr_problem* p);
/* Name of polynomial i, owned by the problem object. */
const char* wr_problem_poly_name(const wr_problem* p, unsigned i);

/* Run a subcommand: one of "analyze", "rank", "regularize", "udeg",
 * "formula". Options are whitespace-separated key=value pairs among
 * eps=a/b t=a/b u=N max-rank=N budget=N seed=N; NULL means no options.
 * A result object is produced even for failed runs (inspect its exit
 * code, text, and error code); WR_OK only reflects that the run could
 * be carried out and reported. */
wr_status wr_run(const wr_problem* p, const char* command, const char* options,
                 wr_result** out);

/* Re-verify a JSON certificate produced by wr_run. */
wr_status wr_verify(const char* certificate_json, wr_result** out);

int wr_result_exit_code(const wr_result* r);
const char* wr_result_text(const wr_result* r);
/* Certificate JSON, or NULL when the command produced none. */
const char* wr_result_json(const wr_result* r);
/* Machine-readable error code name (e.g. "BudgetExceeded"), or NULL. */
const char* wr_result_error(const wr_result* r);
void wr_result_free(wr_result* r);

#ifdef __cplusplus
}
#endif

#endif /* WEAKREG_H */
