/* C interface to the stochastic KdV simulation library.
 *
 * All functions return kdv_status; KDV_OK is 0.  On failure,
 * kdv_last_error() gives a thread-local message.  Objects are opaque and
 * must be released with the matching _destroy / kdv_string_free call.
 */
#ifndef KDV_H
#define KDV_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined _WIN32
#define KDV_API __declspec(dllexport)
#else
#define KDV_API __attribute__((visibility("default")))
#endif

typedef enum kdv_status {
    KDV_OK = 0,
    KDV_ERR_VALIDATION = 1,
    KDV_ERR_BLOWUP = 2,
    KDV_ERR_INDEX = 3,
    KDV_ERR_DOMAIN = 4,
    KDV_ERR_CAPABILITY = 5,
    KDV_ERR_CONFIG = 6,
    KDV_ERR_IO = 7,
    KDV_ERR_CHECK_FAILED = 8, /* verify-style gate did not pass */
    KDV_ERR_INTERNAL = 9
} kdv_status;

KDV_API const char* kdv_version(void);
KDV_API const char* kdv_last_error(void);

/* ---- spectral fields --------------------------------------------------- */

typedef struct kdv_grid kdv_grid;
typedef struct kdv_field kdv_field;

/* max_mode K >= 1; phys_points even and >= 2(K+1) (pass 0 for the default). */
KDV_API kdv_status kdv_grid_create(int max_mode, int phys_points, kdv_grid** out);
KDV_API void kdv_grid_destroy(kdv_grid* g);

KDV_API kdv_status kdv_field_create(const kdv_grid* g, kdv_field** out); /* zero field */
KDV_API void kdv_field_destroy(kdv_field* f);
KDV_API kdv_status kdv_field_set_mode(kdv_field* f, int k, double re, double im);
KDV_API kdv_status kdv_field_get_mode(const kdv_field* f, int k, double* re, double* im);

KDV_API kdv_status kdv_field_derivative(const kdv_field* f, int order, kdv_field* out);
KDV_API kdv_status kdv_field_project_low(const kdv_field* f, int n_modes, kdv_field* out);
KDV_API kdv_status kdv_field_l2_inner(const kdv_field* a, const kdv_field* b, double* out);
KDV_API kdv_status kdv_field_sobolev_norm(const kdv_field* f, int order, double* out);
KDV_API kdv_status kdv_field_nonlinear_term(const kdv_field* f, kdv_field* out);

/* KdV integrals of motion, m in {0,1,2}; modified adds
 * alpha_bar (||u||^2 + 1)^{q_bar}. */
KDV_API kdv_status kdv_invariant(const kdv_field* f, int m, double* out);
KDV_API kdv_status kdv_modified_invariant(const kdv_field* f, int m, double alpha_bar,
                                          double q_bar, double* out);

/* ---- experiment driver -------------------------------------------------- */

typedef struct kdv_run_options {
    const char* config_json; /* strict-JSON document; NULL only for "verify" */
    const char* out_dir;     /* overrides output.dir when non-NULL */
    int threads;             /* <= 0: single-threaded */
    int has_seed;            /* nonzero: seed overrides the config value */
    uint64_t seed;
} kdv_run_options;

/* command in {simulate, invariants, nudge, couple, ensemble, deterministic,
 * verify, calibrate-N}.  Writes series.csv / summary.json under the output
 * directory and, when summary_json_out is non-NULL, returns the summary
 * document (free with kdv_string_free).  Runs that blow up still write their
 * summary and return KDV_ERR_BLOWUP; a failed verify returns
 * KDV_ERR_CHECK_FAILED. */
KDV_API kdv_status kdv_run(const char* command, const kdv_run_options* options,
                           char** summary_json_out);
KDV_API void kdv_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* KDV_H */
