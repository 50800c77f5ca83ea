/* conewalk C API: cone geometry, harmonic evaluation, killed-walk sampling,
 * harmonic-function estimators and the experiment runner, behind opaque
 * handles and error codes. All functions returning cw_status fill outputs
 * only on CW_OK; cw_last_error() describes the most recent failure on the
 * calling thread. */
#ifndef CONEWALK_H
#define CONEWALK_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cw_status {
    CW_OK = 0,
    CW_ERR_INVALID_ARGUMENT = 1, /* bad parameter value or dimension mismatch */
    CW_ERR_DOMAIN = 2,           /* point outside the function's domain */
    CW_ERR_STATE = 3,            /* handle not in a usable state */
    CW_ERR_NUMERIC = 4,          /* solver or sampler failed to converge */
    CW_ERR_CONFIG = 5,           /* configuration parse/validation error */
    CW_ERR_IO = 6,               /* filesystem error */
    CW_ERR_UNKNOWN = 7
} cw_status;

typedef struct cw_cone cw_cone; /* cone + harmonic data, immutable, thread-safe */
typedef struct cw_law cw_law;   /* standardized increment law */

typedef struct cw_estimate {
    double value;
    double stderr_;
    int64_t n_samples;
    uint64_t seed;
    uint32_t stream;
    uint32_t flags; /* bit 0: censoring warning, bit 1: not stabilized */
} cw_estimate;

const char* cw_version(void);
/* Message for the last error on this thread; empty string if none. */
const char* cw_last_error(void);

/* variant: "half-line" | "half-space" | "wedge" | "orthant" | "circular".
 * dim applies to half-space/orthant; angle (radians) to wedge (opening)
 * and circular (half-angle); mesh (0 = default 4096) to circular. */
cw_status cw_cone_create(const char* variant, int dim, double angle, int mesh, cw_cone** out);
void cw_cone_free(cw_cone* cone);

int cw_cone_dim(const cw_cone* cone);
cw_status cw_cone_p(const cw_cone* cone, double* out);
cw_status cw_cone_contains(const cw_cone* cone, const double* x, int dim, int* out);
cw_status cw_cone_dist_boundary(const cw_cone* cone, const double* x, int dim, double* out);
/* x0 must hold cw_cone_dim doubles. */
cw_status cw_cone_starlike(const cw_cone* cone, double* x0, double* r0);
cw_status cw_cone_u(const cw_cone* cone, const double* x, int dim, double* out);
cw_status cw_cone_grad_u(const cw_cone* cone, const double* x, int dim, double* grad);

/* variant: "gaussian" | "rademacher" | "sphere" | "student" (param = tail
 * index, > 2). */
cw_status cw_law_create(const char* variant, int dim, double param, cw_law** out);
void cw_law_free(cw_law* law);

/* P(tau_x > n) by Monte Carlo; deterministic in (seed, stream) for any
 * thread count. threads = 0 uses all hardware threads. */
cw_status cw_survival(const cw_cone* cone, const cw_law* law, const double* x, int dim, int64_t n,
                      int64_t n_samples, uint64_t seed, uint32_t stream, int threads,
                      cw_estimate* out);

/* E[u(x + S(k)); tau_x > k]. */
cw_status cw_estimate_direct(const cw_cone* cone, const cw_law* law, const double* x, int dim,
                             int64_t k, int64_t n_samples, uint64_t seed, uint32_t stream,
                             int threads, cw_estimate* out);

/* Harmonic-function estimate. construction 1 walks a dyadic k-grid up to
 * k_max (the grid must span two decades, so k_max >= 100); construction 2
 * follows the geometric schedule starting at n0 with exponent eps, capped
 * at k_max. gamma <= 0 selects the default shift decay min(1/2, p)/4. */
cw_status cw_estimate_v(const cw_cone* cone, const cw_law* law, const double* x, int dim,
                        int construction, int64_t k_max, double gamma, int64_t n0, double eps,
                        int64_t n_samples, uint64_t seed, uint32_t stream, int threads,
                        cw_estimate* out);

/* Runs a full experiment pipeline from configuration text (see README for
 * the grammar), writing artifacts and manifest.json into out_dir. On success
 * *manifest_json receives the manifest (free with cw_string_free). When the
 * run fails, *manifest_json still receives the partial manifest when one
 * could be produced. */
cw_status cw_run(const char* config_text, const char* out_dir, char** manifest_json);

/* Acceptance battery: suite is "quick" or "full". *report_json receives the
 * machine-readable table (free with cw_string_free). Returns CW_OK even if
 * criteria fail; *all_pass tells the outcome. */
cw_status cw_verify(const char* suite, uint64_t seed, int threads, char** report_json, int* all_pass);

void cw_string_free(char* s);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CONEWALK_H */
