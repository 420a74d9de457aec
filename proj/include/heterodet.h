/* C interface to the heterodet detection library.
 *
 * Complex data crosses this boundary as column-major arrays of doubles with
 * interleaved components: element k of a complex array occupies slots 2k
 * (real) and 2k+1 (imaginary). A matrix with n rows and m columns is the
 * concatenation of its m columns, 2*n*m doubles in total.
 *
 * Every fallible call returns HETERODET_OK (0) on success; on failure the
 * return names the error class and heterodet_last_error() carries a message
 * for the calling thread.
 */
#ifndef HETERODET_H
#define HETERODET_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define HETERODET_API __declspec(dllexport)
#else
#define HETERODET_API __attribute__((visibility("default")))
#endif

typedef enum heterodet_status {
    HETERODET_OK = 0,
    HETERODET_ERR_INVALID = 1, /* bad arguments or malformed configuration */
    HETERODET_ERR_NUMERIC = 2, /* numerical failure (singular, diverged, ...) */
    HETERODET_ERR_IO = 3       /* file read or write failure */
} heterodet_status;

/* Library version, e.g. "1.0.0". Never NULL. */
HETERODET_API const char* heterodet_version(void);

/* Message for the most recent failure on this thread; empty string if none. */
HETERODET_API const char* heterodet_last_error(void);

/* Tuning parameters for the covariance-refinement iteration. */
typedef struct heterodet_admm_params {
    double epsilon;    /* budget on the squared distance to the secondary structure */
    double rho;        /* penalty weight */
    double eta;        /* gradient step size */
    int32_t max_iter;  /* inner iteration cap */
    double pd_floor;   /* relative eigenvalue floor for iterate repair */
    double primal_tol; /* early-stop tolerance; 0 runs all max_iter steps */
    int32_t outer_iters; /* refinement passes per hypothesis */
} heterodet_admm_params;

/* Defaults: epsilon 0, rho 2, eta 1e-4, max_iter 2000, pd_floor 1e-2,
 * primal_tol 1e-6, outer_iters 3. */
HETERODET_API heterodet_admm_params heterodet_admm_params_default(void);

/* Subspace detection statistic in [0, 1], whitened by the given covariance
 * estimate (repaired to the positive-definite cone internally).
 *   y: length n. h: n x p. b: n x t. cov: n x n. */
HETERODET_API heterodet_status heterodet_asd(const double* y, int32_t n, const double* h,
                                             int32_t p, const double* b, int32_t t,
                                             const double* cov, double* out);

/* Energy-ratio statistic in [1, inf), same arguments as heterodet_asd. */
HETERODET_API heterodet_status heterodet_amf(const double* y, int32_t n, const double* h,
                                             int32_t p, const double* b, int32_t t,
                                             const double* cov, double* out);

/* heterodet_amf evaluated with the exact test-cell covariance. */
HETERODET_API heterodet_status heterodet_amf_known(const double* y, int32_t n, const double* h,
                                                   int32_t p, const double* b, int32_t t,
                                                   const double* true_cov, double* out);

/* Full detector for power-heterogeneous secondary data.
 *   secondary: n x k complex matrix, the k secondary vectors as columns.
 *   group_sizes: num_groups entries summing to k; consecutive columns of
 *   `secondary` form the groups.
 *   params: NULL for defaults. */
HETERODET_API heterodet_status heterodet_hetero_glrt(const double* y, int32_t n, const double* h,
                                                     int32_t p, const double* b, int32_t t,
                                                     const double* secondary,
                                                     const int32_t* group_sizes,
                                                     int32_t num_groups,
                                                     const heterodet_admm_params* params,
                                                     double* out);

/* Area under the empirical ROC of the two statistic samples: the probability
 * that a draw from h1 exceeds a draw from h0, counting ties as one half. */
HETERODET_API heterodet_status heterodet_empirical_auc(const double* h0, int32_t n0,
                                                       const double* h1, int32_t n1,
                                                       double* out);

/* Resolved campaign configuration. */
typedef struct heterodet_manifest heterodet_manifest;

/* Parses a JSON configuration (text, not a path). paper_scale nonzero keeps
 * the preset trial and sample counts; zero applies the desk-scale caps before
 * explicit overrides. */
HETERODET_API heterodet_status heterodet_manifest_parse(const char* json_text,
                                                        int32_t paper_scale,
                                                        heterodet_manifest** out);

/* Re-serializes the resolved configuration; free the string with
 * heterodet_string_free. */
HETERODET_API heterodet_status heterodet_manifest_to_json(const heterodet_manifest* manifest,
                                                          char** out);

HETERODET_API void heterodet_string_free(char* s);

HETERODET_API void heterodet_manifest_free(heterodet_manifest* manifest);

/* Runs every detector in the manifest, writes the output files under its
 * out_dir, prints a summary table to stdout. threads = 0 picks the hardware
 * default; the HETERODET_THREADS environment variable caps it. */
HETERODET_API heterodet_status heterodet_campaign_run(const heterodet_manifest* manifest,
                                                      int32_t threads);

#ifdef __cplusplus
}
#endif

#endif /* HETERODET_H */
