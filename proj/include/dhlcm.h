/* Degree-heterogeneous latent class analysis: spectral clustering with
 * diagonal-debiased PCA, item-parameter estimation, calibrated global and
 * multiple testing, and a Monte-Carlo experiment harness.
 *
 * All functions return DHLCM_OK or an error code; dhlcm_last_error() gives a
 * thread-local message for the most recent failure on the calling thread.
 * Matrices are dense row-major doubles. Labels and feature indices are
 * 1-based across this interface.
 */
#ifndef DHLCM_H
#define DHLCM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#ifdef DHLCM_BUILDING_LIB
#define DHLCM_API __declspec(dllexport)
#else
#define DHLCM_API __declspec(dllimport)
#endif
#else
#define DHLCM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dhlcm_status {
  DHLCM_OK = 0,
  DHLCM_ERR_DOMAIN = 1,
  DHLCM_ERR_SHAPE = 2,
  DHLCM_ERR_CONVERGENCE = 3,
  DHLCM_ERR_DEGENERATE_ROW = 4,
  DHLCM_ERR_EMPTY_CLUSTER = 5,
  DHLCM_ERR_RANK_DEFICIENT = 6,
  DHLCM_ERR_NOT_TESTABLE = 7,
  DHLCM_ERR_NO_TESTABLE_FEATURES = 8,
  DHLCM_ERR_FAMILY = 9,
  DHLCM_ERR_CONFIG = 10,
  DHLCM_ERR_IO = 11,
  DHLCM_ERR_INVALID_ARGUMENT = 12,
  DHLCM_ERR_INTERNAL = 13
} dhlcm_status;

typedef enum dhlcm_family {
  DHLCM_FAMILY_BERNOULLI = 0,
  DHLCM_FAMILY_BINOMIAL = 1,
  DHLCM_FAMILY_POISSON = 2
} dhlcm_family;

typedef enum dhlcm_method {
  DHLCM_METHOD_HETERO_PCA = 0,
  DHLCM_METHOD_PLAIN_SVD = 1
} dhlcm_method;

typedef enum dhlcm_normalization {
  DHLCM_NORMALIZE_L2 = 0,
  DHLCM_NORMALIZE_SCORE = 1,
  DHLCM_NORMALIZE_NONE = 2
} dhlcm_normalization;

typedef enum dhlcm_regime {
  DHLCM_REGIME_AUTO = 0,
  DHLCM_REGIME_CHI_SQUARE_MAX = 1,
  DHLCM_REGIME_GUMBEL = 2
} dhlcm_regime;

typedef struct dhlcm_matrix dhlcm_matrix;
typedef struct dhlcm_model dhlcm_model;
typedef struct dhlcm_test_report dhlcm_test_report;

DHLCM_API const char* dhlcm_version(void);
DHLCM_API const char* dhlcm_last_error(void);
DHLCM_API const char* dhlcm_status_name(dhlcm_status status);

/* ---- observation matrices -------------------------------------------- */

/* values: n_rows x n_cols, row-major, nonnegative integers stored as
 * doubles. trials is the Binomial trial count (ignored otherwise). */
DHLCM_API dhlcm_status dhlcm_matrix_create(const double* values, int64_t n_rows,
                                           int64_t n_cols, dhlcm_family family,
                                           int trials, dhlcm_matrix** out);
/* CSV or whitespace-delimited file, optional header line. */
DHLCM_API dhlcm_status dhlcm_matrix_read(const char* path, dhlcm_family family,
                                         int trials, dhlcm_matrix** out);
DHLCM_API void dhlcm_matrix_free(dhlcm_matrix* matrix);
DHLCM_API int64_t dhlcm_matrix_rows(const dhlcm_matrix* matrix);
DHLCM_API int64_t dhlcm_matrix_cols(const dhlcm_matrix* matrix);

/* ---- clustering and estimation --------------------------------------- */

typedef struct dhlcm_cluster_options {
  int64_t k;                 /* class count, required */
  int64_t t0;                /* diagonal-reimputation iterations, default 20 */
  dhlcm_method method;       /* default hetero PCA */
  dhlcm_normalization normalization; /* default l2 */
  int score_clamp;           /* nonzero: clamp degenerate SCORE ratios */
  int64_t restarts;          /* k-means restarts, default 100 */
  int64_t max_iter;          /* k-means iteration cap, default 300 */
  uint64_t seed;             /* default 0; fixed so reruns reproduce */
} dhlcm_cluster_options;

DHLCM_API void dhlcm_cluster_options_init(dhlcm_cluster_options* opts, int64_t k);

/* Spectral embedding + row normalization + k-means. */
DHLCM_API dhlcm_status dhlcm_cluster(const dhlcm_matrix* matrix,
                                     const dhlcm_cluster_options* opts,
                                     dhlcm_model** out);

/* Builds a model around externally supplied labels (1-based, length N).
 * degrees may be NULL, in which case they are estimated from the spectral
 * embedding computed with opts (opts may be NULL for defaults). */
DHLCM_API dhlcm_status dhlcm_model_with_labels(const dhlcm_matrix* matrix,
                                               const int32_t* labels, int64_t k,
                                               const double* degrees,
                                               const dhlcm_cluster_options* opts,
                                               dhlcm_model** out);

/* Degree, item-parameter, and variance estimation for the model's labels. */
DHLCM_API dhlcm_status dhlcm_estimate(dhlcm_model* model, const dhlcm_matrix* matrix);

DHLCM_API void dhlcm_model_free(dhlcm_model* model);
DHLCM_API int64_t dhlcm_model_n(const dhlcm_model* model);
DHLCM_API int64_t dhlcm_model_j(const dhlcm_model* model);
DHLCM_API int64_t dhlcm_model_k(const dhlcm_model* model);
DHLCM_API int dhlcm_model_has_estimates(const dhlcm_model* model);

/* Output buffers are caller-allocated: labels length N; embedding N*K
 * row-major; eigenvalues length K; degrees length N; theta and sigma2 J*K
 * row-major; cluster_sizes length K. */
DHLCM_API dhlcm_status dhlcm_model_labels(const dhlcm_model* model, int32_t* out);
DHLCM_API dhlcm_status dhlcm_model_embedding(const dhlcm_model* model, double* out);
DHLCM_API dhlcm_status dhlcm_model_eigenvalues(const dhlcm_model* model, double* out);
DHLCM_API dhlcm_status dhlcm_model_inertia(const dhlcm_model* model, double* out);
DHLCM_API dhlcm_status dhlcm_model_degrees(const dhlcm_model* model, double* out);
DHLCM_API dhlcm_status dhlcm_model_theta(const dhlcm_model* model, double* out);
DHLCM_API dhlcm_status dhlcm_model_sigma2(const dhlcm_model* model, double* out);
DHLCM_API dhlcm_status dhlcm_model_cluster_sizes(const dhlcm_model* model, int64_t* out);

/* ---- hypothesis testing ----------------------------------------------- */

/* features: 1-based indices, or NULL with n_features = 0 to test all
 * columns. Requires estimates on the model. */
DHLCM_API dhlcm_status dhlcm_global_test(const dhlcm_model* model,
                                         const int64_t* features,
                                         int64_t n_features, double alpha,
                                         dhlcm_regime regime,
                                         dhlcm_test_report** out);

DHLCM_API void dhlcm_test_report_free(dhlcm_test_report* report);
DHLCM_API int64_t dhlcm_test_report_tested(const dhlcm_test_report* report);
DHLCM_API int64_t dhlcm_test_report_excluded(const dhlcm_test_report* report);
DHLCM_API int64_t dhlcm_test_report_bh_count(const dhlcm_test_report* report);
DHLCM_API dhlcm_status dhlcm_test_report_global(const dhlcm_test_report* report,
                                                double* stat, double* threshold,
                                                double* pvalue, int* reject,
                                                dhlcm_regime* regime_used);
/* feature_ids buffers take 1-based indices; lengths per the counts above. */
DHLCM_API dhlcm_status dhlcm_test_report_features(const dhlcm_test_report* report,
                                                  int64_t* feature_ids,
                                                  double* stats, double* pvalues);
DHLCM_API dhlcm_status dhlcm_test_report_bh(const dhlcm_test_report* report,
                                            int64_t* feature_ids);
DHLCM_API dhlcm_status dhlcm_test_report_not_testable(const dhlcm_test_report* report,
                                                      int64_t* feature_ids);

/* Calibration helpers (M features, K classes). */
DHLCM_API dhlcm_status dhlcm_chi_max_threshold(int64_t m, int64_t k, double alpha,
                                               double* out);
DHLCM_API dhlcm_status dhlcm_gumbel_threshold(int64_t m, int64_t k, double alpha,
                                              double* out);
DHLCM_API dhlcm_status dhlcm_feature_pvalue(double stat, int64_t k, double* out);
DHLCM_API dhlcm_status dhlcm_benjamini_hochberg(const double* pvalues, int64_t m,
                                                double alpha, int32_t* reject_mask);

/* ---- clustering metrics ------------------------------------------------ */

/* labels are 1-based, length n. */
DHLCM_API dhlcm_status dhlcm_misclustering_rate(const int32_t* a, const int32_t* b,
                                                int64_t n, double* out);
DHLCM_API dhlcm_status dhlcm_rand_index(const int32_t* a, const int32_t* b,
                                        int64_t n, double* out);

/* ---- item-matrix diagnostics ------------------------------------------- */

typedef struct dhlcm_diagnostics {
  double delta;      /* min pairwise column distance */
  double sigma_star; /* K-th singular value */
  double kappa;      /* condition number */
  double mu_theta;   /* row incoherence */
  double theta_max;  /* largest entry */
} dhlcm_diagnostics;

/* theta: j x k row-major. */
DHLCM_API dhlcm_status dhlcm_diagnose(const double* theta, int64_t j, int64_t k,
                                      dhlcm_diagnostics* out);

/* ---- Monte-Carlo experiments ------------------------------------------- */

/* config_json follows the documented experiment schema. The returned report
 * JSON is byte-stable for a fixed (config, replicates, seed) regardless of
 * jobs. Free the string with dhlcm_string_free. */
DHLCM_API dhlcm_status dhlcm_run_experiment(const char* config_json,
                                            int64_t replicates, uint64_t seed,
                                            int jobs, char** report_json);
DHLCM_API void dhlcm_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* DHLCM_H */
