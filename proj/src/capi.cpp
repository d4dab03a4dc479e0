#include "dhlcm.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "dhlcm/clustering.hpp"
#include "dhlcm/config.hpp"
#include "dhlcm/estimation.hpp"
#include "dhlcm/inference.hpp"
#include "dhlcm/io.hpp"
#include "dhlcm/model.hpp"
#include "dhlcm/simulation.hpp"
#include "dhlcm/spectral.hpp"

namespace {

thread_local std::string g_last_error;

dhlcm_status to_status(const dhlcm::Error& e) {
  using dhlcm::ErrorCode;
  switch (e.code()) {
    case ErrorCode::Domain: return DHLCM_ERR_DOMAIN;
    case ErrorCode::Shape: return DHLCM_ERR_SHAPE;
    case ErrorCode::Convergence: return DHLCM_ERR_CONVERGENCE;
    case ErrorCode::DegenerateRow: return DHLCM_ERR_DEGENERATE_ROW;
    case ErrorCode::EmptyCluster: return DHLCM_ERR_EMPTY_CLUSTER;
    case ErrorCode::RankDeficient: return DHLCM_ERR_RANK_DEFICIENT;
    case ErrorCode::NotTestable: return DHLCM_ERR_NOT_TESTABLE;
    case ErrorCode::NoTestableFeatures: return DHLCM_ERR_NO_TESTABLE_FEATURES;
    case ErrorCode::Family: return DHLCM_ERR_FAMILY;
    case ErrorCode::Config: return DHLCM_ERR_CONFIG;
    case ErrorCode::Io: return DHLCM_ERR_IO;
    case ErrorCode::InvalidArgument: return DHLCM_ERR_INVALID_ARGUMENT;
  }
  return DHLCM_ERR_INTERNAL;
}

template <typename Fn>
dhlcm_status guarded(Fn&& fn) {
  try {
    fn();
    return DHLCM_OK;
  } catch (const dhlcm::Error& e) {
    g_last_error = e.what();
    return to_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return DHLCM_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return DHLCM_ERR_INTERNAL;
  }
}

dhlcm_status invalid(const char* msg) {
  g_last_error = msg;
  return DHLCM_ERR_INVALID_ARGUMENT;
}

dhlcm::ModelFamily family_from_enum(dhlcm_family family, int trials) {
  switch (family) {
    case DHLCM_FAMILY_BERNOULLI: return dhlcm::ModelFamily::bernoulli();
    case DHLCM_FAMILY_BINOMIAL: return dhlcm::ModelFamily::binomial(trials);
    case DHLCM_FAMILY_POISSON: return dhlcm::ModelFamily::poisson();
  }
  throw dhlcm::InvalidArgumentError("unknown family enum value");
}

dhlcm::HeteroClusteringOptions options_from_c(const dhlcm_cluster_options& opts) {
  dhlcm::HeteroClusteringOptions out;
  out.t0 = static_cast<int>(opts.t0);
  out.method = opts.method == DHLCM_METHOD_PLAIN_SVD
                   ? dhlcm::SpectralMethod::PlainSvd
                   : dhlcm::SpectralMethod::HeteroPca;
  switch (opts.normalization) {
    case DHLCM_NORMALIZE_L2: out.normalization = dhlcm::Normalization::L2; break;
    case DHLCM_NORMALIZE_SCORE: out.normalization = dhlcm::Normalization::Score; break;
    case DHLCM_NORMALIZE_NONE: out.normalization = dhlcm::Normalization::None; break;
  }
  out.normalize.score_clamp = opts.score_clamp != 0;
  out.kmeans.restarts = static_cast<int>(opts.restarts);
  out.kmeans.max_iter = static_cast<int>(opts.max_iter);
  out.kmeans.seed = opts.seed;
  return out;
}

}  // namespace

struct dhlcm_matrix {
  dhlcm::ObservationMatrix obs;
};

struct dhlcm_model {
  int k = 0;
  dhlcm::ModelFamily family;
  dhlcm::Labels labels;  // 0-based
  dhlcm::SpectralEmbedding embedding;
  double inertia = 0.0;
  bool has_embedding = false;
  bool has_estimates = false;
  bool degrees_supplied = false;
  dhlcm::Vector degrees;
  dhlcm::Matrix theta;
  dhlcm::Matrix sigma2;
  std::vector<dhlcm::Index> cluster_sizes;
};

struct dhlcm_test_report {
  dhlcm::TestReport report;
};

extern "C" {

const char* dhlcm_version(void) { return "1.0.0"; }

const char* dhlcm_last_error(void) { return g_last_error.c_str(); }

const char* dhlcm_status_name(dhlcm_status status) {
  switch (status) {
    case DHLCM_OK: return "ok";
    case DHLCM_ERR_DOMAIN: return "domain";
    case DHLCM_ERR_SHAPE: return "shape";
    case DHLCM_ERR_CONVERGENCE: return "convergence";
    case DHLCM_ERR_DEGENERATE_ROW: return "degenerate_row";
    case DHLCM_ERR_EMPTY_CLUSTER: return "empty_cluster";
    case DHLCM_ERR_RANK_DEFICIENT: return "rank_deficient";
    case DHLCM_ERR_NOT_TESTABLE: return "not_testable";
    case DHLCM_ERR_NO_TESTABLE_FEATURES: return "no_testable_features";
    case DHLCM_ERR_FAMILY: return "family";
    case DHLCM_ERR_CONFIG: return "config";
    case DHLCM_ERR_IO: return "io";
    case DHLCM_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case DHLCM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

dhlcm_status dhlcm_matrix_create(const double* values, int64_t n_rows,
                                 int64_t n_cols, dhlcm_family family, int trials,
                                 dhlcm_matrix** out) {
  if (!values || !out) return invalid("values and out must be non-null");
  if (n_rows < 1 || n_cols < 1) return invalid("matrix dimensions must be positive");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<dhlcm_matrix>();
    handle->obs.family = family_from_enum(family, trials);
    handle->obs.values.resize(n_rows, n_cols);
    std::memcpy(handle->obs.values.data(), values,
                sizeof(double) * static_cast<size_t>(n_rows * n_cols));
    dhlcm::validate(handle->obs);
    *out = handle.release();
  });
}

dhlcm_status dhlcm_matrix_read(const char* path, dhlcm_family family, int trials,
                               dhlcm_matrix** out) {
  if (!path || !out) return invalid("path and out must be non-null");
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<dhlcm_matrix>();
    handle->obs = dhlcm::read_observation_matrix(path, family_from_enum(family, trials));
    *out = handle.release();
  });
}

void dhlcm_matrix_free(dhlcm_matrix* matrix) { delete matrix; }

int64_t dhlcm_matrix_rows(const dhlcm_matrix* matrix) {
  return matrix ? matrix->obs.rows() : 0;
}

int64_t dhlcm_matrix_cols(const dhlcm_matrix* matrix) {
  return matrix ? matrix->obs.cols() : 0;
}

void dhlcm_cluster_options_init(dhlcm_cluster_options* opts, int64_t k) {
  if (!opts) return;
  opts->k = k;
  opts->t0 = 20;
  opts->method = DHLCM_METHOD_HETERO_PCA;
  opts->normalization = DHLCM_NORMALIZE_L2;
  opts->score_clamp = 0;
  opts->restarts = 100;
  opts->max_iter = 300;
  opts->seed = 0;
}

dhlcm_status dhlcm_cluster(const dhlcm_matrix* matrix,
                           const dhlcm_cluster_options* opts, dhlcm_model** out) {
  if (!matrix || !opts || !out) return invalid("matrix, opts, out must be non-null");
  *out = nullptr;
  return guarded([&] {
    const auto hopts = options_from_c(*opts);
    const int k = static_cast<int>(opts->k);
    auto res = dhlcm::hetero_clustering(matrix->obs, k, hopts);
    auto model = std::make_unique<dhlcm_model>();
    model->k = k;
    model->family = matrix->obs.family;
    model->labels = std::move(res.assignment.labels);
    model->embedding = std::move(res.embedding);
    model->inertia = res.assignment.inertia;
    model->has_embedding = true;
    model->cluster_sizes = dhlcm::cluster_sizes_of(model->labels, k);
    *out = model.release();
  });
}

dhlcm_status dhlcm_model_with_labels(const dhlcm_matrix* matrix,
                                     const int32_t* labels, int64_t k,
                                     const double* degrees,
                                     const dhlcm_cluster_options* opts,
                                     dhlcm_model** out) {
  if (!matrix || !labels || !out) return invalid("matrix, labels, out must be non-null");
  if (k < 1) return invalid("k must be >= 1");
  *out = nullptr;
  return guarded([&] {
    const int64_t n = matrix->obs.rows();
    auto model = std::make_unique<dhlcm_model>();
    model->k = static_cast<int>(k);
    model->family = matrix->obs.family;
    model->labels.resize(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      const int32_t l = labels[i];
      if (l < 1 || l > k)
        throw dhlcm::DomainError("labels must lie in 1..k");
      model->labels[static_cast<size_t>(i)] = static_cast<int>(l - 1);
    }
    model->cluster_sizes = dhlcm::cluster_sizes_of(model->labels, model->k);
    for (int c = 0; c < model->k; ++c)
      if (model->cluster_sizes[static_cast<size_t>(c)] == 0)
        throw dhlcm::EmptyClusterError("supplied labels leave a cluster empty");
    if (degrees) {
      model->degrees.resize(n);
      for (int64_t i = 0; i < n; ++i) {
        if (!(degrees[i] > 0.0))
          throw dhlcm::DomainError("degrees must be positive");
        model->degrees(i) = degrees[i];
      }
      model->degrees_supplied = true;
    } else {
      dhlcm_cluster_options defaults;
      dhlcm_cluster_options_init(&defaults, k);
      const auto hopts = options_from_c(opts ? *opts : defaults);
      model->embedding =
          hopts.method == dhlcm::SpectralMethod::HeteroPca
              ? dhlcm::hetero_pca(matrix->obs.values, model->k, hopts.t0)
              : dhlcm::plain_svd(matrix->obs.values, model->k);
      model->has_embedding = true;
    }
    *out = model.release();
  });
}

dhlcm_status dhlcm_estimate(dhlcm_model* model, const dhlcm_matrix* matrix) {
  if (!model || !matrix) return invalid("model and matrix must be non-null");
  return guarded([&] {
    if (matrix->obs.rows() != static_cast<dhlcm::Index>(model->labels.size()))
      throw dhlcm::ShapeError("matrix row count does not match the model");
    if (!model->degrees_supplied) {
      if (!model->has_embedding)
        throw dhlcm::InvalidArgumentError("model has neither degrees nor embedding");
      dhlcm::ClusterAssignment assign;
      assign.labels = model->labels;
      assign.centers = dhlcm::Matrix::Zero(model->k, model->embedding.u.cols());
      model->degrees = dhlcm::estimate_degrees(model->embedding, assign);
    }
    model->theta = dhlcm::estimate_theta(matrix->obs, model->labels, model->k,
                                         model->degrees);
    model->sigma2 = dhlcm::estimate_variances(model->theta, model->labels, model->k,
                                              model->degrees, matrix->obs.family)
                        .sigma2;
    model->has_estimates = true;
  });
}

void dhlcm_model_free(dhlcm_model* model) { delete model; }

int64_t dhlcm_model_n(const dhlcm_model* model) {
  return model ? static_cast<int64_t>(model->labels.size()) : 0;
}

int64_t dhlcm_model_j(const dhlcm_model* model) {
  return model && model->has_estimates ? model->theta.rows() : 0;
}

int64_t dhlcm_model_k(const dhlcm_model* model) { return model ? model->k : 0; }

int dhlcm_model_has_estimates(const dhlcm_model* model) {
  return model && model->has_estimates ? 1 : 0;
}

dhlcm_status dhlcm_model_labels(const dhlcm_model* model, int32_t* out) {
  if (!model || !out) return invalid("model and out must be non-null");
  for (size_t i = 0; i < model->labels.size(); ++i)
    out[i] = static_cast<int32_t>(model->labels[i] + 1);
  return DHLCM_OK;
}

dhlcm_status dhlcm_model_embedding(const dhlcm_model* model, double* out) {
  if (!model || !out) return invalid("model and out must be non-null");
  if (!model->has_embedding) return invalid("model carries no embedding");
  std::memcpy(out, model->embedding.u.data(),
              sizeof(double) * static_cast<size_t>(model->embedding.u.size()));
  return DHLCM_OK;
}

dhlcm_status dhlcm_model_eigenvalues(const dhlcm_model* model, double* out) {
  if (!model || !out) return invalid("model and out must be non-null");
  if (!model->has_embedding) return invalid("model carries no embedding");
  for (dhlcm::Index i = 0; i < model->embedding.eigenvalues.size(); ++i)
    out[i] = model->embedding.eigenvalues(i);
  return DHLCM_OK;
}

dhlcm_status dhlcm_model_inertia(const dhlcm_model* model, double* out) {
  if (!model || !out) return invalid("model and out must be non-null");
  *out = model->inertia;
  return DHLCM_OK;
}

dhlcm_status dhlcm_model_degrees(const dhlcm_model* model, double* out) {
  if (!model || !out) return invalid("model and out must be non-null");
  if (!model->has_estimates && !model->degrees_supplied)
    return invalid("run dhlcm_estimate first");
  for (dhlcm::Index i = 0; i < model->degrees.size(); ++i) out[i] = model->degrees(i);
  return DHLCM_OK;
}

dhlcm_status dhlcm_model_theta(const dhlcm_model* model, double* out) {
  if (!model || !out) return invalid("model and out must be non-null");
  if (!model->has_estimates) return invalid("run dhlcm_estimate first");
  std::memcpy(out, model->theta.data(),
              sizeof(double) * static_cast<size_t>(model->theta.size()));
  return DHLCM_OK;
}

dhlcm_status dhlcm_model_sigma2(const dhlcm_model* model, double* out) {
  if (!model || !out) return invalid("model and out must be non-null");
  if (!model->has_estimates) return invalid("run dhlcm_estimate first");
  std::memcpy(out, model->sigma2.data(),
              sizeof(double) * static_cast<size_t>(model->sigma2.size()));
  return DHLCM_OK;
}

dhlcm_status dhlcm_model_cluster_sizes(const dhlcm_model* model, int64_t* out) {
  if (!model || !out) return invalid("model and out must be non-null");
  for (size_t c = 0; c < model->cluster_sizes.size(); ++c)
    out[c] = static_cast<int64_t>(model->cluster_sizes[c]);
  return DHLCM_OK;
}

dhlcm_status dhlcm_global_test(const dhlcm_model* model, const int64_t* features,
                               int64_t n_features, double alpha,
                               dhlcm_regime regime, dhlcm_test_report** out) {
  if (!model || !out) return invalid("model and out must be non-null");
  if (!model->has_estimates) return invalid("run dhlcm_estimate first");
  if (n_features > 0 && !features) return invalid("features must be non-null");
  *out = nullptr;
  return guarded([&] {
    std::vector<int> set;
    if (n_features == 0) {
      set.resize(static_cast<size_t>(model->theta.rows()));
      for (size_t j = 0; j < set.size(); ++j) set[j] = static_cast<int>(j);
    } else {
      for (int64_t i = 0; i < n_features; ++i) {
        if (features[i] < 1 || features[i] > model->theta.rows())
          throw dhlcm::InvalidArgumentError("feature indices are 1-based in [1..J]");
        set.push_back(static_cast<int>(features[i] - 1));
      }
    }
    dhlcm::TestRegime r = dhlcm::TestRegime::Auto;
    if (regime == DHLCM_REGIME_CHI_SQUARE_MAX) r = dhlcm::TestRegime::ChiSquareMax;
    if (regime == DHLCM_REGIME_GUMBEL) r = dhlcm::TestRegime::Gumbel;
    auto handle = std::make_unique<dhlcm_test_report>();
    handle->report = dhlcm::global_test(model->theta, model->sigma2, set, alpha, r);
    *out = handle.release();
  });
}

void dhlcm_test_report_free(dhlcm_test_report* report) { delete report; }

int64_t dhlcm_test_report_tested(const dhlcm_test_report* report) {
  return report ? static_cast<int64_t>(report->report.feature_ids.size()) : 0;
}

int64_t dhlcm_test_report_excluded(const dhlcm_test_report* report) {
  return report ? static_cast<int64_t>(report->report.not_testable.size()) : 0;
}

int64_t dhlcm_test_report_bh_count(const dhlcm_test_report* report) {
  return report ? static_cast<int64_t>(report->report.bh_rejections.size()) : 0;
}

dhlcm_status dhlcm_test_report_global(const dhlcm_test_report* report, double* stat,
                                      double* threshold, double* pvalue,
                                      int* reject, dhlcm_regime* regime_used) {
  if (!report) return invalid("report must be non-null");
  if (stat) *stat = report->report.global_stat;
  if (threshold) *threshold = report->report.threshold;
  if (pvalue) *pvalue = report->report.global_pvalue;
  if (reject) *reject = report->report.reject ? 1 : 0;
  if (regime_used)
    *regime_used = report->report.regime == dhlcm::TestRegime::Gumbel
                       ? DHLCM_REGIME_GUMBEL
                       : DHLCM_REGIME_CHI_SQUARE_MAX;
  return DHLCM_OK;
}

dhlcm_status dhlcm_test_report_features(const dhlcm_test_report* report,
                                        int64_t* feature_ids, double* stats,
                                        double* pvalues) {
  if (!report) return invalid("report must be non-null");
  const auto& r = report->report;
  for (size_t i = 0; i < r.feature_ids.size(); ++i) {
    if (feature_ids) feature_ids[i] = r.feature_ids[i] + 1;
    if (stats) stats[i] = r.stats[i];
    if (pvalues) pvalues[i] = r.pvalues[i];
  }
  return DHLCM_OK;
}

dhlcm_status dhlcm_test_report_bh(const dhlcm_test_report* report,
                                  int64_t* feature_ids) {
  if (!report || !feature_ids) return invalid("report and out must be non-null");
  for (size_t i = 0; i < report->report.bh_rejections.size(); ++i)
    feature_ids[i] = report->report.bh_rejections[i] + 1;
  return DHLCM_OK;
}

dhlcm_status dhlcm_test_report_not_testable(const dhlcm_test_report* report,
                                            int64_t* feature_ids) {
  if (!report || !feature_ids) return invalid("report and out must be non-null");
  for (size_t i = 0; i < report->report.not_testable.size(); ++i)
    feature_ids[i] = report->report.not_testable[i] + 1;
  return DHLCM_OK;
}

dhlcm_status dhlcm_chi_max_threshold(int64_t m, int64_t k, double alpha, double* out) {
  if (!out) return invalid("out must be non-null");
  return guarded([&] {
    *out = dhlcm::chi_max_threshold(static_cast<int>(m), static_cast<int>(k), alpha);
  });
}

dhlcm_status dhlcm_gumbel_threshold(int64_t m, int64_t k, double alpha, double* out) {
  if (!out) return invalid("out must be non-null");
  return guarded([&] {
    *out = dhlcm::gumbel_threshold(static_cast<int>(m), static_cast<int>(k), alpha);
  });
}

dhlcm_status dhlcm_feature_pvalue(double stat, int64_t k, double* out) {
  if (!out) return invalid("out must be non-null");
  return guarded([&] { *out = dhlcm::feature_pvalue(stat, static_cast<int>(k)); });
}

dhlcm_status dhlcm_benjamini_hochberg(const double* pvalues, int64_t m, double alpha,
                                      int32_t* reject_mask) {
  if (!pvalues || !reject_mask) return invalid("pvalues and mask must be non-null");
  return guarded([&] {
    std::vector<double> p(pvalues, pvalues + m);
    const auto rejected = dhlcm::benjamini_hochberg(p, alpha);
    for (int64_t i = 0; i < m; ++i) reject_mask[i] = 0;
    for (int idx : rejected) reject_mask[idx] = 1;
  });
}

namespace {

dhlcm_status metric_common(const int32_t* a, const int32_t* b, int64_t n,
                           double* out, double (*metric)(const dhlcm::Labels&,
                                                         const dhlcm::Labels&)) {
  if (!a || !b || !out) return invalid("labels and out must be non-null");
  return guarded([&] {
    dhlcm::Labels la(static_cast<size_t>(n)), lb(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
      if (a[i] < 1 || b[i] < 1)
        throw dhlcm::DomainError("labels are 1-based positive integers");
      la[static_cast<size_t>(i)] = a[i] - 1;
      lb[static_cast<size_t>(i)] = b[i] - 1;
    }
    *out = metric(la, lb);
  });
}

}  // namespace

dhlcm_status dhlcm_misclustering_rate(const int32_t* a, const int32_t* b, int64_t n,
                                      double* out) {
  return metric_common(a, b, n, out, dhlcm::misclustering_rate);
}

dhlcm_status dhlcm_rand_index(const int32_t* a, const int32_t* b, int64_t n,
                              double* out) {
  return metric_common(a, b, n, out, dhlcm::rand_index);
}

dhlcm_status dhlcm_diagnose(const double* theta, int64_t j, int64_t k,
                            dhlcm_diagnostics* out) {
  if (!theta || !out) return invalid("theta and out must be non-null");
  if (j < 1 || k < 1) return invalid("theta dimensions must be positive");
  return guarded([&] {
    dhlcm::Matrix m(j, k);
    std::memcpy(m.data(), theta, sizeof(double) * static_cast<size_t>(j * k));
    const auto d = dhlcm::diagnostics(m);
    out->delta = d.delta;
    out->sigma_star = d.sigma_star;
    out->kappa = d.kappa;
    out->mu_theta = d.mu_theta;
    out->theta_max = d.theta_max;
  });
}

dhlcm_status dhlcm_run_experiment(const char* config_json, int64_t replicates,
                                  uint64_t seed, int jobs, char** report_json) {
  if (!config_json || !report_json)
    return invalid("config_json and report_json must be non-null");
  *report_json = nullptr;
  return guarded([&] {
    const auto config = dhlcm::experiment_config_from_json(config_json);
    const auto report = dhlcm::run_experiment(config, replicates, seed, jobs);
    const std::string text = dhlcm::experiment_report_to_json(report, config);
    char* buf = new char[text.size() + 1];
    std::memcpy(buf, text.c_str(), text.size() + 1);
    *report_json = buf;
  });
}

void dhlcm_string_free(char* text) { delete[] text; }

}  // extern "C"
