#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "clustering.hpp"
#include "model.hpp"
#include "types.hpp"

namespace dhlcm {

struct DegreeLaw {
  enum class Kind { Uniform, Constant };
  Kind kind = Kind::Uniform;
  double lo = 0.1;
  double hi = 1.5;
};

struct ThetaLaw {
  enum class Kind { ScaledBeta, Gamma, Explicit, Blocks };
  Kind kind = Kind::ScaledBeta;
  // ScaledBeta: scale * Beta(a, b) iid entries
  double scale = 2.0 / 3.0;
  double a = 0.1;
  double b = 1.0;
  // Gamma: shape/rate iid entries
  double shape = 0.5;
  double rate = 1.0;
  // Explicit: J x K matrix. Blocks: B x K matrix, row b repeated over the
  // b-th of B equal row-blocks of theta.
  Matrix values;
};

struct GeneratorConfig {
  int n = 0;
  int j = 0;
  int k = 0;
  ModelFamily family;
  DegreeLaw degree_law;
  ThetaLaw theta_law;
  // Explicit theta rows (0-based index), applied after sampling and before
  // any probability clamp.
  std::vector<std::pair<int, Vector>> theta_overrides;
  // Leading rows redrawn as row-constant values from U[lo, hi]; these are the
  // true nulls of the multiple-testing protocol. Applied before overrides.
  int equal_null_rows = 0;
  double equal_null_lo = 0.2;
  double equal_null_hi = 2.0 / 3.0;
  std::uint64_t seed = 0;
};

// Cluster-wise scaling so that sum_{i in C_k} w_i^2 = |C_k| exactly.
Vector rescale_degrees(const Vector& degrees, const Labels& labels, int k);

struct GeneratedData {
  ObservationMatrix obs;
  GroundTruth truth;
};

// Samples labels (redrawn until every class occurs), degrees (then
// rescaled), theta, and the response matrix. Bounded families draw with
// success probability min(w*theta, 1); clamped cells are counted in
// truth.clamp_count. RNG consumption order is fixed: labels, degrees, theta,
// equal-null rows, then responses in row-major order.
GeneratedData generate(const GeneratorConfig& config);

struct JmlResult {
  Labels labels;
  Matrix theta;  // J x K, clamped into [eps, 1-eps] with eps = 1e-10
  std::vector<double> loglik_trace;  // joint log-likelihood after each sweep
};

// Alternating class-mean / argmax-reassignment maximization of the joint
// Bernoulli likelihood for the degree-free binary model. Stops when labels
// stabilize or after max_iter sweeps.
JmlResult jml_fit(const ObservationMatrix& obs, int k, const Labels& init_labels,
                  int max_iter);

enum class Scenario { TypeIPower, Fdr, ClusterCompare, SvdVsHetero };

const char* scenario_name(Scenario s);

struct ExperimentConfig {
  Scenario scenario = Scenario::TypeIPower;
  GeneratorConfig generator;  // per-replicate seeds derived from the base seed
  int t0 = 20;
  SpectralMethod method = SpectralMethod::HeteroPca;
  Normalization normalization = Normalization::L2;
  int restarts = 100;
  int kmeans_max_iter = 300;
  double alpha = 0.05;
};

struct MethodOutcome {
  std::string method;
  std::string normalization;
  double misclustering = 0.0;
  double rand_index = 0.0;
  double subspace_error = 0.0;
  double theta_max_err = 0.0;
};

struct ReplicateRecord {
  std::int64_t index = 0;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string error;
  long clamp_count = 0;
  double misclustering = 0.0;
  double rand_index = 0.0;
  double theta_max_err = 0.0;
  // type_i_power
  bool null_testable = false;
  bool alt_testable = false;
  bool reject_null = false;
  bool reject_alt = false;
  double stat_null = 0.0;
  double stat_alt = 0.0;
  double pvalue_null = 1.0;
  double pvalue_alt = 1.0;
  // fdr
  int tested = 0;
  int bh_count = 0;
  int false_discoveries = 0;
  int true_discoveries = 0;
  double fdp = 0.0;
  // cluster_compare / svd_vs_hetero
  std::vector<MethodOutcome> methods;
};

struct ExperimentReport {
  Scenario scenario = Scenario::TypeIPower;
  std::int64_t replicates = 0;
  std::uint64_t base_seed = 0;
  std::int64_t failed = 0;
  std::vector<ReplicateRecord> records;
};

struct MethodAggregate {
  double mean_misclustering = 0.0;
  double mean_rand_index = 0.0;
  double mean_subspace_error = 0.0;
  double mean_theta_max_err = 0.0;
};

struct ExperimentAggregates {
  std::int64_t ok = 0;
  double type_i_rate = 0.0;
  double power = 0.0;
  double mean_misclustering = 0.0;
  double mean_rand_index = 0.0;
  double mean_theta_max_err = 0.0;
  long total_clamped = 0;
  double mean_false_discoveries = 0.0;
  double mean_true_discoveries = 0.0;
  double mean_fdp = 0.0;
  double null_type_i_rate = 0.0;  // false discoveries / true null count
  std::vector<std::pair<std::string, MethodAggregate>> per_method;
};

ExperimentAggregates aggregate_report(const ExperimentReport& report,
                                      const ExperimentConfig& config);

// Independent generate -> cluster -> estimate -> test pipelines, sub-seeded
// per replicate; the result is identical for any parallelism degree.
// Replicates that throw are recorded as failed, never dropped.
ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::int64_t replicates, std::uint64_t base_seed,
                                int jobs);

// Canonical JSON serialization (used for the report files; byte-stable).
// Wall-clock timing deliberately stays out of this payload.
std::string experiment_report_to_json(const ExperimentReport& report,
                                      const ExperimentConfig& config);

}  // namespace dhlcm
