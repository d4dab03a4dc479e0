#include "simulation.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <json.hpp>

#include "config.hpp"
#include "estimation.hpp"
#include "inference.hpp"
#include "rng.hpp"

namespace dhlcm {

namespace {

using nlohmann::json;

void check_generator_config(const GeneratorConfig& cfg) {
  if (cfg.n < 2 || cfg.j < 2)
    throw ConfigError("generator needs N >= 2 and J >= 2");
  if (cfg.k < 1 || cfg.k > cfg.n)
    throw ConfigError("generator needs 1 <= K <= N");
  if (cfg.family.kind == ModelFamily::Kind::Binomial && cfg.family.trials < 1)
    throw ConfigError("binomial trials must be >= 1");
  if (cfg.degree_law.kind == DegreeLaw::Kind::Uniform &&
      !(cfg.degree_law.lo > 0.0 && cfg.degree_law.hi >= cfg.degree_law.lo))
    throw ConfigError("uniform degree law needs 0 < lo <= hi");
  switch (cfg.theta_law.kind) {
    case ThetaLaw::Kind::ScaledBeta:
      if (!(cfg.theta_law.scale > 0.0 && cfg.theta_law.a > 0.0 && cfg.theta_law.b > 0.0))
        throw ConfigError("scaled beta law needs positive scale, a, b");
      break;
    case ThetaLaw::Kind::Gamma:
      if (!(cfg.theta_law.shape > 0.0 && cfg.theta_law.rate > 0.0))
        throw ConfigError("gamma law needs positive shape and rate");
      break;
    case ThetaLaw::Kind::Explicit:
      if (cfg.theta_law.values.rows() != cfg.j || cfg.theta_law.values.cols() != cfg.k)
        throw ConfigError("explicit theta must be J x K");
      break;
    case ThetaLaw::Kind::Blocks:
      if (cfg.theta_law.values.rows() < 1 || cfg.theta_law.values.cols() != cfg.k)
        throw ConfigError("block theta needs K columns");
      if (cfg.j % cfg.theta_law.values.rows() != 0)
        throw ConfigError("block theta requires J divisible by the block count");
      break;
  }
  for (const auto& [row, vals] : cfg.theta_overrides) {
    if (row < 0 || row >= cfg.j) throw ConfigError("theta override row out of range");
    if (vals.size() != cfg.k) throw ConfigError("theta override needs K values");
    if ((vals.array() < 0.0).any()) throw ConfigError("theta override must be nonnegative");
  }
  if (cfg.equal_null_rows < 0 || cfg.equal_null_rows > cfg.j)
    throw ConfigError("equal-null row count out of range");
  if (cfg.equal_null_rows > 0 && !(cfg.equal_null_lo >= 0.0 &&
                                   cfg.equal_null_hi >= cfg.equal_null_lo))
    throw ConfigError("equal-null range needs 0 <= lo <= hi");
}

Labels sample_labels(int n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> uni(0, k - 1);
  Labels labels(static_cast<size_t>(n));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<char> seen(static_cast<size_t>(k), 0);
    for (auto& l : labels) {
      l = uni(rng);
      seen[static_cast<size_t>(l)] = 1;
    }
    if (std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; }))
      return labels;
  }
  throw ConfigError("could not realize all classes; K too large for N?");
}

double sample_beta(double a, double b, std::mt19937_64& rng) {
  std::gamma_distribution<double> ga(a, 1.0);
  std::gamma_distribution<double> gb(b, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  const double s = x + y;
  return s > 0.0 ? x / s : 0.0;
}

Matrix sample_theta(const GeneratorConfig& cfg, std::mt19937_64& rng) {
  Matrix theta(cfg.j, cfg.k);
  switch (cfg.theta_law.kind) {
    case ThetaLaw::Kind::ScaledBeta:
      for (Index r = 0; r < theta.rows(); ++r)
        for (Index c = 0; c < theta.cols(); ++c)
          theta(r, c) = cfg.theta_law.scale * sample_beta(cfg.theta_law.a, cfg.theta_law.b, rng);
      return theta;
    case ThetaLaw::Kind::Gamma: {
      std::gamma_distribution<double> g(cfg.theta_law.shape, 1.0 / cfg.theta_law.rate);
      for (Index r = 0; r < theta.rows(); ++r)
        for (Index c = 0; c < theta.cols(); ++c) theta(r, c) = g(rng);
      return theta;
    }
    case ThetaLaw::Kind::Explicit:
      return cfg.theta_law.values;
    case ThetaLaw::Kind::Blocks: {
      const Index blocks = cfg.theta_law.values.rows();
      const Index span = cfg.j / blocks;
      for (Index b = 0; b < blocks; ++b)
        theta.middleRows(b * span, span) = cfg.theta_law.values.row(b).replicate(span, 1);
      return theta;
    }
  }
  throw ConfigError("unknown theta law");
}

struct PipelineFit {
  HeteroClusteringResult clustering;
  Vector degrees;
  Matrix theta;
  Matrix sigma2;
};

PipelineFit fit_pipeline(const GeneratedData& data, const ExperimentConfig& cfg,
                         SpectralMethod method, Normalization normalization,
                         std::uint64_t kmeans_seed, bool score_clamp) {
  HeteroClusteringOptions opts;
  opts.t0 = cfg.t0;
  opts.method = method;
  opts.normalization = normalization;
  opts.normalize.score_clamp = score_clamp;
  opts.kmeans.restarts = cfg.restarts;
  opts.kmeans.max_iter = cfg.kmeans_max_iter;
  opts.kmeans.seed = kmeans_seed;

  PipelineFit fit;
  fit.clustering = hetero_clustering(data.obs, data.truth.k, opts);
  fit.degrees = estimate_degrees(fit.clustering.embedding, fit.clustering.assignment);
  fit.theta = estimate_theta(data.obs, fit.clustering.assignment.labels,
                             data.truth.k, fit.degrees);
  fit.sigma2 = estimate_variances(fit.theta, fit.clustering.assignment.labels,
                                  data.truth.k, fit.degrees, data.obs.family)
                   .sigma2;
  return fit;
}

// Max-abs theta error after aligning estimated columns to the truth via the
// label permutation minimizing the misclustering rate.
double aligned_theta_error(const Matrix& theta_hat, const GroundTruth& truth,
                           const Labels& labels_hat) {
  const auto perm = best_label_permutation(truth.labels, labels_hat);
  double err = 0.0;
  for (int c = 0; c < truth.k; ++c)
    err = std::max(err, (theta_hat.col(c) - truth.theta.col(perm[static_cast<size_t>(c)]))
                            .cwiseAbs()
                            .maxCoeff());
  return err;
}

void run_type_i_power(const GeneratedData& data, const ExperimentConfig& cfg,
                      std::uint64_t rep_seed, ReplicateRecord& rec) {
  const auto fit = fit_pipeline(data, cfg, cfg.method, cfg.normalization,
                                derive_seed(rep_seed, 1), false);
  rec.misclustering = misclustering_rate(data.truth.labels, fit.clustering.assignment.labels);
  rec.rand_index = rand_index(data.truth.labels, fit.clustering.assignment.labels);
  rec.theta_max_err = aligned_theta_error(fit.theta, data.truth, fit.clustering.assignment.labels);

  auto run_single = [&](int feature, bool& testable, bool& reject, double& stat,
                        double& pvalue) {
    try {
      const TestReport rep =
          global_test(fit.theta, fit.sigma2, {feature}, cfg.alpha, TestRegime::Auto);
      testable = true;
      reject = rep.reject;
      stat = rep.global_stat;
      pvalue = rep.global_pvalue;
    } catch (const NoTestableFeaturesError&) {
      testable = false;
      reject = false;
      stat = 0.0;
      pvalue = 1.0;
    }
  };
  run_single(0, rec.null_testable, rec.reject_null, rec.stat_null, rec.pvalue_null);
  run_single(1, rec.alt_testable, rec.reject_alt, rec.stat_alt, rec.pvalue_alt);
}

void run_fdr(const GeneratedData& data, const ExperimentConfig& cfg,
             std::uint64_t rep_seed, ReplicateRecord& rec) {
  const auto fit = fit_pipeline(data, cfg, cfg.method, cfg.normalization,
                                derive_seed(rep_seed, 1), false);
  rec.misclustering = misclustering_rate(data.truth.labels, fit.clustering.assignment.labels);
  rec.rand_index = rand_index(data.truth.labels, fit.clustering.assignment.labels);

  std::vector<int> all(static_cast<size_t>(data.obs.cols()));
  for (size_t j = 0; j < all.size(); ++j) all[j] = static_cast<int>(j);
  const TestReport rep = global_test(fit.theta, fit.sigma2, all, cfg.alpha, TestRegime::Auto);

  rec.tested = static_cast<int>(rep.feature_ids.size());
  rec.bh_count = static_cast<int>(rep.bh_rejections.size());
  const int nulls = cfg.generator.equal_null_rows;
  for (int j : rep.bh_rejections)
    if (j < nulls)
      ++rec.false_discoveries;
    else
      ++rec.true_discoveries;
  rec.fdp = rec.bh_count > 0
                ? static_cast<double>(rec.false_discoveries) / static_cast<double>(rec.bh_count)
                : 0.0;
}

void run_cluster_compare(const GeneratedData& data, const ExperimentConfig& cfg,
                         std::uint64_t rep_seed, ReplicateRecord& rec) {
  const SpectralMethod methods[] = {SpectralMethod::HeteroPca, SpectralMethod::PlainSvd};
  const Normalization norms[] = {Normalization::L2, Normalization::Score,
                                 Normalization::None};
  int slot = 0;
  for (SpectralMethod method : methods) {
    const SpectralEmbedding emb = method == SpectralMethod::HeteroPca
                                      ? hetero_pca(data.obs.values, data.truth.k, cfg.t0)
                                      : plain_svd(data.obs.values, data.truth.k);
    for (Normalization norm : norms) {
      // SCORE keeps the clamp fallback on here so degree-heterogeneous
      // replicates with tiny leading coordinates still get clustered.
      NormalizeOptions nopts;
      nopts.score_clamp = true;
      const Matrix pts = normalize_rows(emb.u, norm, nopts);
      KMeansOptions kopts;
      kopts.restarts = cfg.restarts;
      kopts.max_iter = cfg.kmeans_max_iter;
      kopts.seed = derive_seed(rep_seed, 10 + static_cast<std::uint64_t>(slot));
      const ClusterAssignment assign = kmeans(pts, data.truth.k, kopts);

      MethodOutcome out;
      out.method = method == SpectralMethod::HeteroPca ? "heteropca" : "svd";
      out.normalization = norm == Normalization::L2
                              ? "l2"
                              : (norm == Normalization::Score ? "score" : "none");
      out.misclustering = misclustering_rate(data.truth.labels, assign.labels);
      out.rand_index = rand_index(data.truth.labels, assign.labels);
      rec.methods.push_back(std::move(out));
      ++slot;
    }
  }
}

void run_svd_vs_hetero(const GeneratedData& data, const ExperimentConfig& cfg,
                       std::uint64_t rep_seed, ReplicateRecord& rec) {
  // Reference subspace: exact top-K left singular space of the signal.
  const Matrix z = labels_to_onehot(data.truth.labels, data.truth.k);
  const Matrix signal = data.truth.degrees.asDiagonal() * z * data.truth.theta.transpose();
  const Matrix u_exact = plain_svd(signal, data.truth.k).u;

  const SpectralMethod methods[] = {SpectralMethod::HeteroPca, SpectralMethod::PlainSvd};
  int slot = 0;
  for (SpectralMethod method : methods) {
    const auto fit = fit_pipeline(data, cfg, method, cfg.normalization,
                                  derive_seed(rep_seed, 20 + static_cast<std::uint64_t>(slot)),
                                  false);
    MethodOutcome out;
    out.method = method == SpectralMethod::HeteroPca ? "heteropca" : "svd";
    out.normalization = cfg.normalization == Normalization::L2 ? "l2" : "other";
    out.subspace_error = subspace_error(u_exact, fit.clustering.embedding.u);
    out.misclustering = misclustering_rate(data.truth.labels, fit.clustering.assignment.labels);
    out.rand_index = rand_index(data.truth.labels, fit.clustering.assignment.labels);
    out.theta_max_err =
        aligned_theta_error(fit.theta, data.truth, fit.clustering.assignment.labels);
    rec.methods.push_back(std::move(out));
    ++slot;
  }
}

json record_to_json(const ReplicateRecord& rec, Scenario scenario) {
  json j;
  j["replicate"] = rec.index;
  j["seed"] = rec.seed;
  if (rec.failed) {
    j["failed"] = true;
    j["error"] = rec.error;
    return j;
  }
  switch (scenario) {
    case Scenario::TypeIPower:
      j["clamped_cells"] = rec.clamp_count;
      j["misclustering"] = rec.misclustering;
      j["rand_index"] = rec.rand_index;
      j["theta_max_err"] = rec.theta_max_err;
      j["null_testable"] = rec.null_testable;
      j["alt_testable"] = rec.alt_testable;
      j["reject_null"] = rec.reject_null;
      j["reject_alt"] = rec.reject_alt;
      j["stat_null"] = rec.stat_null;
      j["stat_alt"] = rec.stat_alt;
      j["pvalue_null"] = rec.pvalue_null;
      j["pvalue_alt"] = rec.pvalue_alt;
      break;
    case Scenario::Fdr:
      j["clamped_cells"] = rec.clamp_count;
      j["misclustering"] = rec.misclustering;
      j["rand_index"] = rec.rand_index;
      j["tested"] = rec.tested;
      j["bh_rejections"] = rec.bh_count;
      j["false_discoveries"] = rec.false_discoveries;
      j["true_discoveries"] = rec.true_discoveries;
      j["fdp"] = rec.fdp;
      break;
    case Scenario::ClusterCompare:
    case Scenario::SvdVsHetero: {
      j["clamped_cells"] = rec.clamp_count;
      json arr = json::array();
      for (const auto& m : rec.methods) {
        json mj;
        mj["method"] = m.method;
        mj["normalization"] = m.normalization;
        mj["misclustering"] = m.misclustering;
        mj["rand_index"] = m.rand_index;
        if (scenario == Scenario::SvdVsHetero) {
          mj["subspace_error"] = m.subspace_error;
          mj["theta_max_err"] = m.theta_max_err;
        }
        arr.push_back(std::move(mj));
      }
      j["methods"] = std::move(arr);
      break;
    }
  }
  return j;
}

}  // namespace

const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::TypeIPower: return "type_i_power";
    case Scenario::Fdr: return "fdr";
    case Scenario::ClusterCompare: return "cluster_compare";
    case Scenario::SvdVsHetero: return "svd_vs_hetero";
  }
  return "unknown";
}

Vector rescale_degrees(const Vector& degrees, const Labels& labels, int k) {
  const Index n = degrees.size();
  if (static_cast<Index>(labels.size()) != n)
    throw ShapeError("labels/degrees length mismatch");
  const auto sizes = cluster_sizes_of(labels, k);
  Vector sumsq = Vector::Zero(k);
  for (Index i = 0; i < n; ++i) {
    if (!(degrees(i) > 0.0)) throw DomainError("degrees must be positive");
    sumsq(labels[static_cast<size_t>(i)]) += degrees(i) * degrees(i);
  }
  Vector factor(k);
  for (int c = 0; c < k; ++c) {
    if (sizes[static_cast<size_t>(c)] == 0) {
      std::ostringstream msg;
      msg << "cluster " << (c + 1) << " is empty";
      throw EmptyClusterError(msg.str());
    }
    factor(c) = std::sqrt(static_cast<double>(sizes[static_cast<size_t>(c)]) / sumsq(c));
  }
  Vector out(n);
  for (Index i = 0; i < n; ++i) out(i) = degrees(i) * factor(labels[static_cast<size_t>(i)]);
  return out;
}

GeneratedData generate(const GeneratorConfig& config) {
  check_generator_config(config);
  std::mt19937_64 rng = make_engine(config.seed);

  GeneratedData data;
  data.truth.k = config.k;
  data.truth.labels = sample_labels(config.n, config.k, rng);

  Vector degrees(config.n);
  if (config.degree_law.kind == DegreeLaw::Kind::Uniform) {
    std::uniform_real_distribution<double> uni(config.degree_law.lo, config.degree_law.hi);
    for (Index i = 0; i < degrees.size(); ++i) degrees(i) = uni(rng);
  } else {
    degrees.setOnes();
  }
  data.truth.degrees = rescale_degrees(degrees, data.truth.labels, config.k);

  Matrix theta = sample_theta(config, rng);
  if (config.equal_null_rows > 0) {
    std::uniform_real_distribution<double> uni(config.equal_null_lo, config.equal_null_hi);
    for (int r = 0; r < config.equal_null_rows; ++r) theta.row(r).setConstant(uni(rng));
  }
  for (const auto& [row, vals] : config.theta_overrides)
    theta.row(row) = vals.transpose();
  data.truth.theta = theta;

  data.obs.family = config.family;
  data.obs.values.resize(config.n, config.j);
  long clamps = 0;
  for (Index i = 0; i < config.n; ++i) {
    const int s = data.truth.labels[static_cast<size_t>(i)];
    const double w = data.truth.degrees(i);
    for (Index jj = 0; jj < config.j; ++jj) {
      const double mean = w * theta(jj, s);
      double value = 0.0;
      switch (config.family.kind) {
        case ModelFamily::Kind::Bernoulli: {
          double p = mean;
          if (p > 1.0) {
            p = 1.0;
            ++clamps;
          }
          std::bernoulli_distribution d(p);
          value = d(rng) ? 1.0 : 0.0;
          break;
        }
        case ModelFamily::Kind::Binomial: {
          double p = mean;
          if (p > 1.0) {
            p = 1.0;
            ++clamps;
          }
          std::binomial_distribution<int> d(config.family.trials, p);
          value = static_cast<double>(d(rng));
          break;
        }
        case ModelFamily::Kind::Poisson: {
          if (mean > 0.0) {
            std::poisson_distribution<long> d(mean);
            value = static_cast<double>(d(rng));
          }
          break;
        }
      }
      data.obs.values(i, jj) = value;
    }
  }
  data.truth.clamp_count = clamps;
  return data;
}

JmlResult jml_fit(const ObservationMatrix& obs, int k, const Labels& init_labels,
                  int max_iter) {
  if (obs.family.kind != ModelFamily::Kind::Bernoulli)
    throw FamilyError("joint MLE is defined for the Bernoulli model only");
  const Index n = obs.rows();
  const Index j = obs.cols();
  if (static_cast<Index>(init_labels.size()) != n)
    throw ShapeError("init labels length must match the subject count");
  if (k < 1) throw InvalidArgumentError("jml_fit requires k >= 1");
  for (int l : init_labels)
    if (l < 0 || l >= k) throw DomainError("init label out of range");
  if (max_iter < 1) throw InvalidArgumentError("jml_fit requires max_iter >= 1");

  constexpr double kEps = 1e-10;
  JmlResult res;
  res.labels = init_labels;
  const Matrix ones = Matrix::Ones(n, j);

  for (int sweep = 0; sweep < max_iter; ++sweep) {
    // class-mean update of theta given labels
    const auto sizes = cluster_sizes_of(res.labels, k);
    Matrix theta = Matrix::Zero(j, k);
    for (Index i = 0; i < n; ++i)
      theta.col(res.labels[static_cast<size_t>(i)]) += obs.values.row(i).transpose();
    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<size_t>(c)] > 0)
        theta.col(c) /= static_cast<double>(sizes[static_cast<size_t>(c)]);
      // emptied clusters keep the clamp floor
    }
    theta = theta.cwiseMax(kEps).cwiseMin(1.0 - kEps);
    res.theta = theta;

    // per-subject log-likelihood of each class
    const Matrix log_theta = theta.array().log().matrix();
    const Matrix log_comp = (1.0 - theta.array()).log().matrix();
    const Matrix scores = obs.values * log_theta + (ones - obs.values) * log_comp;

    Labels next(static_cast<size_t>(n));
    double loglik = 0.0;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      for (int c = 1; c < k; ++c)
        if (scores(i, c) > scores(i, best)) best = c;
      next[static_cast<size_t>(i)] = best;
      loglik += scores(i, best);
    }
    res.loglik_trace.push_back(loglik);
    const bool stable = next == res.labels;
    res.labels = std::move(next);
    if (stable) break;
  }
  return res;
}

ExperimentAggregates aggregate_report(const ExperimentReport& report,
                                      const ExperimentConfig& config) {
  ExperimentAggregates agg;
  std::vector<std::pair<std::string, MethodAggregate>> methods;
  for (const auto& rec : report.records) {
    if (rec.failed) continue;
    ++agg.ok;
    agg.total_clamped += rec.clamp_count;
    agg.mean_misclustering += rec.misclustering;
    agg.mean_rand_index += rec.rand_index;
    agg.mean_theta_max_err += rec.theta_max_err;
    agg.type_i_rate += rec.reject_null ? 1.0 : 0.0;
    agg.power += rec.reject_alt ? 1.0 : 0.0;
    agg.mean_false_discoveries += rec.false_discoveries;
    agg.mean_true_discoveries += rec.true_discoveries;
    agg.mean_fdp += rec.fdp;
    for (const auto& m : rec.methods) {
      const std::string key = m.method + "+" + m.normalization;
      auto it = std::find_if(methods.begin(), methods.end(),
                             [&](const auto& p) { return p.first == key; });
      if (it == methods.end()) {
        methods.emplace_back(key, MethodAggregate{});
        it = std::prev(methods.end());
      }
      it->second.mean_misclustering += m.misclustering;
      it->second.mean_rand_index += m.rand_index;
      it->second.mean_subspace_error += m.subspace_error;
      it->second.mean_theta_max_err += m.theta_max_err;
    }
  }
  if (agg.ok > 0) {
    const double denom = static_cast<double>(agg.ok);
    agg.mean_misclustering /= denom;
    agg.mean_rand_index /= denom;
    agg.mean_theta_max_err /= denom;
    agg.type_i_rate /= denom;
    agg.power /= denom;
    agg.mean_false_discoveries /= denom;
    agg.mean_true_discoveries /= denom;
    agg.mean_fdp /= denom;
    for (auto& [key, m] : methods) {
      m.mean_misclustering /= denom;
      m.mean_rand_index /= denom;
      m.mean_subspace_error /= denom;
      m.mean_theta_max_err /= denom;
    }
  }
  if (config.scenario == Scenario::Fdr && config.generator.equal_null_rows > 0)
    agg.null_type_i_rate =
        agg.mean_false_discoveries / static_cast<double>(config.generator.equal_null_rows);
  agg.per_method = std::move(methods);
  return agg;
}

ExperimentReport run_experiment(const ExperimentConfig& config,
                                std::int64_t replicates, std::uint64_t base_seed,
                                int jobs) {
  if (replicates < 0) throw InvalidArgumentError("replicate count must be >= 0");
  ExperimentReport report;
  report.scenario = config.scenario;
  report.replicates = replicates;
  report.base_seed = base_seed;
  report.records.resize(static_cast<size_t>(replicates));

  parallel_for(replicates, jobs, [&](std::int64_t rep) {
    ReplicateRecord& rec = report.records[static_cast<size_t>(rep)];
    rec.index = rep;
    rec.seed = derive_seed(base_seed, static_cast<std::uint64_t>(rep));
    try {
      GeneratorConfig gen = config.generator;
      gen.seed = rec.seed;
      const GeneratedData data = generate(gen);
      rec.clamp_count = data.truth.clamp_count;
      switch (config.scenario) {
        case Scenario::TypeIPower:
          run_type_i_power(data, config, rec.seed, rec);
          break;
        case Scenario::Fdr:
          run_fdr(data, config, rec.seed, rec);
          break;
        case Scenario::ClusterCompare:
          run_cluster_compare(data, config, rec.seed, rec);
          break;
        case Scenario::SvdVsHetero:
          run_svd_vs_hetero(data, config, rec.seed, rec);
          break;
      }
    } catch (const std::exception& e) {
      rec.failed = true;
      rec.error = e.what();
    }
  });

  for (const auto& rec : report.records)
    if (rec.failed) ++report.failed;
  return report;
}

std::string experiment_report_to_json(const ExperimentReport& report,
                                      const ExperimentConfig& config) {
  const ExperimentAggregates agg = aggregate_report(report, config);
  json j;
  j["scenario"] = scenario_name(report.scenario);
  j["config"] = json::parse(experiment_config_to_json(config));
  j["base_seed"] = report.base_seed;
  j["replicates"] = report.replicates;
  j["failed"] = report.failed;

  json ja;
  ja["ok"] = agg.ok;
  ja["clamped_cells"] = agg.total_clamped;
  switch (report.scenario) {
    case Scenario::TypeIPower:
      ja["type_i_rate"] = agg.type_i_rate;
      ja["power"] = agg.power;
      ja["mean_misclustering"] = agg.mean_misclustering;
      ja["mean_rand_index"] = agg.mean_rand_index;
      ja["mean_theta_max_err"] = agg.mean_theta_max_err;
      break;
    case Scenario::Fdr:
      ja["mean_false_discoveries"] = agg.mean_false_discoveries;
      ja["mean_true_discoveries"] = agg.mean_true_discoveries;
      ja["mean_fdp"] = agg.mean_fdp;
      ja["type_i_rate"] = agg.null_type_i_rate;
      ja["mean_misclustering"] = agg.mean_misclustering;
      break;
    case Scenario::ClusterCompare:
    case Scenario::SvdVsHetero: {
      json methods;
      for (const auto& [key, m] : agg.per_method) {
        json mj;
        mj["mean_misclustering"] = m.mean_misclustering;
        mj["mean_rand_index"] = m.mean_rand_index;
        if (report.scenario == Scenario::SvdVsHetero) {
          mj["mean_subspace_error"] = m.mean_subspace_error;
          mj["mean_theta_max_err"] = m.mean_theta_max_err;
        }
        methods[key] = std::move(mj);
      }
      ja["methods"] = std::move(methods);
      break;
    }
  }
  j["aggregates"] = std::move(ja);

  json recs = json::array();
  for (const auto& rec : report.records)
    recs.push_back(record_to_json(rec, report.scenario));
  j["per_replicate"] = std::move(recs);
  return j.dump(2) + "\n";
}

}  // namespace dhlcm
