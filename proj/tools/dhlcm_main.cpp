// Command-line front end for the dhlcm shared library. Talks to the core
// exclusively through the C API in dhlcm.h.
#include <dhlcm.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

namespace {

using nlohmann::json;

struct CliError : std::runtime_error {
  CliError(std::string code, const std::string& msg)
      : std::runtime_error(msg), code(std::move(code)) {}
  std::string code;
};

void check(dhlcm_status status) {
  if (status != DHLCM_OK)
    throw CliError(dhlcm_status_name(status), dhlcm_last_error());
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_tokens(const std::string& line) {
  std::string prepared = line;
  for (char& c : prepared)
    if (c == ',' || c == '\t' || c == '\r') c = ' ';
  std::vector<std::string> tokens;
  std::istringstream ss(prepared);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

// Numeric matrix with an optional header line; doubles allowed.
std::vector<std::vector<double>> read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError("io", "cannot open \"" + path + "\" for reading");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto tokens = split_tokens(line);
    if (tokens.empty()) continue;
    std::vector<double> row;
    bool numeric = true;
    for (const auto& tok : tokens) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(tok.c_str(), &end);
      if (errno != 0 || end != tok.c_str() + tok.size()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) {
        first = false;
        continue;
      }
      throw CliError("io", "\"" + path + "\" line " + std::to_string(line_no) +
                               ": non-numeric value");
    }
    first = false;
    if (!rows.empty() && row.size() != rows.front().size())
      throw CliError("io", "\"" + path + "\" line " + std::to_string(line_no) +
                               ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw CliError("io", "\"" + path + "\" contains no data rows");
  return rows;
}

std::vector<int32_t> read_label_file(const std::string& path) {
  const auto rows = read_table(path);
  std::vector<int32_t> labels;
  for (const auto& row : rows) {
    if (row.size() != 1 || row[0] != static_cast<long>(row[0]) || row[0] < 1)
      throw CliError("io", "\"" + path + "\": labels are one 1-based integer per line");
    labels.push_back(static_cast<int32_t>(row[0]));
  }
  return labels;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError("io", "cannot open \"" + path + "\" for writing");
  out << text;
  if (!out) throw CliError("io", "failed writing \"" + path + "\"");
}

void write_matrix(const std::string& path, const std::vector<double>& values,
                  int64_t rows, int64_t cols) {
  std::ostringstream out;
  for (int64_t r = 0; r < rows; ++r) {
    for (int64_t c = 0; c < cols; ++c) {
      if (c) out << ',';
      out << fmt(values[static_cast<size_t>(r * cols + c)]);
    }
    out << '\n';
  }
  write_file(path, out.str());
}

void write_labels_file(const std::string& path, const std::vector<int32_t>& labels) {
  std::ostringstream out;
  for (int32_t l : labels) out << l << '\n';
  write_file(path, out.str());
}

struct MatrixHandle {
  dhlcm_matrix* ptr = nullptr;
  ~MatrixHandle() { dhlcm_matrix_free(ptr); }
};
struct ModelHandle {
  dhlcm_model* ptr = nullptr;
  ~ModelHandle() { dhlcm_model_free(ptr); }
};
struct ReportHandle {
  dhlcm_test_report* ptr = nullptr;
  ~ReportHandle() { dhlcm_test_report_free(ptr); }
};

struct CommonFlags {
  std::string family = "bernoulli";
  int trials = 1;
  int64_t k = 0;
  int64_t t0 = 20;
  std::string method = "heteropca";
  std::string normalization = "l2";
  bool score_clamp = false;
  int64_t restarts = 100;
  int64_t max_iter = 300;
  uint64_t seed = 0;
};

void add_family_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--family", flags.family, "Response family")
      ->check(CLI::IsMember({"bernoulli", "binomial", "poisson"}));
  cmd->add_option("--trials", flags.trials, "Binomial trial count")
      ->check(CLI::PositiveNumber);
}

void add_cluster_flags(CLI::App* cmd, CommonFlags& flags, bool k_required) {
  auto* k = cmd->add_option("--k,-k", flags.k, "Number of latent classes");
  if (k_required) k->required();
  cmd->add_option("--t0", flags.t0, "Diagonal re-imputation iterations")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--method", flags.method, "Spectral method")
      ->check(CLI::IsMember({"heteropca", "svd"}));
  cmd->add_option("--normalize", flags.normalization, "Row normalization")
      ->check(CLI::IsMember({"l2", "score", "none"}));
  cmd->add_flag("--score-clamp", flags.score_clamp,
                "Clamp degenerate SCORE ratios instead of failing");
  cmd->add_option("--restarts", flags.restarts, "K-means restarts")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iter", flags.max_iter, "K-means iteration cap")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--seed", flags.seed, "RNG seed (fixed default for reproducibility)");
}

dhlcm_family family_enum(const std::string& name) {
  if (name == "binomial") return DHLCM_FAMILY_BINOMIAL;
  if (name == "poisson") return DHLCM_FAMILY_POISSON;
  return DHLCM_FAMILY_BERNOULLI;
}

dhlcm_cluster_options make_options(const CommonFlags& flags) {
  dhlcm_cluster_options opts;
  dhlcm_cluster_options_init(&opts, flags.k);
  opts.t0 = flags.t0;
  opts.method = flags.method == "svd" ? DHLCM_METHOD_PLAIN_SVD : DHLCM_METHOD_HETERO_PCA;
  opts.normalization = flags.normalization == "score"  ? DHLCM_NORMALIZE_SCORE
                       : flags.normalization == "none" ? DHLCM_NORMALIZE_NONE
                                                       : DHLCM_NORMALIZE_L2;
  opts.score_clamp = flags.score_clamp ? 1 : 0;
  opts.restarts = flags.restarts;
  opts.max_iter = flags.max_iter;
  opts.seed = flags.seed;
  return opts;
}

MatrixHandle load_matrix(const std::string& path, const CommonFlags& flags) {
  MatrixHandle matrix;
  check(dhlcm_matrix_read(path.c_str(), family_enum(flags.family), flags.trials,
                          &matrix.ptr));
  return matrix;
}

void print_summary(const json& record, const std::string& heading) {
  std::cout << heading << "\n";
  size_t width = 0;
  for (auto it = record.begin(); it != record.end(); ++it)
    width = std::max(width, it.key().size());
  for (auto it = record.begin(); it != record.end(); ++it) {
    std::cout << "  " << it.key() << std::string(width - it.key().size() + 2, ' ');
    if (it.value().is_number_float())
      std::cout << fmt(it.value().get<double>());
    else
      std::cout << it.value().dump();
    std::cout << "\n";
  }
  std::cout << record.dump() << std::endl;
}

// ---- subcommands ---------------------------------------------------------

int cmd_cluster(const std::string& input, const CommonFlags& flags,
                const std::string& truth_path, const std::string& prefix) {
  MatrixHandle matrix = load_matrix(input, flags);
  const auto opts = make_options(flags);
  ModelHandle model;
  check(dhlcm_cluster(matrix.ptr, &opts, &model.ptr));

  const int64_t n = dhlcm_model_n(model.ptr);
  const int64_t k = dhlcm_model_k(model.ptr);
  std::vector<int32_t> labels(static_cast<size_t>(n));
  check(dhlcm_model_labels(model.ptr, labels.data()));
  std::vector<double> embedding(static_cast<size_t>(n * k));
  check(dhlcm_model_embedding(model.ptr, embedding.data()));
  std::vector<double> eigenvalues(static_cast<size_t>(k));
  check(dhlcm_model_eigenvalues(model.ptr, eigenvalues.data()));
  double inertia = 0.0;
  check(dhlcm_model_inertia(model.ptr, &inertia));

  write_labels_file(prefix + ".labels.txt", labels);
  write_matrix(prefix + ".embedding.csv", embedding, n, k);

  json summary;
  summary["command"] = "cluster";
  summary["input"] = input;
  summary["n"] = n;
  summary["j"] = dhlcm_matrix_cols(matrix.ptr);
  summary["k"] = k;
  summary["method"] = flags.method;
  summary["normalization"] = flags.normalization;
  summary["t0"] = flags.t0;
  summary["restarts"] = flags.restarts;
  summary["seed"] = flags.seed;
  summary["inertia"] = inertia;
  summary["eigenvalues"] = eigenvalues;
  summary["labels_file"] = prefix + ".labels.txt";
  summary["embedding_file"] = prefix + ".embedding.csv";

  if (!truth_path.empty()) {
    const auto truth = read_label_file(truth_path);
    if (truth.size() != labels.size())
      throw CliError("shape", "truth labels length does not match the data");
    double h = 0.0, ri = 0.0;
    check(dhlcm_misclustering_rate(labels.data(), truth.data(),
                                   static_cast<int64_t>(n), &h));
    check(dhlcm_rand_index(labels.data(), truth.data(), static_cast<int64_t>(n), &ri));
    summary["misclustering"] = h;
    summary["rand_index"] = ri;
  }
  print_summary(summary, "cluster results");
  return 0;
}

ModelHandle fit_model(const MatrixHandle& matrix, const CommonFlags& flags,
                      const std::string& labels_path, const std::string& degrees_path) {
  ModelHandle model;
  const auto opts = make_options(flags);
  if (!labels_path.empty()) {
    const auto labels = read_label_file(labels_path);
    if (static_cast<int64_t>(labels.size()) != dhlcm_matrix_rows(matrix.ptr))
      throw CliError("shape", "label file length does not match the data");
    int64_t k = flags.k;
    if (k == 0)
      for (int32_t l : labels) k = std::max<int64_t>(k, l);
    std::vector<double> degrees;
    const double* degrees_ptr = nullptr;
    if (!degrees_path.empty()) {
      for (const auto& row : read_table(degrees_path))
        for (double v : row) degrees.push_back(v);
      if (static_cast<int64_t>(degrees.size()) != dhlcm_matrix_rows(matrix.ptr))
        throw CliError("shape", "degree file length does not match the data");
      degrees_ptr = degrees.data();
    }
    check(dhlcm_model_with_labels(matrix.ptr, labels.data(), k, degrees_ptr, &opts,
                                  &model.ptr));
  } else {
    if (flags.k < 1)
      throw CliError("config", "--k is required when no label file is given");
    check(dhlcm_cluster(matrix.ptr, &opts, &model.ptr));
  }
  check(dhlcm_estimate(model.ptr, matrix.ptr));
  return model;
}

int cmd_estimate(const std::string& input, const CommonFlags& flags,
                 const std::string& labels_path, const std::string& degrees_path,
                 const std::string& prefix) {
  MatrixHandle matrix = load_matrix(input, flags);
  ModelHandle model = fit_model(matrix, flags, labels_path, degrees_path);

  const int64_t n = dhlcm_model_n(model.ptr);
  const int64_t j = dhlcm_model_j(model.ptr);
  const int64_t k = dhlcm_model_k(model.ptr);
  std::vector<double> theta(static_cast<size_t>(j * k));
  std::vector<double> sigma2(static_cast<size_t>(j * k));
  std::vector<double> degrees(static_cast<size_t>(n));
  std::vector<int64_t> sizes(static_cast<size_t>(k));
  check(dhlcm_model_theta(model.ptr, theta.data()));
  check(dhlcm_model_sigma2(model.ptr, sigma2.data()));
  check(dhlcm_model_degrees(model.ptr, degrees.data()));
  check(dhlcm_model_cluster_sizes(model.ptr, sizes.data()));

  write_matrix(prefix + ".theta.csv", theta, j, k);
  write_matrix(prefix + ".sigma2.csv", sigma2, j, k);
  write_matrix(prefix + ".omega.txt", degrees, n, 1);

  json summary;
  summary["command"] = "estimate";
  summary["input"] = input;
  summary["n"] = n;
  summary["j"] = j;
  summary["k"] = k;
  summary["family"] = flags.family;
  summary["cluster_sizes"] = sizes;
  summary["theta_file"] = prefix + ".theta.csv";
  summary["sigma2_file"] = prefix + ".sigma2.csv";
  summary["omega_file"] = prefix + ".omega.txt";
  print_summary(summary, "estimation results");
  return 0;
}

int cmd_test(const std::string& input, const CommonFlags& flags,
             const std::string& labels_path, const std::string& degrees_path,
             const std::vector<int64_t>& features, bool all_features, double alpha,
             const std::string& regime, bool show_bh, const std::string& prefix) {
  MatrixHandle matrix = load_matrix(input, flags);
  ModelHandle model = fit_model(matrix, flags, labels_path, degrees_path);

  const dhlcm_regime r = regime == "chi_square_max" ? DHLCM_REGIME_CHI_SQUARE_MAX
                         : regime == "gumbel"       ? DHLCM_REGIME_GUMBEL
                                                    : DHLCM_REGIME_AUTO;
  ReportHandle report;
  check(dhlcm_global_test(model.ptr, all_features ? nullptr : features.data(),
                          all_features ? 0 : static_cast<int64_t>(features.size()),
                          alpha, r, &report.ptr));

  const int64_t tested = dhlcm_test_report_tested(report.ptr);
  const int64_t excluded = dhlcm_test_report_excluded(report.ptr);
  const int64_t bh_count = dhlcm_test_report_bh_count(report.ptr);
  std::vector<int64_t> ids(static_cast<size_t>(tested));
  std::vector<double> stats(static_cast<size_t>(tested));
  std::vector<double> pvalues(static_cast<size_t>(tested));
  check(dhlcm_test_report_features(report.ptr, ids.data(), stats.data(),
                                   pvalues.data()));
  std::vector<int64_t> bh(static_cast<size_t>(bh_count));
  if (bh_count > 0) check(dhlcm_test_report_bh(report.ptr, bh.data()));
  std::vector<int64_t> skipped(static_cast<size_t>(excluded));
  if (excluded > 0) check(dhlcm_test_report_not_testable(report.ptr, skipped.data()));

  double stat = 0.0, threshold = 0.0, pvalue = 0.0;
  int reject = 0;
  dhlcm_regime regime_used = DHLCM_REGIME_CHI_SQUARE_MAX;
  check(dhlcm_test_report_global(report.ptr, &stat, &threshold, &pvalue, &reject,
                                 &regime_used));

  json out;
  out["alpha"] = alpha;
  out["regime"] = regime_used == DHLCM_REGIME_GUMBEL ? "gumbel" : "chi_square_max";
  out["global_stat"] = stat;
  out["threshold"] = threshold;
  out["global_pvalue"] = pvalue;
  out["reject"] = reject != 0;
  out["tested"] = tested;
  out["feature_ids"] = ids;
  out["stats"] = stats;
  out["pvalues"] = pvalues;
  out["not_testable"] = skipped;
  out["bh_rejections"] = bh;
  write_file(prefix + ".report.json", out.dump(2) + "\n");

  json summary;
  summary["command"] = "test";
  summary["input"] = input;
  summary["alpha"] = alpha;
  summary["regime"] = out["regime"];
  summary["global_stat"] = stat;
  summary["threshold"] = threshold;
  summary["global_pvalue"] = pvalue;
  summary["reject"] = reject != 0;
  summary["tested"] = tested;
  summary["not_testable"] = excluded;
  summary["bh_rejections"] = bh_count;
  if (show_bh) summary["bh_features"] = bh;
  summary["report_file"] = prefix + ".report.json";
  print_summary(summary, "test results");
  return 0;
}

int cmd_simulate(const std::string& config_path, int64_t replicates, uint64_t seed,
                 int jobs, const std::string& out_path) {
  std::ifstream in(config_path);
  if (!in) throw CliError("io", "cannot open \"" + config_path + "\" for reading");
  std::stringstream buffer;
  buffer << in.rdbuf();

  const auto started = std::chrono::steady_clock::now();
  char* report_json = nullptr;
  check(dhlcm_run_experiment(buffer.str().c_str(), replicates, seed, jobs,
                             &report_json));
  std::unique_ptr<char, void (*)(char*)> guard(report_json, dhlcm_string_free);
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

  write_file(out_path, report_json);

  const json report = json::parse(report_json);
  json summary;
  summary["command"] = "simulate";
  summary["config"] = config_path;
  summary["scenario"] = report["scenario"];
  summary["replicates"] = report["replicates"];
  summary["failed"] = report["failed"];
  summary["seed"] = seed;
  summary["jobs"] = jobs;
  summary["aggregates"] = report["aggregates"];
  summary["report_file"] = out_path;
  summary["runtime_seconds"] = elapsed;  // console only, never in the report file
  print_summary(summary, "simulation results");
  return 0;
}

int cmd_diagnose(const std::string& theta_path) {
  const auto rows = read_table(theta_path);
  const int64_t j = static_cast<int64_t>(rows.size());
  const int64_t k = static_cast<int64_t>(rows.front().size());
  std::vector<double> theta;
  theta.reserve(static_cast<size_t>(j * k));
  for (const auto& row : rows)
    for (double v : row) theta.push_back(v);

  dhlcm_diagnostics d;
  check(dhlcm_diagnose(theta.data(), j, k, &d));

  json summary;
  summary["command"] = "diagnose";
  summary["input"] = theta_path;
  summary["j"] = j;
  summary["k"] = k;
  summary["delta"] = d.delta;
  summary["sigma_star"] = d.sigma_star;
  summary["kappa"] = d.kappa;
  summary["mu_theta"] = d.mu_theta;
  summary["theta_max"] = d.theta_max;
  print_summary(summary, "item-matrix diagnostics");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degree-heterogeneous latent class analysis"};
  app.require_subcommand(1);
  app.set_version_flag("--version", dhlcm_version());

  // cluster
  auto* cluster = app.add_subcommand("cluster", "Spectral clustering of a data matrix");
  std::string cluster_input, cluster_truth, cluster_prefix = "dhlcm";
  CommonFlags cluster_flags;
  cluster->add_option("input", cluster_input, "Matrix file (CSV or whitespace)")->required();
  add_cluster_flags(cluster, cluster_flags, true);
  add_family_flags(cluster, cluster_flags);
  cluster->add_option("--truth", cluster_truth, "True labels for accuracy metrics");
  cluster->add_option("--out-prefix", cluster_prefix, "Output file prefix");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Item-parameter estimation");
  std::string est_input, est_labels, est_degrees, est_prefix = "dhlcm";
  CommonFlags est_flags;
  estimate->add_option("input", est_input, "Matrix file")->required();
  add_cluster_flags(estimate, est_flags, false);
  add_family_flags(estimate, est_flags);
  estimate->add_option("--labels", est_labels, "Precomputed labels (skips clustering)");
  estimate->add_option("--degrees", est_degrees, "Known degrees (with --labels)");
  estimate->add_option("--out-prefix", est_prefix, "Output file prefix");

  // test
  auto* test = app.add_subcommand("test", "Global and multiple testing of item rows");
  std::string test_input, test_labels, test_degrees, test_prefix = "dhlcm";
  std::string test_regime = "auto";
  std::vector<int64_t> test_features;
  bool test_all = false, test_bh = false;
  double test_alpha = 0.05;
  CommonFlags test_flags;
  test->add_option("input", test_input, "Matrix file")->required();
  add_cluster_flags(test, test_flags, false);
  add_family_flags(test, test_flags);
  test->add_option("--labels", test_labels, "Precomputed labels (skips clustering)");
  test->add_option("--degrees", test_degrees, "Known degrees (with --labels)");
  test->add_option("--features", test_features, "1-based feature indices")->delimiter(',');
  test->add_flag("--all", test_all, "Test every feature");
  test->add_option("--alpha", test_alpha, "Significance level");
  test->add_option("--regime", test_regime, "Threshold calibration")
      ->check(CLI::IsMember({"auto", "chi_square_max", "gumbel"}));
  test->add_flag("--bh", test_bh, "List the BH rejection set in the summary");
  test->add_option("--out-prefix", test_prefix, "Output file prefix");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo experiment harness");
  std::string sim_config, sim_out = "experiment_report.json";
  int64_t sim_replicates = 0;
  uint64_t sim_seed = 0;
  int sim_jobs = 1;
  simulate->add_option("config", sim_config, "Experiment config (JSON)")->required();
  simulate->add_option("--replicates", sim_replicates, "Replicate count")->required();
  simulate->add_option("--seed", sim_seed, "Base seed");
  simulate->add_option("--jobs", sim_jobs, "Parallel replicate workers")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim_out, "Report file path");

  // diagnose
  auto* diagnose = app.add_subcommand("diagnose", "Separation diagnostics of an item matrix");
  std::string diag_input;
  diagnose->add_option("theta", diag_input, "Item matrix file (J x K)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ||
        e.get_name() == "CallForVersion")
      return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (cluster->parsed())
      return cmd_cluster(cluster_input, cluster_flags, cluster_truth, cluster_prefix);
    if (estimate->parsed())
      return cmd_estimate(est_input, est_flags, est_labels, est_degrees, est_prefix);
    if (test->parsed()) {
      if (!test_all && test_features.empty())
        throw CLI::ValidationError("--features", "give --features or --all");
      for (int64_t f : test_features)
        if (f < 1) throw CLI::ValidationError("--features", "feature indices are 1-based");
      if (!(test_alpha > 0.0 && test_alpha < 1.0))
        throw CLI::ValidationError("--alpha", "alpha must lie in (0,1)");
      return cmd_test(test_input, test_flags, test_labels, test_degrees, test_features,
                      test_all, test_alpha, test_regime, test_bh, test_prefix);
    }
    if (simulate->parsed()) {
      if (sim_replicates < 0)
        throw CLI::ValidationError("--replicates", "replicates must be >= 0");
      return cmd_simulate(sim_config, sim_replicates, sim_seed, sim_jobs, sim_out);
    }
    if (diagnose->parsed()) return cmd_diagnose(diag_input);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << json{{"error", {{"code", "flags"}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 2;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << json{{"error", {{"code", e.code}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump()
              << std::endl;
    return 1;
  }
  return 0;
}
