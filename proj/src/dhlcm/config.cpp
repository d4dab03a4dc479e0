#include "config.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "inference.hpp"

namespace dhlcm {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      std::ostringstream msg;
      msg << "unknown key \"" << it.key() << "\" in " << where;
      throw ConfigError(msg.str());
    }
  }
}

double get_number(const json& obj, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) throw ConfigError(std::string(key) + " must be a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const char* key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw ConfigError(std::string(key) + " must be an integer");
  return obj[key].get<int>();
}

std::string get_string(const json& obj, const char* key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string()) throw ConfigError(std::string(key) + " must be a string");
  return obj[key].get<std::string>();
}

Scenario scenario_from_name(const std::string& name) {
  if (name == "type_i_power") return Scenario::TypeIPower;
  if (name == "fdr") return Scenario::Fdr;
  if (name == "cluster_compare") return Scenario::ClusterCompare;
  if (name == "svd_vs_hetero") return Scenario::SvdVsHetero;
  throw ConfigError("unknown scenario \"" + name + "\"");
}

Matrix matrix_from_json(const json& rows, const char* where) {
  if (!rows.is_array() || rows.empty())
    throw ConfigError(std::string(where) + " must be a nonempty array of rows");
  const size_t cols = rows[0].is_array() ? rows[0].size() : 0;
  if (cols == 0) throw ConfigError(std::string(where) + " rows must be nonempty arrays");
  Matrix m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (size_t r = 0; r < rows.size(); ++r) {
    if (!rows[r].is_array() || rows[r].size() != cols)
      throw ConfigError(std::string(where) + " rows must share one length");
    for (size_t c = 0; c < cols; ++c) {
      if (!rows[r][c].is_number())
        throw ConfigError(std::string(where) + " entries must be numbers");
      m(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

DegreeLaw degree_law_from_json(const json& obj) {
  require_keys(obj, {"type", "lo", "hi"}, "degree_law");
  DegreeLaw law;
  const std::string type = get_string(obj, "type", "uniform");
  if (type == "uniform") {
    law.kind = DegreeLaw::Kind::Uniform;
    law.lo = get_number(obj, "lo", law.lo);
    law.hi = get_number(obj, "hi", law.hi);
  } else if (type == "constant") {
    law.kind = DegreeLaw::Kind::Constant;
  } else {
    throw ConfigError("unknown degree law \"" + type + "\"");
  }
  return law;
}

ThetaLaw theta_law_from_json(const json& obj) {
  require_keys(obj, {"type", "scale", "a", "b", "shape", "rate", "values"},
               "theta_law");
  ThetaLaw law;
  const std::string type = get_string(obj, "type", "scaled_beta");
  if (type == "scaled_beta") {
    law.kind = ThetaLaw::Kind::ScaledBeta;
    law.scale = get_number(obj, "scale", law.scale);
    law.a = get_number(obj, "a", law.a);
    law.b = get_number(obj, "b", law.b);
  } else if (type == "gamma") {
    law.kind = ThetaLaw::Kind::Gamma;
    law.shape = get_number(obj, "shape", law.shape);
    law.rate = get_number(obj, "rate", law.rate);
  } else if (type == "explicit") {
    law.kind = ThetaLaw::Kind::Explicit;
    if (!obj.contains("values")) throw ConfigError("explicit theta law needs values");
    law.values = matrix_from_json(obj["values"], "theta_law.values");
  } else if (type == "blocks") {
    law.kind = ThetaLaw::Kind::Blocks;
    if (!obj.contains("values")) throw ConfigError("block theta law needs values");
    law.values = matrix_from_json(obj["values"], "theta_law.values");
  } else {
    throw ConfigError("unknown theta law \"" + type + "\"");
  }
  return law;
}

json theta_law_to_json(const ThetaLaw& law) {
  json obj;
  switch (law.kind) {
    case ThetaLaw::Kind::ScaledBeta:
      obj["type"] = "scaled_beta";
      obj["scale"] = law.scale;
      obj["a"] = law.a;
      obj["b"] = law.b;
      break;
    case ThetaLaw::Kind::Gamma:
      obj["type"] = "gamma";
      obj["shape"] = law.shape;
      obj["rate"] = law.rate;
      break;
    case ThetaLaw::Kind::Explicit:
      obj["type"] = "explicit";
      obj["values"] = matrix_to_json(law.values);
      break;
    case ThetaLaw::Kind::Blocks:
      obj["type"] = "blocks";
      obj["values"] = matrix_to_json(law.values);
      break;
  }
  return obj;
}

// Scenario defaults: the null row is constant 0.5, the alternative row is
// (0.1, 0.3, 0.6) for K = 3 and 0.06*(1..10) for K = 10.
void apply_scenario_defaults(ExperimentConfig& cfg) {
  GeneratorConfig& gen = cfg.generator;
  if (cfg.scenario == Scenario::TypeIPower) {
    auto has_override = [&](int row) {
      return std::any_of(gen.theta_overrides.begin(), gen.theta_overrides.end(),
                         [&](const auto& p) { return p.first == row; });
    };
    if (!has_override(0))
      gen.theta_overrides.emplace_back(0, Vector::Constant(gen.k, 0.5));
    if (!has_override(1)) {
      Vector alt(gen.k);
      if (gen.k == 3) {
        alt << 0.1, 0.3, 0.6;
      } else if (gen.k == 10) {
        for (int c = 0; c < 10; ++c) alt(c) = 0.06 * (c + 1);
      } else {
        throw ConfigError(
            "type_i_power has built-in alternative rows for K=3 and K=10 only; "
            "supply a theta override for row 2");
      }
      gen.theta_overrides.emplace_back(1, alt);
    }
    std::sort(gen.theta_overrides.begin(), gen.theta_overrides.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
  } else if (cfg.scenario == Scenario::Fdr) {
    if (gen.equal_null_rows == 0) gen.equal_null_rows = 50;
  } else if (cfg.scenario == Scenario::SvdVsHetero) {
    if (gen.theta_law.kind == ThetaLaw::Kind::ScaledBeta &&
        gen.theta_law.values.size() == 0) {
      // two equal row-blocks per class, the classic hetero-noise layout
      if (gen.k != 2)
        throw ConfigError("svd_vs_hetero default item matrix needs K = 2");
      ThetaLaw law;
      law.kind = ThetaLaw::Kind::Blocks;
      law.values.resize(2, 2);
      law.values << 0.3, 0.1, 0.5, 0.06;
      gen.theta_law = law;
    }
  }
}

}  // namespace

ModelFamily family_from_name(const std::string& name, int trials) {
  if (name == "bernoulli") return ModelFamily::bernoulli();
  if (name == "binomial") return ModelFamily::binomial(trials);
  if (name == "poisson") return ModelFamily::poisson();
  throw ConfigError("unknown family \"" + name + "\"");
}

SpectralMethod method_from_name(const std::string& name) {
  if (name == "heteropca") return SpectralMethod::HeteroPca;
  if (name == "svd") return SpectralMethod::PlainSvd;
  throw ConfigError("unknown spectral method \"" + name + "\"");
}

Normalization normalization_from_name(const std::string& name) {
  if (name == "l2") return Normalization::L2;
  if (name == "score") return Normalization::Score;
  if (name == "none") return Normalization::None;
  throw ConfigError("unknown normalization \"" + name + "\"");
}

TestRegime regime_from_name(const std::string& name) {
  if (name == "auto") return TestRegime::Auto;
  if (name == "chi_square_max") return TestRegime::ChiSquareMax;
  if (name == "gumbel") return TestRegime::Gumbel;
  throw ConfigError("unknown test regime \"" + name + "\"");
}

ExperimentConfig experiment_config_from_json(const std::string& text) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw ConfigError("config must be a JSON object");
  require_keys(obj,
               {"scenario", "n", "j", "k", "family", "trials", "degree_law",
                "theta_law", "theta_overrides", "null_rows", "null_lo", "null_hi",
                "alpha", "t0", "method", "normalization", "restarts",
                "kmeans_max_iter"},
               "config");

  ExperimentConfig cfg;
  cfg.scenario = scenario_from_name(get_string(obj, "scenario", "type_i_power"));

  GeneratorConfig& gen = cfg.generator;
  gen.n = get_int(obj, "n", 0);
  gen.j = get_int(obj, "j", 0);
  gen.k = get_int(obj, "k", 0);
  gen.family = family_from_name(get_string(obj, "family", "bernoulli"),
                                get_int(obj, "trials", 1));
  if (obj.contains("degree_law")) gen.degree_law = degree_law_from_json(obj["degree_law"]);
  if (obj.contains("theta_law")) {
    gen.theta_law = theta_law_from_json(obj["theta_law"]);
  } else if (gen.family.kind == ModelFamily::Kind::Poisson) {
    gen.theta_law.kind = ThetaLaw::Kind::Gamma;
  }
  if (obj.contains("theta_overrides")) {
    if (!obj["theta_overrides"].is_array())
      throw ConfigError("theta_overrides must be an array");
    for (const auto& entry : obj["theta_overrides"]) {
      require_keys(entry, {"row", "values"}, "theta_overrides entry");
      const int row = get_int(entry, "row", 0);  // 1-based externally
      if (row < 1) throw ConfigError("theta override rows are 1-based");
      if (!entry.contains("values") || !entry["values"].is_array())
        throw ConfigError("theta override needs a values array");
      Vector vals(static_cast<Index>(entry["values"].size()));
      for (size_t c = 0; c < entry["values"].size(); ++c) {
        if (!entry["values"][c].is_number())
          throw ConfigError("theta override values must be numbers");
        vals(static_cast<Index>(c)) = entry["values"][c].get<double>();
      }
      gen.theta_overrides.emplace_back(row - 1, vals);
    }
  }
  gen.equal_null_rows = get_int(obj, "null_rows", 0);
  gen.equal_null_lo = get_number(obj, "null_lo", gen.equal_null_lo);
  gen.equal_null_hi = get_number(obj, "null_hi", gen.equal_null_hi);

  cfg.alpha = get_number(obj, "alpha", cfg.alpha);
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
    throw ConfigError("alpha must lie in (0,1)");
  cfg.t0 = get_int(obj, "t0", cfg.t0);
  if (cfg.t0 < 0) throw ConfigError("t0 must be >= 0");
  cfg.method = method_from_name(get_string(obj, "method", "heteropca"));
  cfg.normalization = normalization_from_name(get_string(obj, "normalization", "l2"));
  cfg.restarts = get_int(obj, "restarts", cfg.restarts);
  if (cfg.restarts < 1) throw ConfigError("restarts must be >= 1");
  cfg.kmeans_max_iter = get_int(obj, "kmeans_max_iter", cfg.kmeans_max_iter);
  if (cfg.kmeans_max_iter < 1) throw ConfigError("kmeans_max_iter must be >= 1");

  apply_scenario_defaults(cfg);
  return cfg;
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) {
  const GeneratorConfig& gen = cfg.generator;
  json obj;
  obj["scenario"] = scenario_name(cfg.scenario);
  obj["n"] = gen.n;
  obj["j"] = gen.j;
  obj["k"] = gen.k;
  obj["family"] = gen.family.name();
  if (gen.family.kind == ModelFamily::Kind::Binomial) obj["trials"] = gen.family.trials;

  json dl;
  if (gen.degree_law.kind == DegreeLaw::Kind::Uniform) {
    dl["type"] = "uniform";
    dl["lo"] = gen.degree_law.lo;
    dl["hi"] = gen.degree_law.hi;
  } else {
    dl["type"] = "constant";
  }
  obj["degree_law"] = std::move(dl);
  obj["theta_law"] = theta_law_to_json(gen.theta_law);

  if (!gen.theta_overrides.empty()) {
    json arr = json::array();
    for (const auto& [row, vals] : gen.theta_overrides) {
      json entry;
      entry["row"] = row + 1;
      json values = json::array();
      for (Index c = 0; c < vals.size(); ++c) values.push_back(vals(c));
      entry["values"] = std::move(values);
      arr.push_back(std::move(entry));
    }
    obj["theta_overrides"] = std::move(arr);
  }
  if (gen.equal_null_rows > 0) {
    obj["null_rows"] = gen.equal_null_rows;
    obj["null_lo"] = gen.equal_null_lo;
    obj["null_hi"] = gen.equal_null_hi;
  }

  obj["alpha"] = cfg.alpha;
  obj["t0"] = cfg.t0;
  obj["method"] = cfg.method == SpectralMethod::HeteroPca ? "heteropca" : "svd";
  obj["normalization"] = cfg.normalization == Normalization::L2
                             ? "l2"
                             : (cfg.normalization == Normalization::Score ? "score" : "none");
  obj["restarts"] = cfg.restarts;
  obj["kmeans_max_iter"] = cfg.kmeans_max_iter;
  return obj.dump();
}

}  // namespace dhlcm
