#include "model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace dhlcm {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Domain: return "domain";
    case ErrorCode::Shape: return "shape";
    case ErrorCode::Convergence: return "convergence";
    case ErrorCode::DegenerateRow: return "degenerate_row";
    case ErrorCode::EmptyCluster: return "empty_cluster";
    case ErrorCode::RankDeficient: return "rank_deficient";
    case ErrorCode::NotTestable: return "not_testable";
    case ErrorCode::NoTestableFeatures: return "no_testable_features";
    case ErrorCode::Family: return "family";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
    case ErrorCode::InvalidArgument: return "invalid_argument";
  }
  return "unknown";
}

ModelFamily ModelFamily::binomial(int m) {
  if (m < 1) throw InvalidArgumentError("binomial trials must be >= 1");
  return {Kind::Binomial, m};
}

double ModelFamily::max_value() const {
  switch (kind) {
    case Kind::Bernoulli: return 1.0;
    case Kind::Binomial: return static_cast<double>(trials);
    case Kind::Poisson: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

std::string ModelFamily::name() const {
  switch (kind) {
    case Kind::Bernoulli: return "bernoulli";
    case Kind::Binomial: return "binomial";
    case Kind::Poisson: return "poisson";
  }
  return "";
}

void validate(const ObservationMatrix& obs) {
  const Index n = obs.rows();
  const Index j = obs.cols();
  if (n < 2 || j < 2) {
    std::ostringstream msg;
    msg << "observation matrix must be at least 2x2, got " << n << "x" << j;
    throw DomainError(msg.str());
  }
  if (obs.family.kind == ModelFamily::Kind::Binomial && obs.family.trials < 1)
    throw DomainError("binomial trials must be >= 1");
  const double hi = obs.family.max_value();
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < j; ++c) {
      const double v = obs.values(r, c);
      const bool integral = std::isfinite(v) && std::floor(v) == v;
      if (!integral || v < 0.0 || v > hi) {
        std::ostringstream msg;
        msg << "invalid " << obs.family.name() << " entry " << v << " at ("
            << (r + 1) << "," << (c + 1) << ")";
        throw DomainError(msg.str(), r + 1, c + 1);
      }
    }
  }
}

void validate(const GroundTruth& truth, const ModelFamily& family) {
  const Index n = static_cast<Index>(truth.labels.size());
  if (truth.k < 1) throw DomainError("ground truth needs k >= 1");
  if (truth.degrees.size() != n)
    throw ShapeError("labels/degrees length mismatch");
  if (truth.theta.cols() != truth.k)
    throw ShapeError("theta column count != k");

  std::vector<Index> sizes(truth.k, 0);
  std::vector<double> sumsq(truth.k, 0.0);
  for (Index i = 0; i < n; ++i) {
    const int s = truth.labels[static_cast<size_t>(i)];
    if (s < 0 || s >= truth.k) throw DomainError("label out of range");
    if (!(truth.degrees(i) > 0.0)) throw DomainError("degrees must be positive");
    ++sizes[s];
    sumsq[s] += truth.degrees(i) * truth.degrees(i);
  }
  for (int c = 0; c < truth.k; ++c) {
    if (sizes[c] == 0) {
      std::ostringstream msg;
      msg << "class " << (c + 1) << " has no members";
      throw DomainError(msg.str());
    }
    // Identifiability rescaling: sum of squared degrees equals cluster size.
    const double target = static_cast<double>(sizes[c]);
    if (std::abs(sumsq[c] - target) > 1e-10 * target) {
      std::ostringstream msg;
      msg << "degree rescaling violated in class " << (c + 1) << ": sum sq "
          << sumsq[c] << " vs size " << target;
      throw DomainError(msg.str());
    }
  }
  if ((truth.theta.array() < 0.0).any())
    throw DomainError("theta must be nonnegative");

  if (family.bounded()) {
    // Mean parameters above 1 are only admissible on the cells the generator
    // clamped (realized cells k = s_i).
    long over = 0;
    for (Index i = 0; i < n; ++i) {
      const int s = truth.labels[static_cast<size_t>(i)];
      for (Index jj = 0; jj < truth.theta.rows(); ++jj)
        if (truth.degrees(i) * truth.theta(jj, s) > 1.0) ++over;
    }
    if (over != truth.clamp_count) {
      std::ostringstream msg;
      msg << "mean parameter exceeds 1 on " << over
          << " cells but clamp_count records " << truth.clamp_count;
      throw DomainError(msg.str());
    }
  }
}

Matrix labels_to_onehot(const Labels& labels, int k) {
  Matrix z = Matrix::Zero(static_cast<Index>(labels.size()), k);
  for (size_t i = 0; i < labels.size(); ++i) {
    const int s = labels[i];
    if (s < 0 || s >= k) throw DomainError("label out of range for one-hot");
    z(static_cast<Index>(i), s) = 1.0;
  }
  return z;
}

Labels onehot_to_labels(const Matrix& z) {
  Labels labels(static_cast<size_t>(z.rows()));
  for (Index i = 0; i < z.rows(); ++i) {
    int hit = -1;
    for (Index c = 0; c < z.cols(); ++c) {
      if (z(i, c) == 1.0) {
        if (hit >= 0) throw DomainError("one-hot row with multiple ones");
        hit = static_cast<int>(c);
      } else if (z(i, c) != 0.0) {
        throw DomainError("one-hot entries must be 0 or 1");
      }
    }
    if (hit < 0) throw DomainError("one-hot row with no one");
    labels[static_cast<size_t>(i)] = hit;
  }
  return labels;
}

std::vector<Index> cluster_sizes_of(const Labels& labels, int k) {
  std::vector<Index> sizes(static_cast<size_t>(k), 0);
  for (int s : labels) {
    if (s < 0 || s >= k) throw DomainError("label out of range");
    ++sizes[static_cast<size_t>(s)];
  }
  return sizes;
}

}  // namespace dhlcm
