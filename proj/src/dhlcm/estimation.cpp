#include "estimation.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <limits>
#include <sstream>

namespace dhlcm {

namespace {

std::vector<Index> sizes_or_throw(const Labels& labels, int k) {
  auto sizes = cluster_sizes_of(labels, k);
  for (int c = 0; c < k; ++c)
    if (sizes[static_cast<size_t>(c)] == 0) {
      std::ostringstream msg;
      msg << "cluster " << (c + 1) << " is empty";
      throw EmptyClusterError(msg.str());
    }
  return sizes;
}

}  // namespace

Vector estimate_degrees(const SpectralEmbedding& embedding,
                        const ClusterAssignment& assignment) {
  const Index n = embedding.u.rows();
  if (static_cast<Index>(assignment.labels.size()) != n)
    throw ShapeError("embedding and assignment disagree on N");
  const int k = static_cast<int>(assignment.centers.rows());
  const auto sizes = sizes_or_throw(assignment.labels, k);

  Vector degrees(n);
  for (Index i = 0; i < n; ++i) {
    const double norm = embedding.u.row(i).norm();
    if (norm < 1e-12) {
      std::ostringstream msg;
      msg << "embedding row " << (i + 1) << " has norm " << norm
          << "; degree estimate would be zero";
      throw DegenerateRowError(msg.str(), i + 1);
    }
    const int c = assignment.labels[static_cast<size_t>(i)];
    degrees(i) = std::sqrt(static_cast<double>(sizes[static_cast<size_t>(c)])) * norm;
  }
  return degrees;
}

Matrix estimate_theta(const ObservationMatrix& obs, const Labels& labels, int k,
                      const Vector& degrees_hat) {
  const Index n = obs.rows();
  const Index j = obs.cols();
  if (static_cast<Index>(labels.size()) != n || degrees_hat.size() != n)
    throw ShapeError("labels/degrees length must match the subject count");
  for (Index i = 0; i < n; ++i)
    if (!(degrees_hat(i) > 0.0))
      throw DomainError("degree estimates must be positive");
  const auto sizes = sizes_or_throw(labels, k);

  Matrix theta = Matrix::Zero(j, k);
  for (Index i = 0; i < n; ++i) {
    const int c = labels[static_cast<size_t>(i)];
    theta.col(c) += obs.values.row(i).transpose() / degrees_hat(i);
  }
  double scale = 1.0;
  if (obs.family.kind == ModelFamily::Kind::Binomial)
    scale = static_cast<double>(obs.family.trials);
  for (int c = 0; c < k; ++c)
    theta.col(c) /= static_cast<double>(sizes[static_cast<size_t>(c)]) * scale;
  return theta;
}

VarianceEstimate estimate_variances(const Matrix& theta_hat, const Labels& labels,
                                    int k, const Vector& degrees_hat,
                                    const ModelFamily& family) {
  const Index j = theta_hat.rows();
  if (theta_hat.cols() != k) throw ShapeError("theta_hat column count != k");
  const Index n = degrees_hat.size();
  if (static_cast<Index>(labels.size()) != n)
    throw ShapeError("labels/degrees length mismatch");
  const auto sizes = sizes_or_throw(labels, k);

  // Per-cluster degree summaries reused across features.
  Vector inv_degree_sum = Vector::Zero(k);  // sum of 1/w
  Vector max_degree = Vector::Zero(k);
  for (Index i = 0; i < n; ++i) {
    if (!(degrees_hat(i) > 0.0))
      throw DomainError("degree estimates must be positive");
    const int c = labels[static_cast<size_t>(i)];
    inv_degree_sum(c) += 1.0 / degrees_hat(i);
    max_degree(c) = std::max(max_degree(c), degrees_hat(i));
  }

  VarianceEstimate out;
  out.sigma2 = Matrix::Zero(j, k);

  const bool poisson = family.kind == ModelFamily::Kind::Poisson;
  const double m = family.kind == ModelFamily::Kind::Binomial
                       ? static_cast<double>(family.trials)
                       : 1.0;

  for (Index f = 0; f < j; ++f) {
    for (int c = 0; c < k; ++c) {
      const double th = theta_hat(f, c);
      if (!(th > 0.0)) {
        out.sigma2(f, c) = 0.0;
        out.not_testable.emplace_back(static_cast<int>(f), c);
        continue;
      }
      const double csize = static_cast<double>(sizes[static_cast<size_t>(c)]);
      double sum;
      if (poisson) {
        sum = inv_degree_sum(c);
      } else if (max_degree(c) * th <= 1.0) {
        // no negative summands: sum (1 - w th)/w = sum 1/w - th |C|
        sum = inv_degree_sum(c) - th * csize;
      } else {
        sum = 0.0;
        for (Index i = 0; i < n; ++i) {
          if (labels[static_cast<size_t>(i)] != c) continue;
          const double s = (1.0 - degrees_hat(i) * th) / degrees_hat(i);
          if (s < 0.0) {
            ++out.clamped_summands;
            continue;
          }
          sum += s;
        }
      }
      out.sigma2(f, c) = std::max(0.0, th * sum / (m * csize * csize));
    }
  }
  return out;
}

Diagnostics diagnostics(const Matrix& theta) {
  const Index j = theta.rows();
  const Index k = theta.cols();
  if (k < 2) throw InvalidArgumentError("diagnostics requires K >= 2");
  if (theta.norm() == 0.0)
    throw InvalidArgumentError("diagnostics requires a nonzero matrix");

  Diagnostics d;
  d.delta = std::numeric_limits<double>::infinity();
  for (Index a = 0; a < k; ++a)
    for (Index b = a + 1; b < k; ++b)
      d.delta = std::min(d.delta, (theta.col(a) - theta.col(b)).norm());

  Eigen::JacobiSVD<Matrix> svd(theta);
  const double sigma1 = svd.singularValues()(0);
  d.sigma_star = svd.singularValues()(k - 1);
  d.theta_max = theta.maxCoeff();
  d.mu_theta = static_cast<double>(j) *
               theta.rowwise().squaredNorm().maxCoeff() / theta.squaredNorm();
  if (d.sigma_star < 1e-12 * sigma1) {
    std::ostringstream msg;
    msg << "theta is rank deficient: sigma_" << k << " = " << d.sigma_star
        << " vs sigma_1 = " << sigma1 << " (condition number infinite)";
    throw RankDeficientError(msg.str());
  }
  d.kappa = sigma1 / d.sigma_star;
  return d;
}

}  // namespace dhlcm
