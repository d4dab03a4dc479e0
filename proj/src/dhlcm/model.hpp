#pragma once

#include <string>
#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace dhlcm {

// Discrete response family. Bernoulli is semantically Binomial(1) but kept
// distinct so the scale factor m never leaks into Bernoulli code paths.
struct ModelFamily {
  enum class Kind { Bernoulli, Binomial, Poisson };
  Kind kind = Kind::Bernoulli;
  int trials = 1;  // Binomial only, >= 1

  static ModelFamily bernoulli() { return {Kind::Bernoulli, 1}; }
  static ModelFamily binomial(int m);
  static ModelFamily poisson() { return {Kind::Poisson, 1}; }

  bool bounded() const { return kind != Kind::Poisson; }
  // Largest admissible entry; Poisson is unbounded.
  double max_value() const;
  std::string name() const;
};

struct ObservationMatrix {
  Matrix values;  // N x J nonnegative integers stored as doubles
  ModelFamily family;

  Index rows() const { return values.rows(); }
  Index cols() const { return values.cols(); }
};

// Throws DomainError (with the 1-based coordinates of the first violation in
// row-major order) unless every ObservationMatrix invariant holds.
void validate(const ObservationMatrix& obs);

struct GroundTruth {
  Labels labels;   // 0-based, every class in [0..k-1] occurs
  Vector degrees;  // positive, cluster-wise sum of squares = cluster size
  Matrix theta;    // J x K nonnegative
  int k = 0;
  long clamp_count = 0;  // generation cells where degree*theta exceeded 1
};

// Checks the GroundTruth invariants: label coverage, positive degrees, the
// identifiability rescaling at 1e-10 relative tolerance, and (bounded
// families) that mean parameters exceed 1 on exactly the clamped cells.
void validate(const GroundTruth& truth, const ModelFamily& family);

struct FittedModel {
  Labels labels_hat;
  Vector degrees_hat;
  Matrix theta_hat;   // J x K
  Matrix sigma2_hat;  // J x K, 0 on not-testable entries
  std::vector<Index> cluster_sizes;
  ModelFamily family;
  bool degenerate = false;  // some estimated cluster empty
};

Matrix labels_to_onehot(const Labels& labels, int k);
Labels onehot_to_labels(const Matrix& z);
std::vector<Index> cluster_sizes_of(const Labels& labels, int k);

}  // namespace dhlcm
