#pragma once

#include <utility>
#include <vector>

#include "clustering.hpp"
#include "model.hpp"
#include "spectral.hpp"
#include "types.hpp"

namespace dhlcm {

// Degree estimates sqrt(|C_{s_i}|) * ||U_{i,:}|| from the raw (unnormalized)
// embedding. Throws DegenerateRowError when a row norm falls below 1e-12.
Vector estimate_degrees(const SpectralEmbedding& embedding,
                        const ClusterAssignment& assignment);

// Item parameters: within-cluster means of degree-corrected responses,
// additionally divided by the trial count for Binomial data.
Matrix estimate_theta(const ObservationMatrix& obs, const Labels& labels, int k,
                      const Vector& degrees_hat);

struct VarianceEstimate {
  Matrix sigma2;  // J x K, 0 where not testable
  std::vector<std::pair<int, int>> not_testable;  // (j,k) with theta_hat <= 0
  long clamped_summands = 0;  // bounded families: 1 - w*theta < 0 summands
};

VarianceEstimate estimate_variances(const Matrix& theta_hat, const Labels& labels,
                                    int k, const Vector& degrees_hat,
                                    const ModelFamily& family);

struct Diagnostics {
  double delta = 0.0;       // min pairwise column distance of theta
  double sigma_star = 0.0;  // K-th singular value
  double kappa = 0.0;       // spectral norm / sigma_star
  double mu_theta = 0.0;    // J * ||theta||_{2,inf}^2 / ||theta||_F^2
  double theta_max = 0.0;
};

// Population separation/conditioning summaries of a J x K item matrix.
// Throws RankDeficientError when sigma_K < 1e-12 * sigma_1.
Diagnostics diagnostics(const Matrix& theta);

}  // namespace dhlcm
