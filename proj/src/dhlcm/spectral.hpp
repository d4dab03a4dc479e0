#pragma once

#include <vector>

#include "errors.hpp"
#include "types.hpp"

namespace dhlcm {

enum class SpectralMethod { HeteroPca, PlainSvd };

struct SpectralEmbedding {
  Matrix u;            // N x K, orthonormal columns
  Vector eigenvalues;  // length K, nonincreasing, Gram (RR^T) scale
  SpectralMethod method = SpectralMethod::HeteroPca;
  int iterations = 0;  // diagonal-reimputation iterations (HeteroPca only)
};

// Diagonal deletion H(M) and its complement D(M) = M - H(M).
Matrix hollow(const Matrix& m);
Matrix diag_part(const Matrix& m);

struct EigPair {
  Matrix vectors;  // N x K orthonormal
  Vector values;   // algebraically largest first
};

// K algebraically-largest eigenpairs of a symmetric matrix; the best rank-K
// approximation is vectors * diag(values) * vectors^T.
EigPair truncated_eig(const Matrix& m, int k);

// Iterative diagonal re-imputation of the Gram matrix R R^T: starting from
// its hollowed version, each step replaces the diagonal with the diagonal of
// the current best rank-K approximation. Off-diagonal entries never change.
// t0 = 0 returns the eigenvectors of H(R R^T) directly. When delta_log is
// given it receives ||M^{t+1} - M^t||_F per iteration.
SpectralEmbedding hetero_pca(const Matrix& r, int k, int t0,
                             std::vector<double>* delta_log = nullptr);

// Top-K left singular vectors of R via the N x N Gram matrix; eigenvalues are
// the squared singular values.
SpectralEmbedding plain_svd(const Matrix& r, int k);

// || U U^T - V V^T ||_F for orthonormal-column inputs of equal width.
double subspace_error(const Matrix& u, const Matrix& v);

}  // namespace dhlcm
