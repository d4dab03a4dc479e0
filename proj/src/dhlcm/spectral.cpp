#include "spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace dhlcm {

namespace {

// Symmetric N x N Gram matrix R R^T (explicitly symmetrized so the eigen
// solver never sees last-ulp asymmetry from independent dot products).
Matrix gram(const Matrix& r) {
  const Index n = r.rows();
  Matrix g = Matrix::Zero(n, n);
  g.selfadjointView<Eigen::Lower>().rankUpdate(r);
  g.triangularView<Eigen::StrictlyUpper>() = g.transpose();
  return g;
}

void check_rank(int k, Index n, Index j, const char* who) {
  if (k < 1 || k > std::min(n, j)) {
    std::ostringstream msg;
    msg << who << ": rank " << k << " outside [1, min(" << n << "," << j << ")]";
    throw InvalidArgumentError(msg.str());
  }
}

}  // namespace

Matrix hollow(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("hollow requires a square matrix");
  Matrix h = m;
  h.diagonal().setZero();
  return h;
}

Matrix diag_part(const Matrix& m) {
  if (m.rows() != m.cols()) throw ShapeError("diag_part requires a square matrix");
  Matrix d = Matrix::Zero(m.rows(), m.cols());
  d.diagonal() = m.diagonal();
  return d;
}

EigPair truncated_eig(const Matrix& m, int k) {
  const Index n = m.rows();
  if (n != m.cols()) throw ShapeError("truncated_eig requires a square matrix");
  if (k < 1 || k > n) throw InvalidArgumentError("truncated_eig: rank outside [1, N]");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale)
    throw ShapeError("truncated_eig requires a symmetric matrix");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("symmetric eigendecomposition failed");

  // Eigen returns ascending order; take the last K, largest first.
  EigPair out;
  out.vectors.resize(n, k);
  out.values.resize(k);
  for (int c = 0; c < k; ++c) {
    out.vectors.col(c) = solver.eigenvectors().col(n - 1 - c);
    out.values(c) = solver.eigenvalues()(n - 1 - c);
  }
  return out;
}

SpectralEmbedding hetero_pca(const Matrix& r, int k, int t0,
                             std::vector<double>* delta_log) {
  check_rank(k, r.rows(), r.cols(), "hetero_pca");
  if (t0 < 0) throw InvalidArgumentError("hetero_pca: iteration count must be >= 0");

  Matrix m = hollow(gram(r));
  if (delta_log) delta_log->clear();
  for (int t = 0; t < t0; ++t) {
    const EigPair top = truncated_eig(m, k);
    // diag(V diag(w) V^T) without forming the rank-K matrix
    const Vector new_diag = top.vectors.array().square().matrix() * top.values;
    if (delta_log) delta_log->push_back((new_diag - m.diagonal()).norm());
    m.diagonal() = new_diag;  // H(M^t) + D(Mbar^t): off-diagonals untouched
  }

  const EigPair top = truncated_eig(m, k);
  SpectralEmbedding emb;
  emb.u = top.vectors;
  emb.eigenvalues = top.values;
  emb.method = SpectralMethod::HeteroPca;
  emb.iterations = t0;
  return emb;
}

SpectralEmbedding plain_svd(const Matrix& r, int k) {
  check_rank(k, r.rows(), r.cols(), "plain_svd");
  const EigPair top = truncated_eig(gram(r), k);
  SpectralEmbedding emb;
  emb.u = top.vectors;
  emb.eigenvalues = top.values.cwiseMax(0.0);  // Gram is PSD up to roundoff
  emb.method = SpectralMethod::PlainSvd;
  emb.iterations = 0;
  return emb;
}

double subspace_error(const Matrix& u, const Matrix& v) {
  if (u.rows() != v.rows() || u.cols() != v.cols())
    throw ShapeError("subspace_error requires matching shapes");
  // ||UU^T - VV^T||_F^2 = 2k - 2 ||U^T V||_F^2 for orthonormal columns.
  const double cross = (u.transpose() * v).squaredNorm();
  const double sq = 2.0 * static_cast<double>(u.cols()) - 2.0 * cross;
  return std::sqrt(std::max(0.0, sq));
}

}  // namespace dhlcm
