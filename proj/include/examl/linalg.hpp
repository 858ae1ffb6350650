#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "examl/errors.hpp"

namespace examl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline bool all_finite(const Eigen::Ref<const Matrix>& m) { return m.allFinite(); }

inline void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) throw InvalidArgument(std::string(what) + " contains non-finite values");
}

namespace detail {

inline void check_system(const Matrix& H, const Matrix& Y) {
  if (H.rows() < 1 || H.cols() < 1 || Y.cols() < 1)
    throw InvalidArgument("least-squares system must have at least one row, column and target");
  if (H.rows() != Y.rows())
    throw InvalidArgument("least-squares dimension mismatch: H has " + std::to_string(H.rows()) +
                          " rows, Y has " + std::to_string(Y.rows()));
  require_finite(H, "design matrix");
  require_finite(Y, "target matrix");
}

// Lower triangle of HᵀH (+ alpha on the diagonal). The upper triangle is left zero.
inline Matrix gram_lower(const Matrix& H, double alpha) {
  Matrix G = Matrix::Zero(H.cols(), H.cols());
  G.selfadjointView<Eigen::Lower>().rankUpdate(H.transpose());
  G.diagonal().array() += alpha;
  return G;
}

}  // namespace detail

/// Minimum-norm least-squares solution of H·B = Y through a thin SVD of H.
/// Singular values at or below max(n, m)·σ_max·ε are treated as zero.
inline Matrix pseudoinverse_solve(const Matrix& H, const Matrix& Y) {
  detail::check_system(H, Y);
  Eigen::BDCSVD<Matrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double cutoff = static_cast<double>(std::max(H.rows(), H.cols())) *
                        (s.size() > 0 ? s(0) : 0.0) * std::numeric_limits<double>::epsilon();
  Vector inv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) inv(i) = 1.0 / s(i);
  return svd.matrixV() * (inv.asDiagonal() * (svd.matrixU().transpose() * Y));
}

/// Tikhonov-regularized least squares: solves (HᵀH + αI)·B = HᵀY.
///
/// Tall or square H goes through a Cholesky factorization of the m×m normal
/// matrix; wide H, or a normal matrix that fails to factor, goes through the
/// SVD of H where B = V·diag(s / (s² + α))·Uᵀ·Y. alpha == 0 is the pseudoinverse.
inline Matrix ridge_solve(const Matrix& H, const Matrix& Y, double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha))
    throw InvalidArgument("ridge alpha must be a finite nonnegative number");
  if (alpha == 0.0) return pseudoinverse_solve(H, Y);
  detail::check_system(H, Y);

  if (H.cols() <= H.rows()) {
    Eigen::LLT<Matrix, Eigen::Lower> llt(detail::gram_lower(H, alpha));
    if (llt.info() == Eigen::Success) return llt.solve(H.transpose() * Y);
  }

  Eigen::BDCSVD<Matrix> svd(H, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const Vector shrink = (s.array() / (s.array().square() + alpha)).matrix();
  return svd.matrixV() * (shrink.asDiagonal() * (svd.matrixU().transpose() * Y));
}

/// Ridge solutions of one system for many alphas.
///
/// Factors HᵀH = Q·Λ·Qᵀ once; each solve is then Q·diag(1/(λ+α))·Qᵀ·HᵀY, an
/// O(m²k) operation. The result for a given alpha does not depend on which other
/// alphas are requested, so a single-alpha evaluation reproduces a batched one bit
/// for bit. Eigenvalues at or below max(n, m)·λ_max·ε are treated as zero.
class RidgePath {
 public:
  RidgePath(const Matrix& H, const Matrix& Y) : rows_(H.rows()) {
    detail::check_system(H, Y);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(detail::gram_lower(H, 0.0));
    if (eig.info() != Eigen::Success) throw DegenerateInput("eigendecomposition of HᵀH did not converge");
    basis_ = eig.eigenvectors();
    eigenvalues_ = eig.eigenvalues().cwiseMax(0.0);
    projected_ = basis_.transpose() * (H.transpose() * Y);
    cutoff_ = static_cast<double>(std::max(H.rows(), H.cols())) * eigenvalues_.maxCoeff() *
              std::numeric_limits<double>::epsilon();
  }

  Matrix solve(double alpha) const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw InvalidArgument("ridge alpha must be a finite nonnegative number");
    Vector inv(eigenvalues_.size());
    for (Eigen::Index i = 0; i < inv.size(); ++i) {
      const double d = eigenvalues_(i) + alpha;
      inv(i) = (alpha == 0.0 && eigenvalues_(i) <= cutoff_) ? 0.0 : 1.0 / d;
    }
    return basis_ * (inv.asDiagonal() * projected_);
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index neurons() const { return basis_.rows(); }

 private:
  Eigen::Index rows_;
  Matrix basis_;
  Vector eigenvalues_;
  Matrix projected_;
  double cutoff_ = 0.0;
};

}  // namespace examl
