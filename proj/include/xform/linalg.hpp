#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

#include "xform/types.hpp"

namespace xform {

/// Full SVD of a square matrix M = Q * diag(sigma) * R^T.
/// Q and R are orthonormal, sigma is nonnegative and descending.
struct SvdResult {
  Matrix q;
  Vector sigma;
  Matrix r;
};

inline SvdResult full_svd(const Matrix& m) {
  require_finite(m);
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return SvdResult{svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

namespace detail {

// Relative floor below which a singular value counts as zero.
inline constexpr double kSingularRel = 1e-14;

inline void require_spd_input(const Matrix& s) {
  require_finite(s);
  require(s.rows() == s.cols(), "dimension mismatch");
  require((s - s.transpose()).norm() <= 1e-12 * std::max(1.0, s.norm()), "not symmetric");
}

inline double condition_from_sigma(const Vector& sigma) {
  const double largest = sigma(0);
  const double smallest = sigma(sigma.size() - 1);
  if (largest == 0.0 || smallest < kSingularRel * largest)
    return std::numeric_limits<double>::infinity();
  return largest / smallest;
}

}  // namespace detail

/// S^(-1/2) for symmetric positive-definite S, via symmetric eigendecomposition.
/// The result A is symmetric and satisfies A * S * A^T = I.
inline Matrix pd_inverse_sqrt(const Matrix& s) {
  detail::require_spd_input(s);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s);
  const Vector& values = eig.eigenvalues();
  const double floor = 1e-14 * s.trace() / static_cast<double>(s.rows());
  if (values(0) <= floor) throw std::invalid_argument("not positive definite");
  const Vector inv_sqrt = values.array().sqrt().inverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() * eig.eigenvectors().transpose();
}

/// Lower-triangular L with L * L^T = S, diagonal strictly positive.
inline Matrix cholesky_factor(const Matrix& s) {
  detail::require_spd_input(s);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(s, Eigen::EigenvaluesOnly);
  const double floor = 1e-14 * s.trace() / static_cast<double>(s.rows());
  if (eig.eigenvalues()(0) <= floor) throw std::invalid_argument("not positive definite");
  Eigen::LLT<Matrix> llt(s);
  return llt.matrixL();
}

/// sigma_max / sigma_min; +inf when the matrix is numerically singular.
inline double condition_number(const Matrix& w) {
  const SvdResult svd = full_svd(w);
  return detail::condition_from_sigma(svd.sigma);
}

}  // namespace xform
