#pragma once

#include <cmath>

#include "xform/linalg.hpp"
#include "xform/types.hpp"

namespace xform {

enum class LFactor {
  SymmetricSqrt,  // L = (Y Y^T + lambda xi I)^(1/2), symmetric
  Cholesky,       // L = lower-triangular Cholesky factor
};

/// Precomputed state shared by every transform update on a fixed training set:
/// L^-1 with L L^T = Y Y^T + lambda xi I, plus the weights themselves.
/// Immutable after construction; safe to share across concurrent learners.
struct UpdateContext {
  Matrix l_inv;
  double lambda = 0.0;
  double xi = 0.0;
};

inline UpdateContext make_update_context(const Matrix& y, double lambda, double xi,
                                         LFactor factor = LFactor::SymmetricSqrt) {
  require_finite(y);
  require(lambda > 0.0, "invalid lambda");
  require(xi > 0.0, "invalid xi");
  const Index n = y.rows();
  const Matrix gram = y * y.transpose() + lambda * xi * Matrix::Identity(n, n);
  if (factor == LFactor::SymmetricSqrt) {
    return UpdateContext{pd_inverse_sqrt(gram), lambda, xi};
  }
  const Matrix l = cholesky_factor(gram);
  const Matrix l_inv =
      l.triangularView<Eigen::Lower>().solve(Matrix::Identity(n, n));
  return UpdateContext{l_inv, lambda, xi};
}

/// Maps a singular value of L^-1 Y X^T to the corresponding singular value of
/// the optimal W L: gamma = (sigma + sqrt(sigma^2 + 2 lambda)) / 2.
inline double singular_value_map(double sigma, double lambda) {
  require(sigma >= 0.0, "negative sigma");
  require(lambda > 0.0, "invalid lambda");
  return 0.5 * (sigma + std::sqrt(sigma * sigma + 2.0 * lambda));
}

/// Closed-form global minimizer of the transform-update subproblem
///   min_W ||W Y - X||_F^2 + lambda xi ||W||_F^2 - lambda log|det W|.
/// With Q Sigma R^T the full SVD of L^-1 Y X^T, the minimizer is
/// R * diag(gamma) * Q^T * L^-1. Nonsingular for every lambda > 0 because the
/// singular value map is strictly positive. When L^-1 Y X^T is singular the
/// minimizer is not unique; the one induced by the computed SVD is returned.
inline Matrix update_transform(const Matrix& y, const Matrix& x, const UpdateContext& ctx) {
  require(y.rows() == x.rows() && y.cols() == x.cols(), "dimension mismatch");
  require(ctx.l_inv.rows() == y.rows() && ctx.l_inv.cols() == y.rows(), "dimension mismatch");
  require_finite(y);
  require_finite(x);
  const SvdResult svd = full_svd(ctx.l_inv * (y * x.transpose()));
  Vector gamma(svd.sigma.size());
  for (Index i = 0; i < gamma.size(); ++i) gamma(i) = singular_value_map(svd.sigma(i), ctx.lambda);
  return svd.r * gamma.asDiagonal() * svd.q.transpose() * ctx.l_inv;
}

/// Orthonormal-limit update: the W maximizing tr(W Y X^T) over W^T W = I.
/// With U Sigma V^T the full SVD of Y X^T, the maximizer is V U^T, unique iff
/// all singular values of Y X^T are nonzero.
inline Matrix update_transform_orthonormal(const Matrix& y, const Matrix& x) {
  require(y.rows() == x.rows() && y.cols() == x.cols(), "dimension mismatch");
  require_finite(y);
  require_finite(x);
  const SvdResult svd = full_svd(y * x.transpose());
  return svd.r * svd.q.transpose();
}

/// Gradient of the transform-update objective at W:
///   2 W Y Y^T - 2 X Y^T + 2 lambda xi W - lambda W^-T.
/// Vanishes exactly at the closed-form minimizer.
inline Matrix transform_update_gradient(const Matrix& w, const Matrix& y, const Matrix& x,
                                        double lambda, double xi) {
  require(w.rows() == w.cols() && w.cols() == y.rows(), "dimension mismatch");
  require(y.rows() == x.rows() && y.cols() == x.cols(), "dimension mismatch");
  require_finite(w);
  require_finite(y);
  require_finite(x);
  const SvdResult svd = full_svd(w);
  if (!std::isfinite(detail::condition_from_sigma(svd.sigma)))
    throw std::invalid_argument("singular transform");
  const Matrix w_inv_t = svd.q * svd.sigma.cwiseInverse().asDiagonal() * svd.r.transpose();
  return 2.0 * w * (y * y.transpose()) - 2.0 * x * y.transpose() + 2.0 * lambda * xi * w -
         lambda * w_inv_t;
}

}  // namespace xform
