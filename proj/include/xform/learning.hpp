#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <vector>

#include "xform/linalg.hpp"
#include "xform/random.hpp"
#include "xform/sparse_coding.hpp"
#include "xform/transform_update.hpp"
#include "xform/types.hpp"

namespace xform {

enum class InitKind { Dct, Klt, Identity, RandomGaussian, Given };
enum class StepOrder { UpdateFirst, CodeFirst };

struct LearnConfig {
  double lambda0 = 3.1e-3;  // lambda = lambda0 * ||Y||_F^2
  double xi = 1.0;
  SparsityMode mode{ConstrainedSparsity{11}};
  int iterations = 100;
  InitKind init = InitKind::Identity;
  std::uint64_t seed = 0;
  Matrix given_w;  // used when init == Given
  StepOrder order = StepOrder::UpdateFirst;
  std::optional<double> stop_tol{};  // relative objective change; disabled by default
  // Called with (iteration, W, X) after every iteration; for instrumentation.
  std::function<void(int, const Matrix&, const Matrix&)> observer{};
};

struct TraceRecord {
  int iteration = 0;
  double objective = 0.0;
  double sparsification_error = 0.0;
  double condition_number = 0.0;
  double frobenius_norm = 0.0;
  double elapsed_ms = 0.0;
};

using ConvergenceTrace = std::vector<TraceRecord>;

struct LearnResult {
  Matrix transform;
  Matrix codes;
  ConvergenceTrace trace;
};

namespace detail {

inline double log_abs_det_from_sigma(const Vector& sigma) {
  double sum = 0.0;
  for (Index i = 0; i < sigma.size(); ++i) sum += std::log(sigma(i));
  return sum;  // -inf when any singular value is exactly zero
}

}  // namespace detail

/// Regularizer v(W) = xi ||W||_F^2 - log|det W|. The determinant magnitude is
/// evaluated as the product of singular values; singular W yields +inf.
inline double regularizer_v(const Matrix& w, double xi) {
  require(w.rows() == w.cols(), "dimension mismatch");
  const SvdResult svd = full_svd(w);
  const double log_det = detail::log_abs_det_from_sigma(svd.sigma);
  if (!std::isfinite(log_det)) return kInfiniteObjective;
  return xi * w.squaredNorm() - log_det;
}

/// Infimum of v over nonsingular matrices: n/2 + (n/2) log(2 xi), attained by
/// any matrix whose singular values all equal 1/sqrt(2 xi).
inline double lower_bound_v0(Index n, double xi) {
  require(n >= 1, "invalid dimension");
  require(xi > 0.0, "invalid xi");
  const double half_n = 0.5 * static_cast<double>(n);
  return half_n + half_n * std::log(2.0 * xi);
}

namespace detail {

inline double sparsity_penalty(const Matrix& x, const SparsityMode& mode) {
  if (const auto* constrained = std::get_if<ConstrainedSparsity>(&mode)) {
    for (Index i = 0; i < x.cols(); ++i)
      if (count_nonzeros(x.col(i)) > constrained->s) return kInfiniteObjective;
    return 0.0;
  }
  const auto& penalized = std::get<PenalizedSparsity>(mode);
  require(penalized.eta.size() == x.cols(), "dimension mismatch");
  double total = 0.0;
  for (Index i = 0; i < x.cols(); ++i) {
    const double eta = penalized.eta(i);
    total += eta * eta * static_cast<double>(count_nonzeros(x.col(i)));
  }
  return total;
}

}  // namespace detail

/// Full learning objective. Constrained mode: sparsification error plus
/// lambda * v(W) plus the sparsity barrier (0 when every column of X has at
/// most s nonzeros, +inf otherwise). Penalized mode: barrier replaced by
/// sum_i eta_i^2 ||X_i||_0. lambda = lambda0 * ||Y||_F^2.
inline double objective(const Matrix& w, const Matrix& x, const Matrix& y,
                        const LearnConfig& cfg) {
  require(w.rows() == w.cols() && w.cols() == y.rows(), "dimension mismatch");
  require(x.rows() == y.rows() && x.cols() == y.cols(), "dimension mismatch");
  const double lambda = cfg.lambda0 * y.squaredNorm();
  const double penalty = detail::sparsity_penalty(x, cfg.mode);
  if (!std::isfinite(penalty)) return kInfiniteObjective;
  const double reg = regularizer_v(w, cfg.xi);
  if (!std::isfinite(reg)) return kInfiniteObjective;
  return (w * y - x).squaredNorm() + lambda * reg + penalty;
}

/// Orthonormal 1D DCT-II matrix of size m.
inline Matrix dct_matrix_1d(Index m) {
  require(m >= 1, "invalid dimension");
  Matrix d(m, m);
  const double base = std::numbers::pi / (2.0 * static_cast<double>(m));
  for (Index k = 0; k < m; ++k) {
    const double scale = std::sqrt((k == 0 ? 1.0 : 2.0) / static_cast<double>(m));
    for (Index j = 0; j < m; ++j)
      d(k, j) = scale * std::cos(base * static_cast<double>(k) * static_cast<double>(2 * j + 1));
  }
  return d;
}

/// 2D DCT for vectorized sqrt(n) x sqrt(n) patches: kron(D, D).
/// n must be a perfect square.
inline Matrix dct_matrix_2d(Index n) {
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(n))));
  require(side * side == n, "dimension not a perfect square");
  const Matrix d = dct_matrix_1d(side);
  Matrix k(n, n);
  for (Index a = 0; a < side; ++a)
    for (Index b = 0; b < side; ++b)
      k.block(a * side, b * side, side, side) = d(a, b) * d;
  return k;
}

inline Matrix init_transform(InitKind kind, const Matrix& y, Index n, std::uint64_t seed) {
  switch (kind) {
    case InitKind::Dct:
      return dct_matrix_2d(n);
    case InitKind::Klt: {
      require(y.rows() == n, "dimension mismatch");
      require_finite(y);
      Eigen::BDCSVD<Matrix> svd(y, Eigen::ComputeFullU);
      return svd.matrixU().transpose();
    }
    case InitKind::Identity:
      return Matrix::Identity(n, n);
    case InitKind::RandomGaussian: {
      Rng rng(seed);
      return rng.gaussian_matrix(n, n, 0.2);
    }
    case InitKind::Given:
      throw std::invalid_argument("given transform must be supplied via LearnConfig");
  }
  throw std::invalid_argument("unknown initialization");
}

namespace detail {

struct IterationStats {
  double objective = 0.0;
  double sparsification_error = 0.0;
  double condition_number = 0.0;
  double frobenius_norm = 0.0;
  double regularizer = 0.0;
};

// One SVD of W serves the objective, the condition number and the norm.
// Matches objective() exactly: same SVD backend and same log-det summation.
inline IterationStats iteration_stats(const Matrix& w, const Matrix& x, const Matrix& y,
                                      double lambda, double xi, const SparsityMode& mode) {
  IterationStats stats;
  const SvdResult svd = full_svd(w);
  const double log_det = log_abs_det_from_sigma(svd.sigma);
  stats.regularizer = std::isfinite(log_det) ? xi * w.squaredNorm() - log_det : kInfiniteObjective;
  stats.condition_number = condition_from_sigma(svd.sigma);
  stats.frobenius_norm = w.norm();
  stats.sparsification_error = (w * y - x).squaredNorm();
  const double penalty = sparsity_penalty(x, mode);
  stats.objective = (std::isfinite(stats.regularizer) && std::isfinite(penalty))
                        ? stats.sparsification_error + lambda * stats.regularizer + penalty
                        : kInfiniteObjective;
  return stats;
}

inline bool relative_tie(double candidate, double incumbent, double tol) {
  return std::abs(candidate - incumbent) <= tol * std::max(1.0, std::abs(incumbent));
}

}  // namespace detail

/// Alternating minimization for the transform learning problem. Runs the
/// configured number of iterations of transform update (closed form) and
/// exact sparse coding. The initial code X0 is the exact sparse code of
/// W0 * Y. When an update leaves the objective unchanged within 1e-12
/// relative, the previous transform is retained, and with it the previous
/// code. The trace records one row per iteration.
inline LearnResult learn(const Matrix& y, const LearnConfig& cfg) {
  require_finite(y);
  require(y.rows() >= 1 && y.cols() >= 1, "empty data");
  require(cfg.lambda0 > 0.0, "invalid lambda0");
  require(cfg.xi > 0.0, "invalid xi");
  require(cfg.iterations >= 1, "invalid iteration count");
  const Index n = y.rows();
  if (const auto* constrained = std::get_if<ConstrainedSparsity>(&cfg.mode))
    require(constrained->s >= 0 && constrained->s <= n, "invalid sparsity");

  const double lambda = cfg.lambda0 * y.squaredNorm();
  Matrix w = cfg.init == InitKind::Given ? cfg.given_w : init_transform(cfg.init, y, n, cfg.seed);
  require(w.rows() == n && w.cols() == n, "dimension mismatch");
  require_finite(w);

  const UpdateContext ctx = make_update_context(y, lambda, cfg.xi);
  Matrix x = sparse_code(w, y, cfg.mode);
  double current_objective =
      detail::iteration_stats(w, x, y, lambda, cfg.xi, cfg.mode).objective;

  constexpr double kTieTol = 1e-12;
  LearnResult result;
  result.trace.reserve(static_cast<std::size_t>(cfg.iterations));
  bool w_retained = false;
  const auto start = std::chrono::steady_clock::now();

  for (int k = 1; k <= cfg.iterations; ++k) {
    if (cfg.order == StepOrder::CodeFirst && !w_retained) {
      x = sparse_code(w, y, cfg.mode);
      current_objective = detail::iteration_stats(w, x, y, lambda, cfg.xi, cfg.mode).objective;
    }

    const Matrix candidate = update_transform(y, x, ctx);
    detail::IterationStats stats =
        detail::iteration_stats(candidate, x, y, lambda, cfg.xi, cfg.mode);
    if (std::isfinite(current_objective) &&
        detail::relative_tie(stats.objective, current_objective, kTieTol)) {
      w_retained = true;
      stats = detail::iteration_stats(w, x, y, lambda, cfg.xi, cfg.mode);
    } else {
      w_retained = false;
      w = candidate;
      if (cfg.order == StepOrder::UpdateFirst) {
        x = sparse_code(w, y, cfg.mode);
        stats.sparsification_error = (w * y - x).squaredNorm();
        const double penalty = detail::sparsity_penalty(x, cfg.mode);
        stats.objective = std::isfinite(stats.regularizer) && std::isfinite(penalty)
                              ? stats.sparsification_error + lambda * stats.regularizer + penalty
                              : kInfiniteObjective;
      }
    }
    current_objective = stats.objective;

    const double elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
            .count();
    result.trace.push_back(TraceRecord{k, stats.objective, stats.sparsification_error,
                                       stats.condition_number, stats.frobenius_norm, elapsed_ms});
    if (cfg.observer) cfg.observer(k, w, x);

    if (cfg.stop_tol && result.trace.size() >= 2) {
      const double previous = result.trace[result.trace.size() - 2].objective;
      if (detail::relative_tie(stats.objective, previous, *cfg.stop_tol)) break;
    }
  }

  result.transform = std::move(w);
  result.codes = std::move(x);
  return result;
}

}  // namespace xform
