#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <variant>
#include <vector>

#include "xform/types.hpp"

namespace xform {

/// Projection onto the s-l0 ball: keeps the s entries of largest magnitude,
/// zeroes the rest. Ties are broken toward the lowest indices, so the result
/// is deterministic. Magnitude comparisons are exact; no epsilon fuzz.
inline Vector project_s_sparse(const Vector& z, Index s) {
  require(z.allFinite(), "non-finite input");
  if (s < 0 || s > z.size()) throw std::invalid_argument("invalid sparsity");
  if (s == z.size()) return z;
  Vector out = Vector::Zero(z.size());
  if (s == 0) return out;
  std::vector<Index> order(static_cast<std::size_t>(z.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&z](Index a, Index b) { return std::abs(z(a)) > std::abs(z(b)); });
  for (Index k = 0; k < s; ++k) out(order[static_cast<std::size_t>(k)]) = z(order[static_cast<std::size_t>(k)]);
  return out;
}

/// Elementwise hard thresholding: entries with |b_j| < eta become zero,
/// entries with |b_j| >= eta are kept (boundary kept).
inline Vector hard_threshold(const Vector& b, double eta) {
  require(b.allFinite(), "non-finite input");
  if (!(eta > 0.0)) throw std::invalid_argument("invalid threshold");
  Vector out(b.size());
  for (Index j = 0; j < b.size(); ++j) out(j) = std::abs(b(j)) >= eta ? b(j) : 0.0;
  return out;
}

struct ConstrainedSparsity {
  Index s = 0;  // per-column nonzero budget
};

struct PenalizedSparsity {
  Vector eta;  // per-column thresholds, all positive
};

using SparsityMode = std::variant<ConstrainedSparsity, PenalizedSparsity>;

inline PenalizedSparsity uniform_eta(Index columns, double eta) {
  return PenalizedSparsity{Vector::Constant(columns, eta)};
}

/// Exact sparse coding of the columns of W*Y. Constrained mode projects each
/// column onto the s-l0 ball; penalized mode hard-thresholds column i at
/// eta_i. Columns are independent, so the result equals the global minimizer
/// of the corresponding coding subproblem.
inline Matrix sparse_code(const Matrix& w, const Matrix& y, const SparsityMode& mode) {
  require(w.cols() == y.rows(), "dimension mismatch");
  require_finite(w);
  require_finite(y);
  const Matrix t = w * y;
  Matrix x(t.rows(), t.cols());
  if (const auto* constrained = std::get_if<ConstrainedSparsity>(&mode)) {
    for (Index i = 0; i < t.cols(); ++i) x.col(i) = project_s_sparse(t.col(i), constrained->s);
  } else {
    const auto& penalized = std::get<PenalizedSparsity>(mode);
    require(penalized.eta.size() == t.cols(), "dimension mismatch");
    require((penalized.eta.array() > 0.0).all(), "invalid threshold");
    for (Index i = 0; i < t.cols(); ++i) x.col(i) = hard_threshold(t.col(i), penalized.eta(i));
  }
  return x;
}

inline Index count_nonzeros(const Eigen::Ref<const Vector>& v) {
  Index count = 0;
  for (Index j = 0; j < v.size(); ++j)
    if (v(j) != 0.0) ++count;
  return count;
}

}  // namespace xform
