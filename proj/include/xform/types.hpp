#pragma once

#include <Eigen/Dense>

#include <limits>
#include <stdexcept>

namespace xform {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Sentinel used by barrier objectives and singular-regularizer values.
inline constexpr double kInfiniteObjective = std::numeric_limits<double>::infinity();

// PSNR values are capped here when the error norm underflows.
inline constexpr double kPsnrCapDb = 300.0;

inline void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

inline void require_finite(const Eigen::Ref<const Matrix>& m) {
  require(m.allFinite(), "non-finite matrix");
}

}  // namespace xform
