#pragma once

#include <cmath>

#include "xform/linalg.hpp"
#include "xform/sparse_coding.hpp"
#include "xform/types.hpp"

namespace xform {

/// ||W Y - X||_F^2, the transform-domain fitting residual.
inline double sparsification_error(const Matrix& w, const Matrix& y, const Matrix& x) {
  require(w.rows() == w.cols() && w.cols() == y.rows(), "dimension mismatch");
  require(x.rows() == y.rows() && x.cols() == y.cols(), "dimension mismatch");
  return (w * y - x).squaredNorm();
}

/// Normalized sparsification error at sparsity s: the fraction of
/// transform-domain energy lost by the optimal s-sparse projection.
inline double nse(const Matrix& w, const Matrix& y, Index s) {
  require(w.rows() == w.cols() && w.cols() == y.rows(), "dimension mismatch");
  const Matrix t = w * y;
  const double total = t.squaredNorm();
  if (total == 0.0) throw std::invalid_argument("degenerate data");
  double lost = 0.0;
  for (Index i = 0; i < t.cols(); ++i) lost += (t.col(i) - project_s_sparse(t.col(i), s)).squaredNorm();
  return lost / total;
}

namespace detail {

inline double capped_db(double numerator, double error_norm) {
  if (error_norm < 1e-12) return kPsnrCapDb;
  return 20.0 * std::log10(numerator / error_norm);
}

}  // namespace detail

/// Recovery PSNR in dB: 20 log10(255 sqrt(P) / ||Y - W^-1 X||_F), where P is
/// the represented pixel count supplied by the caller. Capped at +300 dB.
inline double recovery_psnr(const Matrix& w, const Matrix& y, const Matrix& x, Index pixel_count) {
  require(w.rows() == w.cols() && w.cols() == y.rows(), "dimension mismatch");
  require(x.rows() == y.rows() && x.cols() == y.cols(), "dimension mismatch");
  require(pixel_count >= 1, "invalid pixel count");
  const SvdResult svd = full_svd(w);
  if (!std::isfinite(detail::condition_from_sigma(svd.sigma)))
    throw std::invalid_argument("singular transform");
  const Matrix recovered = svd.r * svd.sigma.cwiseInverse().asDiagonal() * svd.q.transpose() * x;
  const double error_norm = (y - recovered).norm();
  return detail::capped_db(255.0 * std::sqrt(static_cast<double>(pixel_count)), error_norm);
}

/// Plain image PSNR between two equally sized arrays.
inline double psnr(const Matrix& a, const Matrix& b, double peak = 255.0) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "dimension mismatch");
  require(peak > 0.0, "invalid peak");
  const double error_norm = (a - b).norm();
  return detail::capped_db(peak * std::sqrt(static_cast<double>(a.size())), error_norm);
}

struct MetricsReport {
  double sparsification_error = 0.0;
  double nse = 0.0;
  double recovery_psnr_db = 0.0;
  double condition_number = 0.0;
  double frobenius_norm = 0.0;
};

/// Report for a given (W, Y, X) triple. NSE here is the fitting residual of
/// the supplied X relative to transform-domain energy; it lies in [0, 1]
/// whenever X is an optimal projection of W Y.
inline MetricsReport make_report(const Matrix& w, const Matrix& y, const Matrix& x,
                                 Index pixel_count) {
  MetricsReport report;
  report.sparsification_error = sparsification_error(w, y, x);
  const double total = (w * y).squaredNorm();
  if (total == 0.0) throw std::invalid_argument("degenerate data");
  report.nse = report.sparsification_error / total;
  report.recovery_psnr_db = recovery_psnr(w, y, x, pixel_count);
  report.condition_number = condition_number(w);
  report.frobenius_norm = w.norm();
  return report;
}

}  // namespace xform
