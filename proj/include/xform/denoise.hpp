#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <utility>
#include <vector>

#include "xform/learning.hpp"
#include "xform/patches.hpp"
#include "xform/random.hpp"
#include "xform/sparse_coding.hpp"
#include "xform/transform_update.hpp"
#include "xform/types.hpp"

namespace xform {

/// Parameters of the two-step patch denoiser. Defaults follow the reference
/// setting for 11x11 patches; `sigma` must be supplied.
struct DenoiseConfig {
  Index patch_dim = 121;        // n, pixels per patch (perfect square)
  double lambda0 = 0.031;       // regularizer weight scale
  double threshold_c = 1.04;    // C in the sparsity-level rule
  int outer_iterations = 11;    // M', two-step iterations
  Index train_size = 32000;     // N', patches sampled per learning step
  int learn_iterations = 12;    // M, inner learning iterations
  double tau_coeff = 0.01;      // tau = tau_coeff / sigma
  Index initial_sparsity = 12;  // starting per-patch sparsity level
  double sigma = 0.0;           // noise standard deviation (required)
  double xi = 1.0;
  std::uint64_t seed = 0;
};

struct DenoiseState {
  Matrix transform;
  std::vector<Index> sparsities;
  Matrix denoised_patches;
  Matrix codes;
  // Inner learning objective sequences, one per outer iteration.
  std::vector<std::vector<double>> learn_objectives;
};

struct DenoiseResult {
  Matrix image;
  DenoiseState state;
};

namespace detail {

// Smallest s whose best s-term approximation of t leaves at most
// n C^2 sigma^2 of energy, together with that approximation. Ties in
// magnitude resolve toward the lowest index, as in project_s_sparse.
inline std::pair<Index, Vector> select_from_coefficients(const Vector& t, double sigma, double c) {
  const Index n = t.size();
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&t](Index a, Index b) { return std::abs(t(a)) > std::abs(t(b)); });
  std::vector<double> residual(static_cast<std::size_t>(n + 1), 0.0);
  for (Index s = n - 1; s >= 0; --s) {
    const double v = t(order[static_cast<std::size_t>(s)]);
    residual[static_cast<std::size_t>(s)] = residual[static_cast<std::size_t>(s + 1)] + v * v;
  }
  const double bound = static_cast<double>(n) * c * c * sigma * sigma;
  Index chosen = n;
  for (Index s = 0; s <= n; ++s) {
    if (residual[static_cast<std::size_t>(s)] <= bound) {
      chosen = s;
      break;
    }
  }
  Vector alpha = Vector::Zero(n);
  for (Index k = 0; k < chosen; ++k)
    alpha(order[static_cast<std::size_t>(k)]) = t(order[static_cast<std::size_t>(k)]);
  return {chosen, std::move(alpha)};
}

// Restoration shared by the public op and the bulk path: solves
// (W^T W + tau I) x = W^T alpha + tau y_patch with a prefactored Cholesky.
inline Vector restore_with(const Eigen::LLT<Matrix>& llt, const Matrix& w, const Vector& alpha,
                           const Vector& noisy_patch, double tau) {
  return llt.solve(w.transpose() * alpha + tau * noisy_patch);
}

inline Matrix code_with_budgets(const Matrix& w, const Matrix& y, const std::vector<Index>& s) {
  const Matrix t = w * y;
  Matrix x(t.rows(), t.cols());
  for (Index i = 0; i < t.cols(); ++i)
    x.col(i) = project_s_sparse(t.col(i), s[static_cast<std::size_t>(i)]);
  return x;
}

// Transform-update objective; code feasibility holds by construction.
inline double learning_objective(const Matrix& w, const Matrix& x, const Matrix& y, double lambda,
                                 double xi) {
  const double reg = regularizer_v(w, xi);
  if (!std::isfinite(reg)) return kInfiniteObjective;
  return (w * y - x).squaredNorm() + lambda * reg;
}

}  // namespace detail

/// Smallest sparsity level s such that the energy of W x left outside the
/// best s-term approximation is at most n C^2 sigma^2, together with the
/// corresponding code H_s(W x). The level is unique, so it does not depend
/// on the starting point s_init; larger thresholds never yield larger s.
inline std::pair<Index, Vector> select_sparsity(const Matrix& w, const Vector& x, double sigma,
                                                double c, Index s_init) {
  require(w.rows() == w.cols() && w.cols() == x.size(), "dimension mismatch");
  require(w.allFinite() && x.allFinite(), "non-finite input");
  require(sigma > 0.0, "invalid sigma");
  require(c > 0.0, "invalid threshold constant");
  require(s_init >= 0 && s_init <= x.size(), "invalid sparsity");
  return detail::select_from_coefficients(w * x, sigma, c);
}

/// Exact minimizer of ||W x - alpha||_2^2 + tau ||y_patch - x||_2^2 over x,
/// via the normal equations (W^T W + tau I) x = W^T alpha + tau y_patch.
inline Vector restore_patch(const Matrix& w, const Vector& alpha, const Vector& noisy_patch,
                            double tau) {
  require(w.rows() == w.cols() && w.cols() == noisy_patch.size(), "dimension mismatch");
  require(alpha.size() == noisy_patch.size(), "dimension mismatch");
  require_finite(w);
  require(alpha.allFinite() && noisy_patch.allFinite(), "non-finite input");
  require(tau > 0.0, "invalid tau");
  const Index n = w.rows();
  const Matrix gram = w.transpose() * w + tau * Matrix::Identity(n, n);
  Eigen::LLT<Matrix> llt(gram);
  return detail::restore_with(llt, w, alpha, noisy_patch, tau);
}

/// Two-step patch-based denoiser on maximally overlapping patches. Each outer
/// iteration (a) learns a transform on patches sampled uniformly at random
/// from the noisy image, with the current per-patch sparsity levels and
/// lambda accumulated from the sampled noisy patch energies, then (b)
/// re-selects sparsity levels and codes from the noisy patches under the
/// current transform and restores every patch. Selecting from the noisy
/// patches rather than the running estimates keeps the truncation from
/// compounding across iterations; the data-fit weight tau is far too small
/// to replenish energy removed by earlier passes. The output image is the
/// overlap average of the restored patches with means added back, clamped
/// to [0, 255].
inline DenoiseResult denoise_image(const Matrix& noisy_image, const DenoiseConfig& cfg) {
  require(cfg.sigma > 0.0, "invalid sigma");
  require(cfg.outer_iterations >= 1 && cfg.learn_iterations >= 1, "invalid iteration count");
  require(cfg.lambda0 > 0.0 && cfg.threshold_c > 0.0 && cfg.tau_coeff > 0.0, "invalid weight");
  require(cfg.xi > 0.0, "invalid xi");
  require(cfg.train_size >= 1, "invalid training size");
  const auto side = static_cast<Index>(std::llround(std::sqrt(static_cast<double>(cfg.patch_dim))));
  require(side * side == cfg.patch_dim, "dimension not a perfect square");
  require(cfg.initial_sparsity >= 0 && cfg.initial_sparsity <= cfg.patch_dim, "invalid sparsity");

  const PatchSet patches = extract_patches(noisy_image, side, 1, /*remove_mean=*/true);
  const Matrix& noisy = patches.vectors;
  const Index n = cfg.patch_dim;
  const Index total = noisy.cols();
  const double tau = cfg.tau_coeff / cfg.sigma;

  DenoiseState state;
  state.transform = dct_matrix_2d(n);
  state.sparsities.assign(static_cast<std::size_t>(total), cfg.initial_sparsity);
  state.denoised_patches = noisy;
  state.codes = Matrix::Zero(n, total);

  Rng rng(cfg.seed);

  for (int outer = 0; outer < cfg.outer_iterations; ++outer) {
    // (a) transform learning on sampled noisy patches
    std::vector<Index> sample;
    if (cfg.train_size < total) {
      sample = rng.sample_without_replacement(total, cfg.train_size);
    } else {
      sample.resize(static_cast<std::size_t>(total));
      std::iota(sample.begin(), sample.end(), Index{0});
    }
    Matrix y_train(n, static_cast<Index>(sample.size()));
    std::vector<Index> s_train(sample.size());
    for (std::size_t k = 0; k < sample.size(); ++k) {
      y_train.col(static_cast<Index>(k)) = noisy.col(sample[k]);
      s_train[k] = state.sparsities[static_cast<std::size_t>(sample[k])];
    }
    const double lambda = cfg.lambda0 * y_train.squaredNorm();
    std::vector<double> inner_objectives;
    if (lambda > 0.0) {
      const UpdateContext ctx = make_update_context(y_train, lambda, cfg.xi);
      Matrix x_train = detail::code_with_budgets(state.transform, y_train, s_train);
      inner_objectives.reserve(static_cast<std::size_t>(cfg.learn_iterations));
      for (int m = 0; m < cfg.learn_iterations; ++m) {
        state.transform = update_transform(y_train, x_train, ctx);
        x_train = detail::code_with_budgets(state.transform, y_train, s_train);
        inner_objectives.push_back(
            detail::learning_objective(state.transform, x_train, y_train, lambda, cfg.xi));
      }
    }
    // zero training energy: nothing to learn, keep the current transform
    state.learn_objectives.push_back(std::move(inner_objectives));

    // (b) variable-sparsity update and restoration on all patches
    const Matrix coefficients = state.transform * noisy;
    for (Index i = 0; i < total; ++i) {
      auto [s_i, alpha] =
          detail::select_from_coefficients(coefficients.col(i), cfg.sigma, cfg.threshold_c);
      state.sparsities[static_cast<std::size_t>(i)] = s_i;
      state.codes.col(i) = alpha;
    }
    const Matrix gram =
        state.transform.transpose() * state.transform + tau * Matrix::Identity(n, n);
    Eigen::LLT<Matrix> llt(gram);
    for (Index i = 0; i < total; ++i) {
      state.denoised_patches.col(i) =
          detail::restore_with(llt, state.transform, state.codes.col(i), noisy.col(i), tau);
    }
  }

  Matrix image =
      assemble_image(patches, state.denoised_patches, noisy_image.rows(), noisy_image.cols());
  image = image.array().min(255.0).max(0.0);
  return DenoiseResult{std::move(image), std::move(state)};
}

}  // namespace xform
