#pragma once

#include <utility>
#include <vector>

#include "xform/types.hpp"

namespace xform {

/// Vectorized square patches of an image. Columns of `vectors` hold one patch
/// each, vectorized column-major within the patch. Origins are (row, col)
/// top-left coordinates in raster order: rows stepping by stride, then
/// columns within each row band. Per-patch means are recorded when removed.
struct PatchSet {
  Matrix vectors;
  Vector means;
  std::vector<std::pair<Index, Index>> origins;
  Index patch_side = 0;
  Index stride = 1;
  bool mean_removed = false;
};

/// Extracts patches at every origin (r, c) with r, c multiples of the stride
/// and the patch fully inside the image. Trailing rows/columns not covered by
/// a full patch are dropped. With stride 1, every pixel is covered.
inline PatchSet extract_patches(const Matrix& image, Index patch_side, Index stride,
                                bool remove_mean) {
  require_finite(image);
  require(stride >= 1, "invalid stride");
  require(patch_side >= 1 && patch_side <= image.rows() && patch_side <= image.cols(),
          "patch larger than image");
  const Index rows = (image.rows() - patch_side) / stride + 1;
  const Index cols = (image.cols() - patch_side) / stride + 1;
  const Index n = patch_side * patch_side;
  const Index count = rows * cols;

  PatchSet set;
  set.vectors.resize(n, count);
  set.means = Vector::Zero(count);
  set.origins.reserve(static_cast<std::size_t>(count));
  set.patch_side = patch_side;
  set.stride = stride;
  set.mean_removed = remove_mean;

  Index k = 0;
  for (Index br = 0; br < rows; ++br) {
    for (Index bc = 0; bc < cols; ++bc, ++k) {
      const Index r = br * stride;
      const Index c = bc * stride;
      set.origins.emplace_back(r, c);
      set.vectors.col(k) = image.block(r, c, patch_side, patch_side).reshaped();
      if (remove_mean) {
        const double mean = set.vectors.col(k).mean();
        set.means(k) = mean;
        set.vectors.col(k).array() -= mean;
      }
    }
  }
  return set;
}

/// Rebuilds an image from (possibly modified) patch vectors. Removed means
/// are added back, and each pixel is the average of all patch values covering
/// it. Every pixel of the requested image must be covered by some patch.
inline Matrix assemble_image(const PatchSet& patches, const Matrix& restored_vectors,
                             Index height, Index width) {
  require(restored_vectors.rows() == patches.vectors.rows() &&
              restored_vectors.cols() == patches.vectors.cols(),
          "dimension mismatch");
  require_finite(restored_vectors);
  const Index p = patches.patch_side;
  Matrix sum = Matrix::Zero(height, width);
  Matrix count = Matrix::Zero(height, width);
  for (Index k = 0; k < restored_vectors.cols(); ++k) {
    const auto [r, c] = patches.origins[static_cast<std::size_t>(k)];
    require(r + p <= height && c + p <= width, "dimension mismatch");
    const double mean = patches.mean_removed ? patches.means(k) : 0.0;
    sum.block(r, c, p, p) += restored_vectors.col(k).reshaped(p, p);
    if (patches.mean_removed) sum.block(r, c, p, p).array() += mean;
    count.block(r, c, p, p).array() += 1.0;
  }
  if ((count.array() == 0.0).any()) throw std::invalid_argument("uncovered pixels");
  return sum.array() / count.array();
}

}  // namespace xform
