#pragma once

// Sparsifying transform learning: exact alternating minimization with
// closed-form sparse coding and transform updates, plus the patch-based
// representation and denoising pipelines built on it.

#include "xform/csv.hpp"
#include "xform/denoise.hpp"
#include "xform/learning.hpp"
#include "xform/linalg.hpp"
#include "xform/metrics.hpp"
#include "xform/patches.hpp"
#include "xform/pgm.hpp"
#include "xform/random.hpp"
#include "xform/sparse_coding.hpp"
#include "xform/transform_update.hpp"
#include "xform/types.hpp"
#include "xform/version.hpp"
