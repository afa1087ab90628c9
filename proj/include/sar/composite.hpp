#pragma once

#include "sar/solver.hpp"

#include <vector>

namespace sar {

struct CompositeMean {
  ComplexImage image;  // (1/L) sum of window means
  Vec cov_diag;        // (1/L^2) sum of window covariance diagonals
};

// Per-pixel complex value of the window with the largest modulus; ties keep
// the lowest window index.
ComplexImage composite_max(const std::vector<SubAperturePosterior>& posteriors);

// Requires every posterior to carry a covariance diagonal.
CompositeMean composite_mean(const std::vector<SubAperturePosterior>& posteriors);

// Elementwise square root of a combined covariance diagonal.
RealImage composite_std(const Vec& cov_diag, const SceneGrid& grid);

// (1/L) sum of window alphas. Refused for tv posteriors, whose alphas index
// differences rather than pixels.
RealImage composite_alpha(const std::vector<SubAperturePosterior>& posteriors);

}  // namespace sar
