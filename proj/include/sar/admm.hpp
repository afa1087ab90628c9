#pragma once

#include "sar/nufft.hpp"
#include "sar/regularizers.hpp"
#include "sar/types.hpp"

#include <vector>

namespace sar {

struct AdmmConfig {
  Scalar lambda = 0.05;  // l1 weight
  Scalar beta = 1.0;     // data-fidelity weight
  Scalar rho = 1.0;      // augmented-Lagrangian penalty
  int iters = 20;
  Scalar cg_tol = 1e-10;
  int cg_max_iters = 500;
};

struct AdmmResult {
  ComplexImage f;
  std::vector<Scalar> primal_residual;  // ||T Theta* f - z|| per iteration
  std::vector<Scalar> data_residual;    // ||data - F f|| per iteration
};

// ADMM on min (beta/2)||data - F f||^2 + lambda ||T Theta* f||_1 with the
// split z = T Theta* f and scaled dual. Theta is fixed from the phases of
// F* data; the f subproblem uses the same diagonal surrogate for F*F as the
// posterior solver (closed form for identity T, CG for tv).
AdmmResult l1_admm(const VecC& data, const LinearOperator& F, const SparsifyingOperator& T,
                   const AdmmConfig& cfg);

// Per-window maximum-likelihood images (1/M) F* data, the non-Bayesian baseline.
std::vector<ComplexImage> nufft_baseline(const PhaseHistory& ph, const AperturePlan& plan,
                                         const SceneGrid& grid, const NufftSettings& nufft = {});

}  // namespace sar
