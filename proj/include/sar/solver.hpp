#pragma once

#include "sar/nufft.hpp"
#include "sar/regularizers.hpp"

#include <limits>
#include <vector>

namespace sar {

enum class SolverPath { DiagonalFast, GeneralSparse };

struct SolverConfig {
  Scalar eps = 0.01;     // relative-change stopping tolerance
  int max_iters = 50;
  // Gamma hyperprior parameters; machine epsilon approximates the
  // noninformative limit while keeping divisions finite.
  Scalar a = std::numeric_limits<Scalar>::epsilon();
  Scalar b = std::numeric_limits<Scalar>::epsilon();
  Scalar c = std::numeric_limits<Scalar>::epsilon();
  Scalar d = std::numeric_limits<Scalar>::epsilon();
  SolverPath path = SolverPath::DiagonalFast;
  Scalar cg_tol = 1e-8;
  int cg_max_iters = 500;
  Scalar alpha_max = 1e30;
  Scalar beta_max = 1e30;
  // Hutchinson probes for the covariance diagonal on the general path;
  // 0 skips the estimate. The diagonal path computes it in closed form.
  int cov_probes = 64;
  std::uint64_t cov_seed = 0x5eedc0deULL;
};

struct IterationRecord {
  Scalar rel_change;
  Scalar beta;
  Scalar mean_alpha;
  Scalar mean_abs_mu;
};

// Approximate posterior of one window: mean, speckle precisions, noise
// precision, phase diagonal, and the covariance diagonal used by composites.
struct SubAperturePosterior {
  ComplexImage mu;
  Vec alpha;  // length Q of the regularizer
  Scalar beta = 0;
  PhaseMatrix theta;
  SparsifyingOperator::Kind reg_kind = SparsifyingOperator::Kind::Identity;
  Vec precision_diag;  // diagonal path: beta * rho + alpha
  Vec cov_diag;        // empty when skipped
  int iterations = 0;
  bool converged = false;
  bool cg_healthy = true;
  std::vector<IterationRecord> trace;
};

Vec update_alpha(const VecC& mu, const PhaseMatrix& theta, const SparsifyingOperator& T,
                 Scalar a, Scalar b, Scalar alpha_max);

Scalar update_beta(const VecC& data, const LinearOperator& F, const VecC& mu, Scalar c, Scalar d,
                   Scalar beta_max);

// Posterior mean [beta F*F + (T Theta*)^* diag(alpha) (T Theta*)]^{-1} beta F* data
// with F*F replaced by its diagonal surrogate rho I. The diagonal path requires
// an identity regularizer; the general path runs Jacobi-preconditioned CG,
// optionally warm-started.
VecC update_mu(const LinearOperator& F, const VecC& data, const Vec& alpha, Scalar beta,
               const SparsifyingOperator& T, const PhaseMatrix& theta, const SolverConfig& cfg,
               const VecC* warm_start = nullptr, bool* cg_converged = nullptr);

SubAperturePosterior run_window(const VecC& data, const LinearOperator& F,
                                const SparsifyingOperator& T, const SolverConfig& cfg);

// Solves every window of the plan on its own operator. Windows are
// distributed over `workers` threads (0 picks the hardware count); results
// are identical for any worker count. Per-window failures are rethrown with
// the window index attached.
std::vector<SubAperturePosterior> run_all(const PhaseHistory& ph, const AperturePlan& plan,
                                          const SceneGrid& grid, SparsifyingOperator::Kind reg,
                                          const SolverConfig& cfg, const NufftSettings& nufft,
                                          int workers);

}  // namespace sar
