#include "sar/solver.hpp"

#include "sar/geometry.hpp"
#include "sar/random.hpp"
#include "precision_cg.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace sar {

namespace {

VecC solve_mu(const VecC& rhs_adjoint, const Vec& alpha, Scalar beta, const LinearOperator& F,
              const SparsifyingOperator& T, const PhaseMatrix& theta, const SolverConfig& cfg,
              const VecC* warm, bool* cg_converged) {
  const Scalar beta_rho = beta * F.rho();
  if (cfg.path == SolverPath::DiagonalFast) {
    if (T.kind() != SparsifyingOperator::Kind::Identity)
      throw std::invalid_argument("update_mu: diagonal path requires the identity regularizer");
    if (cg_converged) *cg_converged = true;
    return (beta * rhs_adjoint.array()) / (beta_rho + alpha.array());
  }
  detail::ShiftedStencilOp P{T, theta, alpha, beta_rho};
  return detail::pcg(P, beta * rhs_adjoint, warm, cfg.cg_tol, cfg.cg_max_iters, cg_converged);
}

Vec hutchinson_cov_diag(const Vec& alpha, Scalar beta, const LinearOperator& F,
                        const SparsifyingOperator& T, const PhaseMatrix& theta,
                        const SolverConfig& cfg) {
  detail::ShiftedStencilOp P{T, theta, alpha, beta * F.rho()};
  SplitMix64 rng(cfg.cov_seed);
  Vec acc = Vec::Zero(T.cols());
  VecC z(T.cols());
  for (int p = 0; p < cfg.cov_probes; ++p) {
    for (Index j = 0; j < z.size(); ++j) z[j] = (rng.next() & 1) ? 1.0 : -1.0;
    bool ok = false;
    const VecC y = detail::pcg(P, z, nullptr, cfg.cg_tol, cfg.cg_max_iters, &ok);
    acc += (z.conjugate().cwiseProduct(y)).real();
  }
  return acc / Scalar(cfg.cov_probes);
}

}  // namespace

Vec update_alpha(const VecC& mu, const PhaseMatrix& theta, const SparsifyingOperator& T,
                 Scalar a, Scalar b, Scalar alpha_max) {
  const VecC w = T.apply(theta.applyConj(mu));
  return ((1 + 2 * a) / (w.cwiseAbs2().array() + 2 * b)).min(alpha_max);
}

Scalar update_beta(const VecC& data, const LinearOperator& F, const VecC& mu, Scalar c, Scalar d,
                   Scalar beta_max) {
  const Scalar resid = (data - F.forward(mu)).squaredNorm();
  return std::min((Scalar(data.size()) + 2 * c) / (resid + 2 * d), beta_max);
}

VecC update_mu(const LinearOperator& F, const VecC& data, const Vec& alpha, Scalar beta,
               const SparsifyingOperator& T, const PhaseMatrix& theta, const SolverConfig& cfg,
               const VecC* warm_start, bool* cg_converged) {
  return solve_mu(F.adjoint(data), alpha, beta, F, T, theta, cfg, warm_start, cg_converged);
}

SubAperturePosterior run_window(const VecC& data, const LinearOperator& F,
                                const SparsifyingOperator& T, const SolverConfig& cfg) {
  if (data.size() != F.rows()) throw std::invalid_argument("run_window: data length mismatch");
  if (T.cols() != F.cols()) throw std::invalid_argument("run_window: regularizer size mismatch");
  if (!data.allFinite()) throw std::invalid_argument("run_window: non-finite data");

  const Index M = F.rows();
  SubAperturePosterior post;
  post.reg_kind = T.kind();
  post.mu.grid = T.grid();

  const VecC mu0 = F.adjoint(data);  // raw adjoint, right-hand side of every solve
  VecC mu = mu0 / Scalar(M);         // iterate starts at the matched-filter scale
  PhaseMatrix theta = phase_from(mu0);
  Vec alpha;
  Scalar beta = 0;
  bool cg_all_ok = true;

  for (int k = 0; k < cfg.max_iters; ++k) {
    alpha = update_alpha(mu, theta, T, cfg.a, cfg.b, cfg.alpha_max);
    beta = update_beta(data, F, mu, cfg.c, cfg.d, cfg.beta_max);
    bool cg_ok = true;
    const VecC mu_next =
        solve_mu(mu0, alpha, beta, F, T, theta, cfg, k > 0 ? &mu : nullptr, &cg_ok);
    cg_all_ok = cg_all_ok && cg_ok;
    theta = phase_from(mu_next);

    const Scalar denom = mu.norm();
    const Scalar rel = denom > 0 ? (mu_next - mu).norm() / denom : 0;
    post.trace.push_back({rel, beta, alpha.mean(), mu_next.cwiseAbs().mean()});
    mu = mu_next;
    post.iterations = k + 1;
    if (denom == 0 || rel <= cfg.eps) {
      post.converged = true;
      break;
    }
  }

  post.mu.values = mu;
  post.alpha = alpha;
  post.beta = beta;
  post.theta = theta;
  post.cg_healthy = cg_all_ok;
  if (cfg.path == SolverPath::DiagonalFast) {
    post.precision_diag = beta * F.rho() + alpha.array();
    post.cov_diag = post.precision_diag.cwiseInverse();
  } else if (cfg.cov_probes > 0) {
    post.cov_diag = hutchinson_cov_diag(alpha, beta, F, T, theta, cfg);
  }
  return post;
}

std::vector<SubAperturePosterior> run_all(const PhaseHistory& ph, const AperturePlan& plan,
                                          const SceneGrid& grid, SparsifyingOperator::Kind reg,
                                          const SolverConfig& cfg, const NufftSettings& nufft,
                                          int workers) {
  const Index L = plan.size();
  if (L == 0) throw std::invalid_argument("run_all: empty plan");
  std::vector<SubAperturePosterior> results(L);
  std::vector<std::string> errors(L);

  std::atomic<Index> next{0};
  auto work = [&]() {
    for (Index w = next.fetch_add(1); w < L; w = next.fetch_add(1)) {
      try {
        const ApertureWindow& win = plan.windows[w];
        NufftOperator op(grid, freq_coords(win, ph), nufft);
        const VecC data = window_data(win, ph);
        const SparsifyingOperator T = reg == SparsifyingOperator::Kind::Identity
                                          ? SparsifyingOperator::identity(grid)
                                          : SparsifyingOperator::tv2d(grid);
        results[w] = run_window(data, op, T, cfg);
      } catch (const std::exception& e) {
        errors[w] = e.what();
      }
    }
  };

  int nthreads = workers > 0 ? workers : int(std::thread::hardware_concurrency());
  nthreads = std::max(1, std::min<int>(nthreads, int(L)));
  std::vector<std::thread> pool;
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  for (Index w = 0; w < L; ++w)
    if (!errors[w].empty())
      throw std::runtime_error("run_all: window " + std::to_string(w) + ": " + errors[w]);
  return results;
}

}  // namespace sar
