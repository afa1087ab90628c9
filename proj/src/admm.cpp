#include "sar/admm.hpp"

#include "sar/geometry.hpp"
#include "precision_cg.hpp"

#include <stdexcept>

namespace sar {

namespace {
inline VecC soft_threshold(const VecC& v, Scalar t) {
  VecC out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const Scalar m = std::abs(v[i]);
    out[i] = m > t ? v[i] * (1 - t / m) : Complex(0, 0);
  }
  return out;
}
}  // namespace

AdmmResult l1_admm(const VecC& data, const LinearOperator& F, const SparsifyingOperator& T,
                   const AdmmConfig& cfg) {
  if (data.size() != F.rows()) throw std::invalid_argument("l1_admm: data length mismatch");
  if (T.cols() != F.cols()) throw std::invalid_argument("l1_admm: regularizer size mismatch");
  if (cfg.lambda < 0) throw std::invalid_argument("l1_admm: lambda must be nonnegative");
  if (cfg.rho <= 0 || cfg.beta <= 0)
    throw std::invalid_argument("l1_admm: rho and beta must be positive");
  if (cfg.iters < 1) throw std::invalid_argument("l1_admm: need at least one iteration");

  const VecC adj = F.adjoint(data);
  const PhaseMatrix theta = phase_from(adj);
  const Scalar rho_op = F.rho();
  const Vec penalty = Vec::Constant(T.rows(), cfg.rho);

  VecC f = adj / rho_op;
  VecC z = T.apply(theta.applyConj(f));
  VecC u = VecC::Zero(T.rows());

  AdmmResult res;
  res.f.grid = T.grid();
  for (int it = 0; it < cfg.iters; ++it) {
    const VecC rhs = cfg.beta * adj + cfg.rho * theta.apply(T.applyAdjoint(z - u));
    if (T.kind() == SparsifyingOperator::Kind::Identity) {
      f = rhs / (cfg.beta * rho_op + cfg.rho);
    } else {
      detail::ShiftedStencilOp P{T, theta, penalty, cfg.beta * rho_op};
      f = detail::pcg(P, rhs, &f, cfg.cg_tol, cfg.cg_max_iters, nullptr);
    }
    const VecC v = T.apply(theta.applyConj(f));
    z = soft_threshold(v + u, cfg.lambda / cfg.rho);
    u += v - z;
    res.primal_residual.push_back((v - z).norm());
    res.data_residual.push_back((data - F.forward(f)).norm());
  }
  res.f.values = f;
  return res;
}

std::vector<ComplexImage> nufft_baseline(const PhaseHistory& ph, const AperturePlan& plan,
                                         const SceneGrid& grid, const NufftSettings& nufft) {
  std::vector<ComplexImage> images;
  images.reserve(plan.windows.size());
  for (const auto& win : plan.windows) {
    NufftOperator op(grid, freq_coords(win, ph), nufft);
    images.push_back(ml_estimate(op, window_data(win, ph)));
  }
  return images;
}

}  // namespace sar
