#include "sar/composite.hpp"

#include <stdexcept>
#include <string>

namespace sar {

namespace {
void check_windows(const std::vector<SubAperturePosterior>& posteriors) {
  if (posteriors.empty()) throw std::invalid_argument("composite: no windows");
  const SceneGrid& g = posteriors.front().mu.grid;
  for (size_t l = 0; l < posteriors.size(); ++l) {
    if (!(posteriors[l].mu.grid == g))
      throw std::invalid_argument("composite: window " + std::to_string(l) +
                                  " uses a different grid");
    if (posteriors[l].mu.values.size() != g.n())
      throw std::invalid_argument("composite: window " + std::to_string(l) +
                                  " has a malformed image");
  }
}
}  // namespace

ComplexImage composite_max(const std::vector<SubAperturePosterior>& posteriors) {
  check_windows(posteriors);
  ComplexImage out = posteriors.front().mu;
  for (size_t l = 1; l < posteriors.size(); ++l) {
    const VecC& v = posteriors[l].mu.values;
    for (Index j = 0; j < out.values.size(); ++j)
      if (std::abs(v[j]) > std::abs(out.values[j])) out.values[j] = v[j];
  }
  return out;
}

CompositeMean composite_mean(const std::vector<SubAperturePosterior>& posteriors) {
  check_windows(posteriors);
  const Scalar L = Scalar(posteriors.size());
  CompositeMean out;
  out.image.grid = posteriors.front().mu.grid;
  out.image.values = VecC::Zero(out.image.grid.n());
  out.cov_diag = Vec::Zero(out.image.grid.n());
  for (size_t l = 0; l < posteriors.size(); ++l) {
    if (posteriors[l].cov_diag.size() != out.cov_diag.size())
      throw std::invalid_argument("composite_mean: window " + std::to_string(l) +
                                  " carries no covariance diagonal");
    out.image.values += posteriors[l].mu.values;
    out.cov_diag += posteriors[l].cov_diag;
  }
  out.image.values /= L;
  out.cov_diag /= L * L;
  return out;
}

RealImage composite_std(const Vec& cov_diag, const SceneGrid& grid) {
  if (cov_diag.size() != grid.n())
    throw std::invalid_argument("composite_std: covariance diagonal length mismatch");
  if ((cov_diag.array() < 0).any())
    throw std::invalid_argument("composite_std: negative covariance entries");
  RealImage out;
  out.grid = grid;
  out.values = cov_diag.cwiseSqrt();
  return out;
}

RealImage composite_alpha(const std::vector<SubAperturePosterior>& posteriors) {
  check_windows(posteriors);
  RealImage out;
  out.grid = posteriors.front().mu.grid;
  out.values = Vec::Zero(out.grid.n());
  for (size_t l = 0; l < posteriors.size(); ++l) {
    const auto& p = posteriors[l];
    if (p.reg_kind != SparsifyingOperator::Kind::Identity)
      throw std::invalid_argument(
          "composite_alpha: window " + std::to_string(l) +
          " was solved with the tv regularizer; its alphas weight differences, not pixels");
    if (p.alpha.size() != out.values.size())
      throw std::invalid_argument("composite_alpha: window " + std::to_string(l) +
                                  " alpha length mismatch");
    out.values += p.alpha;
  }
  out.values /= Scalar(posteriors.size());
  return out;
}

}  // namespace sar
