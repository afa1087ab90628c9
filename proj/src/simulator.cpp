#include "sar/simulator.hpp"

#include "sar/geometry.hpp"
#include "sar/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace sar {

namespace {
constexpr Scalar kTwoPi = 2 * std::numbers::pi;

Scalar wrap_2pi(Scalar a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

// Half-open modular arcs [a0, a0+la) and [b0, b0+lb).
bool arcs_intersect(Scalar a0, Scalar la, Scalar b0, Scalar lb) {
  return wrap_2pi(b0 - a0) < la || wrap_2pi(a0 - b0) < lb;
}

bool visible(const Scatterer& s, const ApertureWindow& window) {
  if (s.full_view) return true;
  const Scalar len = wrap_2pi(s.theta_b - s.theta_a);
  if (len == 0) return false;
  return arcs_intersect(window.start, window.span, s.theta_a, len);
}
}  // namespace

ComplexImage make_scene(const SceneSpec& spec, const ApertureWindow& window) {
  if (spec.grid.nx <= 0 || spec.grid.ny <= 0 || spec.grid.extent <= 0)
    throw std::invalid_argument("make_scene: grid must have positive size and extent");
  if (spec.alpha_bg < 0) throw std::invalid_argument("make_scene: alpha_bg must be nonnegative");

  ComplexImage img;
  img.grid = spec.grid;
  img.values = VecC::Zero(spec.grid.n());

  if (spec.alpha_bg > 0) {
    SplitMix64 rng(mix_seed(spec.seed, std::uint64_t(window.index)));
    const Scalar sigma = 1 / std::sqrt(spec.alpha_bg);
    for (Index j = 0; j < img.values.size(); ++j) {
      const Scalar re = sigma * rng.normal();
      const Scalar im = sigma * rng.normal();
      img.values[j] = Complex(re, im);
    }
  }
  for (const Scatterer& s : spec.scatterers) {
    if (s.ix < 0 || s.ix >= spec.grid.nx || s.iy < 0 || s.iy >= spec.grid.ny)
      throw std::invalid_argument("make_scene: scatterer outside the grid");
    if (visible(s, window)) img.values[spec.grid.idx(s.ix, s.iy)] += s.amplitude;
  }
  return img;
}

PhaseHistory synthesize(const SceneSpec& spec, const AcquisitionSpec& acq,
                        const AperturePlan& plan, const NufftSettings& nufft) {
  const Index P = acq.azimuths.size();
  const Index K = acq.k.size();
  if (P == 0 || K == 0) throw std::invalid_argument("synthesize: empty acquisition");
  for (Index s = 0; s < K; ++s)
    if (!(acq.k[s] > 0) || !std::isfinite(acq.k[s]))
      throw std::invalid_argument("synthesize: spatial frequencies must be finite and positive");
  if (!(acq.beta_true > 0)) throw std::invalid_argument("synthesize: beta_true must be positive");
  if (!plan.unassigned.empty())
    throw std::invalid_argument("synthesize: " + std::to_string(plan.unassigned.size()) +
                                " pulses fall outside every window");

  PhaseHistory ph;
  ph.azimuths = acq.azimuths;
  ph.k = acq.k.transpose().replicate(P, 1);
  ph.samples = MatC::Zero(P, K);

  // Lowest-indexed window containing each pulse.
  std::vector<Index> owner(P, -1);
  for (const auto& win : plan.windows)
    for (Index p : win.pulses)
      if (owner[p] < 0) owner[p] = win.index;

  for (const auto& win : plan.windows) {
    const ComplexImage scene = make_scene(spec, win);
    NufftOperator op(spec.grid, freq_coords(win, ph), nufft);
    const VecC y = op.forward(scene.values);
    Index m = 0;
    for (Index p : win.pulses) {
      if (owner[p] == win.index) ph.samples.row(p) = y.segment(m, K).transpose();
      m += K;
    }
  }

  if (std::isfinite(acq.beta_true)) {
    const Scalar sigma = 1 / std::sqrt(2 * acq.beta_true);
    for (Index p = 0; p < P; ++p) {
      SplitMix64 rng(mix_seed(mix_seed(spec.seed, 0xA5A5A5A5ULL), std::uint64_t(p)));
      for (Index s = 0; s < K; ++s) {
        const Scalar re = sigma * rng.normal();
        const Scalar im = sigma * rng.normal();
        ph.samples(p, s) += Complex(re, im);
      }
    }
  }
  return ph;
}

}  // namespace sar
