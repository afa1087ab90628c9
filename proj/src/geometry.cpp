#include "sar/geometry.hpp"

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
}  // namespace

Scalar ApertureWindow::center() const { return wrap_2pi(start + span / 2); }

bool ApertureWindow::contains(Scalar azimuth) const {
  return wrap_2pi(azimuth - start) < span;
}

Vec compute_spatial_frequencies(const Vec& t, const ChirpParams& chirp) {
  if (chirp.c <= 0) throw std::invalid_argument("compute_spatial_frequencies: c must be positive");
  if (!t.allFinite())
    throw std::invalid_argument("compute_spatial_frequencies: time samples must be finite");
  return (2.0 / chirp.c) * (chirp.omega + 2.0 * chirp.alpha * (t.array() - chirp.tau0));
}

AperturePlan plan_subapertures(const Vec& azimuths, Scalar span_deg, Scalar overlap_deg) {
  if (azimuths.size() == 0) throw std::invalid_argument("plan_subapertures: no pulses");
  if (!(span_deg > 0 && span_deg <= 360))
    throw std::invalid_argument("plan_subapertures: span_deg must be in (0, 360]");
  if (!(overlap_deg >= 0 && overlap_deg < span_deg))
    throw std::invalid_argument("plan_subapertures: overlap_deg must be in [0, span_deg)");
  for (Index p = 1; p < azimuths.size(); ++p)
    if (azimuths[p] < azimuths[p - 1])
      throw std::invalid_argument("plan_subapertures: azimuths must be nondecreasing");

  const Scalar step_deg = span_deg - overlap_deg;
  const Scalar min_az = azimuths.minCoeff();
  const Scalar coverage_deg = (azimuths.maxCoeff() - min_az) * 180 / std::numbers::pi;
  const Index L = std::max<Index>(1, Index(std::ceil(coverage_deg / step_deg)));

  AperturePlan plan;
  plan.span_deg = span_deg;
  plan.overlap_deg = overlap_deg;
  plan.windows.resize(L);
  for (Index w = 0; w < L; ++w) {
    ApertureWindow& win = plan.windows[w];
    win.index = int(w);
    win.start = wrap_2pi(min_az + w * step_deg * std::numbers::pi / 180);
    win.span = span_deg * std::numbers::pi / 180;
  }
  for (Index p = 0; p < azimuths.size(); ++p) {
    bool assigned = false;
    for (auto& win : plan.windows) {
      if (win.contains(azimuths[p])) {
        win.pulses.push_back(p);
        assigned = true;
      }
    }
    if (!assigned) plan.unassigned.push_back(p);
  }
  for (const auto& win : plan.windows)
    if (win.pulses.empty())
      throw std::invalid_argument("plan_subapertures: window " + std::to_string(win.index) +
                                  " captures no pulses");
  return plan;
}

FreqCoords freq_coords(const ApertureWindow& window, const PhaseHistory& ph) {
  const Index K = ph.samples_per_pulse();
  FreqCoords fc;
  fc.kx.resize(Index(window.pulses.size()) * K);
  fc.ky.resize(fc.kx.size());
  Index m = 0;
  for (Index p : window.pulses) {
    const Scalar cth = std::cos(ph.azimuths[p]);
    const Scalar sth = std::sin(ph.azimuths[p]);
    for (Index s = 0; s < K; ++s, ++m) {
      fc.kx[m] = ph.k(p, s) * cth;
      fc.ky[m] = ph.k(p, s) * sth;
    }
  }
  return fc;
}

VecC window_data(const ApertureWindow& window, const PhaseHistory& ph) {
  const Index K = ph.samples_per_pulse();
  VecC data(Index(window.pulses.size()) * K);
  Index m = 0;
  for (Index p : window.pulses) {
    data.segment(m, K) = ph.samples.row(p).transpose();
    m += K;
  }
  return data;
}

FreqCoords uniform_freq_coords(const SceneGrid& grid, Scalar shift_x, Scalar shift_y) {
  FreqCoords fc;
  fc.kx.resize(grid.n());
  fc.ky.resize(grid.n());
  Index m = 0;
  for (int iy = 0; iy < grid.ny; ++iy) {
    const Scalar xy = kTwoPi * (iy - grid.cy() + shift_y) / grid.ny;
    for (int ix = 0; ix < grid.nx; ++ix, ++m) {
      fc.kx[m] = kTwoPi * (ix - grid.cx() + shift_x) / grid.nx / grid.dx();
      fc.ky[m] = xy / grid.dy();
    }
  }
  return fc;
}

}  // namespace sar
