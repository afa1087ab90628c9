#pragma once

#include "sar/types.hpp"

namespace sar {

// Spatial frequency of each fast-time sample, k_m = (2/c)(omega + 2 alpha (t_m - tau0)).
Vec compute_spatial_frequencies(const Vec& t, const ChirpParams& chirp);

// Groups pulses into L overlapping azimuth windows of width span_deg advancing
// by span_deg - overlap_deg. Windows are half-open modular intervals; the last
// one is truncated to the measured coverage. Throws if a window captures no
// pulses; pulses outside every window are reported in the plan.
AperturePlan plan_subapertures(const Vec& azimuths, Scalar span_deg, Scalar overlap_deg);

// Per-sample (kx, ky) = (k cos(theta), k sin(theta)) for one window,
// concatenated pulse-major in ascending pulse order.
FreqCoords freq_coords(const ApertureWindow& window, const PhaseHistory& ph);

// The window's measurement vector, concatenated in the same pulse-major order
// as freq_coords.
VecC window_data(const ApertureWindow& window, const PhaseHistory& ph);

// The full uniform frequency lattice of a grid, optionally shifted by a
// fraction of a frequency cell. Rows of the induced forward matrix are
// mutually orthogonal for any shift, which makes exactly unitary sampling
// available to tests.
FreqCoords uniform_freq_coords(const SceneGrid& grid, Scalar shift_x = 0, Scalar shift_y = 0);

}  // namespace sar
