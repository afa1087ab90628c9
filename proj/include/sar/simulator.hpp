#pragma once

#include "sar/nufft.hpp"
#include "sar/types.hpp"

#include <cstdint>
#include <vector>

namespace sar {

// Point scatterer at a pixel, optionally visible only while the aperture
// looks from inside [theta_a, theta_b), a half-open modular arc.
struct Scatterer {
  int ix = 0;
  int iy = 0;
  Complex amplitude{1, 0};
  bool full_view = true;
  Scalar theta_a = 0;  // radians
  Scalar theta_b = 0;
};

struct SceneSpec {
  SceneGrid grid;
  std::vector<Scatterer> scatterers;
  // Background speckle precision: real and imaginary parts are drawn with
  // variance 1/alpha_bg each, matching the prior density exp(-alpha |f|^2 / 2).
  // 0 disables the background.
  Scalar alpha_bg = 0;
  std::uint64_t seed = 0;
};

struct AcquisitionSpec {
  Vec azimuths;  // radians, nondecreasing
  Vec k;         // spatial frequencies shared by every pulse, positive
  // Additive complex noise with per-component variance 1/beta_true (variance
  // 1/(2 beta_true) per part); infinity means noiseless.
  Scalar beta_true = std::numeric_limits<Scalar>::infinity();
};

// Window-l scene: fresh speckle realization (deterministic in seed and window
// index) plus every scatterer whose visibility arc intersects the window span.
ComplexImage make_scene(const SceneSpec& spec, const ApertureWindow& window);

// Phase history with data = forward(scene(window)) + noise. A pulse shared by
// overlapping windows is generated once, from the lowest-indexed window that
// contains it. Noise is drawn per pulse, independent of the plan.
PhaseHistory synthesize(const SceneSpec& spec, const AcquisitionSpec& acq,
                        const AperturePlan& plan, const NufftSettings& nufft = {});

}  // namespace sar
