#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace sar {

using Scalar = double;
using Complex = std::complex<Scalar>;
using Index = Eigen::Index;

using Vec = Eigen::VectorXd;
using VecC = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using MatC = Eigen::MatrixXcd;

// Uniform Cartesian pixel grid over [-extent, extent]^2. Pixel centers follow
// the DFT-centered convention x(ix) = (ix - nx/2) * dx, so even-sized grids
// have a pixel exactly at the scene origin.
struct SceneGrid {
  int nx = 0;
  int ny = 0;
  Scalar extent = 0;  // scene half-width U, meters

  Index n() const { return Index(nx) * Index(ny); }
  Scalar dx() const { return 2 * extent / nx; }
  Scalar dy() const { return 2 * extent / ny; }
  int cx() const { return nx / 2; }
  int cy() const { return ny / 2; }
  Scalar x(int ix) const { return (ix - cx()) * dx(); }
  Scalar y(int iy) const { return (iy - cy()) * dy(); }
  // Row-major pixel index: rows are constant-y lines.
  Index idx(int ix, int iy) const { return Index(iy) * nx + ix; }

  bool operator==(const SceneGrid& o) const {
    return nx == o.nx && ny == o.ny && extent == o.extent;
  }
};

struct ComplexImage {
  SceneGrid grid;
  VecC values;  // length grid.n(), ordered by grid.idx()
};

struct RealImage {
  SceneGrid grid;
  Vec values;
};

// Chirp parameters used to derive per-sample spatial frequencies
// k_m = (2/c) * (omega + 2 * alpha * (t_m - tau0)).
struct ChirpParams {
  Scalar omega = 0;       // carrier, rad/s
  Scalar alpha = 0;       // chirp rate, rad/s^2
  Scalar tau0 = 0;        // reference fast time, s
  Scalar c = 2.99792458e8;
  Scalar t0 = 0;          // first sample fast time, s
  Scalar dt = 0;          // fast-time step, s
  bool valid = false;
};

// Collected pulses: one azimuth per pulse, a fixed number of spatial-frequency
// samples per pulse. k(p, s) and samples(p, s) are the frequency and complex
// return of sample s in pulse p.
struct PhaseHistory {
  Vec azimuths;   // radians, nondecreasing, length P
  Mat k;          // P x K spatial frequencies, finite and positive
  MatC samples;   // P x K complex returns
  ChirpParams chirp;

  Index pulses() const { return azimuths.size(); }
  Index samples_per_pulse() const { return k.cols(); }
};

// One azimuth window of the aperture: a half-open modular interval
// [start, start + span) and the pulses whose azimuths fall inside it.
struct ApertureWindow {
  int index = 0;
  Scalar start = 0;  // radians
  Scalar span = 0;   // radians
  std::vector<Index> pulses;  // ascending pulse indices

  Scalar center() const;  // mod 2*pi
  bool contains(Scalar azimuth) const;
};

struct AperturePlan {
  std::vector<ApertureWindow> windows;
  Scalar span_deg = 0;
  Scalar overlap_deg = 0;
  std::vector<Index> unassigned;  // pulses outside every window

  Index size() const { return Index(windows.size()); }
};

// Per-sample 2D spatial frequencies of one window, pulse-major order.
struct FreqCoords {
  Vec kx;
  Vec ky;

  Index size() const { return kx.size(); }
};

}  // namespace sar
