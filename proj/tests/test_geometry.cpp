#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sar/geometry.hpp"
#include "sar/nufft.hpp"
#include "sar/random.hpp"

#include <numbers>

using namespace sar;
constexpr Scalar pi = std::numbers::pi;

namespace {
Vec uniform_azimuths(int n) {
  return Vec::LinSpaced(n, 0, 2 * pi * (n - 1) / Scalar(n));
}
}  // namespace

TEST_CASE("spatial frequencies follow the chirp formula") {
  ChirpParams ch;
  ch.omega = 3;
  ch.alpha = 5;
  ch.tau0 = 0.25;
  ch.c = 4;
  Vec t(1);

  SUBCASE("linear term vanishes at the reference time") {
    t[0] = ch.tau0;
    CHECK(compute_spatial_frequencies(t, ch)[0] == doctest::Approx(2 * ch.omega / ch.c).epsilon(1e-15));
  }
  SUBCASE("direct substitution") {
    ch.omega = 0;
    ch.alpha = ch.c / 4;
    t[0] = ch.tau0 + 1;
    CHECK(compute_spatial_frequencies(t, ch)[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("X-band carrier magnitude") {
    ChirpParams x;
    x.omega = 2 * pi * 9.6e9;
    t[0] = x.tau0;
    const Scalar k = compute_spatial_frequencies(t, x)[0];
    CHECK(k == doctest::Approx(2 * x.omega / x.c).epsilon(1e-15));
    CHECK(k == doctest::Approx(402.4).epsilon(1e-3));
  }
  SUBCASE("non-finite time rejected") {
    t[0] = std::numeric_limits<Scalar>::infinity();
    CHECK_THROWS_AS(compute_spatial_frequencies(t, ch), std::invalid_argument);
  }
}

TEST_CASE("window counts for full circular coverage") {
  const Vec az = uniform_azimuths(360);

  SUBCASE("span 40 overlap 10") {
    const AperturePlan plan = plan_subapertures(az, 40, 10);
    CHECK(plan.size() == 12);
    CHECK(plan.unassigned.empty());
  }
  SUBCASE("span 8 overlap 2") {
    const AperturePlan plan = plan_subapertures(az, 8, 2);
    CHECK(plan.size() == 60);
    CHECK(plan.unassigned.empty());
  }
  SUBCASE("full aperture") {
    const AperturePlan plan = plan_subapertures(az, 360, 0);
    REQUIRE(plan.size() == 1);
    CHECK(plan.windows[0].pulses.size() == 360);
    CHECK(plan.unassigned.empty());
  }
}

TEST_CASE("every pulse lands in some window when windows overlap") {
  const Vec az = uniform_azimuths(97);
  const AperturePlan plan = plan_subapertures(az, 40, 10);
  std::vector<bool> seen(97, false);
  for (const auto& w : plan.windows)
    for (Index p : w.pulses) seen[size_t(p)] = true;
  for (bool s : seen) CHECK(s);
  CHECK(plan.unassigned.empty());
}

TEST_CASE("plan validation") {
  const Vec az = uniform_azimuths(36);
  CHECK_THROWS_AS(plan_subapertures(Vec(), 40, 10), std::invalid_argument);
  CHECK_THROWS_AS(plan_subapertures(az, 40, 40), std::invalid_argument);
  CHECK_THROWS_AS(plan_subapertures(az, 40, 50), std::invalid_argument);
  CHECK_THROWS_AS(plan_subapertures(az, 40, -1), std::invalid_argument);
  CHECK_THROWS_AS(plan_subapertures(az, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(plan_subapertures(az, 361, 0), std::invalid_argument);
  Vec dec(2);
  dec << 1.0, 0.5;
  CHECK_THROWS_AS(plan_subapertures(dec, 40, 10), std::invalid_argument);
}

TEST_CASE("a window capturing no pulses is an error") {
  Vec az(2);
  az << 0, 100 * pi / 180;  // gap leaves the middle windows empty
  CHECK_THROWS_AS(plan_subapertures(az, 40, 10), std::invalid_argument);
}

TEST_CASE("pulses outside every window are reported") {
  Vec az(4);
  az << 0, 30 * pi / 180, 60 * pi / 180, 90 * pi / 180;
  // coverage 90, step 30: windows [0,30) [30,60) [60,90); 90 falls outside.
  const AperturePlan plan = plan_subapertures(az, 30, 0);
  REQUIRE(plan.size() == 3);
  REQUIRE(plan.unassigned.size() == 1);
  CHECK(plan.unassigned[0] == 3);
  CHECK(plan.windows[0].pulses == std::vector<Index>{0});
  CHECK(plan.windows[1].pulses == std::vector<Index>{1});
  CHECK(plan.windows[2].pulses == std::vector<Index>{2});
}

TEST_CASE("window membership wraps at 2 pi") {
  ApertureWindow w;
  w.start = 350 * pi / 180;
  w.span = 20 * pi / 180;
  CHECK(w.contains(355 * pi / 180));
  CHECK(w.contains(5 * pi / 180));
  CHECK(w.contains(350 * pi / 180));  // half-open: start included
  CHECK_FALSE(w.contains(10 * pi / 180));
  CHECK_FALSE(w.contains(15 * pi / 180));
  CHECK_FALSE(w.contains(345 * pi / 180));
  // 350 + 10 degrees wraps to the origin; fp puts it a hair on either side
  const Scalar c = w.center();
  CHECK(std::min(c, 2 * pi - c) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("frequency coordinates rotate k by the pulse azimuth") {
  PhaseHistory ph;
  ph.azimuths.resize(3);
  ph.azimuths << 0, pi / 4, pi / 2;
  ph.k.resize(3, 1);
  ph.k << 5, std::sqrt(2.0), 5;
  ph.samples = MatC::Zero(3, 1);

  ApertureWindow w;
  w.span = 2 * pi;
  w.pulses = {0, 1, 2};
  const FreqCoords fc = freq_coords(w, ph);
  REQUIRE(fc.size() == 3);
  CHECK(fc.kx[0] == doctest::Approx(5).epsilon(1e-12));
  CHECK(fc.ky[0] == doctest::Approx(0).epsilon(1e-12));
  CHECK(fc.kx[1] == doctest::Approx(1).epsilon(1e-12));
  CHECK(fc.ky[1] == doctest::Approx(1).epsilon(1e-12));
  CHECK(std::abs(fc.kx[2]) < 1e-12);
  CHECK(fc.ky[2] == doctest::Approx(5).epsilon(1e-12));
}

TEST_CASE("frequency coordinates preserve the radial norm") {
  SplitMix64 rng(42);
  PhaseHistory ph;
  const Index P = 20, K = 7;
  ph.azimuths = Vec::NullaryExpr(P, [&](Index) { return rng.uniform() * 2 * pi; });
  std::sort(ph.azimuths.begin(), ph.azimuths.end());
  ph.k = Mat::NullaryExpr(P, K, [&](Index, Index) { return 1 + rng.uniform() * 10; });
  ph.samples = MatC::Zero(P, K);

  ApertureWindow w;
  w.span = 2 * pi;
  for (Index p = 0; p < P; ++p) w.pulses.push_back(p);
  const FreqCoords fc = freq_coords(w, ph);
  Index m = 0;
  for (Index p = 0; p < P; ++p)
    for (Index s = 0; s < K; ++s, ++m) {
      const Scalar r2 = fc.kx[m] * fc.kx[m] + fc.ky[m] * fc.ky[m];
      CHECK(r2 == doctest::Approx(ph.k(p, s) * ph.k(p, s)).epsilon(1e-12));
    }
}

TEST_CASE("window data concatenates pulse rows in order") {
  PhaseHistory ph;
  ph.azimuths = Vec::Zero(3);
  ph.k = Mat::Ones(3, 2);
  ph.samples.resize(3, 2);
  ph.samples << Complex(1, 0), Complex(2, 0), Complex(3, 0), Complex(4, 0), Complex(5, 0),
      Complex(6, 0);
  ApertureWindow w;
  w.pulses = {2, 0};
  const VecC d = window_data(w, ph);
  REQUIRE(d.size() == 4);
  CHECK(d[0] == Complex(5, 0));
  CHECK(d[1] == Complex(6, 0));
  CHECK(d[2] == Complex(1, 0));
  CHECK(d[3] == Complex(2, 0));
}

TEST_CASE("uniform lattice rows are orthogonal for any shift") {
  const SceneGrid grid{4, 4, 1.0};
  for (const auto shift : {std::pair<Scalar, Scalar>{0, 0}, {0.5, 0.25}, {1.0 / 3, 2.0 / 3}}) {
    const FreqCoords fc = uniform_freq_coords(grid, shift.first, shift.second);
    REQUIRE(fc.size() == grid.n());
    const MatC F = dense_forward_matrix(grid, fc);
    const MatC gram = F.adjoint() * F;
    const MatC err = gram - Scalar(grid.n()) * MatC::Identity(grid.n(), grid.n());
    CHECK(err.norm() < 1e-10 * gram.norm());
  }
}
