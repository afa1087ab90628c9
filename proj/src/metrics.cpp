#include "sar/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace sar {

namespace {
RealImage db_of_moduli(const SceneGrid& grid, const Vec& mag) {
  const Scalar peak = mag.maxCoeff();
  if (peak <= 0) throw std::invalid_argument("to_db: image is identically zero");
  RealImage out;
  out.grid = grid;
  out.values.resize(mag.size());
  for (Index j = 0; j < mag.size(); ++j) {
    const Scalar db = mag[j] > 0 ? 20 * std::log10(mag[j] / peak) : -100.0;
    out.values[j] = std::clamp(db, -100.0, 0.0);
  }
  return out;
}
}  // namespace

RealImage to_db(const ComplexImage& img) { return db_of_moduli(img.grid, img.values.cwiseAbs()); }

RealImage to_db(const RealImage& img) { return db_of_moduli(img.grid, img.values.cwiseAbs()); }

Scalar region_variance(const ComplexImage& img, const RegionSpec& region) {
  const SceneGrid& g = img.grid;
  if (region.w < 1 || region.h < 1 || Index(region.w) * region.h < 2)
    throw std::invalid_argument("region_variance: region must contain at least 2 pixels");
  if (region.x0 < 0 || region.y0 < 0 || region.x0 + region.w > g.nx ||
      region.y0 + region.h > g.ny)
    throw std::invalid_argument("region_variance: region extends outside the image");

  const Index n = Index(region.w) * region.h;
  Scalar mean = 0;
  for (int iy = region.y0; iy < region.y0 + region.h; ++iy)
    for (int ix = region.x0; ix < region.x0 + region.w; ++ix)
      mean += std::abs(img.values[g.idx(ix, iy)]);
  mean /= Scalar(n);
  Scalar ss = 0;
  for (int iy = region.y0; iy < region.y0 + region.h; ++iy)
    for (int ix = region.x0; ix < region.x0 + region.w; ++ix) {
      const Scalar d = std::abs(img.values[g.idx(ix, iy)]) - mean;
      ss += d * d;
    }
  return ss / Scalar(n - 1);
}

LogHistogram log_histogram(const ComplexImage& img, int bins) {
  if (bins < 1) throw std::invalid_argument("log_histogram: need at least one bin");
  LogHistogram h;
  h.counts = Eigen::VectorXi::Zero(bins);

  Scalar lo = std::numeric_limits<Scalar>::infinity();
  Scalar hi = -std::numeric_limits<Scalar>::infinity();
  for (Index j = 0; j < img.values.size(); ++j) {
    const Scalar m = std::abs(img.values[j]);
    if (m > 0) {
      const Scalar lg = std::log10(m);
      lo = std::min(lo, lg);
      hi = std::max(hi, lg);
    } else {
      ++h.underflow;
    }
  }
  if (!std::isfinite(lo)) {  // every pixel is zero
    lo = -1;
    hi = 0;
  }
  if (lo == hi) {
    lo -= 0.5;
    hi += 0.5;
  }
  h.edges = Vec::LinSpaced(bins + 1, lo, hi);
  const Scalar width = (hi - lo) / bins;
  for (Index j = 0; j < img.values.size(); ++j) {
    const Scalar m = std::abs(img.values[j]);
    if (m <= 0) continue;
    const int b = std::clamp(int((std::log10(m) - lo) / width), 0, bins - 1);
    ++h.counts[b];
  }
  return h;
}

Scalar histogram_mode_log10(const LogHistogram& h) {
  if (h.counts.sum() == 0)
    throw std::invalid_argument("histogram_mode_log10: no nonzero moduli");
  Index best = 0;
  h.counts.maxCoeff(&best);
  return 0.5 * (h.edges[best] + h.edges[best + 1]);
}

std::string timing_report(const std::vector<TimedRun>& runs) {
  std::string out = "method                    seconds  workers\n";
  char line[128];
  for (const auto& r : runs) {
    std::snprintf(line, sizeof line, "%-24s %8.3f  %7d\n", r.label.c_str(), r.seconds,
                  r.workers);
    out += line;
  }
  return out;
}

bool runtimes_ordered(const std::vector<TimedRun>& runs,
                      const std::vector<std::string>& expected_order) {
  Scalar prev = -1;
  for (const auto& label : expected_order) {
    auto it = std::find_if(runs.begin(), runs.end(),
                           [&](const TimedRun& r) { return r.label == label; });
    if (it == runs.end()) return false;
    if (it->seconds <= prev) return false;
    prev = it->seconds;
  }
  return true;
}

}  // namespace sar
