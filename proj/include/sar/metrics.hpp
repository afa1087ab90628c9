#pragma once

#include "sar/types.hpp"

#include <string>
#include <vector>

namespace sar {

// Pixel rectangle, origin at (x0, y0), w x h pixels.
struct RegionSpec {
  int x0 = 0;
  int y0 = 0;
  int w = 0;
  int h = 0;
};

// 20 log10(|f| / max |f|), clipped to [-100, 0]. All-zero input is an error.
RealImage to_db(const ComplexImage& img);
RealImage to_db(const RealImage& img);

// Unbiased sample variance of |f| over the region; needs at least 2 pixels.
Scalar region_variance(const ComplexImage& img, const RegionSpec& region);

struct LogHistogram {
  Vec edges;                   // bins + 1 ascending log10 edges
  Eigen::VectorXi counts;      // per-bin pixel counts
  Index underflow = 0;         // exactly-zero moduli
};

// Histogram of log10 |f| over equal-width bins spanning the nonzero moduli.
LogHistogram log_histogram(const ComplexImage& img, int bins);

// Center of the most-populated bin; ties keep the lowest bin.
Scalar histogram_mode_log10(const LogHistogram& h);

struct TimedRun {
  std::string label;
  Scalar seconds = 0;
  int workers = 1;
};

// Fixed-width table of labeled wall-clock timings.
std::string timing_report(const std::vector<TimedRun>& runs);

// True when the named runs appear with strictly increasing seconds.
bool runtimes_ordered(const std::vector<TimedRun>& runs,
                      const std::vector<std::string>& expected_order);

}  // namespace sar
