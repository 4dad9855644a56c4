#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace signstab {

/// Axis-aligned box in state space plus a time interval. Verdicts are always
/// relative to such a region.
struct Region {
  std::vector<std::array<double, 2>> x;  // per-variable [lo, hi]
  std::array<double, 2> t{0.0, 0.0};

  int dim() const { return static_cast<int>(x.size()); }
  void validate() const;  // throws std::invalid_argument on lo > hi
};

struct SamplePoint {
  std::vector<double> x;
  double t = 0.0;
};

/// Deterministic low-discrepancy (Halton) points over the region box,
/// including the time axis. The seed offsets the sequence index, so reports
/// are reproducible for a given (samples, seed) pair.
std::vector<SamplePoint> sample_region(const Region& region, int samples,
                                       std::uint64_t seed);

/// All corner points of the region (x-box corners crossed with both time
/// endpoints). Empty when the corner count would exceed `cap`.
std::vector<SamplePoint> region_corners(const Region& region,
                                        std::size_t cap = 4096);

}  // namespace signstab
