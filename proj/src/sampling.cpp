#include "signstab/sampling.hpp"

#include <stdexcept>
#include <string>

namespace signstab {

void Region::validate() const {
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(x[k][0] <= x[k][1]))
      throw std::invalid_argument("region: x" + std::to_string(k + 1) +
                                  " interval has lo > hi");
  }
  if (!(t[0] <= t[1]))
    throw std::invalid_argument("region: time interval has lo > hi");
}

namespace {

std::vector<int> first_primes(int count) {
  std::vector<int> primes;
  int candidate = 2;
  while (static_cast<int>(primes.size()) < count) {
    bool ok = true;
    for (int p : primes) {
      if (p * p > candidate) break;
      if (candidate % p == 0) {
        ok = false;
        break;
      }
    }
    if (ok) primes.push_back(candidate);
    ++candidate;
  }
  return primes;
}

double radical_inverse(std::uint64_t index, int base) {
  double inv_base = 1.0 / base;
  double result = 0.0;
  double frac = inv_base;
  while (index > 0) {
    result += static_cast<double>(index % static_cast<std::uint64_t>(base)) * frac;
    index /= static_cast<std::uint64_t>(base);
    frac *= inv_base;
  }
  return result;
}

}  // namespace

std::vector<SamplePoint> sample_region(const Region& region, int samples,
                                       std::uint64_t seed) {
  region.validate();
  if (samples < 1) throw std::invalid_argument("samples must be >= 1");
  const int d = region.dim();
  const std::vector<int> primes = first_primes(d + 1);

  std::vector<SamplePoint> out;
  out.reserve(static_cast<std::size_t>(samples));
  for (int m = 0; m < samples; ++m) {
    // Index 0 maps to the box origin for every base; skip it.
    std::uint64_t index = seed + static_cast<std::uint64_t>(m) + 1;
    SamplePoint p;
    p.x.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) {
      double u = radical_inverse(index, primes[static_cast<std::size_t>(k)]);
      p.x[static_cast<std::size_t>(k)] =
          region.x[static_cast<std::size_t>(k)][0] +
          u * (region.x[static_cast<std::size_t>(k)][1] -
               region.x[static_cast<std::size_t>(k)][0]);
    }
    double u = radical_inverse(index, primes[static_cast<std::size_t>(d)]);
    p.t = region.t[0] + u * (region.t[1] - region.t[0]);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SamplePoint> region_corners(const Region& region, std::size_t cap) {
  region.validate();
  const int d = region.dim();
  if (d + 1 > 62) return {};
  std::size_t total = std::size_t{1} << (d + 1);
  if (total > cap) return {};

  std::vector<SamplePoint> out;
  out.reserve(total);
  for (std::size_t mask = 0; mask < total; ++mask) {
    SamplePoint p;
    p.x.resize(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k)
      p.x[static_cast<std::size_t>(k)] =
          region.x[static_cast<std::size_t>(k)][(mask >> k) & 1];
    p.t = region.t[(mask >> d) & 1];
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace signstab
