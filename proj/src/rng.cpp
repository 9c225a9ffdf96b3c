#include "teamform/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace teamform {

double Mt64Sampler::unit() {
  return (double)(gen_() >> 11) * 0x1.0p-53;
}

double Mt64Sampler::uniform_real(double lo, double hi) {
  return lo + (hi - lo) * unit();
}

std::int64_t Mt64Sampler::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (lo > hi) throw std::invalid_argument("uniform_int: empty range");
  const std::uint64_t range = (std::uint64_t)(hi - lo) + 1;
  if (range == 0) return (std::int64_t)gen_();  // full 64-bit span
  // Rejection below the largest multiple of range keeps the draw unbiased.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
  std::uint64_t x;
  do {
    x = gen_();
  } while (x >= limit);
  return lo + (std::int64_t)(x % range);
}

double Mt64Sampler::normal(double mean, double stddev) {
  if (have_spare_) {
    have_spare_ = false;
    return mean + stddev * spare_;
  }
  // Box-Muller; 1 - unit() keeps the log argument strictly positive.
  const double u1 = 1.0 - unit();
  const double u2 = unit();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return mean + stddev * radius * std::cos(angle);
}

std::vector<int> random_permutation(int n, Sampler& rng) {
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i) {
    const int j = (int)rng.uniform_int(0, i);
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

}  // namespace teamform
