#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace teamform {

// Draw interface the generators and samplers go through; tests substitute
// stub implementations to force specific noise values.
class Sampler {
 public:
  virtual ~Sampler() = default;
  virtual double uniform_real(double lo, double hi) = 0;          // [lo, hi)
  virtual std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) = 0;  // [lo, hi]
  virtual double normal(double mean, double stddev) = 0;
};

// mt19937_64-backed sampler. The distribution algorithms are fixed here
// (rejection sampling for integers, 53-bit scaling for reals, Box-Muller for
// normals) instead of delegating to <random> distributions, whose outputs
// differ across standard libraries; mt19937_64's raw stream is portable.
class Mt64Sampler : public Sampler {
 public:
  explicit Mt64Sampler(std::uint64_t seed) : gen_(seed) {}

  double uniform_real(double lo, double hi) override;
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) override;
  double normal(double mean, double stddev) override;

 private:
  double unit();  // [0, 1), 53-bit resolution

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates shuffle of 0..n-1 driven by the sampler.
std::vector<int> random_permutation(int n, Sampler& rng);

}  // namespace teamform
