#pragma once

#include <random>
#include <vector>

#include "teamform/rng.hpp"
#include "teamform/types.hpp"

namespace teamform::testing {

// Replays scripted draws, cycling when a script runs out; lets tests walk a
// randomized algorithm down one exact path.
struct ScriptSampler : Sampler {
  std::vector<double> reals{0.0};
  std::vector<std::int64_t> ints{0};
  std::size_t real_pos = 0, int_pos = 0;

  double uniform_real(double, double) override { return reals[real_pos++ % reals.size()]; }
  std::int64_t uniform_int(std::int64_t, std::int64_t) override {
    return ints[int_pos++ % ints.size()];
  }
  double normal(double mean, double) override { return mean; }
};

// Four agents forming two mutual-favorite pairs (0,1) and (2,3); every other
// off-diagonal utility is 1. The stable optimum is {{0,1},{2,3}}.
inline Instance make_two_pair_instance() {
  Instance inst;
  inst.n = 4;
  inst.m = 2;
  inst.s = 2;
  inst.u_max = 10;
  inst.u = UtilityMatrix::Constant(4, 4, 1);
  inst.u.diagonal().setZero();
  inst.u(0, 1) = inst.u(1, 0) = 10;
  inst.u(2, 3) = inst.u(3, 2) = 10;
  return inst;
}

inline TeamFormation formation_of(const std::vector<std::vector<int>>& teams, int n) {
  TeamFormation t;
  t.team_of.assign(n, -1);
  for (int k = 0; k < (int)teams.size(); ++k)
    for (int i : teams[k]) t.team_of[i] = k;
  return t;
}

inline Coalition coalition_of(std::vector<int> members) {
  Coalition c;
  c.members = std::move(members);
  return c;
}

// Arbitrary dense instance for property sweeps; utilities in [0, u_max].
inline Instance make_random_instance(int m, int s, Utility u_max, std::uint64_t seed) {
  Instance inst;
  inst.m = m;
  inst.s = s;
  inst.n = m * s;
  inst.u_max = u_max;
  inst.seed = seed;
  std::mt19937_64 rng(seed);
  inst.u = UtilityMatrix::Zero(inst.n, inst.n);
  for (int i = 0; i < inst.n; ++i)
    for (int j = 0; j < inst.n; ++j)
      if (i != j) inst.u(i, j) = (Utility)(rng() % (std::uint64_t)(u_max + 1));
  return inst;
}

}  // namespace teamform::testing
