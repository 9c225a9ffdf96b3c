#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "teamform/rng.hpp"
#include "teamform/types.hpp"

namespace teamform {

struct GenConfig {
  int n = 0;
  int m = 0;
  int s = 0;
  int u_max = 25;
  std::string scheme = "g1";  // g1, g2, g3, g4
  std::uint64_t seed = 0;
  int q_count = 0;            // 0 (no characteristics) or 3
  std::vector<int> q_min;     // per characteristic; empty -> 1 each
  std::vector<int> q_max;     // per characteristic; empty -> s-1 each

  void validate() const;
};

// Raw utility schemes. All produce a real n x n matrix with zero diagonal;
// ipsative_normalize turns it into the integer instance matrix.

// Common-value: entry (i,j) = (j+1) + noise, noise ~ N(0, n/5), redrawn until
// the entry is positive. Column index is the agent's common worth.
Eigen::MatrixXd gen_raw_g1(const GenConfig& cfg, Sampler& rng);

// Four-level common value: quartile levels 0, n/4, n/2, 3n/4 by column, same
// noise and positivity rule as g1.
Eigen::MatrixXd gen_raw_g2(const GenConfig& cfg, Sampler& rng);
std::vector<double> g2_levels(int n);

// Budget-splitting: each row splits 100 points across the other agents via
// sorted uniform draws on {0..100}; rows sum to exactly 100.
Eigen::MatrixXd gen_raw_g3(const GenConfig& cfg, Sampler& rng);

// Trait-affinity: entry (i,j) = b1_i*[match on trait 1] + b2_i*[match on
// trait 2] + b3_i*delta_{j,3} + N(0,1), with b1,b2 ~ U[-1,2], b3 ~ U[0,2].
Eigen::MatrixXd gen_raw_g4(const GenConfig& cfg, const CharacteristicSet& chars, Sampler& rng);

// Per-row affine rescale of the off-diagonal entries onto [1, u_max] with
// half-up rounding; constant rows fall back to ceil(u_max/2); diagonal 0.
UtilityMatrix ipsative_normalize(const Eigen::MatrixXd& raw, int u_max);

// Binary trait matrix chosen by maximizing random weights w ~ U[-1,1] subject
// to every trivial-formation team holding between q_min and q_max possessors
// of each trait. Throws if the quotas admit no assignment.
CharacteristicSet assign_characteristics(const GenConfig& cfg, Sampler& rng);

// Full pipeline: characteristics (when q_count > 0), raw scheme, ipsative
// normalization. Bit-identical output for identical (cfg, seed).
Instance generate(const GenConfig& cfg);

}  // namespace teamform
