#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace teamform {

using Utility = std::int64_t;
using UtilityMatrix = Eigen::Matrix<Utility, Eigen::Dynamic, Eigen::Dynamic>;

// Per-team quota constraints on binary agent attributes.
struct CharacteristicSet {
  int q_count = 0;
  Eigen::MatrixXi delta;       // n x q_count, delta(i,q) = 1 when agent i has attribute q
  std::vector<int> q_min;      // per-attribute minimum possessors per team
  std::vector<int> q_max;      // per-attribute maximum possessors per team
};

// A team formation problem: n agents, m teams of exactly s members, integer
// pairwise utilities u(i,j) with zero diagonal.
struct Instance {
  int n = 0;
  int m = 0;
  int s = 0;
  Utility u_max = 0;
  std::string scheme = "custom";  // G1|G2|G3|G4|custom
  std::uint64_t seed = 0;
  UtilityMatrix u;
  std::optional<CharacteristicSet> chars;

  // Throws std::invalid_argument when any structural invariant is broken.
  void validate() const;

  bool has_chars() const { return chars.has_value() && chars->q_count > 0; }
};

// A size-s subset of agents in canonical (strictly ascending) order.
struct Coalition {
  std::vector<int> members;

  bool operator==(const Coalition&) const = default;
  auto operator<=>(const Coalition&) const = default;
  bool contains(int agent) const;
};

struct CoalitionHash {
  std::size_t operator()(const Coalition& c) const noexcept;
};

// Assignment of every agent to one of m equal-size teams.
struct TeamFormation {
  std::vector<int> team_of;  // agent -> team index in [0, m)

  bool operator==(const TeamFormation&) const = default;
  auto operator<=>(const TeamFormation&) const = default;

  // Member lists per team, each sorted ascending.
  std::vector<std::vector<int>> teams(int m) const;
  // Relabels teams in order of their smallest member.
  TeamFormation canonical(int m) const;
};

struct UpliftResult {
  std::optional<Coalition> coalition;  // none when the formation is stable
  Utility uplift = 0;
};

}  // namespace teamform
