#pragma once

#include <cstdint>
#include <limits>
#include <optional>

#include "teamform/linopt.hpp"
#include "teamform/oracle.hpp"
#include "teamform/types.hpp"

namespace teamform {

struct SolveConfig {
  double alpha = 1.0;
  double time_budget_secs = 1800.0;
  std::int64_t node_budget = std::numeric_limits<std::int64_t>::max();
  OracleBackend backend = OracleBackend::Auto;
  std::uint64_t seed = 0;              // column-pool sampling
  std::uint64_t max_coalitions = 1000000;  // full-enumeration memory guard

  void validate() const;  // alpha in [0,1], budgets positive
};

enum class SolveStatus { Optimal, Budget, Infeasible };

struct SolveCounters {
  std::int64_t nodes = 0;
  std::int64_t columns = 0;
  std::int64_t cuts = 0;
  std::int64_t lp_solves = 0;
};

// Shared result contract of the exact solvers. lower is the incumbent's true
// objective (its r re-verified exhaustively); upper the best proven
// relaxation bound, +inf when even the root is unresolved.
struct SolveReport {
  SolveStatus status = SolveStatus::Budget;
  std::optional<TeamFormation> incumbent;
  double lower = -kInfinity;
  double upper = kInfinity;
  double gap = kInfinity;  // upper - lower
  Utility incumbent_r = 0;
  std::optional<Coalition> worst_coalition;  // achieves incumbent_r
  SolveCounters counters;
  double wall_secs = 0.0;

  // Column-generation solver only: certified root relaxation value and
  // whether exhaustive pricing/separation re-confirmed it.
  double root_bound = kInfinity;
  bool root_certified = false;
};

// Full coalition enumeration: one column per feasible team, every uplift row
// materialized up front, solved as a single integer program.
SolveReport solve_exp(const Instance& inst, const SolveConfig& cfg);

// Assignment formulation with lazy uplift rows separated at integer nodes.
SolveReport solve_bc(const Instance& inst, const SolveConfig& cfg);

// Branch-cut-and-price on the enumeration master: columns priced on demand,
// uplift rows separated fractionally, both certified before a node bound.
SolveReport solve_bcp(const Instance& inst, const SolveConfig& cfg);

// Exhaustive reference solver sharing the report contract.
SolveReport solve_brute(const Instance& inst, const SolveConfig& cfg);

// Scores a fixed formation (heuristic output) into the report shape: lower
// is its true objective, no bound is claimed.
SolveReport score_formation(const Instance& inst, const TeamFormation& t, double alpha);

}  // namespace teamform
