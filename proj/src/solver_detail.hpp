#pragma once

#include <optional>
#include <vector>

#include "teamform/core.hpp"
#include "teamform/solvers.hpp"
#include "teamform/types.hpp"

namespace teamform::detail {

// True objective of a formation: r re-derived exhaustively, never trusted
// from a relaxation.
struct ScoredFormation {
  TeamFormation formation;
  double objective = 0.0;
  Utility r = 0;
  std::optional<Coalition> worst;
};

ScoredFormation score_true(const Instance& inst, const TeamFormation& t, double alpha);

void install_incumbent(SolveReport& rep, const ScoredFormation& s);

// Best of the two constructive heuristics at this alpha: a warm incumbent
// that lets pruning start before the first integral node is reached. None on
// characteristic-constrained instances, where the heuristics do not apply and
// an unconstrained score would be an unsound bound.
std::optional<ScoredFormation> heuristic_seed(const Instance& inst, const SolveConfig& cfg);

// Lattice step of the objective for integer utilities at this alpha (p/q
// rationals up to q=1000), or 0 when alpha has no small rational form.
// Bounds snap onto the lattice before pruning.
double objective_granularity(double alpha);

// Reads a team selection out of master-column values; none when the rounded
// selection is not an exact partition.
std::optional<TeamFormation> partition_from_columns(const Instance& inst,
                                                    const std::vector<Coalition>& pool,
                                                    const std::vector<int>& t_var,
                                                    const std::vector<double>& x);

}  // namespace teamform::detail
