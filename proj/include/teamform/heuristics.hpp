#pragma once

#include <cstdint>
#include <vector>

#include "teamform/rng.hpp"
#include "teamform/types.hpp"

namespace teamform {

// Snake draft: the first m agents of the ordering captain the teams and pick
// the remaining agents over s-1 rounds, direction alternating by round, each
// captain taking the unassigned non-captain she values most (tie: lowest
// index). Rejects characteristic-constrained instances.
TeamFormation draft(const Instance& inst, std::uint64_t ordering_seed);
TeamFormation draft_with_ordering(const Instance& inst, const std::vector<int>& ordering);

// One-player-one-pick: captains open teams with their favorite remaining
// non-captain; every later agent joins the open team with the best expected
// fill (current members plus slot count times her mean utility over the
// unassigned pool), then, if a seat stays open, pulls in her favorite
// unassigned agent. Rejects characteristic-constrained instances.
TeamFormation opop(const Instance& inst, std::uint64_t ordering_seed);
TeamFormation opop_with_ordering(const Instance& inst, const std::vector<int>& ordering);

// Agents 0..s-1 in team 0, next s in team 1, and so on. Returned regardless
// of characteristic feasibility; callers needing a feasible witness check.
TeamFormation trivial_formation(const Instance& inst);

// Grows one team from a uniform first member, each addition drawn with
// probability proportional to the utility current members assign it; falls
// back to uniform when all weights vanish. Ignores characteristic quotas.
Coalition sample_affinity_team(const Instance& inst, Sampler& rng);

}  // namespace teamform
