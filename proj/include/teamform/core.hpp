#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "teamform/types.hpp"

namespace teamform {

// u(c,i): total utility agent i derives from coalition c. Requires i in c.
Utility agent_utility_in_coalition(const Instance& inst, int i, const Coalition& c);

// U(c): ordered-pair double sum over the coalition.
Utility coalition_utility(const Instance& inst, const Coalition& c);

// u(t,i): agent i's utility within her team under formation t.
Utility agent_utility_in_formation(const Instance& inst, int i, const TeamFormation& t);

// Ubar_i: best utility agent i can realize in any feasible coalition containing
// her. Without characteristic constraints this is the sum of the s-1 largest
// row entries; with them it is an exact maximum over quota-feasible coalitions.
Utility max_realizable_utility(const Instance& inst, int i);

// r(c,t), or none when some member of c would lose relative to t.
std::optional<Utility> uplift(const Instance& inst, const Coalition& c, const TeamFormation& t);

Utility total_utility(const Instance& inst, const TeamFormation& t);

// alpha * total_utility(t) - (1 - alpha) * r. Rejects alpha outside [0,1].
double objective_value(const Instance& inst, const TeamFormation& t, Utility r, double alpha);

// True when the member list satisfies every characteristic quota (vacuously
// true without constraints). Members need not be sorted.
bool team_char_feasible(const Instance& inst, const std::vector<int>& members);

// Validates team sizes and, when active, characteristic quotas.
void validate_formation(const Instance& inst, const TeamFormation& t);

// Enumerates all (characteristic-feasible) coalitions in lexicographic order.
void for_each_coalition(const Instance& inst, const std::function<void(const Coalition&)>& fn);

// n choose k, capped: returns cap + 1 as soon as the count exceeds cap.
std::uint64_t count_combinations(int n, int k, std::uint64_t cap);

// Number of ways to split n agents into m unlabeled teams of size s, capped.
std::uint64_t count_partitions(int n, int m, int s, std::uint64_t cap);

// Exhaustive maximum-uplift oracle; guard: C(n,s) <= 10^8. Ties broken by
// lexicographically smallest member list; a best uplift of 0 reports none.
UpliftResult brute_force_max_uplift(const Instance& inst, const TeamFormation& t);

// Exhaustive optimum over all feasible formations; guard: partition count
// <= 10^7. Ties broken by lexicographically smallest team_of vector.
std::pair<TeamFormation, double> brute_force_optimum(const Instance& inst, double alpha);

}  // namespace teamform
