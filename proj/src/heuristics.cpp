#include "teamform/heuristics.hpp"

#include <algorithm>
#include <stdexcept>

#include "teamform/core.hpp"

namespace teamform {

namespace {

void reject_chars(const Instance& inst, const char* mech) {
  if (inst.has_chars()) {
    throw std::invalid_argument(std::string(mech) +
                                " does not handle characteristic constraints");
  }
}

void check_ordering(const Instance& inst, const std::vector<int>& ordering) {
  if ((int)ordering.size() != inst.n) throw std::invalid_argument("ordering size mismatch");
  std::vector<char> seen(inst.n, 0);
  for (int a : ordering) {
    if (a < 0 || a >= inst.n || seen[a]) throw std::invalid_argument("ordering not a permutation");
    seen[a] = 1;
  }
}

// Highest own-utility unassigned candidate, lowest agent index on ties.
int favorite(const Instance& inst, int who, const std::vector<char>& assigned) {
  int best = -1;
  Utility best_u = -1;
  for (int j = 0; j < inst.n; ++j) {
    if (assigned[j] || j == who) continue;
    if (inst.u(who, j) > best_u) {
      best_u = inst.u(who, j);
      best = j;
    }
  }
  return best;
}

}  // namespace

TeamFormation draft_with_ordering(const Instance& inst, const std::vector<int>& ordering) {
  reject_chars(inst, "draft");
  check_ordering(inst, ordering);

  TeamFormation t;
  t.team_of.assign(inst.n, -1);
  std::vector<char> assigned(inst.n, 0);
  for (int k = 0; k < inst.m; ++k) {
    t.team_of[ordering[k]] = k;
    assigned[ordering[k]] = 1;
  }
  for (int round = 1; round < inst.s; ++round) {
    for (int pos = 0; pos < inst.m; ++pos) {
      int k = round % 2 == 1 ? pos : inst.m - 1 - pos;  // snake: odd rounds forward
      int captain = ordering[k];
      int pick = favorite(inst, captain, assigned);
      t.team_of[pick] = k;
      assigned[pick] = 1;
    }
  }
  return t;
}

TeamFormation draft(const Instance& inst, std::uint64_t ordering_seed) {
  Mt64Sampler rng(ordering_seed);
  return draft_with_ordering(inst, random_permutation(inst.n, rng));
}

TeamFormation opop_with_ordering(const Instance& inst, const std::vector<int>& ordering) {
  reject_chars(inst, "opop");
  check_ordering(inst, ordering);

  TeamFormation t;
  t.team_of.assign(inst.n, -1);
  std::vector<char> assigned(inst.n, 0);
  std::vector<std::vector<int>> teams(inst.m);

  auto place = [&](int agent, int team) {
    t.team_of[agent] = team;
    assigned[agent] = 1;
    teams[team].push_back(agent);
  };

  for (int k = 0; k < inst.m; ++k) place(ordering[k], k);
  for (int k = 0; k < inst.m; ++k) {
    int pick = favorite(inst, ordering[k], assigned);
    if (pick >= 0) place(pick, k);
  }

  for (int pos = inst.m; pos < inst.n; ++pos) {
    int agent = ordering[pos];
    if (assigned[agent]) continue;  // already pulled in by someone

    int unassigned_others = 0;
    double pool_sum = 0.0;
    for (int j = 0; j < inst.n; ++j) {
      if (!assigned[j] && j != agent) {
        ++unassigned_others;
        pool_sum += (double)inst.u(agent, j);
      }
    }
    double pool_mean = unassigned_others > 0 ? pool_sum / unassigned_others : 0.0;

    int best_team = -1;
    double best_eu = 0.0;
    for (int k = 0; k < inst.m; ++k) {
      if ((int)teams[k].size() >= inst.s) continue;
      double current = 0.0;
      for (int j : teams[k]) current += (double)inst.u(agent, j);
      int open_after = inst.s - (int)teams[k].size() - 1;
      double eu = current + open_after * pool_mean;
      if (best_team < 0 || eu > best_eu + 1e-12) {  // tie keeps the lowest team index
        best_team = k;
        best_eu = eu;
      }
    }
    place(agent, best_team);

    if ((int)teams[best_team].size() < inst.s) {
      int pick = favorite(inst, agent, assigned);
      if (pick >= 0) place(pick, best_team);
    }
  }
  return t;
}

TeamFormation opop(const Instance& inst, std::uint64_t ordering_seed) {
  Mt64Sampler rng(ordering_seed);
  return opop_with_ordering(inst, random_permutation(inst.n, rng));
}

TeamFormation trivial_formation(const Instance& inst) {
  TeamFormation t;
  t.team_of.resize(inst.n);
  for (int i = 0; i < inst.n; ++i) t.team_of[i] = i / inst.s;
  return t;
}

Coalition sample_affinity_team(const Instance& inst, Sampler& rng) {
  Coalition g;
  std::vector<char> in(inst.n, 0);
  int first = (int)rng.uniform_int(0, inst.n - 1);
  g.members.push_back(first);
  in[first] = 1;

  while ((int)g.members.size() < inst.s) {
    double total = 0.0;
    std::vector<double> w(inst.n, 0.0);
    for (int j = 0; j < inst.n; ++j) {
      if (in[j]) continue;
      for (int i : g.members) w[j] += (double)inst.u(i, j);
      total += w[j];
    }
    int chosen = -1;
    if (total > 0.0) {
      double ticket = rng.uniform_real(0.0, total);
      double acc = 0.0;
      for (int j = 0; j < inst.n; ++j) {
        if (in[j]) continue;
        acc += w[j];
        if (ticket < acc) {
          chosen = j;
          break;
        }
      }
      if (chosen < 0) {  // ticket landed on the boundary; take the last candidate
        for (int j = inst.n - 1; j >= 0; --j) {
          if (!in[j]) {
            chosen = j;
            break;
          }
        }
      }
    } else {
      std::vector<int> rest;
      for (int j = 0; j < inst.n; ++j) {
        if (!in[j]) rest.push_back(j);
      }
      chosen = rest[(std::size_t)rng.uniform_int(0, (std::int64_t)rest.size() - 1)];
    }
    g.members.push_back(chosen);
    in[chosen] = 1;
  }
  std::sort(g.members.begin(), g.members.end());
  return g;
}

}  // namespace teamform
