#include "teamform/core.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace teamform {

namespace {

void check(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Visits all k-subsets of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  if (k == 0) {
    std::vector<int> empty;
    fn(empty);
    return;
  }
  if (k > n) return;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int p = k - 1;
    while (p >= 0 && idx[p] == n - k + p) --p;
    if (p < 0) break;
    ++idx[p];
    for (int q = p + 1; q < k; ++q) idx[q] = idx[q - 1] + 1;
  }
}

}  // namespace

void Instance::validate() const {
  check(m >= 1 && s >= 1, "instance: m >= 1 and s >= 1 required");
  check(n == m * s, "instance: n must equal m * s");
  check(u.rows() == n && u.cols() == n, "instance: u must be n x n");
  check(u_max >= 0, "instance: u_max must be nonnegative");
  for (int i = 0; i < n; ++i) {
    check(u(i, i) == 0, "instance: diagonal utilities must be 0");
    for (int j = 0; j < n; ++j) {
      check(u(i, j) >= 0 && u(i, j) <= u_max, "instance: utilities must lie in [0, u_max]");
    }
  }
  if (chars) {
    const CharacteristicSet& cs = *chars;
    check(cs.q_count >= 0, "chars: q_count must be nonnegative");
    check(cs.delta.rows() == n && cs.delta.cols() == cs.q_count, "chars: delta must be n x q_count");
    check((int)cs.q_min.size() == cs.q_count && (int)cs.q_max.size() == cs.q_count,
          "chars: quota vectors must have q_count entries");
    for (int q = 0; q < cs.q_count; ++q) {
      check(0 <= cs.q_min[q] && cs.q_min[q] <= cs.q_max[q] && cs.q_max[q] <= s,
            "chars: need 0 <= q_min <= q_max <= s");
    }
    for (int i = 0; i < n; ++i)
      for (int q = 0; q < cs.q_count; ++q)
        check(cs.delta(i, q) == 0 || cs.delta(i, q) == 1, "chars: delta entries must be 0/1");
  }
}

bool Coalition::contains(int agent) const {
  return std::binary_search(members.begin(), members.end(), agent);
}

std::size_t CoalitionHash::operator()(const Coalition& c) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (int v : c.members) {
    h ^= (std::size_t)v;
    h *= 1099511628211ull;
  }
  return h;
}

std::vector<std::vector<int>> TeamFormation::teams(int m) const {
  std::vector<std::vector<int>> out(m);
  for (int i = 0; i < (int)team_of.size(); ++i) out[team_of[i]].push_back(i);
  return out;
}

TeamFormation TeamFormation::canonical(int m) const {
  std::vector<int> relabel(m, -1);
  int next = 0;
  for (int i = 0; i < (int)team_of.size(); ++i) {
    if (relabel[team_of[i]] < 0) relabel[team_of[i]] = next++;
  }
  TeamFormation out;
  out.team_of.resize(team_of.size());
  for (int i = 0; i < (int)team_of.size(); ++i) out.team_of[i] = relabel[team_of[i]];
  return out;
}

Utility agent_utility_in_coalition(const Instance& inst, int i, const Coalition& c) {
  check(c.contains(i), "agent_utility_in_coalition: agent must belong to the coalition");
  Utility sum = 0;
  for (int j : c.members) sum += inst.u(i, j);
  return sum;
}

Utility coalition_utility(const Instance& inst, const Coalition& c) {
  Utility sum = 0;
  for (int i : c.members)
    for (int j : c.members) sum += inst.u(i, j);
  return sum;
}

Utility agent_utility_in_formation(const Instance& inst, int i, const TeamFormation& t) {
  Utility sum = 0;
  const int team = t.team_of[i];
  for (int j = 0; j < inst.n; ++j)
    if (t.team_of[j] == team) sum += inst.u(i, j);
  return sum;
}

Utility max_realizable_utility(const Instance& inst, int i) {
  if (!inst.has_chars()) {
    std::vector<Utility> row;
    row.reserve(inst.n - 1);
    for (int j = 0; j < inst.n; ++j)
      if (j != i) row.push_back(inst.u(i, j));
    std::sort(row.begin(), row.end(), std::greater<>());
    Utility sum = 0;
    for (int k = 0; k < inst.s - 1 && k < (int)row.size(); ++k) sum += row[k];
    return sum;
  }
  // Constrained case: exact maximum over quota-feasible coalitions containing i.
  Utility best = 0;
  bool found = false;
  for_each_coalition(inst, [&](const Coalition& c) {
    if (!c.contains(i)) return;
    found = true;
    best = std::max(best, agent_utility_in_coalition(inst, i, c));
  });
  if (!found) throw std::runtime_error("max_realizable_utility: no feasible coalition contains agent");
  return best;
}

std::optional<Utility> uplift(const Instance& inst, const Coalition& c, const TeamFormation& t) {
  Utility sum = 0;
  for (int i : c.members) {
    const Utility gain = agent_utility_in_coalition(inst, i, c) - agent_utility_in_formation(inst, i, t);
    if (gain < 0) return std::nullopt;
    sum += gain;
  }
  return sum;
}

Utility total_utility(const Instance& inst, const TeamFormation& t) {
  Utility sum = 0;
  for (int i = 0; i < inst.n; ++i) sum += agent_utility_in_formation(inst, i, t);
  return sum;
}

double objective_value(const Instance& inst, const TeamFormation& t, Utility r, double alpha) {
  check(alpha >= 0.0 && alpha <= 1.0, "objective_value: alpha must lie in [0,1]");
  return alpha * (double)total_utility(inst, t) - (1.0 - alpha) * (double)r;
}

bool team_char_feasible(const Instance& inst, const std::vector<int>& members) {
  if (!inst.has_chars()) return true;
  const CharacteristicSet& cs = *inst.chars;
  for (int q = 0; q < cs.q_count; ++q) {
    int count = 0;
    for (int i : members) count += cs.delta(i, q);
    if (count < cs.q_min[q] || count > cs.q_max[q]) return false;
  }
  return true;
}

void validate_formation(const Instance& inst, const TeamFormation& t) {
  check((int)t.team_of.size() == inst.n, "formation: team_of must have n entries");
  std::vector<int> sizes(inst.m, 0);
  for (int i = 0; i < inst.n; ++i) {
    check(t.team_of[i] >= 0 && t.team_of[i] < inst.m, "formation: team index out of range");
    ++sizes[t.team_of[i]];
  }
  for (int k = 0; k < inst.m; ++k) check(sizes[k] == inst.s, "formation: every team must have s members");
  if (inst.has_chars()) {
    for (const auto& team : t.teams(inst.m))
      check(team_char_feasible(inst, team), "formation: team violates characteristic quotas");
  }
}

void for_each_coalition(const Instance& inst, const std::function<void(const Coalition&)>& fn) {
  Coalition c;
  for_each_subset(inst.n, inst.s, [&](const std::vector<int>& idx) {
    if (!team_char_feasible(inst, idx)) return;
    c.members = idx;
    fn(c);
  });
}

std::uint64_t count_combinations(int n, int k, std::uint64_t cap) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) {
    // r * (n - k + i) / i stays integral at every step.
    if (r > cap) return cap + 1;
    r = r * (std::uint64_t)(n - k + i) / (std::uint64_t)i;
  }
  return std::min<std::uint64_t>(r, cap + 1);
}

std::uint64_t count_partitions(int n, int m, int s, std::uint64_t cap) {
  // Peel off the team of the smallest remaining agent: C(n-1, s-1) choices each step.
  std::uint64_t total = 1;
  for (int k = 0; k < m; ++k) {
    const int remaining = n - k * s;
    const std::uint64_t ways = count_combinations(remaining - 1, s - 1, cap);
    if (ways == 0) return 0;
    if (total > cap / std::max<std::uint64_t>(ways, 1)) return cap + 1;
    total *= ways;
    if (total > cap) return cap + 1;
  }
  return total;
}

UpliftResult brute_force_max_uplift(const Instance& inst, const TeamFormation& t) {
  constexpr std::uint64_t kGuard = 100000000ull;
  if (count_combinations(inst.n, inst.s, kGuard) > kGuard)
    throw std::runtime_error("brute_force_max_uplift: C(n,s) exceeds enumeration guard");
  validate_formation(inst, t);

  std::vector<Utility> current(inst.n);
  for (int i = 0; i < inst.n; ++i) current[i] = agent_utility_in_formation(inst, i, t);

  UpliftResult best;  // (none, 0)
  for_each_coalition(inst, [&](const Coalition& c) {
    Utility sum = 0;
    for (int i : c.members) {
      const Utility gain = agent_utility_in_coalition(inst, i, c) - current[i];
      if (gain < 0) return;
      sum += gain;
    }
    if (sum > best.uplift) {
      best.uplift = sum;
      best.coalition = c;
    }
  });
  return best;
}

std::pair<TeamFormation, double> brute_force_optimum(const Instance& inst, double alpha) {
  check(alpha >= 0.0 && alpha <= 1.0, "brute_force_optimum: alpha must lie in [0,1]");
  constexpr std::uint64_t kGuard = 10000000ull;
  if (count_partitions(inst.n, inst.m, inst.s, kGuard) > kGuard)
    throw std::runtime_error("brute_force_optimum: partition count exceeds enumeration guard");

  TeamFormation best;
  double best_value = -std::numeric_limits<double>::infinity();
  TeamFormation work;
  work.team_of.assign(inst.n, -1);
  std::vector<int> unassigned_buf;

  // Recursive canonical enumeration: the smallest unassigned agent founds the
  // next team, so team labels follow smallest-member order.
  std::function<void(int)> recurse = [&](int team) {
    if (team == inst.m) {
      const UpliftResult r = brute_force_max_uplift(inst, work);
      const double value = objective_value(inst, work, r.uplift, alpha);
      if (value > best_value + 1e-12 ||
          (value > best_value - 1e-12 && (best.team_of.empty() || work.team_of < best.team_of))) {
        best = work;
        best_value = value;
      }
      return;
    }
    int lead = 0;
    while (work.team_of[lead] >= 0) ++lead;
    std::vector<int> pool;
    for (int i = lead + 1; i < inst.n; ++i)
      if (work.team_of[i] < 0) pool.push_back(i);
    for_each_subset((int)pool.size(), inst.s - 1, [&](const std::vector<int>& idx) {
      std::vector<int> team_members{lead};
      for (int p : idx) team_members.push_back(pool[p]);
      if (!team_char_feasible(inst, team_members)) return;
      for (int i : team_members) work.team_of[i] = team;
      recurse(team + 1);
      for (int i : team_members) work.team_of[i] = -1;
    });
  };
  recurse(0);

  if (best.team_of.empty()) throw std::runtime_error("brute_force_optimum: no feasible formation exists");
  return {best, best_value};
}

}  // namespace teamform
