#include <cmath>
#include <cstring>
#include <numeric>
#include <stdexcept>

#include "solver_detail.hpp"
#include "teamform/heuristics.hpp"
#include "teamform/rng.hpp"

namespace teamform {

void SolveConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("SolveConfig: alpha must lie in [0,1]");
  if (!(time_budget_secs > 0.0)) throw std::invalid_argument("SolveConfig: time budget must be positive");
  if (node_budget <= 0) throw std::invalid_argument("SolveConfig: node budget must be positive");
  if (max_coalitions == 0) throw std::invalid_argument("SolveConfig: coalition guard must be positive");
}

namespace detail {

ScoredFormation score_true(const Instance& inst, const TeamFormation& t, double alpha) {
  ScoredFormation s;
  s.formation = t;
  const UpliftResult up = brute_force_max_uplift(inst, t);
  s.r = up.uplift;
  s.worst = up.coalition;
  s.objective = objective_value(inst, t, s.r, alpha);
  return s;
}

void install_incumbent(SolveReport& rep, const ScoredFormation& s) {
  rep.incumbent = s.formation;
  rep.lower = s.objective;
  rep.incumbent_r = s.r;
  rep.worst_coalition = s.worst;
}

namespace {

// Seeded teams end up as master columns, so every intermediate formation has
// to respect the characteristic quotas, not just the final one.
bool quota_ok(const Instance& inst, const TeamFormation& t) {
  if (!inst.has_chars()) return true;
  for (const auto& members : t.teams(inst.m))
    if (!team_char_feasible(inst, members)) return false;
  return true;
}

// Pairwise-swap descent on the true objective, first improvement, rescanning
// until a full pass is clean.
ScoredFormation swap_descent(const Instance& inst, ScoredFormation start, double alpha) {
  bool improved = true;
  while (improved) {
    improved = false;
    for (int i = 0; i < inst.n; ++i) {
      for (int j = i + 1; j < inst.n; ++j) {
        if (start.formation.team_of[i] == start.formation.team_of[j]) continue;
        TeamFormation t = start.formation;
        std::swap(t.team_of[i], t.team_of[j]);
        if (!quota_ok(inst, t)) continue;
        ScoredFormation s = score_true(inst, t, alpha);
        if (s.objective > start.objective + 1e-12) {
          start = std::move(s);
          improved = true;
        }
      }
    }
  }
  return start;
}

// Satisfaction walk: repeatedly grant the worst blocking coalition its own
// team, evicting the outsiders into the movers' old slots. The walk is not a
// descent (granting one coalition can enrage another), so it tracks the best
// formation seen; random pairing breaks the cycles such dynamics fall into.
ScoredFormation stabilize_walk(const Instance& inst, ScoredFormation cur, double alpha, Sampler& rng) {
  ScoredFormation best = cur;
  for (int it = 0; it < 6 * inst.n && cur.worst; ++it) {
    const std::vector<int>& cm = cur.worst->members;
    TeamFormation t = cur.formation;
    std::vector<int> cnt((std::size_t)inst.m, 0);
    for (int a : cm) ++cnt[(std::size_t)t.team_of[a]];
    int tstar = 0;
    for (int k = 1; k < inst.m; ++k)
      if (cnt[k] > cnt[tstar] || (cnt[k] == cnt[tstar] && rng.uniform_int(0, 1) != 0)) tstar = k;
    std::vector<char> inc((std::size_t)inst.n, 0);
    for (int a : cm) inc[(std::size_t)a] = 1;
    std::vector<int> in, out;
    for (int a : cm)
      if (t.team_of[a] != tstar) in.push_back(a);
    for (int a = 0; a < inst.n; ++a)
      if (t.team_of[a] == tstar && !inc[(std::size_t)a]) out.push_back(a);
    // coalitions and teams share size s, so the counts match
    for (int i = (int)in.size() - 1; i > 0; --i) std::swap(in[(std::size_t)i], in[(std::size_t)rng.uniform_int(0, i)]);
    for (std::size_t k = 0; k < in.size(); ++k) std::swap(t.team_of[in[k]], t.team_of[out[k]]);
    // the granted team inherits the coalition's feasible trait mix; the
    // evicted outsiders may still break another team's quota, so retry with a
    // fresh pairing on the next iteration
    if (!quota_ok(inst, t)) continue;
    cur = score_true(inst, t, alpha);
    if (cur.objective > best.objective + 1e-12) best = cur;
  }
  return best;
}

}  // namespace

std::optional<ScoredFormation> heuristic_seed(const Instance& inst, const SolveConfig& cfg) {
  Mt64Sampler rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
  auto polish = [&](ScoredFormation s) {
    s = swap_descent(inst, std::move(s), cfg.alpha);
    ScoredFormation w = stabilize_walk(inst, s, cfg.alpha, rng);
    if (w.objective > s.objective + 1e-12) s = swap_descent(inst, std::move(w), cfg.alpha);
    return s;
  };
  ScoredFormation best;
  TeamFormation trivial;
  if (inst.has_chars()) {
    // DRAFT and OPOP ignore quotas, so the constrained start is the trivial
    // blocked formation, feasible by construction for generated instances.
    // Anything else (a hand-made instance with an infeasible blocking) gets
    // no seed at all rather than an unsound one.
    trivial.team_of.resize(inst.n);
    for (int i = 0; i < inst.n; ++i) trivial.team_of[(std::size_t)i] = i / inst.s;
    if (!quota_ok(inst, trivial)) return std::nullopt;
    best = polish(score_true(inst, trivial, cfg.alpha));
  } else {
    best = polish(score_true(inst, draft(inst, cfg.seed), cfg.alpha));
    ScoredFormation other = polish(score_true(inst, opop(inst, cfg.seed), cfg.alpha));
    if (other.objective > best.objective) best = std::move(other);
  }
  // Near alpha=0 the LP bound sits at the stable optimum and the tree is only
  // as fast as its incumbent, so the search gets restarts from random
  // partitions. At alpha=0 exactly, r=0 is a certificate: -r cannot beat 0.
  for (int restart = 0; restart < 12; ++restart) {
    if (cfg.alpha == 0.0 && best.r == 0) break;
    TeamFormation t;
    if (inst.has_chars()) {
      // diversify inside the feasible region: random swaps, revert breakers
      t = trivial;
      for (int k = 0; k < 4 * inst.n; ++k) {
        const int i = (int)rng.uniform_int(0, inst.n - 1);
        const int j = (int)rng.uniform_int(0, inst.n - 1);
        if (t.team_of[(std::size_t)i] == t.team_of[(std::size_t)j]) continue;
        std::swap(t.team_of[(std::size_t)i], t.team_of[(std::size_t)j]);
        if (!quota_ok(inst, t)) std::swap(t.team_of[(std::size_t)i], t.team_of[(std::size_t)j]);
      }
    } else {
      t.team_of.resize(inst.n);
      std::vector<int> order(inst.n);
      std::iota(order.begin(), order.end(), 0);
      for (int i = inst.n - 1; i > 0; --i)
        std::swap(order[(std::size_t)i], order[(std::size_t)rng.uniform_int(0, i)]);
      for (int pos = 0; pos < inst.n; ++pos) t.team_of[(std::size_t)order[(std::size_t)pos]] = pos / inst.s;
    }
    ScoredFormation s = polish(score_true(inst, t, cfg.alpha));
    if (s.objective > best.objective) best = std::move(s);
  }
  return best;
}

double objective_granularity(double alpha) {
  for (int q = 1; q <= 1000; ++q) {
    double pq = alpha * q;
    double p = std::round(pq);
    if (std::abs(pq - p) < 1e-9 * q) {
      int g = std::gcd((int)p, q - (int)p);
      return g > 0 ? (double)g / q : 1.0;
    }
  }
  return 0.0;
}

std::optional<TeamFormation> partition_from_columns(const Instance& inst,
                                                    const std::vector<Coalition>& pool,
                                                    const std::vector<int>& t_var,
                                                    const std::vector<double>& x) {
  TeamFormation t;
  t.team_of.assign(inst.n, -1);
  int team = 0;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    if (x[t_var[p]] < 0.5) continue;
    if (team >= inst.m) return std::nullopt;
    for (int i : pool[p].members) {
      if (t.team_of[i] >= 0) return std::nullopt;
      t.team_of[i] = team;
    }
    ++team;
  }
  if (team != inst.m) return std::nullopt;
  for (int i = 0; i < inst.n; ++i)
    if (t.team_of[i] < 0) return std::nullopt;
  return t;
}

}  // namespace detail

SolveReport score_formation(const Instance& inst, const TeamFormation& t, double alpha) {
  validate_formation(inst, t);
  SolveReport rep;
  rep.status = SolveStatus::Budget;  // a fixed formation proves only a lower bound
  detail::install_incumbent(rep, detail::score_true(inst, t, alpha));
  rep.upper = kInfinity;
  rep.gap = kInfinity;
  return rep;
}

SolveReport solve_brute(const Instance& inst, const SolveConfig& cfg) {
  cfg.validate();
  inst.validate();
  SolveReport rep;
  try {
    auto [t, value] = brute_force_optimum(inst, cfg.alpha);
    detail::install_incumbent(rep, detail::score_true(inst, t, cfg.alpha));
    rep.status = SolveStatus::Optimal;
    rep.upper = rep.lower;
    rep.gap = 0.0;
  } catch (const std::runtime_error& e) {
    if (std::strstr(e.what(), "no feasible formation") == nullptr) throw;
    rep.status = SolveStatus::Infeasible;
    rep.lower = -kInfinity;
    rep.upper = -kInfinity;
    rep.gap = 0.0;
  }
  return rep;
}

}  // namespace teamform
