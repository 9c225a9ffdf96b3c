#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "solver_detail.hpp"
#include "teamform/heuristics.hpp"
#include "teamform/models.hpp"
#include "teamform/rng.hpp"

namespace teamform {

namespace {

struct Fix {
  int var;
  double lo, hi;
};

// Co-membership branch: the pair shares a team in every partition of one
// child and is separated in the other, so both children forbid whole column
// families and neither inherits the parent bound for free.
struct PairFix {
  int i, j;
  bool together;
};

struct Node {
  double bound;
  std::int64_t id;
  std::vector<Fix> fixes;  // z-variable splits from degenerate integral nodes
  std::vector<PairFix> pairs;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // larger bound first
    return a.id < b.id;  // dive on equal bounds
  }
};

// Any partition satisfying the quotas, found by a plain assignment
// feasibility program; nullopt certifies the instance infeasible.
std::optional<TeamFormation> find_feasible_partition(const Instance& inst, double time_left) {
  MipProblem mip;
  for (int i = 0; i < inst.n; ++i)
    for (int k = 0; k < inst.m; ++k) mip.lp.add_var(0.0, 1.0, 0.0);
  auto x_index = [&](int i, int k) { return i * inst.m + k; };
  for (int i = 0; i < inst.n; ++i) {
    int row = mip.lp.add_row('E', 1.0);
    for (int k = 0; k < inst.m; ++k) mip.lp.add_term(row, x_index(i, k), 1.0);
  }
  for (int k = 0; k < inst.m; ++k) {
    int row = mip.lp.add_row('E', (double)inst.s);
    for (int i = 0; i < inst.n; ++i) mip.lp.add_term(row, x_index(i, k), 1.0);
  }
  const CharacteristicSet& cs = *inst.chars;
  for (int k = 0; k < inst.m; ++k) {
    for (int q = 0; q < cs.q_count; ++q) {
      int lo = mip.lp.add_row('G', (double)cs.q_min[q]);
      int hi = mip.lp.add_row('L', (double)cs.q_max[q]);
      for (int i = 0; i < inst.n; ++i) {
        if (cs.delta(i, q) == 0) continue;
        mip.lp.add_term(lo, x_index(i, k), 1.0);
        mip.lp.add_term(hi, x_index(i, k), 1.0);
      }
    }
  }
  mip.is_integer.assign(mip.lp.num_vars(), 1);
  MipLimits limits;
  limits.time_budget_secs = std::max(1.0, time_left);
  const MipResult res = solve_mip(mip, limits);
  if (!res.has_incumbent) return std::nullopt;
  TeamFormation t;
  t.team_of.assign(inst.n, -1);
  for (int i = 0; i < inst.n; ++i)
    for (int k = 0; k < inst.m; ++k)
      if (res.x[x_index(i, k)] > 0.5) t.team_of[i] = k;
  return t;
}

// Exact violation check of the uplift row family at a fractional point:
// row c is violated when r < U(c) - sum_i vbar_i - sum_i U(c) mass_i(u(c,i))
// where mass_i(w) is the z mass strictly above w. Pure enumeration; every
// row is tested, so an empty return is a certificate. Returns up to k rows
// by violation, worst first; batching them amortizes the LP resolves.
std::vector<Coalition> most_violated_uplift_rows(const Instance& inst, const ModelLayout& layout,
                                                 const std::vector<double>& x, std::size_t k) {
  const int n = inst.n;
  std::vector<double> vbar(n, 0.0);
  std::vector<std::vector<double>> above(n);  // above[i][w] = z mass strictly above w
  for (int i = 0; i < n; ++i) {
    const int len = (int)layout.ubar[i] + 1;
    above[i].assign(len + 1, 0.0);
    for (int v = len - 1; v >= 0; --v) {
      const double zv = x[layout.z_start[i] + v];
      vbar[i] += (double)v * zv;
      above[i][v] = above[i][v + 1] + zv;
    }
  }
  const double r_hat = x[layout.r_var];

  std::vector<std::pair<double, Coalition>> best;  // kept sorted, worst violation first
  for_each_coalition(inst, [&](const Coalition& c) {
    const double big = (double)coalition_utility(inst, c);
    double lhs_free = 0.0;
    for (int i : c.members) {
      const Utility th = agent_utility_in_coalition(inst, i, c);
      lhs_free += vbar[i];
      if (th + 1 <= layout.ubar[i]) lhs_free += big * above[i][(int)th + 1];
    }
    const double violation = big - lhs_free - r_hat;
    if (violation <= 1e-9) return;
    if (best.size() == k && violation <= best.back().first) return;
    auto at = std::upper_bound(best.begin(), best.end(), violation,
                               [](double v, const auto& e) { return v > e.first; });
    best.insert(at, {violation, c});
    if (best.size() > k) best.pop_back();
  });
  std::vector<Coalition> out;
  out.reserve(best.size());
  for (auto& e : best) out.push_back(std::move(e.second));
  return out;
}

std::optional<Coalition> most_violated_uplift_row(const Instance& inst, const ModelLayout& layout,
                                                  const std::vector<double>& x) {
  auto rows = most_violated_uplift_rows(inst, layout, x, 1);
  if (rows.empty()) return std::nullopt;
  return std::move(rows.front());
}

}  // namespace

SolveReport solve_bcp(const Instance& inst, const SolveConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  inst.validate();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  SolveReport rep;
  auto stamp = [&] { rep.wall_secs = elapsed(); };

  // Column pool seed: feasible trivial-partition teams, a quota-feasible
  // partition witness when the trivial one fails, and affinity samples.
  std::vector<Coalition> pool;
  std::set<Coalition> seen;
  auto add_team = [&](std::vector<int> members) {
    std::sort(members.begin(), members.end());
    Coalition c{std::move(members)};
    if (seen.insert(c).second) pool.push_back(std::move(c));
  };

  const TeamFormation trivial = trivial_formation(inst);
  std::optional<TeamFormation> seed_partition;
  {
    bool trivial_ok = true;
    for (const auto& members : trivial.teams(inst.m)) {
      if (team_char_feasible(inst, members))
        add_team(members);
      else
        trivial_ok = false;
    }
    if (trivial_ok) {
      seed_partition = trivial;
    } else {
      seed_partition = find_feasible_partition(inst, cfg.time_budget_secs - elapsed());
      if (!seed_partition) {
        rep.status = SolveStatus::Infeasible;
        rep.lower = -kInfinity;
        rep.upper = -kInfinity;
        rep.gap = 0.0;
        stamp();
        return rep;
      }
      for (const auto& members : seed_partition->teams(inst.m)) add_team(members);
    }
  }
  const bool full_pool = count_combinations(inst.n, inst.s, 2048) <= 2048;
  if (full_pool) {
    // Small team space: start from the complete feasible column set, so
    // pricing below only ever certifies emptiness and node LPs never wait on
    // one-column-at-a-time growth.
    std::vector<int> members(inst.s);
    std::iota(members.begin(), members.end(), 0);
    while (true) {
      if (team_char_feasible(inst, members)) add_team(members);
      int i = inst.s - 1;
      while (i >= 0 && members[i] == inst.n - inst.s + i) --i;
      if (i < 0) break;
      ++members[i];
      for (int j = i + 1; j < inst.s; ++j) members[j] = members[j - 1] + 1;
    }
  } else {
    Mt64Sampler rng(cfg.seed);
    for (int iter = 0; iter < 100; ++iter) {
      for (int attempt = 0; attempt < 50; ++attempt) {
        Coalition c = sample_affinity_team(inst, rng);
        if (!team_char_feasible(inst, c.members)) continue;
        if (seen.insert(c).second) pool.push_back(std::move(c));
        break;
      }
    }
  }

  const auto hseed = detail::heuristic_seed(inst, cfg);
  if (hseed)
    for (const auto& members : hseed->formation.teams(inst.m)) add_team(members);

  MasterModel model = build_master_model(inst, pool, cfg.alpha);
  const ModelLayout& layout = model.layout;
  SimplexEngine engine(model.lp);
  std::vector<int> t_var(pool.size());
  std::unordered_map<int, int> pos_of_var;
  for (std::size_t p = 0; p < pool.size(); ++p) {
    t_var[p] = (int)p;
    pos_of_var[(int)p] = (int)p;
  }
  auto add_column = [&](const Coalition& c) {
    // The oracle prices against duals only; a column the pool already holds
    // cannot price positive at LP optimality, but tolerance skew could hand
    // one back, and re-adding it would spin the certification loop.
    if (!seen.insert(c).second) return false;
    const double obj = cfg.alpha * (double)coalition_utility(inst, c);
    const int var = engine.add_var(0.0, kInfinity, obj, model.column_of(c));
    pos_of_var[var] = (int)pool.size();
    pool.push_back(c);
    t_var.push_back(var);
    ++rep.counters.columns;
    return true;
  };

  detail::ScoredFormation inc = detail::score_true(inst, *seed_partition, cfg.alpha);
  if (hseed && hseed->objective > inc.objective + 1e-12) inc = *hseed;
  const double gran = detail::objective_granularity(cfg.alpha);
  // Integral objectives live on this lattice; snapping a fractional bound down
  // onto it closes plateau gaps smaller than one step without waiting them out.
  auto snap_bound = [&](double b) {
    return gran > 0.0 && std::isfinite(b) ? std::floor(b / gran + 1e-6) * gran : b;
  };
  auto consider = [&](const TeamFormation& t) {
    const detail::ScoredFormation s = detail::score_true(inst, t, cfg.alpha);
    if (s.objective > inc.objective + 1e-12) inc = s;
  };

  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  open.push({kInfinity, 0, {}});
  std::int64_t next_id = 1;
  bool budget_hit = false;
  std::unordered_map<int, std::pair<double, double>> touched;  // engine bound overrides

  auto harvest = [&] {
    MipProblem mip;
    mip.lp = engine.program();
    mip.is_integer.assign(mip.lp.num_vars(), 0);
    for (int var : t_var) mip.is_integer[var] = 1;
    MipLimits limits;
    limits.time_budget_secs = std::min(1.5, std::max(0.1, cfg.time_budget_secs - elapsed()));
    limits.node_budget = 500;
    const MipResult res = solve_mip(mip, limits);
    rep.counters.lp_solves += res.lp_solves;
    if (!res.has_incumbent) return;
    auto t = detail::partition_from_columns(inst, pool, t_var, res.x);
    if (t) consider(*t);
  };

  while (!open.empty()) {
    if (rep.counters.nodes >= cfg.node_budget || elapsed() > cfg.time_budget_secs) {
      budget_hit = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (snap_bound(node.bound) <= inc.objective + kTolGap) {
      // best-bound order: everything left is fathomed too
      while (!open.empty()) open.pop();
      break;
    }
    const bool is_root = node.fixes.empty() && node.id == 0;

    PairRestrictions restr;
    for (const PairFix& pf : node.pairs)
      (pf.together ? restr.together : restr.apart).push_back({pf.i, pf.j});
    std::unordered_map<int, std::pair<double, double>> want;
    for (const Fix& f : node.fixes) {
      auto [slot, fresh] = want.try_emplace(f.var, f.lo, f.hi);
      if (!fresh) {
        slot->second.first = std::max(slot->second.first, f.lo);
        slot->second.second = std::min(slot->second.second, f.hi);
      }
    }
    // Column families the pair fixes rule out; the scan covers columns priced
    // in after the node was created, which a frozen fix list would miss.
    for (std::size_t p = 0; p < pool.size(); ++p) {
      const auto& mem = pool[p].members;
      bool banned = false;
      for (const auto& [i, j] : restr.together) {
        if (std::binary_search(mem.begin(), mem.end(), i) !=
            std::binary_search(mem.begin(), mem.end(), j)) {
          banned = true;
          break;
        }
      }
      if (!banned) {
        for (const auto& [i, j] : restr.apart) {
          if (std::binary_search(mem.begin(), mem.end(), i) &&
              std::binary_search(mem.begin(), mem.end(), j)) {
            banned = true;
            break;
          }
        }
      }
      if (banned) want[t_var[p]] = {0.0, 0.0};
    }
    // only touch bounds that differ from the engine's state: consecutive
    // nodes share most fixes, so the dual warm start stays warm
    for (auto it = touched.begin(); it != touched.end();) {
      if (want.count(it->first)) {
        ++it;
        continue;
      }
      const bool is_team = pos_of_var.count(it->first) > 0;
      engine.set_var_bounds(it->first, 0.0, is_team ? kInfinity : 1.0);
      it = touched.erase(it);
    }
    for (const auto& [var, b] : want) {
      auto it = touched.find(var);
      if (it != touched.end() && it->second == b) continue;
      engine.set_var_bounds(var, b.first, b.second);
      touched[var] = b;
    }

    // Certification loop: price and separate until neither moves, then the
    // LP value is the exact node relaxation bound. The certified state lives
    // in cert_*: normally the engine's, but a degenerate basis can stall the
    // engine's phase 1 on a feasible system even after a cold rebuild, and
    // then one fresh factorized solve stands in for it.
    bool node_infeasible = false;
    bool rebuilt_once = false;
    int cut_rounds = 0;
    double cert_obj = -kInfinity;
    std::vector<double> cert_duals, cert_x;
    while (true) {
      if (elapsed() > cfg.time_budget_secs) {
        budget_hit = true;
        open.push(std::move(node));
        break;
      }
      const LpStatus st = engine.solve();
      ++rep.counters.lp_solves;
      std::optional<LpSolution> fallback;
      if (st == LpStatus::Infeasible) {
        // Repair through feasibility pricing: a zero-objective copy with
        // artificial slack tells us whether any priceable column can close
        // the violation; a clean no answer certifies the node empty.
        LinearProgram phase = engine.program();
        for (double& c : phase.obj) c = 0.0;
        for (int rix = 0; rix < phase.num_rows(); ++rix) {
          const char sense = phase.rows[rix].sense;
          if (sense != 'L') {
            int a = phase.add_var(0.0, kInfinity, -1.0);
            phase.add_term(rix, a, 1.0);
          }
          if (sense != 'G') {
            int a = phase.add_var(0.0, kInfinity, -1.0);
            phase.add_term(rix, a, -1.0);
          }
        }
        const LpSolution sol = solve_lp(phase);
        ++rep.counters.lp_solves;
        if (sol.status != LpStatus::Optimal)
          throw std::logic_error("solve_bcp: feasibility probe did not solve");
        if (sol.objective >= -1e-9) {
          // warm basis declared a feasible system infeasible; rebuild cold once
          if (!rebuilt_once) {
            engine = SimplexEngine(engine.program());
            rebuilt_once = true;
            continue;
          }
          LpSolution real = solve_lp(engine.program());
          ++rep.counters.lp_solves;
          if (real.status != LpStatus::Optimal)
            throw std::logic_error("solve_bcp: engine and feasibility probe disagree");
          fallback = std::move(real);
        } else {
          PricingDuals pd;
          pd.mu = sol.duals[model.mu_row];
          pd.sigma.resize(inst.n);
          for (int i = 0; i < inst.n; ++i) pd.sigma[i] = sol.duals[model.sigma_row[i]];
          pd.kappa = Eigen::MatrixXd::Zero(inst.n, inst.n);
          for (int i = 0; i < inst.n; ++i)
            for (int j = 0; j < inst.n; ++j)
              if (i != j) pd.kappa(i, j) = sol.duals[model.kappa_row(i, j)];
          auto col = price_column(inst, pd, 0.0, {}, cfg.backend, restr);
          if (!col || !add_column(col->first)) {
            node_infeasible = true;
            break;
          }
          continue;
        }
      } else if (st != LpStatus::Optimal) {
        throw std::runtime_error("solve_bcp: node relaxation neither optimal nor infeasible");
      }

      cert_obj = fallback ? fallback->objective : engine.objective();
      cert_duals = fallback ? std::move(fallback->duals) : engine.row_duals();
      cert_x = fallback ? std::move(fallback->x) : engine.struct_values();
      PricingDuals pd;
      pd.mu = cert_duals[model.mu_row];
      pd.sigma.resize(inst.n);
      for (int i = 0; i < inst.n; ++i) pd.sigma[i] = cert_duals[model.sigma_row[i]];
      pd.kappa = Eigen::MatrixXd::Zero(inst.n, inst.n);
      for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
          if (i != j) pd.kappa(i, j) = cert_duals[model.kappa_row(i, j)];
      auto col = price_column(inst, pd, cfg.alpha, {}, cfg.backend, restr);
      if (col && add_column(col->first)) continue;
      // Rows are globally valid, so a capped node still leaves a correct
      // bound behind (pricing is clean at this point); only the root must
      // separate to exhaustion for its certificate.
      if (!is_root && cut_rounds >= 2) break;
      auto cuts = most_violated_uplift_rows(inst, layout, cert_x, 6);
      if (!cuts.empty()) {
        ++cut_rounds;
        for (const auto& cut : cuts) {
          engine.add_row(uplift_row(inst, cut, layout));
          ++rep.counters.cuts;
        }
        continue;
      }
      break;
    }
    if (budget_hit) break;
    ++rep.counters.nodes;
    if (node_infeasible) continue;

    const double node_bound = cert_obj;
    if (is_root) {
      rep.root_bound = node_bound;
      PricingDuals pd;
      pd.mu = cert_duals[model.mu_row];
      pd.sigma.resize(inst.n);
      for (int i = 0; i < inst.n; ++i) pd.sigma[i] = cert_duals[model.sigma_row[i]];
      pd.kappa = Eigen::MatrixXd::Zero(inst.n, inst.n);
      for (int i = 0; i < inst.n; ++i)
        for (int j = 0; j < inst.n; ++j)
          if (i != j) pd.kappa(i, j) = cert_duals[model.kappa_row(i, j)];
      const bool no_column =
          !price_column(inst, pd, cfg.alpha, {}, OracleBackend::Enumeration).has_value();
      const bool no_cut = !most_violated_uplift_row(inst, layout, cert_x).has_value();
      rep.root_certified = no_column && no_cut;
    }

    if (rep.counters.nodes == 1 || rep.counters.nodes % 200 == 0) harvest();
    if (snap_bound(node_bound) <= inc.objective + kTolGap) continue;

    // Branching: most fractional co-membership mass. Equal coverage makes
    // all-integral pair masses force an integral column selection, so the
    // integral path below is exactly the no-branch case.
    const std::vector<double>& x = cert_x;
    Eigen::MatrixXd comass = Eigen::MatrixXd::Zero(inst.n, inst.n);
    for (std::size_t p = 0; p < pool.size(); ++p) {
      const double val = x[t_var[p]];
      if (std::abs(val) < 1e-12) continue;
      const auto& mem = pool[p].members;
      for (std::size_t a = 0; a < mem.size(); ++a)
        for (std::size_t b = a + 1; b < mem.size(); ++b) comass(mem[a], mem[b]) += val;
    }
    int bi = -1, bj = -1;
    double pair_frac = kTolInt;
    for (int i = 0; i < inst.n; ++i) {
      for (int j = i + 1; j < inst.n; ++j) {
        const double f = comass(i, j);
        const double frac = std::min(f - std::floor(f), std::ceil(f) - f);
        if (frac > pair_frac + 1e-12) {
          pair_frac = frac;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) {
      // Integral team selection: the partition is decided, so score it
      // exactly. A node value above the true score means fractional unary
      // mass is undervaluing r; pinning r for this partition removes that
      // relaxation point from the whole tree, pricing untouched since the
      // pin only spans w and r.
      auto t = detail::partition_from_columns(inst, pool, t_var, x);
      if (!t) throw std::logic_error("solve_bcp: integral node is not a partition");
      const detail::ScoredFormation s = detail::score_true(inst, *t, cfg.alpha);
      if (s.objective > inc.objective + 1e-12) inc = s;
      if (snap_bound(node_bound) <= inc.objective + kTolGap) continue;
      if (s.r > 0 && x[layout.r_var] < (double)s.r - 1e-9) {
        engine.add_row(partition_uplift_cut(inst, *t, s.r, layout));
        ++rep.counters.cuts;
        open.push(std::move(node));  // re-certify against the pinned row
        continue;
      }
      int z_var = -1;
      double z_frac = kTolInt;
      for (int i = 0; i < inst.n; ++i) {
        for (Utility v = 0; v <= layout.ubar[i]; ++v) {
          const int var = layout.z_start[i] + (int)v;
          const double frac = std::min(x[var] - std::floor(x[var]), std::ceil(x[var]) - x[var]);
          if (frac > z_frac) {
            z_frac = frac;
            z_var = var;
          }
        }
      }
      if (z_var < 0)
        throw std::logic_error("solve_bcp: fully integral node left an unexplained gap");
      Node one{node_bound, next_id++, node.fixes, node.pairs};
      one.fixes.push_back({z_var, 1.0, 1.0});
      Node zero{node_bound, next_id++, node.fixes, node.pairs};
      zero.fixes.push_back({z_var, 0.0, 0.0});
      open.push(std::move(one));
      open.push(std::move(zero));
      continue;
    }
    Node same{node_bound, next_id++, node.fixes, node.pairs};
    same.pairs.push_back({bi, bj, true});
    Node diff{node_bound, next_id++, node.fixes, node.pairs};
    diff.pairs.push_back({bi, bj, false});
    open.push(std::move(same));
    open.push(std::move(diff));
  }

  detail::install_incumbent(rep, inc);
  if (budget_hit) {
    rep.status = SolveStatus::Budget;
    double best_open = -kInfinity;
    while (!open.empty()) {
      best_open = std::max(best_open, open.top().bound);
      open.pop();
    }
    rep.upper = std::max(rep.lower, best_open);
    rep.gap = rep.upper - rep.lower;
  } else {
    rep.status = SolveStatus::Optimal;
    rep.upper = rep.lower;
    rep.gap = 0.0;
  }
  stamp();
  return rep;
}

}  // namespace teamform
