#include <chrono>
#include <cmath>
#include <stdexcept>

#include "solver_detail.hpp"
#include "teamform/models.hpp"

namespace teamform {

SolveReport solve_exp(const Instance& inst, const SolveConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  inst.validate();

  SolveReport rep;
  auto stamp = [&] {
    rep.wall_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };

  if (count_combinations(inst.n, inst.s, cfg.max_coalitions) > cfg.max_coalitions) {
    rep.status = SolveStatus::Budget;  // enumeration would blow the memory guard
    stamp();
    return rep;
  }

  std::vector<Coalition> pool;
  for_each_coalition(inst, [&](const Coalition& c) { pool.push_back(c); });
  if (pool.empty()) {
    rep.status = SolveStatus::Infeasible;
    rep.lower = -kInfinity;
    rep.upper = -kInfinity;
    rep.gap = 0.0;
    stamp();
    return rep;
  }

  MasterModel model = build_master_model(inst, pool, cfg.alpha);
  for (const Coalition& c : pool) model.lp.rows.push_back(uplift_row(inst, c, model.layout));

  MipProblem mip;
  mip.lp = std::move(model.lp);
  mip.is_integer.assign(mip.lp.num_vars(), 1);
  mip.is_integer[model.layout.r_var] = 0;
  mip.sos1_groups = unary_groups(model.layout);
  std::vector<int> t_var(pool.size());
  for (std::size_t p = 0; p < pool.size(); ++p) t_var[p] = (int)p;
  // Every uplift row is present, yet fractional unary mass can still satisfy
  // them while undervaluing r. Once the team columns are integral the
  // partition is decided, so pin r to its exhaustively-computed worst case.
  mip.callback = [&inst, &pool, &t_var, &model, &cfg](const std::vector<double>& x) {
    std::vector<Row> rows;
    auto t = detail::partition_from_columns(inst, pool, t_var, x);
    if (!t) return rows;
    const detail::ScoredFormation s = detail::score_true(inst, *t, cfg.alpha);
    if (s.r > 0 && x[model.layout.r_var] < (double)s.r - 1e-9)
      rows.push_back(partition_uplift_cut(inst, *t, s.r, model.layout));
    return rows;
  };

  mip.obj_granularity = detail::objective_granularity(cfg.alpha);
  const auto seed = detail::heuristic_seed(inst, cfg);
  if (seed) mip.seed_objective = seed->objective;

  MipLimits limits;
  limits.time_budget_secs = cfg.time_budget_secs;
  limits.node_budget = cfg.node_budget;
  const MipResult res = solve_mip(mip, limits);

  rep.counters.nodes = res.nodes;
  rep.counters.lp_solves = res.lp_solves;
  rep.counters.cuts = res.cuts_added;
  rep.counters.columns = (std::int64_t)pool.size();

  if (res.status == MipStatus::Infeasible) {
    rep.status = SolveStatus::Infeasible;
    rep.lower = -kInfinity;
    rep.upper = -kInfinity;
    rep.gap = 0.0;
    stamp();
    return rep;
  }

  rep.status = res.status == MipStatus::Optimal ? SolveStatus::Optimal : SolveStatus::Budget;
  rep.upper = res.bound;
  if (res.has_incumbent) {
    auto formation = detail::partition_from_columns(inst, pool, t_var, res.x);
    if (!formation) throw std::logic_error("solve_exp: integral master solution is not a partition");
    const detail::ScoredFormation s = detail::score_true(inst, *formation, cfg.alpha);
    if (res.status == MipStatus::Optimal && std::abs(s.objective - res.objective) > 1e-5)
      throw std::logic_error("solve_exp: relaxation objective disagrees with the exhaustive score");
    detail::install_incumbent(rep, s);
    if (rep.status == SolveStatus::Optimal) rep.upper = std::max(rep.lower, rep.upper);
  } else if (seed) {
    // the tree never beat the warm start; at Optimal that proves it best
    detail::install_incumbent(rep, *seed);
    if (rep.status == SolveStatus::Optimal) rep.upper = std::max(rep.lower, rep.upper);
  }
  rep.gap = rep.upper - rep.lower;
  if (rep.status == SolveStatus::Optimal) rep.gap = 0.0;
  stamp();
  return rep;
}

}  // namespace teamform
