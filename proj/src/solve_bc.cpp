#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "solver_detail.hpp"
#include "teamform/models.hpp"

namespace teamform {

SolveReport solve_bc(const Instance& inst, const SolveConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  cfg.validate();
  inst.validate();

  AssignmentModel model = build_assignment_model(inst, cfg.alpha);
  const ModelLayout layout = model.layout;

  MipProblem mip;
  mip.is_integer.assign(model.lp.num_vars(), 1);
  mip.is_integer[layout.r_var] = 0;
  mip.sos1_groups = unary_groups(layout);
  mip.lp = std::move(model.lp);
  // With no uplift row in sight the relaxation prices r at zero, and at small
  // alpha the bound barely moves while integral callbacks trickle in one row
  // at a time. Seed the whole family whenever it enumerates cheaply; the
  // callback then only ever sharpens r through partition pins.
  std::set<Coalition> seeded;
  if (count_combinations(inst.n, inst.s, 2048) <= 2048)
    for_each_coalition(inst, [&](const Coalition& c) {
      mip.lp.rows.push_back(uplift_row(inst, c, layout));
      seeded.insert(c);
    });
  // Lazy uplift rows: the assignment block is integral whenever the kernel
  // calls back, so the partition and the true utilities are decided even
  // while the unary mass is not. First separation for a coalition adds its
  // uplift row; if r still undershoots with the row present, the shortfall
  // is fractional unary mass, which the partition pin removes for good.
  mip.callback = [&inst, &model, layout, &cfg,
                  added = std::move(seeded)](const std::vector<double>& x) mutable {
    std::vector<Row> rows;
    TeamFormation t;
    t.team_of.assign(inst.n, -1);
    for (int i = 0; i < inst.n; ++i)
      for (int k = 0; k < inst.m; ++k)
        if (x[model.x_index(i, k)] > 0.5) t.team_of[i] = k;
    const auto team_lists = t.teams(inst.m);
    std::vector<double> current(inst.n, 0.0);
    for (int i = 0; i < inst.n; ++i) {
      Coalition mine{team_lists[(std::size_t)t.team_of[i]]};
      current[i] = (double)agent_utility_in_coalition(inst, i, mine);
    }
    auto viol = separate_violated_uplift(inst, current, 0.0, cfg.backend);
    if (!viol) return rows;
    const double r_star = viol->second;
    if (r_star <= x[layout.r_var] + 1e-9) return rows;
    if (added.insert(viol->first).second)
      rows.push_back(uplift_row(inst, viol->first, layout));
    else
      rows.push_back(partition_uplift_cut(inst, t, (Utility)std::llround(r_star), layout));
    return rows;
  };
  // Teams are interchangeable; under min-member-sorted labeling agent i only
  // ever sits in teams 0..i, so the higher labels are fixed away. Every
  // partition keeps exactly one labeling and the m! orbit collapses.
  for (int i = 0; i + 1 < inst.m; ++i)
    for (int k = i + 1; k < inst.m; ++k) mip.lp.upper[model.x_index(i, k)] = 0.0;
  mip.obj_granularity = detail::objective_granularity(cfg.alpha);
  const auto seed = detail::heuristic_seed(inst, cfg);
  if (seed) mip.seed_objective = seed->objective;

  MipLimits limits;
  limits.time_budget_secs = cfg.time_budget_secs;
  limits.node_budget = cfg.node_budget;
  const MipResult res = solve_mip(mip, limits);

  SolveReport rep;
  rep.counters.nodes = res.nodes;
  rep.counters.lp_solves = res.lp_solves;
  rep.counters.cuts = res.cuts_added;
  rep.wall_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (res.status == MipStatus::Infeasible) {
    rep.status = SolveStatus::Infeasible;
    rep.lower = -kInfinity;
    rep.upper = -kInfinity;
    rep.gap = 0.0;
    return rep;
  }

  rep.status = res.status == MipStatus::Optimal ? SolveStatus::Optimal : SolveStatus::Budget;
  rep.upper = res.bound;
  if (res.has_incumbent) {
    TeamFormation t;
    t.team_of.assign(inst.n, -1);
    for (int i = 0; i < inst.n; ++i)
      for (int k = 0; k < inst.m; ++k)
        if (res.x[model.x_index(i, k)] > 0.5) t.team_of[i] = k;
    validate_formation(inst, t);
    const detail::ScoredFormation s = detail::score_true(inst, t, cfg.alpha);
    if (res.status == MipStatus::Optimal && std::abs(s.objective - res.objective) > 1e-5)
      throw std::logic_error("solve_bc: relaxation objective disagrees with the exhaustive score");
    detail::install_incumbent(rep, s);
    if (rep.status == SolveStatus::Optimal) rep.upper = std::max(rep.lower, rep.upper);
  } else if (seed) {
    // the tree never beat the warm start; at Optimal that proves it best
    detail::install_incumbent(rep, *seed);
    if (rep.status == SolveStatus::Optimal) rep.upper = std::max(rep.lower, rep.upper);
  }
  rep.gap = rep.upper - rep.lower;
  if (rep.status == SolveStatus::Optimal) rep.gap = 0.0;
  return rep;
}

}  // namespace teamform
