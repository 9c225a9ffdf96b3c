#include "teamform/metrics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "teamform/core.hpp"

namespace teamform {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / (double)v.size();
}

double max_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
}

// One sweep over all feasible coalitions: per-agent best IR gain and best IR
// coalition uplift. Own teams are always individually rational, so both
// maxima start well-defined at zero.
struct IrSweep {
  std::vector<Utility> best_gain;
  std::vector<Utility> best_uplift;
};

IrSweep ir_sweep(const Instance& inst, const TeamFormation& t) {
  IrSweep out;
  out.best_gain.assign(inst.n, 0);
  out.best_uplift.assign(inst.n, 0);
  std::vector<Utility> current(inst.n);
  for (int i = 0; i < inst.n; ++i) current[i] = agent_utility_in_formation(inst, i, t);

  for_each_coalition(inst, [&](const Coalition& c) {
    Utility r = 0;
    for (int i : c.members) {
      Utility gain = agent_utility_in_coalition(inst, i, c) - current[i];
      if (gain < 0) return;  // not individually rational
      r += gain;
    }
    for (int i : c.members) {
      Utility gain = agent_utility_in_coalition(inst, i, c) - current[i];
      out.best_gain[i] = std::max(out.best_gain[i], gain);
      out.best_uplift[i] = std::max(out.best_uplift[i], r);
    }
  });
  return out;
}

}  // namespace

std::vector<double> efficiency(const Instance& inst, const TeamFormation& t) {
  std::vector<double> ratio(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    Utility cap = max_realizable_utility(inst, i);
    ratio[i] = cap == 0 ? 1.0 : (double)agent_utility_in_formation(inst, i, t) / (double)cap;
  }
  return ratio;
}

double individual_inequity(const Instance& inst, const TeamFormation& t) {
  Utility lo = agent_utility_in_formation(inst, 0, t), hi = lo;
  double cap_sum = 0.0;
  for (int i = 0; i < inst.n; ++i) {
    Utility u = agent_utility_in_formation(inst, i, t);
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    cap_sum += (double)max_realizable_utility(inst, i);
  }
  if (hi == lo) return 0.0;
  return (double)(hi - lo) / (cap_sum / inst.n);
}

double team_inequity(const Instance& inst, const TeamFormation& t) {
  std::vector<Utility> team_u(inst.m, 0);
  auto teams = t.teams(inst.m);
  for (int k = 0; k < inst.m; ++k) team_u[k] = coalition_utility(inst, Coalition{teams[k]});
  Utility lo = *std::min_element(team_u.begin(), team_u.end());
  Utility hi = *std::max_element(team_u.begin(), team_u.end());
  if (hi == lo) return 0.0;

  std::vector<Utility> ideal(inst.n, 0);
  for_each_coalition(inst, [&](const Coalition& c) {
    Utility u = coalition_utility(inst, c);
    for (int i : c.members) ideal[i] = std::max(ideal[i], u);
  });
  double ideal_mean = 0.0;
  for (Utility v : ideal) ideal_mean += (double)v;
  ideal_mean /= inst.n;
  return (double)(hi - lo) / ideal_mean;
}

std::vector<double> individual_instability(const Instance& inst, const TeamFormation& t) {
  IrSweep sweep = ir_sweep(inst, t);
  std::vector<double> out(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    Utility gain = sweep.best_gain[i];
    if (gain == 0) {
      out[i] = 0.0;
    } else {
      Utility cur = agent_utility_in_formation(inst, i, t);
      out[i] = cur == 0 ? kInf : (double)gain / (double)cur;
    }
  }
  return out;
}

std::vector<double> team_instability(const Instance& inst, const TeamFormation& t) {
  IrSweep sweep = ir_sweep(inst, t);
  std::vector<double> out(inst.n);
  for (int i = 0; i < inst.n; ++i) {
    Utility r = sweep.best_uplift[i];
    if (r == 0) {
      out[i] = 0.0;
    } else {
      Utility team_u = coalition_utility(inst, Coalition{t.teams(inst.m)[t.team_of[i]]});
      out[i] = team_u == 0 ? kInf : (double)r / (double)team_u;
    }
  }
  return out;
}

MetricsReport compute_metrics(const Instance& inst, const TeamFormation& t) {
  MetricsReport rep;
  rep.efficiency = efficiency(inst, t);
  rep.efficiency_mean = mean_of(rep.efficiency);
  rep.individual_inequity = individual_inequity(inst, t);
  rep.team_inequity = team_inequity(inst, t);
  rep.individual_instability = individual_instability(inst, t);
  rep.individual_instability_mean = mean_of(rep.individual_instability);
  rep.individual_instability_max = max_of(rep.individual_instability);
  rep.team_instability = team_instability(inst, t);
  rep.team_instability_mean = mean_of(rep.team_instability);
  rep.team_instability_max = max_of(rep.team_instability);
  return rep;
}

}  // namespace teamform
