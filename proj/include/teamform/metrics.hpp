#pragma once

#include <vector>

#include "teamform/types.hpp"

namespace teamform {

struct MetricsReport {
  std::vector<double> efficiency;  // u(t,i) / Ubar_i, 1 when Ubar_i = 0
  double efficiency_mean = 0.0;
  double individual_inequity = 0.0;
  double team_inequity = 0.0;
  std::vector<double> individual_instability;
  double individual_instability_mean = 0.0;
  double individual_instability_max = 0.0;
  std::vector<double> team_instability;
  double team_instability_mean = 0.0;
  double team_instability_max = 0.0;
};

std::vector<double> efficiency(const Instance& inst, const TeamFormation& t);

// Utility spread across agents over the mean personal ceiling.
double individual_inequity(const Instance& inst, const TeamFormation& t);

// Team-utility spread over the mean ideal-team utility (the best coalition
// containing each agent, characteristic-filtered).
double team_inequity(const Instance& inst, const TeamFormation& t);

// Per agent: best individually-rational gain over current utility. A zero
// best gain reports 0; positive gain on zero current utility reports +inf.
std::vector<double> individual_instability(const Instance& inst, const TeamFormation& t);

// Per agent: largest uplift of an individually-rational coalition containing
// the agent, over the current team's utility. Same zero/inf conventions.
std::vector<double> team_instability(const Instance& inst, const TeamFormation& t);

MetricsReport compute_metrics(const Instance& inst, const TeamFormation& t);

}  // namespace teamform
