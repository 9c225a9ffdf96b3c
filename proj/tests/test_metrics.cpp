#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "teamform/metrics.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "fixtures.hpp"
#include "teamform/core.hpp"
#include "teamform/heuristics.hpp"

using namespace teamform;
using namespace teamform::testing;

TEST_CASE("stable formation scores perfectly on the pair instance") {
  Instance inst = make_two_pair_instance();
  TeamFormation t = formation_of({{0, 1}, {2, 3}}, 4);
  MetricsReport rep = compute_metrics(inst, t);
  for (int i = 0; i < 4; ++i) {
    CHECK(rep.efficiency[i] == doctest::Approx(1.0));
    CHECK(rep.individual_instability[i] == doctest::Approx(0.0));
    CHECK(rep.team_instability[i] == doctest::Approx(0.0));
  }
  CHECK(rep.efficiency_mean == doctest::Approx(1.0));
  CHECK(rep.individual_inequity == doctest::Approx(0.0));
  CHECK(rep.team_inequity == doctest::Approx(0.0));
  CHECK(rep.individual_instability_max == doctest::Approx(0.0));
  CHECK(rep.team_instability_max == doctest::Approx(0.0));
}

TEST_CASE("cross-pairing exposes every instability on the pair instance") {
  Instance inst = make_two_pair_instance();
  TeamFormation t = formation_of({{0, 2}, {1, 3}}, 4);
  MetricsReport rep = compute_metrics(inst, t);
  for (int i = 0; i < 4; ++i) {
    // everyone gets 1 instead of their best 10
    CHECK(rep.efficiency[i] == doctest::Approx(0.1));
    // best IR deviation regains 9 on a current utility of 1
    CHECK(rep.individual_instability[i] == doctest::Approx(9.0));
    // that deviation lifts coalition utility by 20-2=18 against team value 2
    CHECK(rep.team_instability[i] == doctest::Approx(9.0));
  }
  CHECK(rep.individual_inequity == doctest::Approx(0.0));
  CHECK(rep.team_inequity == doctest::Approx(0.0));
  CHECK(rep.individual_instability_mean == doctest::Approx(9.0));
  CHECK(rep.team_instability_max == doctest::Approx(9.0));
}

TEST_CASE("individual inequity spans the utility spread") {
  // keep {0,1} worth 10 each, make {2,3} worth 1 each
  Instance inst = make_two_pair_instance();
  inst.u(2, 3) = inst.u(3, 2) = 1;
  inst.u(2, 0) = 1;
  TeamFormation t = formation_of({{0, 1}, {2, 3}}, 4);
  MetricsReport rep = compute_metrics(inst, t);
  // utilities (10,10,1,1); personal ceilings (10,10,1,1): mean 5.5
  CHECK(rep.individual_inequity == doctest::Approx(9.0 / 5.5));
}

TEST_CASE("team inequity compares team values to ideal coalition values") {
  Instance inst = make_two_pair_instance();
  inst.u(2, 3) = inst.u(3, 2) = 1;
  TeamFormation t = formation_of({{0, 1}, {2, 3}}, 4);
  MetricsReport rep = compute_metrics(inst, t);
  // team values (20,2); per-agent best coalition values (20,20,2,2) mean 11
  CHECK(rep.team_inequity == doctest::Approx(18.0 / 11.0));
}

TEST_CASE("zero ceilings count as fully efficient") {
  Instance inst = make_two_pair_instance();
  inst.u.setZero();
  TeamFormation t = formation_of({{0, 2}, {1, 3}}, 4);
  MetricsReport rep = compute_metrics(inst, t);
  for (int i = 0; i < 4; ++i) {
    CHECK(rep.efficiency[i] == doctest::Approx(1.0));
    CHECK(rep.individual_instability[i] == doctest::Approx(0.0));
    CHECK(rep.team_instability[i] == doctest::Approx(0.0));
  }
  CHECK(rep.individual_inequity == doctest::Approx(0.0));
  CHECK(rep.team_inequity == doctest::Approx(0.0));
}

TEST_CASE("metrics are invariant to team relabeling") {
  Instance inst = make_random_instance(2, 3, 25, 91);
  TeamFormation a = formation_of({{0, 1, 2}, {3, 4, 5}}, 6);
  TeamFormation b = formation_of({{3, 4, 5}, {0, 1, 2}}, 6);
  MetricsReport ra = compute_metrics(inst, a);
  MetricsReport rb = compute_metrics(inst, b);
  for (int i = 0; i < inst.n; ++i) {
    CHECK(ra.efficiency[i] == doctest::Approx(rb.efficiency[i]));
    CHECK(ra.individual_instability[i] ==
          doctest::Approx(rb.individual_instability[i]));
    CHECK(ra.team_instability[i] == doctest::Approx(rb.team_instability[i]));
  }
  CHECK(ra.individual_inequity == doctest::Approx(rb.individual_inequity));
  CHECK(ra.team_inequity == doctest::Approx(rb.team_inequity));
}

TEST_CASE("stable optima report zero instability on random instances") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Instance inst = make_random_instance(2, 2, 15, seed);
    auto [t, obj] = brute_force_optimum(inst, 0.0);
    UpliftResult best = brute_force_max_uplift(inst, t);
    MetricsReport rep = compute_metrics(inst, t);
    if (!best.coalition.has_value()) {
      CHECK(rep.individual_instability_max == doctest::Approx(0.0));
      CHECK(rep.team_instability_max == doctest::Approx(0.0));
    } else {
      CHECK(rep.team_instability_max > 0.0);
    }
  }
}

TEST_CASE("team instability maxima agree with exhaustive uplift search") {
  for (std::uint64_t seed = 50; seed < 60; ++seed) {
    Instance inst = make_random_instance(2, 3, 20, seed);
    TeamFormation t = trivial_formation(inst);
    UpliftResult best = brute_force_max_uplift(inst, t);
    MetricsReport rep = compute_metrics(inst, t);
    if (!best.coalition.has_value()) {
      CHECK(rep.team_instability_max == doctest::Approx(0.0));
      continue;
    }
    // the best deviation's first member carries at least this ratio
    int agent = best.coalition->members[0];
    Coalition his_team{t.teams(inst.m)[t.team_of[agent]]};
    double team_value = (double)coalition_utility(inst, his_team);
    if (team_value > 0.0) {
      CHECK(rep.team_instability[agent] >=
            (double)best.uplift / team_value - 1e-9);
      CHECK(rep.team_instability_max >= rep.team_instability[agent]);
    }
  }
}

TEST_CASE("instability becomes infinite only from a zero base") {
  Instance inst = make_two_pair_instance();
  inst.u(0, 2) = 0;
  inst.u(2, 0) = 0;  // team {0,2} nets zero for both
  TeamFormation t = formation_of({{0, 2}, {1, 3}}, 4);
  MetricsReport rep = compute_metrics(inst, t);
  CHECK(std::isinf(rep.individual_instability[0]));
  CHECK(std::isinf(rep.team_instability[0]));
  CHECK(rep.individual_instability_max ==
        std::numeric_limits<double>::infinity());
}
