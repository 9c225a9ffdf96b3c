#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "fixtures.hpp"
#include "teamform/core.hpp"

using namespace teamform;
using namespace teamform::testing;

TEST_CASE("agent utility within a coalition") {
  const Instance inst = make_two_pair_instance();
  CHECK(agent_utility_in_coalition(inst, 0, coalition_of({0, 1})) == 10);
  CHECK(agent_utility_in_coalition(inst, 0, coalition_of({0, 2})) == 1);
  CHECK_THROWS_AS(agent_utility_in_coalition(inst, 3, coalition_of({0, 1})), std::invalid_argument);

  Instance singles;
  singles.n = 2;
  singles.m = 2;
  singles.s = 1;
  singles.u_max = 5;
  singles.u = UtilityMatrix::Zero(2, 2);
  CHECK(agent_utility_in_coalition(singles, 0, coalition_of({0})) == 0);
}

TEST_CASE("coalition utility is the ordered-pair double sum") {
  const Instance inst = make_two_pair_instance();
  CHECK(coalition_utility(inst, coalition_of({0, 1})) == 20);
  CHECK(coalition_utility(inst, coalition_of({0, 2})) == 2);

  Instance zero = make_two_pair_instance();
  zero.u.setZero();
  CHECK(coalition_utility(zero, coalition_of({1, 3})) == 0);
}

TEST_CASE("maximum realizable utility takes the top s-1 row entries") {
  const Instance inst = make_two_pair_instance();
  CHECK(max_realizable_utility(inst, 0) == 10);

  Instance wide;
  wide.n = 5;
  wide.m = 1;
  wide.s = 5;
  wide.u_max = 7;
  wide.u = UtilityMatrix::Zero(5, 5);
  wide.u(0, 1) = 7;
  wide.u(0, 2) = 5;
  wide.u(0, 3) = 2;
  wide.u(0, 4) = 1;
  wide.s = 3;
  wide.m = 1;
  wide.n = 5;  // n != m*s deliberately left unvalidated here; only the row matters
  CHECK(max_realizable_utility(wide, 0) == 12);

  Instance singles;
  singles.n = 2;
  singles.m = 2;
  singles.s = 1;
  singles.u_max = 5;
  singles.u = UtilityMatrix::Zero(2, 2);
  CHECK(max_realizable_utility(singles, 0) == 0);
}

TEST_CASE("uplift rejects coalitions where any member loses") {
  const Instance inst = make_two_pair_instance();
  const TeamFormation bad = formation_of({{0, 2}, {1, 3}}, 4);
  const TeamFormation good = formation_of({{0, 1}, {2, 3}}, 4);

  CHECK(uplift(inst, coalition_of({0, 1}), bad) == 18);
  CHECK_FALSE(uplift(inst, coalition_of({0, 2}), good).has_value());
  CHECK(uplift(inst, coalition_of({0, 1}), good) == 0);
  CHECK(uplift(inst, coalition_of({2, 3}), good) == 0);
}

TEST_CASE("total utility sums agent utilities") {
  const Instance inst = make_two_pair_instance();
  CHECK(total_utility(inst, formation_of({{0, 1}, {2, 3}}, 4)) == 40);
  CHECK(total_utility(inst, formation_of({{0, 2}, {1, 3}}, 4)) == 4);
}

TEST_CASE("objective value mixes utility and uplift by alpha") {
  const Instance inst = make_two_pair_instance();
  const TeamFormation good = formation_of({{0, 1}, {2, 3}}, 4);
  const TeamFormation bad = formation_of({{0, 2}, {1, 3}}, 4);
  CHECK(objective_value(inst, good, 0, 0.5) == doctest::Approx(20.0));
  CHECK(objective_value(inst, bad, 18, 0.5) == doctest::Approx(-7.0));
  CHECK(objective_value(inst, bad, 999, 1.0) == doctest::Approx(4.0));
  CHECK_THROWS_AS(objective_value(inst, good, 0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(objective_value(inst, good, 0, -0.1), std::invalid_argument);
}

TEST_CASE("brute-force maximum uplift") {
  const Instance inst = make_two_pair_instance();
  const TeamFormation bad = formation_of({{0, 2}, {1, 3}}, 4);
  const TeamFormation good = formation_of({{0, 1}, {2, 3}}, 4);

  const UpliftResult r_bad = brute_force_max_uplift(inst, bad);
  REQUIRE(r_bad.coalition.has_value());
  CHECK(r_bad.coalition->members == std::vector<int>{0, 1});  // ties with {2,3}, lexicographic
  CHECK(r_bad.uplift == 18);

  const UpliftResult r_good = brute_force_max_uplift(inst, good);
  CHECK_FALSE(r_good.coalition.has_value());
  CHECK(r_good.uplift == 0);

  Instance zero = make_two_pair_instance();
  zero.u.setZero();
  const UpliftResult r_zero = brute_force_max_uplift(zero, bad);
  CHECK_FALSE(r_zero.coalition.has_value());
  CHECK(r_zero.uplift == 0);
}

TEST_CASE("brute-force optimum on the two-pair instance") {
  const Instance inst = make_two_pair_instance();
  const TeamFormation stable = formation_of({{0, 1}, {2, 3}}, 4);

  auto [t05, v05] = brute_force_optimum(inst, 0.5);
  CHECK(t05.team_of == stable.team_of);
  CHECK(v05 == doctest::Approx(20.0));

  auto [t0, v0] = brute_force_optimum(inst, 0.0);
  CHECK(t0.team_of == stable.team_of);
  CHECK(v0 == doctest::Approx(0.0));

  auto [t1, v1] = brute_force_optimum(inst, 1.0);
  CHECK(t1.team_of == stable.team_of);
  CHECK(v1 == doctest::Approx(40.0));
}

TEST_CASE("partition and combination counting") {
  CHECK(count_combinations(4, 2, 1000) == 6);
  CHECK(count_combinations(12, 6, 1000) == 924);
  CHECK(count_combinations(40, 20, 100000000ull) == 100000001ull);  // capped
  CHECK(count_partitions(4, 2, 2, 1000) == 3);
  CHECK(count_partitions(6, 2, 3, 1000) == 10);
  CHECK(count_partitions(8, 2, 4, 1000) == 35);
  CHECK(count_partitions(12, 4, 3, 10000000ull) == 15400);
}

TEST_CASE("enumeration guards trip on oversized inputs") {
  Instance big;
  big.m = 2;
  big.s = 20;
  big.n = 40;
  big.u_max = 1;
  big.u = UtilityMatrix::Zero(40, 40);
  TeamFormation t;
  t.team_of.assign(40, 0);
  for (int i = 20; i < 40; ++i) t.team_of[i] = 1;
  CHECK_THROWS_AS(brute_force_max_uplift(big, t), std::runtime_error);
  CHECK_THROWS_AS(brute_force_optimum(big, 0.5), std::runtime_error);
}

TEST_CASE("instance validation") {
  Instance inst = make_two_pair_instance();
  CHECK_NOTHROW(inst.validate());

  Instance bad_n = inst;
  bad_n.n = 5;
  CHECK_THROWS_AS(bad_n.validate(), std::invalid_argument);

  Instance bad_diag = inst;
  bad_diag.u(1, 1) = 3;
  CHECK_THROWS_AS(bad_diag.validate(), std::invalid_argument);

  Instance bad_range = inst;
  bad_range.u(0, 2) = 99;
  CHECK_THROWS_AS(bad_range.validate(), std::invalid_argument);
}

TEST_CASE("formation validation enforces sizes and quotas") {
  const Instance inst = make_two_pair_instance();
  CHECK_NOTHROW(validate_formation(inst, formation_of({{0, 1}, {2, 3}}, 4)));

  TeamFormation lopsided;
  lopsided.team_of = {0, 0, 0, 1};
  CHECK_THROWS_AS(validate_formation(inst, lopsided), std::invalid_argument);

  Instance constrained = inst;
  CharacteristicSet cs;
  cs.q_count = 1;
  cs.delta = Eigen::MatrixXi::Zero(4, 1);
  cs.delta(0, 0) = 1;
  cs.delta(2, 0) = 1;
  cs.q_min = {1};
  cs.q_max = {1};
  constrained.chars = cs;
  CHECK_NOTHROW(constrained.validate());
  CHECK_NOTHROW(validate_formation(constrained, formation_of({{0, 1}, {2, 3}}, 4)));
  // Both possessors on one team violates q_max=1 there and q_min=1 elsewhere.
  CHECK_THROWS_AS(validate_formation(constrained, formation_of({{0, 2}, {1, 3}}, 4)),
                  std::invalid_argument);
}

TEST_CASE("characteristic constraints restrict realizable utility") {
  Instance inst = make_two_pair_instance();
  CharacteristicSet cs;
  cs.q_count = 1;
  cs.delta = Eigen::MatrixXi::Zero(4, 1);
  cs.delta(0, 0) = 1;
  cs.delta(2, 0) = 1;
  cs.q_min = {1};
  cs.q_max = {1};
  inst.chars = cs;

  // Agent 0 may only join coalitions with exactly one possessor: {0,1} and {0,3}.
  CHECK(max_realizable_utility(inst, 0) == 10);
  // Agent 1 (non-possessor) must pair with a possessor: {0,1} or {1,2}.
  CHECK(max_realizable_utility(inst, 1) == 10);

  int feasible = 0;
  for_each_coalition(inst, [&](const Coalition&) { ++feasible; });
  CHECK(feasible == 4);  // {0,1},{0,3},{1,2},{2,3}
}

TEST_CASE("core identities hold on random instances") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance inst = make_random_instance(2, 3, 9, seed);
    const TeamFormation t = formation_of({{0, 1, 2}, {3, 4, 5}}, 6);

    Utility by_team = 0;
    for (const auto& team : t.teams(inst.m)) {
      Coalition c;
      c.members = team;
      by_team += coalition_utility(inst, c);
      CHECK(uplift(inst, c, t) == 0);  // own teams never uplift
    }
    CHECK(total_utility(inst, t) == by_team);

    for (int i = 0; i < inst.n; ++i) {
      const Utility cap = max_realizable_utility(inst, i);
      for_each_coalition(inst, [&](const Coalition& c) {
        if (c.contains(i)) CHECK(agent_utility_in_coalition(inst, i, c) <= cap);
      });
    }

    const UpliftResult best = brute_force_max_uplift(inst, t);
    if (best.coalition.has_value()) {
      CHECK(best.uplift > 0);
      CHECK(uplift(inst, *best.coalition, t) == best.uplift);
    } else {
      CHECK(best.uplift == 0);
    }
  }
}

TEST_CASE("canonical team relabeling") {
  TeamFormation t;
  t.team_of = {2, 2, 0, 0, 1, 1};
  CHECK(t.canonical(3).team_of == std::vector<int>{0, 0, 1, 1, 2, 2});
}
