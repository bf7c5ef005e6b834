#include <doctest.h>

#include <random>
#include <set>

#include "rads/planner.hpp"
#include "test_support.hpp"

using namespace rads;

namespace {

std::set<EdgeKey> edge_set(const std::vector<QueryEdge>& es) {
  std::set<EdgeKey> out;
  for (auto [a, b] : es) out.insert(EdgeKey(a, b));
  return out;
}

const ExecutionPlan* find_plan_rooted_at(const std::vector<ExecutionPlan>& plans,
                                         QueryVertex root) {
  for (const auto& pl : plans)
    if (pl.units[0].piv == root) return &pl;
  return nullptr;
}

}  // namespace

TEST_CASE("connected dominating number of small patterns") {
  auto tri = connected_dominating_number(test::triangle());
  CHECK(tri.c_p == 1);
  CHECK(tri.mcds_list == std::vector<std::vector<QueryVertex>>{{0}, {1}, {2}});

  QueryPattern p4(4, {{0, 1}, {1, 2}, {2, 3}});
  auto res = connected_dominating_number(p4);
  CHECK(res.c_p == 2);
  CHECK(res.mcds_list == std::vector<std::vector<QueryVertex>>{{1, 2}});

  CHECK(connected_dominating_number(benchmark_pattern()).c_p == 3);
}

TEST_CASE("triangle yields three single-star plans") {
  auto plans = enumerate_min_plans(test::triangle());
  CHECK(plans.size() == 3);
  std::set<QueryVertex> pivots;
  for (const auto& pl : plans) {
    REQUIRE(pl.units.size() == 1);
    CHECK(pl.units[0].leaves.size() == 2);
    pivots.insert(pl.units[0].piv);
  }
  CHECK(pivots == std::set<QueryVertex>{0, 1, 2});
}

TEST_CASE("benchmark pattern: the u0 and u1 rootings are the paper's plans") {
  auto plans = enumerate_min_plans(benchmark_pattern());
  for (const auto& pl : plans) CHECK(pl.units.size() == 3);

  const ExecutionPlan* pl1 = find_plan_rooted_at(plans, 0);
  REQUIRE(pl1 != nullptr);
  CHECK(pl1->units[0].piv == 0);
  CHECK(std::set<QueryVertex>(pl1->units[0].leaves.begin(), pl1->units[0].leaves.end()) ==
        std::set<QueryVertex>{1, 2, 7, 8, 9});
  CHECK(pl1->units[1].piv == 1);
  CHECK(std::set<QueryVertex>(pl1->units[1].leaves.begin(), pl1->units[1].leaves.end()) ==
        std::set<QueryVertex>{3, 4});
  CHECK(pl1->units[2].piv == 2);
  CHECK(std::set<QueryVertex>(pl1->units[2].leaves.begin(), pl1->units[2].leaves.end()) ==
        std::set<QueryVertex>{5, 6});

  const ExecutionPlan* pl2 = find_plan_rooted_at(plans, 1);
  REQUIRE(pl2 != nullptr);
  CHECK(std::set<QueryVertex>(pl2->units[0].leaves.begin(), pl2->units[0].leaves.end()) ==
        std::set<QueryVertex>{0, 3, 4});
  CHECK(pl2->units[1].piv == 0);
  CHECK(std::set<QueryVertex>(pl2->units[1].leaves.begin(), pl2->units[1].leaves.end()) ==
        std::set<QueryVertex>{2, 7, 8, 9});
  CHECK(pl2->units[2].piv == 2);
}

TEST_CASE("edge classification on the selected benchmark plan") {
  QueryPattern p = benchmark_pattern();
  ExecutionPlan plan = select_plan(p);
  REQUIRE(plan.units.size() == 3);

  CHECK(edge_set(plan.units[0].e_sib) == std::set<EdgeKey>{EdgeKey(1, 2), EdgeKey(8, 9)});
  CHECK(plan.units[0].e_cro.empty());
  CHECK(edge_set(plan.units[2].e_sib) == std::set<EdgeKey>{EdgeKey(5, 6)});
  CHECK(edge_set(plan.units[2].e_cro) == std::set<EdgeKey>{EdgeKey(4, 5)});

  // expansion edges across units form exactly the neutral spanning tree
  std::set<EdgeKey> stars;
  for (const auto& u : plan.units)
    for (auto [a, b] : u.e_star) stars.insert(EdgeKey(a, b));
  CHECK(stars == std::set<EdgeKey>{EdgeKey(0, 1), EdgeKey(0, 2), EdgeKey(0, 7), EdgeKey(0, 8),
                                   EdgeKey(0, 9), EdgeKey(1, 3), EdgeKey(1, 4), EdgeKey(2, 5),
                                   EdgeKey(2, 6)});
}

TEST_CASE("classify_edges rejects a pivot outside the accumulated subpattern") {
  QueryPattern p = test::path5();
  ExecutionPlan bad;
  DecompositionUnit u0;
  u0.piv = 1;
  u0.leaves = {0, 2};
  DecompositionUnit u1;
  u1.piv = 3;  // 3 is not in {0,1,2}
  u1.leaves = {4};
  bad.units = {u0, u1};
  CHECK_THROWS_WITH_AS(classify_edges(bad, p), doctest::Contains("NotAPlan"), Error);
}

TEST_CASE("plan scores match the worked example") {
  QueryPattern p = benchmark_pattern();
  auto plans = enumerate_min_plans(p);
  const ExecutionPlan* pl1 = find_plan_rooted_at(plans, 0);
  const ExecutionPlan* pl2 = find_plan_rooted_at(plans, 1);
  REQUIRE(pl1 != nullptr);
  REQUIRE(pl2 != nullptr);
  CHECK(score_plan(*pl1, 1.0) == doctest::Approx(19.0 / 6.0).epsilon(1e-12));
  CHECK(score_plan(*pl2, 1.0) == doctest::Approx(8.0 / 3.0).epsilon(1e-12));

  // a tree pattern has no verification edges
  ExecutionPlan tree_plan = select_plan(test::path5());
  CHECK(score_plan(tree_plan, 1.0) == 0.0);
}

TEST_CASE("score is larger when a verification edge sits in an earlier round") {
  QueryPattern p = test::square();
  // same units, swapped order: the cross edge (2,3) lands in round 1 vs 2
  auto plans = enumerate_min_plans(p);
  REQUIRE(!plans.empty());
  for (const auto& pl : plans) {
    double s = score_plan(pl, 1.0);
    // all square plans put the single verification edge in round 1
    CHECK(s == doctest::Approx(0.5));
  }
  // moving one verification edge a round earlier strictly raises the score
  ExecutionPlan early, late;
  early.units.resize(2);
  late.units.resize(2);
  early.units[0].e_sib = {{1, 2}, {3, 4}};
  early.units[1].e_sib = {{5, 6}};
  late.units[0].e_sib = {{1, 2}};
  late.units[1].e_sib = {{3, 4}, {5, 6}};
  for (double rho : {0.5, 1.0, 2.0})
    CHECK(score_plan(early, rho) > score_plan(late, rho));
}

TEST_CASE("select_plan prefers the paper's first plan and handles small cases") {
  QueryPattern p = benchmark_pattern();
  ExecutionPlan plan = select_plan(p, 1.0);
  CHECK(plan.units[0].piv == 0);
  CHECK(score_plan(plan, 1.0) == doctest::Approx(19.0 / 6.0).epsilon(1e-12));

  ExecutionPlan tri = select_plan(test::triangle());
  CHECK(tri.units.size() == 1);
  CHECK(tri.units[0].piv == 0);

  // the star's center has span 1, its leaves span 2
  ExecutionPlan star = select_plan(QueryPattern(4, {{0, 1}, {0, 2}, {0, 3}}));
  CHECK(star.units.size() == 1);
  CHECK(star.units[0].piv == 0);
}

TEST_CASE("matching order follows the definition") {
  QueryPattern p = benchmark_pattern();
  ExecutionPlan plan = select_plan(p);
  CHECK(plan.matching_order ==
        std::vector<QueryVertex>{0, 1, 2, 8, 9, 7, 3, 4, 5, 6});

  ExecutionPlan tri = select_plan(test::triangle());
  CHECK(tri.matching_order == std::vector<QueryVertex>{0, 1, 2});

  ExecutionPlan wedge = select_plan(test::wedge());
  CHECK(wedge.units[0].piv == 1);
  CHECK(wedge.matching_order == std::vector<QueryVertex>{1, 0, 2});
}

TEST_CASE("emitted plans satisfy the structural invariants") {
  std::mt19937_64 rng(77);
  for (int iter = 0; iter < 60; ++iter) {
    QueryPattern p = test::random_pattern(3 + rng() % 6, rng);
    auto mcds = connected_dominating_number(p);
    auto plans = enumerate_min_plans(p);
    REQUIRE(!plans.empty());
    for (const auto& plan : plans) {
      CHECK(plan.units.size() == mcds.c_p);

      // every pattern edge in exactly one class of one unit
      std::multiset<EdgeKey> classified;
      std::set<EdgeKey> stars;
      for (const auto& u : plan.units) {
        for (auto [a, b] : u.e_star) {
          classified.insert(EdgeKey(a, b));
          stars.insert(EdgeKey(a, b));
        }
        for (auto [a, b] : u.e_sib) classified.insert(EdgeKey(a, b));
        for (auto [a, b] : u.e_cro) classified.insert(EdgeKey(a, b));
      }
      CHECK(classified.size() == p.edge_count());
      std::set<EdgeKey> unique_edges(classified.begin(), classified.end());
      CHECK(unique_edges.size() == p.edge_count());
      CHECK(stars.size() == p.size() - 1);  // expansion edges span the pattern

      // matching order is a permutation with the prefix property
      CHECK(plan.matching_order.size() == p.size());
      std::set<QueryVertex> seen(plan.matching_order.begin(), plan.matching_order.end());
      CHECK(seen.size() == p.size());
      std::size_t prefix = 0;
      for (std::size_t i = 0; i < plan.units.size(); ++i) {
        prefix += (i == 0 ? 1 : 0) + plan.units[i].leaves.size();
        std::set<QueryVertex> in_units;
        for (std::size_t j = 0; j <= i; ++j) {
          in_units.insert(plan.units[j].piv);
          in_units.insert(plan.units[j].leaves.begin(), plan.units[j].leaves.end());
        }
        std::set<QueryVertex> order_prefix(plan.matching_order.begin(),
                                           plan.matching_order.begin() + prefix);
        CHECK(order_prefix == in_units);
      }
    }
  }
}
