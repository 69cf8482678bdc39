#include <doctest.h>

#include "agobf/errors.hpp"
#include "agobf/fixtures.hpp"
#include "agobf/planner.hpp"
#include "support.hpp"

using namespace agobf;

namespace {

Node priv(std::string id) { return {std::move(id), NodeKind::Privilege, Cost::zero(), false, std::nullopt}; }
Node expl(std::string id) { return {std::move(id), NodeKind::Exploit, Cost::zero(), false, std::nullopt}; }
Node conf(std::string id, double c) { return {std::move(id), NodeKind::Config, Cost::from_double(c), false, std::nullopt}; }

AttackGraph or_choice() {
  return AttackGraph({priv("s"), priv("g"), expl("e1"), expl("e2"), conf("c1", 0.3), conf("c2", 0.7)},
                     {{"g", "e1"}, {"g", "e2"}, {"e1", "s"}, {"e1", "c1"}, {"e2", "s"}, {"e2", "c2"}}, "g", "s");
}

// g needs e3, which needs both p1 and p2; e1 and e2 share config cs.
AttackGraph shared_config() {
  return AttackGraph({priv("s"), priv("p1"), priv("p2"), priv("g"), expl("e1"), expl("e2"), expl("e3"),
                      conf("cs", 0.4), conf("c1", 0.2), conf("c2", 0.3), conf("c3", 0.0)},
                     {{"p1", "e1"}, {"p2", "e2"}, {"g", "e3"}, {"e1", "s"}, {"e1", "cs"}, {"e1", "c1"},
                      {"e2", "s"}, {"e2", "cs"}, {"e2", "c2"}, {"e3", "p1"}, {"e3", "p2"}, {"e3", "c3"}},
                     "g", "s");
}

std::vector<bool> usable(const AttackGraph& g, bool value) { return std::vector<bool>(g.size(), value); }

}  // namespace

TEST_CASE("derivability fixpoint") {
  const auto g = or_choice();
  CHECK(derivable(g, usable(g, true)));
  CHECK_FALSE(derivable(g, usable(g, false)));

  // p <-> e cycle with no grounded support.
  const AttackGraph cyc({priv("s"), priv("p"), priv("g"), expl("e"), expl("eg"), conf("c", 0.1)},
                        {{"p", "e"}, {"e", "p"}, {"e", "c"}, {"g", "eg"}, {"eg", "p"}, {"eg", "c"}}, "g", "s");
  CHECK_FALSE(goal_derivable(cyc));
}

TEST_CASE("optimal plan examples") {
  SUBCASE("single chain") {
    const AttackGraph g({priv("s"), priv("g"), expl("e"), conf("c", 0.5)}, {{"g", "e"}, {"e", "s"}, {"e", "c"}},
                        "g", "s");
    CHECK(ptc(g) == Cost::from_micros(500'000));
  }
  SUBCASE("OR minimum") {
    const auto out = optimal_plan(or_choice());
    REQUIRE(out.plan);
    CHECK(out.plan->cost == Cost::from_micros(300'000));
    CHECK(out.plan->exec_order == std::vector<std::string>{"e1"});
  }
  SUBCASE("shared config counted once") {
    const auto g = shared_config();
    for (auto h : {PlannerHeuristic::Auto, PlannerHeuristic::HMax, PlannerHeuristic::LmCut}) {
      const auto out = optimal_plan(g, {h});
      REQUIRE(out.plan);
      CHECK(out.plan->cost == Cost::from_micros(900'000));
      CHECK(check_plan(g, *out.plan).empty());
      CHECK(out.plan->exec_order.back() == "e3");
    }
    CHECK(brute_force_optimal(g)->cost == Cost::from_micros(900'000));
  }
  SUBCASE("zero-cost graph") {
    const AttackGraph g({priv("s"), priv("g"), expl("e"), conf("c", 0.0)}, {{"g", "e"}, {"e", "s"}, {"e", "c"}},
                        "g", "s");
    CHECK(ptc(g) == Cost::zero());
    CHECK(brute_force_optimal(g)->cost == Cost::zero());
  }
  SUBCASE("unreachable") {
    const AttackGraph g({priv("s"), priv("g"), conf("c", 0.1)}, {}, "g", "s");
    CHECK_FALSE(optimal_plan(g).plan.has_value());
    CHECK_FALSE(brute_force_optimal(g).has_value());
    CHECK_THROWS_AS(ptc(g), UnreachableError);
  }
}

TEST_CASE("equal-cost plans break ties by sorted config ids") {
  const AttackGraph g({priv("s"), priv("g"), expl("e1"), expl("e2"), conf("cb", 0.5), conf("ca", 0.5)},
                      {{"g", "e1"}, {"g", "e2"}, {"e1", "s"}, {"e1", "cb"}, {"e2", "s"}, {"e2", "ca"}}, "g", "s");
  const auto out = optimal_plan(g);
  REQUIRE(out.plan);
  CHECK(out.plan->exec_order == std::vector<std::string>{"e2"});
}

TEST_CASE("brute force refuses large graphs") {
  Rng rng(3);
  testing::RandomGraphParams p;
  p.configs = 14;
  CHECK_THROWS_AS(brute_force_optimal(testing::random_and_or_graph(p, rng), 12), ConfigError);
}

TEST_CASE("check_plan catches broken plans") {
  const auto g = shared_config();
  auto plan = *optimal_plan(g).plan;
  CHECK(check_plan(g, plan).empty());
  auto wrong_cost = plan;
  wrong_cost.cost = Cost::zero();
  CHECK_FALSE(check_plan(g, wrong_cost).empty());
  auto wrong_order = plan;
  std::reverse(wrong_order.exec_order.begin(), wrong_order.exec_order.end());
  CHECK_FALSE(check_plan(g, wrong_order).empty());
  auto missing = plan;
  missing.node_set.erase(std::find(missing.node_set.begin(), missing.node_set.end(), "cs"));
  CHECK_FALSE(check_plan(g, missing).empty());
}

TEST_CASE("planner agrees with brute force on random AND/OR graphs") {
  Rng rng(2024);
  int reachable = 0;
  for (int i = 0; i < 80; ++i) {
    testing::RandomGraphParams p;
    p.privileges = 3 + i % 6;
    p.configs = 3 + i % 8;
    const auto g = testing::random_and_or_graph(p, rng);
    const auto oracle = brute_force_optimal(g);
    for (auto h : {PlannerHeuristic::Auto, PlannerHeuristic::HMax, PlannerHeuristic::LmCut}) {
      const auto out = optimal_plan(g, {h});
      REQUIRE(out.plan.has_value() == oracle.has_value());
      if (!oracle) continue;
      CHECK(out.plan->cost == oracle->cost);
      CHECK(check_plan(g, *out.plan).empty());
    }
    reachable += oracle ? 1 : 0;
  }
  CHECK(reachable > 40);
}

TEST_CASE("adding a config never raises the optimum") {
  Rng rng(5);
  for (int i = 0; i < 40; ++i) {
    testing::RandomGraphParams p;
    p.configs = 6;
    const auto g = testing::random_and_or_graph(p, rng);
    const auto base = optimal_plan(g).plan;
    if (!base) continue;
    // An extra exploit to the goal straight from the source.
    std::vector<Node> nodes(g.nodes().begin(), g.nodes().end());
    nodes.push_back(expl("e_extra"));
    nodes.push_back(conf("c_extra", 0.1 * static_cast<double>(uniform_between(rng, 0, 10))));
    std::vector<Edge> edges = g.edges();
    edges.push_back({g.node(g.goal()).id, "e_extra"});
    edges.push_back({"e_extra", g.node(g.source()).id});
    edges.push_back({"e_extra", "c_extra"});
    const AttackGraph bigger(std::move(nodes), std::move(edges), g.node(g.goal()).id, g.node(g.source()).id);
    CHECK(ptc(bigger) <= base->cost);
  }
}

TEST_CASE("fixture PTC values") {
  const Fixture f = h1_counterexample_fixture();
  CHECK(ptc(build_attack_graph(f.network, f.catalog)) == Cost::from_micros(10'000'000));
  CHECK(ptc(apply_assignments(f.network, f.catalog, f.assignments)) == Cost::from_micros(9'000'000));
}
