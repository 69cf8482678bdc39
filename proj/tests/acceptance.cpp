// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "agobf/attacker.hpp"
#include "agobf/errors.hpp"
#include "agobf/fixtures.hpp"
#include "agobf/obf_random.hpp"
#include "agobf/obf_search.hpp"
#include "agobf/planner.hpp"
#include "support.hpp"

using namespace agobf;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Cost units(std::int64_t n) { return Cost::from_micros(n * Cost::kScale); }

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<Assignment> all_pairs(const NetworkModel& net, const Catalog& catalog) {
  std::vector<Assignment> out;
  for (const auto& [id, host] : net.hosts) {
    for (const auto& v : compatible_vulns(catalog, host)) out.push_back({id, v});
  }
  return out;
}

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// ---------------------------------------------------------------------------

Outcome planner_oracle() {
  const auto t0 = Clock::now();
  Rng rng(1);
  std::size_t graphs = 0, reachable = 0, mismatches = 0, invalid = 0;
  for (int i = 0; i < 240; ++i) {
    testing::RandomGraphParams p;
    p.privileges = 3 + static_cast<std::size_t>(i % 7);
    p.configs = 4 + static_cast<std::size_t>(i % 9);
    const AttackGraph g = testing::random_and_or_graph(p, rng);
    const auto oracle = brute_force_optimal(g, 12);
    const auto out = optimal_plan(g);
    ++graphs;
    if (out.plan.has_value() != oracle.has_value()) {
      ++mismatches;
      continue;
    }
    if (!oracle) continue;
    ++reachable;
    if (out.plan->cost != oracle->cost) ++mismatches;
    if (!check_plan(g, *out.plan).empty()) ++invalid;
  }
  // Generated graphs as well, which take the chain-structured path.
  for (int i = 0; graphs < 340; ++i) {
    const Catalog catalog = testing::small_catalog(2, rng);
    const NetworkModel net = testing::random_network(3 + static_cast<std::size_t>(i % 5), catalog, rng);
    const AttackGraph g = build_attack_graph(net, catalog);
    if (g.count(NodeKind::Config) > 12) continue;
    const auto oracle = brute_force_optimal(g, 12);
    const auto out = optimal_plan(g);
    ++graphs;
    if (out.plan.has_value() != oracle.has_value()) {
      ++mismatches;
      continue;
    }
    if (!oracle) continue;
    ++reachable;
    if (out.plan->cost != oracle->cost) ++mismatches;
    if (!check_plan(g, *out.plan).empty()) ++invalid;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && invalid == 0 && graphs >= 200 && secs < 60.0,
          fmt("%zu graphs (%zu reachable, |Nc|<=12), %zu cost mismatches, %zu invalid plans, %.2fs (limit 60s)",
              graphs, reachable, mismatches, invalid, secs)};
}

// ---------------------------------------------------------------------------

Outcome counterexample_values() {
  const Fixture f = h1_counterexample_fixture();
  const AttackGraph base = build_attack_graph(f.network, f.catalog);
  const AttackGraph obf = apply_assignments(f.network, f.catalog, f.assignments);
  const Cost ptc_base = ptc(base);
  const Cost ptc_obf = ptc(obf);
  const SimulationTrace trace = aptc(obf);
  std::vector<Cost> segments;
  for (const auto& it : trace.iterations) segments.push_back(it.paid_prefix_cost);

  SearchProblem problem(f.network, f.catalog);
  SearchConfig cfg;
  cfg.budget = 2;
  const SearchNode root = make_root(problem, cfg);
  const Cost h1_root = h1(problem, root, 2);
  const Cost h2_root = h2(problem, root, 2);

  const bool ok = ptc_base == units(10) && ptc_obf == units(9) && trace.total_cost == units(22) &&
                  segments == std::vector<Cost>{units(6), units(7), units(9)} && h1_root == units(20) &&
                  h1_root < trace.total_cost && h2_root == units(30) && h2_root >= trace.total_cost;
  std::string segs;
  for (const auto& s : segments) segs += (segs.empty() ? "" : "+") + s.to_string();
  return {ok, fmt("PTC(AG)=%s PTC(AG~)=%s APTC(AG~)=%s (%s) h1(root)=%s h2(root)=%s", ptc_base.to_string().c_str(),
                  ptc_obf.to_string().c_str(), trace.total_cost.to_string().c_str(), segs.c_str(),
                  h1_root.to_string().c_str(), h2_root.to_string().c_str())};
}

// ---------------------------------------------------------------------------

Outcome cost_bound_suite() {
  const auto t0 = Clock::now();
  Rng rng(3);
  std::size_t instances = 0, l1 = 0, l2 = 0, l3 = 0, singletons = 0;
  for (int i = 0; instances < 600; ++i) {
    const Catalog catalog = testing::small_catalog(3, rng);
    const NetworkModel net = testing::random_network(4 + static_cast<std::size_t>(i % 6), catalog, rng);
    const AttackGraph base = build_attack_graph(net, catalog);
    if (!goal_derivable(base)) continue;
    std::vector<Assignment> pool = all_pairs(net, catalog);
    if (pool.empty()) continue;
    shuffle(pool, rng);
    pool.resize(std::min<std::size_t>(pool.size(), uniform_between(rng, 1, 4)));
    std::sort(pool.begin(), pool.end());

    const Cost p = ptc(base);
    const Cost base_aptc = aptc(base).total_cost;
    if (base_aptc != p) ++l1;
    const Cost total = aptc(apply_assignments(net, catalog, pool)).total_cost;
    if (total < p || total > static_cast<std::int64_t>(pool.size() + 1) * p) ++l2;
    for (const auto& a : pool) {
      const std::vector<Assignment> one{a};
      if (aptc(apply_assignments(net, catalog, one)).total_cost < base_aptc) ++l3;
      ++singletons;
    }
    ++instances;
  }
  return {l1 + l2 + l3 == 0,
          fmt("%zu obfuscated instances, %zu single-assignment checks; violations: fake-free APTC!=PTC %zu, "
              "outside [PTC,(|S|+1)PTC] %zu, single fake below APTC %zu (%.2fs)",
              instances, singletons, l1, l2, l3, seconds_since(t0))};
}

// ---------------------------------------------------------------------------

struct TreeCounts {
  std::size_t nodes = 0, h1_violations = 0, h2_violations = 0;
};

// Walks the whole decision tree below `node`; returns the best utility of a
// solution in the subtree, or nothing if the subtree holds none.
std::optional<Cost> walk(const SearchProblem& problem, const SearchNode& node, const SearchConfig& cfg,
                         TreeCounts& counts) {
  ++counts.nodes;
  std::optional<Cost> best;
  const bool is_solution = cfg.mode == BudgetMode::AtMost || node.chosen.size() == cfg.budget;
  if (is_solution) best = node.utility;
  const Children kids = expand(problem, node, cfg);
  for (const auto* child : {kids.right ? &*kids.right : nullptr, kids.left ? &*kids.left : nullptr}) {
    if (!child) continue;
    const auto sub = walk(problem, *child, cfg, counts);
    if (sub && (!best || *sub > *best)) best = sub;
  }
  if (best) {
    const Cost h_star = *best - node.utility;
    if (h1(problem, node, cfg.budget) < h_star) ++counts.h1_violations;
    if (h2(problem, node, cfg.budget) < h_star) ++counts.h2_violations;
  }
  return best;
}

Outcome admissibility_sweep() {
  const auto t0 = Clock::now();
  Rng rng(4);
  TreeCounts random_trees;
  std::size_t instances = 0;
  for (int i = 0; instances < 150; ++i) {
    const Catalog catalog = testing::small_catalog(2, rng);
    const NetworkModel net = testing::random_network(3 + static_cast<std::size_t>(i % 4), catalog, rng);
    if (!goal_derivable(build_attack_graph(net, catalog))) continue;
    SearchProblem problem(net, catalog);
    const std::size_t m = problem.candidates().size();
    if (m == 0 || m > 8) continue;
    problem.build_path_index(20);
    for (std::size_t k = 1; k <= 3; ++k) {
      for (auto mode : {BudgetMode::AtMost, BudgetMode::Exact}) {
        for (auto ord : {Ordering::Utility, Ordering::ShortestPath, Ordering::Random}) {
          SearchConfig cfg;
          cfg.budget = k;
          cfg.mode = mode;
          cfg.ordering = ord;
          cfg.seed = static_cast<std::uint64_t>(i);
          walk(problem, make_root(problem, cfg), cfg, random_trees);
        }
      }
    }
    ++instances;
  }

  const Fixture f = h1_counterexample_fixture();
  SearchProblem problem(f.network, f.catalog);
  SearchConfig cfg;
  cfg.budget = 2;
  TreeCounts engineered;
  walk(problem, make_root(problem, cfg), cfg, engineered);

  const bool ok = random_trees.h2_violations == 0 && engineered.h2_violations == 0 && engineered.h1_violations >= 1;
  return {ok, fmt("%zu instances (|cand|<=8, K<=3), %zu tree nodes: h2 violations=%zu (h1 violations=%zu); "
                  "engineered instance: h1 violations=%zu, h2 violations=%zu (%.2fs)",
                  instances, random_trees.nodes, random_trees.h2_violations, random_trees.h1_violations,
                  engineered.h1_violations, engineered.h2_violations, seconds_since(t0))};
}

// ---------------------------------------------------------------------------

Outcome optimizer_optimality() {
  const auto t0 = Clock::now();
  Rng rng(5);
  std::size_t instances = 0, runs = 0, mismatches = 0;
  for (int i = 0; instances < 120; ++i) {
    const Catalog catalog = testing::small_catalog(2 + static_cast<std::size_t>(i % 2), rng);
    const NetworkModel net = testing::random_network(4 + static_cast<std::size_t>(i % 8), catalog, rng);
    if (!goal_derivable(build_attack_graph(net, catalog))) continue;
    SearchProblem problem(net, catalog);
    const std::size_t m = problem.candidates().size();
    const std::size_t k = 1 + static_cast<std::size_t>(i % 3);
    if (m == 0 || choose(m, k) > 10'000) continue;
    problem.build_path_index(50);
    const SearchResult oracle = exhaustive_best(problem, k);
    for (auto alg : {SearchAlgorithm::DfBnB, SearchAlgorithm::AStar}) {
      for (auto ord : {Ordering::Utility, Ordering::ShortestPath, Ordering::Random}) {
        SearchConfig cfg;
        cfg.budget = k;
        cfg.algorithm = alg;
        cfg.ordering = ord;
        cfg.heuristic = SearchHeuristic::H2;
        cfg.seed = static_cast<std::uint64_t>(i);
        const SearchResult r = run_search(problem, cfg);
        if (r.best_utility != oracle.best_utility) ++mismatches;
        ++runs;
      }
    }
    ++instances;
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 300.0,
          fmt("%zu instances (C(m,K)<=1e4), %zu dfbnb/astar runs with h2, %zu utility mismatches vs exhaustive, "
              "%.2fs (limit 300s)",
              instances, runs, mismatches, secs)};
}

// ---------------------------------------------------------------------------

struct Suite {
  Catalog catalog;
  struct Net {
    std::string id;
    NetworkModel network;
  };
  std::vector<Net> nets;
};

Suite synthetic_suite() {
  Suite s;
  SyntheticCatalogParams cp;
  cp.vulns_per_os = 2;
  s.catalog = generate_synthetic_catalog(cp, 1);
  for (std::size_t n : {10, 20, 50}) {
    for (std::uint64_t trial = 1; trial <= 5; ++trial) {
      SyntheticNetworkParams p;
      p.n_hosts = n;
      s.nets.push_back({fmt("net%zu-t%llu", n, static_cast<unsigned long long>(trial)),
                        generate_synthetic_network(p, s.catalog, trial)});
    }
  }
  return s;
}

std::vector<Outcome> directional_claims(const Suite& suite) {
  const auto t0 = Clock::now();
  std::size_t cells = 0, astar_le = 0;
  std::map<Ordering, double> expanded_sum;
  std::size_t ordering_runs = 0;
  std::size_t p3_cells = 0, p3_ok = 0;
  std::vector<std::string> p3_failures;
  std::size_t p4_checked = 0, p4_ok = 0;
  std::vector<std::string> p4_failures;

  for (const auto& [id, net] : suite.nets) {
    SearchProblem problem(net, suite.catalog);
    problem.build_path_index(100);
    for (std::size_t k = 1; k <= 3; ++k) {
      std::map<std::pair<SearchAlgorithm, Ordering>, SearchResult> results;
      for (auto alg : {SearchAlgorithm::AStar, SearchAlgorithm::DfBnB}) {
        for (auto ord : {Ordering::Utility, Ordering::ShortestPath, Ordering::Random}) {
          SearchConfig cfg;
          cfg.budget = k;
          cfg.algorithm = alg;
          cfg.ordering = ord;
          cfg.seed = 1;
          results[{alg, ord}] = run_search(problem, cfg);
          expanded_sum[ord] += static_cast<double>(results[{alg, ord}].expanded_nodes);
        }
      }
      ++ordering_runs;
      for (auto ord : {Ordering::Utility, Ordering::ShortestPath, Ordering::Random}) {
        ++cells;
        if (results[{SearchAlgorithm::AStar, ord}].expanded_nodes <=
            results[{SearchAlgorithm::DfBnB, ord}].expanded_nodes) {
          ++astar_le;
        }
      }

      const SearchResult& best = results[{SearchAlgorithm::AStar, Ordering::Utility}];
      const EvaluationReport search_report = evaluate(net, suite.catalog, best.best_assignments, 1, k);
      double random_p3 = 0.0;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RandomObfuscationParams rp;
        rp.hosts = 1.0;
        rp.max_assignments = k;
        const RandomObfuscation r = obfuscate_random(net, suite.catalog, rp, seed);
        random_p3 += evaluate(net, suite.catalog, r.assignments, seed, k).relative_increase;
      }
      random_p3 /= 5.0;
      ++p3_cells;
      if (search_report.relative_increase >= random_p3) {
        ++p3_ok;
      } else {
        p3_failures.push_back(fmt("%s K=%zu (%.4f < %.4f)", id.c_str(), k, search_report.relative_increase, random_p3));
      }

      if (best.budget_used == best.best_assignments.size()) {
        ++p4_checked;
        if (search_report.precision == 1.0) {
          ++p4_ok;
        } else {
          p4_failures.push_back(fmt("%s K=%zu p4=%.3f", id.c_str(), k, search_report.precision));
        }
      }
    }
  }

  const double runs = 2.0 * static_cast<double>(ordering_runs);
  const double mean_u = expanded_sum[Ordering::Utility] / runs;
  const double mean_sp = expanded_sum[Ordering::ShortestPath] / runs;
  const double mean_r = expanded_sum[Ordering::Random] / runs;
  const double share = static_cast<double>(astar_le) / static_cast<double>(cells);
  auto join = [](const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size() && i < 4; ++i) s += (i ? "; " : " first: ") + v[i];
    return s;
  };

  std::vector<Outcome> out;
  out.push_back({share >= 0.9, fmt("(a) astar expanded <= dfbnb in %zu/%zu cells (%.1f%%, need >=90%%)", astar_le,
                                   cells, 100.0 * share)});
  out.push_back({mean_u <= mean_r && mean_sp <= mean_r,
                 fmt("(b) mean expanded nodes: utility %.1f, shortest-path %.1f, random %.1f", mean_u, mean_sp, mean_r)});
  out.push_back({p3_ok == p3_cells, fmt("(c) search p3 >= mean random p3 (5 seeds, equal K) in %zu/%zu network/budget "
                                        "cells%s",
                                        p3_ok, p3_cells, join(p3_failures).c_str())});
  out.push_back({p4_ok == p4_checked,
                 fmt("(d) p4 = 1 in %zu/%zu optimizer outputs with budget_used = |best|%s (suite %.1fs)", p4_ok,
                     p4_checked, join(p4_failures).c_str(), seconds_since(t0))});
  return out;
}

// ---------------------------------------------------------------------------

Outcome random_trend(const Suite& suite) {
  const auto t0 = Clock::now();
  std::size_t networks = 0, monotone = 0;
  std::vector<std::string> lines;
  for (const auto& [id, net] : suite.nets) {
    std::vector<double> p1, p3;
    for (double fraction : {0.1, 0.3, 0.5}) {
      double s1 = 0.0, s3 = 0.0;
      for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        RandomObfuscationParams rp;
        rp.hosts = fraction;
        const RandomObfuscation r = obfuscate_random(net, suite.catalog, rp, seed);
        const EvaluationReport rep = evaluate(net, suite.catalog, r.assignments, seed);
        s1 += static_cast<double>(rep.recalculations);
        s3 += rep.relative_increase;
      }
      p1.push_back(s1 / 5.0);
      p3.push_back(s3 / 5.0);
    }
    ++networks;
    const bool ok = p1[0] <= p1[1] && p1[1] <= p1[2] && p3[0] <= p3[1] && p3[1] <= p3[2];
    monotone += ok ? 1 : 0;
    lines.push_back(fmt("%s p1 %.2f/%.2f/%.2f p3 %.3f/%.3f/%.3f", id.c_str(), p1[0], p1[1], p1[2], p3[0], p3[1], p3[2]));
  }
  std::string detail = fmt("non-decreasing over 10/30/50%% in %zu/%zu networks:", monotone, networks);
  for (const auto& l : lines) detail += " [" + l + "]";
  detail += fmt(" (%.2fs)", seconds_since(t0));
  return {monotone == networks, detail};
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism(const fs::path& work) {
  const std::string cli = AGOBF_CLI;
  const std::vector<std::string> commands{
      "export-fixture --name h1-counterexample --out .",
      "export-fixture --name searchspace-k2 --out .",
      "--seed 5 generate --hosts 20 --vulns-per-os 2 --catalog-out cat.json --out net.json",
      "--seed 6 generate --hosts 10 --catalog-out cat10.csv --out net10.json",
      "build-graph --network net10.json --catalog cat10.csv --out graph10.json",
      "build-graph --network net.json --catalog cat.json --out graph.json",
      "plan --graph graph.json --out plan.json",
      "plan --graph graph.json --heuristic lmcut > plan_stdout.json",
      "--seed 3 obfuscate random --network net.json --catalog cat.json --fraction 0.3 --out random.json",
      "--seed 3 obfuscate search --network net.json --catalog cat.json --budget 2 --ordering random --out s1.json",
      "obfuscate search --network net.json --catalog cat.json --budget 2 --algorithm dfbnb "
      "--ordering shortest-path --out s2.json",
      "simulate --graph h1-counterexample.graph.json --out sim.json",
      "evaluate --network net.json --catalog cat.json --assignments random.json --out eval.json",
      "--format csv evaluate --network net.json --catalog cat.json --assignments random.json --out eval.csv",
      "sweep --spec spec.json --out sweep",
      "to-dot --graph graph.json --out graph.dot",
  };
  const char* spec = R"({"networks": [{"id": "n10", "generate": {"n_hosts": 10}, "seed": 2}],
    "catalog": {"generate": {"vulns_per_os": 2}, "seed": 1},
    "approaches": ["random", "random-k", "search"], "fractions": [0.1, 0.5], "budgets": [1, 2],
    "trials": 2, "seed": 7})";

  std::vector<fs::path> runs{work / "run1", work / "run2"};
  std::size_t failures = 0;
  for (const auto& dir : runs) {
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "spec.json") << spec;
    for (std::size_t i = 0; i < commands.size(); ++i) {
      // Console output is compared too.
      std::string line = "cd \"" + dir.string() + "\" && \"" + cli + "\" " + commands[i];
      if (line.find('>') == std::string::npos) line += " > console" + std::to_string(i) + ".txt";
      if (std::system(line.c_str()) != 0) ++failures;
    }
  }
  std::size_t files = 0, differing = 0;
  std::string first_diff;
  for (const auto& entry : fs::recursive_directory_iterator(runs[0])) {
    if (!entry.is_regular_file()) continue;
    ++files;
    const fs::path other = runs[1] / fs::relative(entry.path(), runs[0]);
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      ++differing;
      if (first_diff.empty()) first_diff = " first: " + fs::relative(entry.path(), runs[0]).string();
    }
  }
  return {failures == 0 && differing == 0 && files >= commands.size(),
          fmt("%zu invocations x2, %zu output files compared, %zu differ, %zu failed commands%s", commands.size(),
              files, differing, failures, first_diff.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "agobf-acceptance";
  fs::create_directories(work);

  bool all = true;
  auto report = [&](const std::string& name, const Outcome& o) {
    std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  };
  auto guarded = [&](const std::string& name, const std::function<Outcome()>& fn) {
    try {
      report(name, fn());
    } catch (const std::exception& e) {
      report(name, {false, std::string("exception: ") + e.what()});
    }
  };

  guarded("1 planner oracle equivalence", planner_oracle);
  guarded("2 h1 counterexample fixture", counterexample_values);
  guarded("3 attacker cost bounds", cost_bound_suite);
  guarded("4 h2 admissibility sweep", admissibility_sweep);
  guarded("5 optimizer optimality", optimizer_optimality);

  const Suite suite = synthetic_suite();
  try {
    const auto claims = directional_claims(suite);
    for (std::size_t i = 0; i < claims.size(); ++i) {
      report(std::string("6") + static_cast<char>('a' + i) + " directional claims", claims[i]);
    }
  } catch (const std::exception& e) {
    report("6 directional claims", {false, std::string("exception: ") + e.what()});
  }
  guarded("7 random baseline trend", [&] { return random_trend(suite); });
  guarded("8 CLI determinism", [&] { return cli_determinism(work); });
  return all ? 0 : 1;
}
