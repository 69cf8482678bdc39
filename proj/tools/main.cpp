// agobf: attack-graph obfuscation command line.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "agobf/aggraph.hpp"
#include "agobf/attacker.hpp"
#include "agobf/errors.hpp"
#include "agobf/fixtures.hpp"
#include "agobf/io.hpp"
#include "agobf/obf_random.hpp"
#include "agobf/obf_search.hpp"
#include "agobf/planner.hpp"
#include "agobf/sweep.hpp"

using namespace agobf;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  bool timings = false;
};

struct Inputs {
  std::string network;
  std::string catalog;
  std::string assignments;
  std::string graph;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
  } else {
    write_text_file(g.out, text);
  }
}

void emit_json(const Globals& g, const Json& json) { emit(g, json.dump(2) + "\n"); }

void require_json(const Globals& g, const std::string& command) {
  if (g.format != "json") throw ConfigError(command + " only writes JSON");
}

NetworkModel need_network(const Inputs& in) {
  if (in.network.empty()) throw ConfigError("--network is required");
  return load_network(in.network);
}

Catalog need_catalog(const Inputs& in) {
  if (in.catalog.empty()) throw ConfigError("--catalog is required");
  return load_catalog(in.catalog);
}

std::vector<Assignment> maybe_assignments(const Inputs& in) {
  if (in.assignments.empty()) return {};
  return assignments_from_json(read_json_file(in.assignments));
}

// --graph, or the network + catalog (+ assignments) it is built from.
AttackGraph need_graph(const Inputs& in) {
  if (!in.graph.empty()) {
    AttackGraph graph = load_graph(in.graph);
    auto problems = validate(graph);
    if (!problems.empty()) throw ValidationError(problems.front().kind + ": " + problems.front().message);
    return graph;
  }
  return apply_assignments(need_network(in), need_catalog(in), maybe_assignments(in));
}

PlannerOptions planner_options(const std::string& heuristic) {
  PlannerOptions options;
  if (heuristic == "auto") {
    options.heuristic = PlannerHeuristic::Auto;
  } else if (heuristic == "lmcut") {
    options.heuristic = PlannerHeuristic::LmCut;
  } else if (heuristic == "hmax") {
    options.heuristic = PlannerHeuristic::HMax;
  } else {
    throw ConfigError("unknown planner heuristic " + heuristic);
  }
  return options;
}

void add_inputs(CLI::App* cmd, Inputs& in, bool graph) {
  cmd->add_option("--network", in.network, "Network JSON");
  cmd->add_option("--catalog", in.catalog, "Vulnerability catalog (JSON or CSV)");
  cmd->add_option("--assignments", in.assignments, "Fake assignments JSON");
  if (graph) cmd->add_option("--graph", in.graph, "Attack graph JSON (instead of network/catalog)");
}

std::string report_csv(const EvaluationReport& r, bool timings) {
  std::string out = "n_assignments,p1,p2_states,p2_ms,p3,p4,p4_defined,baseline_cost,total_cost,seed\n";
  out += std::to_string(r.n_assignments) + "," + std::to_string(r.recalculations) + "," +
         std::to_string(r.planning_states) + "," +
         format_ratio(timings ? static_cast<double>(r.planning_time.count()) / 1e6 : 0.0) + "," +
         format_ratio(r.relative_increase) + "," + format_ratio(r.precision) + "," +
         (r.precision_defined ? "true" : "false") + "," + r.baseline_cost.to_string() + "," +
         r.total_cost.to_string() + "," + std::to_string(r.seed) + "\n";
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Attack graph obfuscation: build, plan, obfuscate, simulate and evaluate"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  app.add_flag("--timings", g.timings, "Write wall-clock columns (otherwise 0)");

  Inputs in;
  std::string planner_heuristic = "auto";

  auto* generate = app.add_subcommand("generate", "Generate a layered synthetic network");
  SyntheticNetworkParams net_params;
  SyntheticCatalogParams cat_params;
  std::string catalog_out;
  generate->add_option("--hosts", net_params.n_hosts, "Number of hosts")->capture_default_str();
  generate->add_option("--catalog", in.catalog, "Existing catalog to draw vulnerabilities from");
  generate->add_option("--catalog-out", catalog_out, "Where to write the catalog (.csv for CSV, JSON otherwise)");
  generate->add_option("--vulns-per-os", cat_params.vulns_per_os, "Generated catalog size per OS")
      ->capture_default_str();
  generate->add_option("--upstream-links", net_params.upstream_links)->capture_default_str();
  generate->add_option("--dead-hosts", net_params.dead_hosts)->capture_default_str();

  auto* build = app.add_subcommand("build-graph", "Build the attack graph (with fakes if assignments are given)");
  add_inputs(build, in, false);

  auto* plan = app.add_subcommand("plan", "Optimal attack plan");
  add_inputs(plan, in, true);
  plan->add_option("--heuristic", planner_heuristic, "auto, lmcut or hmax")->capture_default_str();

  auto* obfuscate = app.add_subcommand("obfuscate", "Place fake vulnerabilities");
  obfuscate->require_subcommand(1);
  auto* random = obfuscate->add_subcommand("random", "Random deceptive hosts");
  add_inputs(random, in, false);
  std::optional<double> fraction;
  std::optional<std::size_t> host_count;
  std::optional<std::size_t> max_assignments;
  random->add_option("--fraction", fraction, "Deceptive hosts as a fraction of all hosts");
  random->add_option("--host-count", host_count, "Deceptive hosts as a count");
  random->add_option("--max-assignments", max_assignments, "Cap on placed fakes");

  auto* search = obfuscate->add_subcommand("search", "Budgeted optimal placement");
  add_inputs(search, in, false);
  SearchConfig search_config;
  std::string algorithm = "astar", ordering = "utility", heuristic = "h2", mode = "at-most";
  search->add_option("--budget", search_config.budget, "Maximum number of fakes K")->capture_default_str();
  search->add_option("--algorithm", algorithm, "astar or dfbnb")->capture_default_str();
  search->add_option("--ordering", ordering, "utility, shortest-path or random")->capture_default_str();
  search->add_option("--heuristic", heuristic, "h1 or h2")->capture_default_str();
  search->add_option("--mode", mode, "at-most or exact")->capture_default_str();
  search->add_option("--pool-size", search_config.path_pool_size, "Path pool size for shortest-path ordering")
      ->capture_default_str();

  auto* simulate = app.add_subcommand("simulate", "Attacker simulation (APTC trace)");
  add_inputs(simulate, in, true);
  simulate->add_option("--heuristic", planner_heuristic, "auto, lmcut or hmax")->capture_default_str();

  auto* evaluate_cmd = app.add_subcommand("evaluate", "p1..p4 measures for a set of assignments");
  add_inputs(evaluate_cmd, in, false);
  std::optional<std::size_t> budget;
  evaluate_cmd->add_option("--budget", budget, "Budget for budget-normalized precision");

  auto* sweep = app.add_subcommand("sweep", "Run an experiment sweep; writes results.csv and summary.json");
  std::string spec_path;
  sweep->add_option("--spec", spec_path, "Sweep spec JSON")->required();

  auto* export_cmd = app.add_subcommand("export-fixture", "Write a named fixture");
  std::string fixture_name;
  export_cmd->add_option("--name", fixture_name, "Fixture name")->required();

  auto* dot = app.add_subcommand("to-dot", "Graphviz rendering of an attack graph");
  add_inputs(dot, in, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (generate->parsed()) {
      require_json(g, "generate");
      const Catalog catalog =
          in.catalog.empty() ? generate_synthetic_catalog(cat_params, g.seed) : load_catalog(in.catalog);
      if (!catalog_out.empty()) {
        if (std::filesystem::path(catalog_out).extension() == ".csv") {
          write_text_file(catalog_out, catalog_to_csv(catalog));
        } else {
          write_json_file(catalog_out, catalog_to_json(catalog));
        }
      }
      emit_json(g, network_to_json(generate_synthetic_network(net_params, catalog, g.seed)));
    } else if (build->parsed()) {
      require_json(g, "build-graph");
      emit_json(g, graph_to_json(apply_assignments(need_network(in), need_catalog(in), maybe_assignments(in))));
    } else if (plan->parsed()) {
      require_json(g, "plan");
      const AttackGraph graph = need_graph(in);
      PlanOutcome outcome = optimal_plan(graph, planner_options(planner_heuristic));
      if (!outcome.plan) throw UnreachableError("goal " + graph.node(graph.goal()).id + " is unreachable");
      Json out = plan_to_json(*outcome.plan);
      out["expanded_states"] = outcome.stats.expanded_states;
      out["planning_ms"] = g.timings ? static_cast<double>(outcome.stats.elapsed.count()) / 1e6 : 0.0;
      emit_json(g, out);
    } else if (random->parsed()) {
      require_json(g, "obfuscate random");
      if (fraction.has_value() == host_count.has_value()) {
        throw ConfigError("give exactly one of --fraction or --host-count");
      }
      RandomObfuscationParams params;
      if (fraction) {
        params.hosts = *fraction;
      } else {
        params.hosts = *host_count;
      }
      params.max_assignments = max_assignments;
      const RandomObfuscation r = obfuscate_random(need_network(in), need_catalog(in), params, g.seed);
      emit_json(g, Json{{"assignments", assignments_to_json(r.assignments)},
                        {"deceptive_hosts", r.deceptive_hosts},
                        {"graph", graph_to_json(r.graph)},
                        {"seed", g.seed}});
    } else if (search->parsed()) {
      search_config.algorithm = search_algorithm_from_string(algorithm);
      search_config.ordering = ordering_from_string(ordering);
      search_config.heuristic = search_heuristic_from_string(heuristic);
      search_config.mode = budget_mode_from_string(mode);
      search_config.seed = g.seed;
      const NetworkModel network = need_network(in);
      const Catalog catalog = need_catalog(in);
      SearchProblem problem(network, catalog);
      if (search_config.ordering == Ordering::ShortestPath) problem.build_path_index(search_config.path_pool_size);
      const SearchResult result = run_search(problem, search_config);
      if (g.format == "csv") {
        std::string text = "best_utility,baseline_ptc,budget_used,expanded_nodes,generated_nodes,search_ms,assignments\n";
        std::string list;
        for (const auto& a : result.best_assignments) list += (list.empty() ? "" : ";") + to_string(a);
        text += result.best_utility.to_string() + "," + result.baseline_ptc.to_string() + "," +
                std::to_string(result.budget_used) + "," + std::to_string(result.expanded_nodes) + "," +
                std::to_string(result.generated_nodes) + "," +
                format_ratio(g.timings ? static_cast<double>(result.elapsed.count()) / 1e6 : 0.0) + "," + list + "\n";
        emit(g, text);
      } else {
        Json out = search_result_to_json(result, g.timings);
        out["graph"] = graph_to_json(apply_assignments(network, catalog, result.best_assignments));
        out["config"] = {{"budget", search_config.budget},
                         {"algorithm", to_string(search_config.algorithm)},
                         {"ordering", to_string(search_config.ordering)},
                         {"heuristic", to_string(search_config.heuristic)},
                         {"mode", to_string(search_config.mode)},
                         {"seed", search_config.seed}};
        emit_json(g, out);
      }
    } else if (simulate->parsed()) {
      require_json(g, "simulate");
      emit_json(g, trace_to_json(aptc(need_graph(in), planner_options(planner_heuristic)), g.timings));
    } else if (evaluate_cmd->parsed()) {
      const EvaluationReport report =
          evaluate(need_network(in), need_catalog(in), maybe_assignments(in), g.seed, budget);
      if (g.format == "csv") {
        emit(g, report_csv(report, g.timings));
      } else {
        emit_json(g, report_to_json(report, g.timings));
      }
    } else if (sweep->parsed()) {
      const std::filesystem::path spec_file(spec_path);
      SweepSpec spec = sweep_spec_from_json(read_json_file(spec_file), spec_file.parent_path());
      spec.with_timings = spec.with_timings || g.timings;
      const SweepOutput result = run_sweep(spec);
      if (g.out.empty()) {
        if (g.format == "csv") {
          std::cout << result.csv;
        } else {
          std::cout << result.summary.dump(2) << "\n";
        }
      } else {
        const std::filesystem::path dir(g.out);
        write_text_file(dir / "results.csv", result.csv);
        write_json_file(dir / "summary.json", result.summary);
      }
    } else if (export_cmd->parsed()) {
      require_json(g, "export-fixture");
      const auto written = export_fixture(fixture_name, std::filesystem::path(g.out.empty() ? "." : g.out));
      for (const auto& p : written) std::cout << p.string() << "\n";
    } else if (dot->parsed()) {
      emit(g, graph_to_dot(need_graph(in)));
    }
  } catch (const UnreachableError& e) {
    std::cerr << "unreachable: " << e.what() << "\n";
    return 3;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
