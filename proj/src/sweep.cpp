#include "agobf/sweep.hpp"

#include <map>
#include <memory>

#include "agobf/attacker.hpp"
#include "agobf/errors.hpp"
#include "agobf/io.hpp"
#include "agobf/obf_random.hpp"

namespace agobf {

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

SyntheticNetworkParams network_params_from_json(const Json& json) {
  SyntheticNetworkParams p;
  p.n_hosts = json.value("n_hosts", p.n_hosts);
  if (json.contains("layer_fractions")) {
    const auto v = json.at("layer_fractions").get<std::vector<double>>();
    if (v.size() != 3) throw ConfigError("layer_fractions needs three values");
    p.layer_fractions = {v[0], v[1], v[2]};
  }
  if (json.contains("vulns_per_host_range")) {
    const auto v = json.at("vulns_per_host_range").get<std::vector<std::size_t>>();
    if (v.size() != 2) throw ConfigError("vulns_per_host_range needs two values");
    p.vulns_per_host_range = {v[0], v[1]};
  }
  p.upstream_links = json.value("upstream_links", p.upstream_links);
  p.intra_layer_link_probability = json.value("intra_layer_link_probability", p.intra_layer_link_probability);
  p.dead_hosts = json.value("dead_hosts", p.dead_hosts);
  return p;
}

double ms(std::chrono::nanoseconds d) { return static_cast<double>(d.count()) / 1e6; }

SweepRow fill_report(SweepRow row, const EvaluationReport& report) {
  row.n_assignments = report.n_assignments;
  row.p1 = report.recalculations;
  row.p2_states = report.planning_states;
  row.p2_ms = ms(report.planning_time);
  row.p3 = report.relative_increase;
  row.p4 = report.precision;
  return row;
}

}  // namespace

SweepSpec sweep_spec_from_json(const nlohmann::json& json, const std::filesystem::path& base_dir) {
  try {
    SweepSpec spec;
    if (!json.contains("networks") || !json.at("networks").is_array() || json.at("networks").empty()) {
      throw ConfigError("sweep spec needs a non-empty 'networks' array");
    }
    for (const auto& item : json.at("networks")) {
      SweepNetwork n;
      n.id = item.value("id", std::string());
      if (item.contains("path")) {
        n.path = resolve(base_dir, item.at("path").get<std::string>());
      } else if (item.contains("generate")) {
        n.generate = network_params_from_json(item.at("generate"));
        n.generate_seed = item.value("seed", n.generate_seed);
      } else {
        throw ConfigError("sweep network needs 'path' or 'generate'");
      }
      spec.networks.push_back(std::move(n));
    }
    if (json.contains("catalog")) {
      const Json& c = json.at("catalog");
      if (c.is_string()) {
        spec.catalog_path = resolve(base_dir, c.get<std::string>());
      } else {
        const Json gen = c.value("generate", Json::object());
        spec.catalog_params.operating_systems =
            gen.value("operating_systems", spec.catalog_params.operating_systems);
        spec.catalog_params.vulns_per_os = gen.value("vulns_per_os", spec.catalog_params.vulns_per_os);
        spec.catalog_params.v3_fraction = gen.value("v3_fraction", spec.catalog_params.v3_fraction);
        spec.catalog_seed = c.value("seed", spec.catalog_seed);
      }
    }
    spec.approaches = json.value("approaches", spec.approaches);
    for (const auto& a : spec.approaches) {
      if (a != "random" && a != "random-k" && a != "search") throw ConfigError("unknown approach " + a);
    }
    spec.fractions = json.value("fractions", spec.fractions);
    spec.budgets = json.value("budgets", spec.budgets);
    spec.trials = json.value("trials", spec.trials);
    spec.seed = json.value("seed", spec.seed);
    spec.with_timings = json.value("timings", spec.with_timings);
    if (json.contains("search")) {
      const Json& s = json.at("search");
      if (s.contains("algorithm")) spec.search.algorithm = search_algorithm_from_string(s.at("algorithm").get<std::string>());
      if (s.contains("ordering")) spec.search.ordering = ordering_from_string(s.at("ordering").get<std::string>());
      if (s.contains("heuristic")) spec.search.heuristic = search_heuristic_from_string(s.at("heuristic").get<std::string>());
      if (s.contains("mode")) spec.search.mode = budget_mode_from_string(s.at("mode").get<std::string>());
      spec.search.path_pool_size = s.value("path_pool_size", spec.search.path_pool_size);
    }
    if (spec.trials == 0) throw ConfigError("trials must be at least 1");
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep spec: ") + e.what());
  }
}

std::string sweep_csv_header() {
  return "network_id,n_hosts,approach,budget,trial,seed,n_assignments,p1,p2_states,p2_ms,p3,p4,"
         "expanded_nodes,budget_used,search_ms,error";
}

std::string sweep_row_to_csv(const SweepRow& row, bool with_timings) {
  auto timing = [&](double v) { return format_ratio(with_timings ? v : 0.0); };
  std::string error = row.error;
  for (char& ch : error) {
    if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
  }
  return row.network_id + "," + std::to_string(row.n_hosts) + "," + row.approach + "," + row.budget + "," +
         std::to_string(row.trial) + "," + std::to_string(row.seed) + "," + std::to_string(row.n_assignments) + "," +
         std::to_string(row.p1) + "," + std::to_string(row.p2_states) + "," + timing(row.p2_ms) + "," +
         format_ratio(row.p3) + "," + format_ratio(row.p4) + "," + std::to_string(row.expanded_nodes) + "," +
         std::to_string(row.budget_used) + "," + timing(row.search_ms) + "," + error;
}

SweepOutput run_sweep(const SweepSpec& spec) {
  const Catalog catalog = spec.catalog_path ? load_catalog(*spec.catalog_path)
                                            : generate_synthetic_catalog(spec.catalog_params, spec.catalog_seed);
  SweepOutput out;
  for (const auto& source : spec.networks) {
    NetworkModel network;
    SweepRow base;
    try {
      network = source.path ? load_network(*source.path)
                            : generate_synthetic_network(source.generate, catalog, source.generate_seed);
      base.network_id = source.id.empty() ? network.network_id : source.id;
      base.n_hosts = network.hosts.size();
    } catch (const std::exception& e) {
      base.network_id = source.id;
      base.approach = "load";
      base.error = e.what();
      out.rows.push_back(base);
      continue;
    }

    std::unique_ptr<SearchProblem> problem;
    std::string problem_error;
    for (const auto& approach : spec.approaches) {
      if (approach == "random") {
        for (double fraction : spec.fractions) {
          for (std::size_t t = 0; t < spec.trials; ++t) {
            SweepRow row = base;
            row.approach = approach;
            row.budget = format_ratio(fraction);
            row.trial = t;
            row.seed = spec.seed + t;
            try {
              RandomObfuscationParams params;
              params.hosts = fraction;
              const RandomObfuscation r = obfuscate_random(network, catalog, params, row.seed);
              row = fill_report(row, evaluate(network, catalog, r.assignments, row.seed));
            } catch (const std::exception& e) {
              row.error = e.what();
            }
            out.rows.push_back(row);
          }
        }
        continue;
      }
      for (std::size_t budget : spec.budgets) {
        for (std::size_t t = 0; t < spec.trials; ++t) {
          SweepRow row = base;
          row.approach = approach;
          row.budget = std::to_string(budget);
          row.trial = t;
          row.seed = spec.seed + t;
          try {
            if (approach == "random-k") {
              RandomObfuscationParams params;
              params.hosts = 1.0;
              params.max_assignments = budget;
              const RandomObfuscation r = obfuscate_random(network, catalog, params, row.seed);
              row = fill_report(row, evaluate(network, catalog, r.assignments, row.seed, budget));
            } else {
              if (!problem && problem_error.empty()) {
                try {
                  problem = std::make_unique<SearchProblem>(network, catalog);
                  if (spec.search.ordering == Ordering::ShortestPath) {
                    problem->build_path_index(spec.search.path_pool_size);
                  }
                } catch (const std::exception& e) {
                  problem_error = e.what();
                }
              }
              if (!problem) throw ConfigError(problem_error);
              SearchConfig config = spec.search;
              config.budget = budget;
              config.seed = row.seed;
              const SearchResult result = run_search(*problem, config);
              row = fill_report(row, evaluate(network, catalog, result.best_assignments, row.seed, budget));
              row.expanded_nodes = result.expanded_nodes;
              row.budget_used = result.budget_used;
              row.search_ms = ms(result.elapsed);
            }
          } catch (const std::exception& e) {
            row.error = e.what();
          }
          out.rows.push_back(row);
        }
      }
    }
  }

  out.csv = sweep_csv_header() + "\n";
  for (const auto& row : out.rows) out.csv += sweep_row_to_csv(row, spec.with_timings) + "\n";

  struct Cell {
    std::size_t rows = 0, errors = 0;
    double p1 = 0, p2 = 0, p3 = 0, p4 = 0, expanded = 0;
  };
  std::map<std::tuple<std::string, std::string, std::string>, Cell> cells;
  for (const auto& row : out.rows) {
    Cell& c = cells[{row.network_id, row.approach, row.budget}];
    if (!row.error.empty()) {
      ++c.errors;
      continue;
    }
    ++c.rows;
    c.p1 += static_cast<double>(row.p1);
    c.p2 += static_cast<double>(row.p2_states);
    c.p3 += row.p3;
    c.p4 += row.p4;
    c.expanded += static_cast<double>(row.expanded_nodes);
  }
  Json summary = Json::array();
  for (const auto& [key, c] : cells) {
    const double n = c.rows == 0 ? 1.0 : static_cast<double>(c.rows);
    summary.push_back({{"network_id", std::get<0>(key)},
                       {"approach", std::get<1>(key)},
                       {"budget", std::get<2>(key)},
                       {"rows", c.rows},
                       {"errors", c.errors},
                       {"mean_p1", c.p1 / n},
                       {"mean_p2_states", c.p2 / n},
                       {"mean_p3", c.p3 / n},
                       {"mean_p4", c.p4 / n},
                       {"mean_expanded_nodes", c.expanded / n}});
  }
  out.summary = Json{{"cells", summary}};
  return out;
}

}  // namespace agobf
