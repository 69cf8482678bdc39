#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "agobf/aggraph.hpp"
#include "agobf/attacker.hpp"
#include "agobf/netmodel.hpp"
#include "agobf/obf_search.hpp"
#include "agobf/planner.hpp"

namespace agobf {

using Json = nlohmann::json;

// All to_json outputs use sorted keys and sorted collections, so dumping the
// same value twice yields the same bytes.

Json catalog_to_json(const Catalog& catalog);
Catalog catalog_from_json(const Json& json);
/// Header: vuln_id,cvss_version,exploitability_subscore,affected_os with
/// affected_os semicolon-separated.
Catalog catalog_from_csv(std::string_view text);
std::string catalog_to_csv(const Catalog& catalog);
/// Dispatches on extension: .csv, otherwise JSON.
Catalog load_catalog(const std::filesystem::path& path);

Json network_to_json(const NetworkModel& network);
NetworkModel network_from_json(const Json& json);
NetworkModel load_network(const std::filesystem::path& path);

Json graph_to_json(const AttackGraph& graph);
AttackGraph graph_from_json(const Json& json);
AttackGraph load_graph(const std::filesystem::path& path);
/// Diamonds for privileges, ovals for exploits, boxes for configs; fake
/// configs dashed.
std::string graph_to_dot(const AttackGraph& graph);

Json assignments_to_json(std::span<const Assignment> assignments);
std::vector<Assignment> assignments_from_json(const Json& json);

Json plan_to_json(const AttackPlan& plan);
Json trace_to_json(const SimulationTrace& trace, bool with_timings);
Json report_to_json(const EvaluationReport& report, bool with_timings);
Json search_result_to_json(const SearchResult& result, bool with_timings);

/// Costs are written as JSON numbers with at most six decimals.
Json cost_to_json(Cost cost);

Json read_json_file(const std::filesystem::path& path);
/// Writes json.dump(2) plus a trailing newline.
void write_json_file(const std::filesystem::path& path, const Json& json);
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

/// Fixed-precision decimal rendering used by CSV reports.
std::string format_ratio(double value);

}  // namespace agobf
