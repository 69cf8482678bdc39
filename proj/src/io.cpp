#include "agobf/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "agobf/errors.hpp"

namespace agobf {

namespace {

double ms(std::chrono::nanoseconds d) { return static_cast<double>(d.count()) / 1e6; }

const Json& require(const Json& json, const char* key, const char* what) {
  if (!json.is_object() || !json.contains(key)) {
    throw ValidationError(std::string(what) + ": missing field '" + key + "'");
  }
  return json.at(key);
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    if (ch == sep) {
      out.push_back(current);
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  out.push_back(current);
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n\"");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n\"");
  return s.substr(first, last - first + 1);
}

Cost cost_from_json(const Json& json) {
  if (json.is_string() && json.get<std::string>() == "inf") return Cost::infinity();
  if (!json.is_number()) throw ValidationError("cost must be a number");
  return Cost::from_double(json.get<double>());
}

Json assignment_to_json(const Assignment& a) { return Json{{"host_id", a.host_id}, {"vuln_id", a.vuln_id}}; }

Assignment assignment_from_json(const Json& json) {
  return {require(json, "host_id", "assignment").get<std::string>(),
          require(json, "vuln_id", "assignment").get<std::string>()};
}

}  // namespace

Json cost_to_json(Cost cost) {
  if (cost.is_infinite()) return "inf";
  return Json::parse(cost.to_string());
}

Json catalog_to_json(const Catalog& catalog) {
  Json records = Json::array();
  for (const auto& [id, r] : catalog.records()) {
    records.push_back({{"vuln_id", r.vuln_id},
                       {"cvss_version", to_string(r.cvss_version)},
                       {"exploitability_subscore", r.exploitability_subscore},
                       {"affected_os", r.affected_os}});
  }
  return Json{{"vulnerabilities", records}};
}

Catalog catalog_from_json(const Json& json) {
  const Json& list = json.is_array() ? json : require(json, "vulnerabilities", "catalog");
  if (!list.is_array()) throw ValidationError("catalog: 'vulnerabilities' must be an array");
  Catalog catalog;
  for (const auto& item : list) {
    VulnerabilityRecord r;
    r.vuln_id = require(item, "vuln_id", "vulnerability").get<std::string>();
    const Json& version = require(item, "cvss_version", "vulnerability");
    r.cvss_version = cvss_version_from_string(version.is_string() ? version.get<std::string>() : version.dump());
    r.exploitability_subscore = require(item, "exploitability_subscore", "vulnerability").get<double>();
    for (const auto& os : require(item, "affected_os", "vulnerability")) r.affected_os.insert(os.get<std::string>());
    catalog.add(std::move(r));
  }
  return catalog;
}

Catalog catalog_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("catalog CSV is empty");
  std::vector<std::string> header = split(line, ',');
  for (auto& h : header) h = trim(h);
  auto column = [&](std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return i;
    }
    throw ValidationError("catalog CSV lacks column " + std::string(name));
  };
  const std::size_t c_id = column("vuln_id");
  const std::size_t c_version = column("cvss_version");
  const std::size_t c_score = column("exploitability_subscore");
  const std::size_t c_os = column("affected_os");
  Catalog catalog;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split(line, ',');
    if (cells.size() != header.size()) {
      throw ValidationError("catalog CSV line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells");
    }
    VulnerabilityRecord r;
    r.vuln_id = trim(cells[c_id]);
    r.cvss_version = cvss_version_from_string(trim(cells[c_version]));
    try {
      r.exploitability_subscore = std::stod(trim(cells[c_score]));
    } catch (const std::exception&) {
      throw ValidationError("catalog CSV line " + std::to_string(line_no) + ": bad subscore");
    }
    for (const auto& os : split(trim(cells[c_os]), ';')) {
      if (!trim(os).empty()) r.affected_os.insert(trim(os));
    }
    catalog.add(std::move(r));
  }
  return catalog;
}

std::string catalog_to_csv(const Catalog& catalog) {
  std::string out = "vuln_id,cvss_version,exploitability_subscore,affected_os\n";
  for (const auto& [id, r] : catalog.records()) {
    std::string os;
    for (const auto& o : r.affected_os) os += (os.empty() ? "" : ";") + o;
    char score[32];
    std::snprintf(score, sizeof score, "%g", r.exploitability_subscore);
    out += r.vuln_id + "," + to_string(r.cvss_version) + "," + score + "," + os + "\n";
  }
  return out;
}

Catalog load_catalog(const std::filesystem::path& path) {
  if (path.extension() == ".csv") return catalog_from_csv(read_text_file(path));
  return catalog_from_json(read_json_file(path));
}

Json network_to_json(const NetworkModel& network) {
  Json hosts = Json::array();
  for (const auto& [id, h] : network.hosts) {
    Json host{{"host_id", h.host_id}, {"os", h.os}, {"installed_vulns", h.installed_vulns}};
    if (h.layer) host["layer"] = to_string(*h.layer);
    hosts.push_back(std::move(host));
  }
  Json reach = Json::array();
  for (const auto& [src, dst] : network.reachability) reach.push_back({src, dst});
  return Json{{"network_id", network.network_id},
              {"hosts", hosts},
              {"reachability", reach},
              {"attacker_entry", network.attacker_entry},
              {"goal", {{"host_id", network.goal.host_id}, {"privilege", network.goal.privilege}}}};
}

NetworkModel network_from_json(const Json& json) {
  NetworkModel net;
  net.network_id = json.value("network_id", std::string());
  for (const auto& item : require(json, "hosts", "network")) {
    Host h;
    h.host_id = require(item, "host_id", "host").get<std::string>();
    h.os = require(item, "os", "host").get<std::string>();
    if (item.contains("installed_vulns")) {
      for (const auto& v : item.at("installed_vulns")) h.installed_vulns.insert(v.get<std::string>());
    }
    if (item.contains("layer") && !item.at("layer").is_null()) h.layer = layer_from_string(item.at("layer").get<std::string>());
    if (!net.hosts.emplace(h.host_id, h).second) throw ValidationError("duplicate host " + h.host_id);
  }
  for (const auto& pair : require(json, "reachability", "network")) {
    if (!pair.is_array() || pair.size() != 2) throw ValidationError("reachability entries must be [src, dst]");
    net.reachability.emplace(pair[0].get<std::string>(), pair[1].get<std::string>());
  }
  net.attacker_entry = json.value("attacker_entry", std::string(kExternalLocation));
  const Json& goal = require(json, "goal", "network");
  if (goal.is_string()) {
    net.goal.host_id = goal.get<std::string>();
  } else {
    net.goal.host_id = require(goal, "host_id", "goal").get<std::string>();
    net.goal.privilege = goal.value("privilege", std::string("root"));
  }
  return net;
}

NetworkModel load_network(const std::filesystem::path& path) { return network_from_json(read_json_file(path)); }

Json graph_to_json(const AttackGraph& graph) {
  Json nodes = Json::array();
  for (const auto& n : graph.nodes()) {
    Json node{{"id", n.id}, {"kind", to_string(n.kind)}};
    if (n.kind == NodeKind::Config) {
      node["cost"] = cost_to_json(n.cost);
      node["fake"] = n.fake;
    }
    if (n.provenance) node["provenance"] = assignment_to_json(*n.provenance);
    nodes.push_back(std::move(node));
  }
  Json edges = Json::array();
  for (const auto& e : graph.edges()) edges.push_back(Json{{"from", e.from}, {"to", e.to}});
  return Json{{"nodes", nodes},
              {"edges", edges},
              {"goal", graph.node(graph.goal()).id},
              {"source", graph.node(graph.source()).id}};
}

AttackGraph graph_from_json(const Json& json) {
  std::vector<Node> nodes;
  for (const auto& item : require(json, "nodes", "graph")) {
    Node n;
    n.id = require(item, "id", "node").get<std::string>();
    n.kind = node_kind_from_string(require(item, "kind", "node").get<std::string>());
    if (item.contains("cost")) n.cost = cost_from_json(item.at("cost"));
    n.fake = item.value("fake", false);
    if (item.contains("provenance") && !item.at("provenance").is_null()) {
      n.provenance = assignment_from_json(item.at("provenance"));
    }
    nodes.push_back(std::move(n));
  }
  std::vector<Edge> edges;
  for (const auto& pair : require(json, "edges", "graph")) {
    if (pair.is_object()) {
      edges.push_back({require(pair, "from", "edge").get<std::string>(), require(pair, "to", "edge").get<std::string>()});
      continue;
    }
    if (!pair.is_array() || pair.size() != 2) throw ValidationError("edges must be {from, to} objects");
    edges.push_back({pair[0].get<std::string>(), pair[1].get<std::string>()});
  }
  return AttackGraph(std::move(nodes), std::move(edges), require(json, "goal", "graph").get<std::string>(),
                     require(json, "source", "graph").get<std::string>());
}

AttackGraph load_graph(const std::filesystem::path& path) { return graph_from_json(read_json_file(path)); }

std::string graph_to_dot(const AttackGraph& graph) {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
      if (ch == '"' || ch == '\\') out.push_back('\\');
      out.push_back(ch);
    }
    return out + "\"";
  };
  std::string out = "digraph attack_graph {\n  rankdir=BT;\n";
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    const Node& n = graph.node(i);
    std::string attrs;
    switch (n.kind) {
      case NodeKind::Privilege:
        attrs = "shape=diamond";
        break;
      case NodeKind::Exploit:
        attrs = "shape=ellipse";
        break;
      case NodeKind::Config:
        attrs = "shape=box,label=" + quote(n.id + "\\n" + n.cost.to_string());
        if (n.fake) attrs += ",style=dashed";
        break;
    }
    if (i == graph.goal()) attrs += ",peripheries=2";
    if (i == graph.source()) attrs += ",style=bold";
    out += "  " + quote(n.id) + " [" + attrs + "];\n";
  }
  for (const auto& e : graph.edges()) out += "  " + quote(e.from) + " -> " + quote(e.to) + ";\n";
  out += "}\n";
  return out;
}

Json assignments_to_json(std::span<const Assignment> assignments) {
  Json out = Json::array();
  for (const auto& a : assignments) out.push_back(assignment_to_json(a));
  return out;
}

std::vector<Assignment> assignments_from_json(const Json& json) {
  const Json& list = json.is_array() ? json : require(json, "assignments", "assignments file");
  std::vector<Assignment> out;
  for (const auto& item : list) out.push_back(assignment_from_json(item));
  return out;
}

Json plan_to_json(const AttackPlan& plan) {
  return Json{{"cost", cost_to_json(plan.cost)},
              {"node_set", plan.node_set},
              {"exec_order", plan.exec_order},
              {"source", plan.source},
              {"goal", plan.goal}};
}

Json trace_to_json(const SimulationTrace& trace, bool with_timings) {
  Json iterations = Json::array();
  for (const auto& it : trace.iterations) {
    Json entry{{"plan", plan_to_json(it.plan)},
               {"paid_prefix_cost", cost_to_json(it.paid_prefix_cost)},
               {"discovered_fake", it.discovered_fake ? assignment_to_json(*it.discovered_fake) : Json(nullptr)},
               {"zeroed_configs", it.zeroed_configs},
               {"expanded_states", it.planning.expanded_states},
               {"planning_ms", with_timings ? ms(it.planning.elapsed) : 0.0}};
    iterations.push_back(std::move(entry));
  }
  return Json{{"iterations", iterations},
              {"total_cost", cost_to_json(trace.total_cost)},
              {"expanded_states", trace.planning_effort.expanded_states},
              {"planning_ms", with_timings ? ms(trace.planning_effort.elapsed) : 0.0}};
}

Json report_to_json(const EvaluationReport& report, bool with_timings) {
  return Json{{"p1_recalculations", report.recalculations},
              {"p2_planning_states", report.planning_states},
              {"p2_planning_ms", with_timings ? ms(report.planning_time) : 0.0},
              {"p3_relative_increase", report.relative_increase},
              {"p4_precision", report.precision},
              {"p4_defined", report.precision_defined},
              {"budget_precision", report.budget_precision ? Json(*report.budget_precision) : Json(nullptr)},
              {"n_assignments", report.n_assignments},
              {"baseline_cost", cost_to_json(report.baseline_cost)},
              {"total_cost", cost_to_json(report.total_cost)},
              {"seed", report.seed},
              {"trace", trace_to_json(report.trace, with_timings)}};
}

Json search_result_to_json(const SearchResult& result, bool with_timings) {
  return Json{{"best_assignments", assignments_to_json(result.best_assignments)},
              {"best_utility", cost_to_json(result.best_utility)},
              {"baseline_ptc", cost_to_json(result.baseline_ptc)},
              {"expanded_nodes", result.expanded_nodes},
              {"generated_nodes", result.generated_nodes},
              {"budget_used", result.budget_used},
              {"search_ms", with_timings ? ms(result.elapsed) : 0.0}};
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& json) {
  write_text_file(path, json.dump(2) + "\n");
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string format_ratio(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

}  // namespace agobf
