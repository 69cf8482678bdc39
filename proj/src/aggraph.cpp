#include "agobf/aggraph.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>

#include "agobf/errors.hpp"

namespace agobf {

std::string to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Privilege:
      return "privilege";
    case NodeKind::Exploit:
      return "exploit";
    case NodeKind::Config:
      return "config";
  }
  return "?";
}

NodeKind node_kind_from_string(std::string_view text) {
  if (text == "privilege") return NodeKind::Privilege;
  if (text == "exploit") return NodeKind::Exploit;
  if (text == "config") return NodeKind::Config;
  throw ValidationError("unknown node kind " + std::string(text));
}

AttackGraph::AttackGraph(std::vector<Node> nodes, std::vector<Edge> edges, std::string goal_id,
                         std::string source_id)
    : nodes_(std::move(nodes)) {
  std::sort(nodes_.begin(), nodes_.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (nodes_[i].id == nodes_[i - 1].id) throw ValidationError("duplicate node id " + nodes_[i].id);
  }
  auto topology = std::make_shared<Topology>();
  topology->edges = std::move(edges);
  std::sort(topology->edges.begin(), topology->edges.end());
  topology->edges.erase(std::unique(topology->edges.begin(), topology->edges.end()), topology->edges.end());
  topology->out.assign(nodes_.size(), {});
  topology->in.assign(nodes_.size(), {});
  for (const auto& e : topology->edges) {
    auto from = find(e.from);
    auto to = find(e.to);
    if (!from || !to) throw ValidationError("edge " + e.from + " -> " + e.to + " names an unknown node");
    topology->out[*from].push_back(*to);
    topology->in[*to].push_back(*from);
  }
  for (auto& list : topology->in) std::sort(list.begin(), list.end());
  topology_ = std::move(topology);
  auto goal = find(goal_id);
  if (!goal) throw ValidationError("goal " + goal_id + " is not a node");
  auto source = find(source_id);
  if (!source) throw ValidationError("source " + source_id + " is not a node");
  goal_ = *goal;
  source_ = *source;
}

std::optional<NodeIndex> AttackGraph::find(std::string_view id) const {
  auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                             [](const Node& node, std::string_view key) { return node.id < key; });
  if (it == nodes_.end() || it->id != id) return std::nullopt;
  return static_cast<NodeIndex>(it - nodes_.begin());
}

NodeIndex AttackGraph::index_of(std::string_view id) const {
  auto i = find(id);
  if (!i) throw ValidationError("unknown node " + std::string(id));
  return *i;
}

std::vector<NodeIndex> AttackGraph::nodes_of_kind(NodeKind kind) const {
  std::vector<NodeIndex> out;
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].kind == kind) out.push_back(i);
  }
  return out;
}

std::size_t AttackGraph::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [kind](const Node& n) { return n.kind == kind; }));
}

std::map<Assignment, std::vector<NodeIndex>> AttackGraph::provenance() const {
  std::map<Assignment, std::vector<NodeIndex>> out;
  for (NodeIndex i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].provenance) out[*nodes_[i].provenance].push_back(i);
  }
  return out;
}

std::vector<Assignment> AttackGraph::assignments() const {
  std::set<Assignment> seen;
  for (const auto& n : nodes_) {
    if (n.provenance) seen.insert(*n.provenance);
  }
  return {seen.begin(), seen.end()};
}

bool AttackGraph::has_fakes() const {
  return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.fake; });
}

AttackGraph AttackGraph::with_costs(std::span<const std::pair<NodeIndex, Cost>> updates) const {
  AttackGraph out = *this;
  for (const auto& [i, cost] : updates) out.nodes_.at(i).cost = cost;
  return out;
}

AttackGraph AttackGraph::with_provenance(std::vector<std::optional<Assignment>> provenance) const {
  if (provenance.size() != nodes_.size()) throw std::invalid_argument("provenance size mismatch");
  AttackGraph out = *this;
  for (std::size_t i = 0; i < nodes_.size(); ++i) out.nodes_[i].provenance = std::move(provenance[i]);
  return out;
}

AttackGraph AttackGraph::without_fake_marks() const {
  AttackGraph out = *this;
  for (auto& n : out.nodes_) {
    n.fake = false;
    n.provenance.reset();
  }
  return out;
}

std::string privilege_node_id(std::string_view location, std::string_view privilege) {
  return "h:" + std::string(location) + "|priv:" + std::string(privilege);
}

std::string config_node_id(std::string_view host, std::string_view vuln) {
  return "h:" + std::string(host) + "|v:" + std::string(vuln) + "|vulExists";
}

std::string exploit_node_id(std::string_view host, std::string_view vuln, std::string_view from_location) {
  return "h:" + std::string(host) + "|v:" + std::string(vuln) + "|remoteExploit<-" + std::string(from_location);
}

namespace {

std::string source_node_id(const NetworkModel& network) {
  if (network.attacker_entry == kExternalLocation) return privilege_node_id(kExternalLocation, "netAccess");
  return privilege_node_id(network.attacker_entry, "root");
}

AttackGraph generate(const NetworkModel& network, const Catalog& catalog, const std::set<Assignment>& fakes) {
  std::map<std::string, Node> nodes;
  std::vector<Edge> edges;
  auto add_node = [&](const std::string& id, NodeKind kind) -> Node& {
    auto [it, inserted] = nodes.try_emplace(id);
    if (inserted) {
      it->second.id = id;
      it->second.kind = kind;
    }
    return it->second;
  };

  std::map<std::string, std::vector<std::string>, std::less<>> adjacency;
  for (const auto& [src, dst] : network.reachability) adjacency[src].push_back(dst);

  const std::string source_id = source_node_id(network);
  add_node(source_id, NodeKind::Privilege);

  std::deque<std::string> frontier{network.attacker_entry};
  std::set<std::string, std::less<>> owned{network.attacker_entry};
  while (!frontier.empty()) {
    const std::string location = frontier.front();
    frontier.pop_front();
    auto adj = adjacency.find(location);
    if (adj == adjacency.end()) continue;
    const std::string from_privilege = location == network.attacker_entry ? source_id : privilege_node_id(location);
    for (const auto& dst : adj->second) {
      if (dst == network.attacker_entry) continue;
      const Host& host = network.hosts.at(dst);
      for (const auto& vuln : host.installed_vulns) {
        const std::string cid = config_node_id(dst, vuln);
        Node& config = add_node(cid, NodeKind::Config);
        config.cost = catalog.cost_of(vuln);
        if (fakes.contains(Assignment{dst, vuln})) {
          config.fake = true;
          config.provenance = Assignment{dst, vuln};
        }
        const std::string eid = exploit_node_id(dst, vuln, location);
        add_node(eid, NodeKind::Exploit);
        edges.push_back({eid, from_privilege});
        edges.push_back({eid, cid});
        const std::string pid = privilege_node_id(dst);
        add_node(pid, NodeKind::Privilege);
        edges.push_back({pid, eid});
        if (owned.insert(dst).second) frontier.push_back(dst);
      }
    }
  }

  const std::string goal_id = privilege_node_id(network.goal.host_id, network.goal.privilege);
  add_node(goal_id, NodeKind::Privilege);

  std::vector<Node> list;
  list.reserve(nodes.size());
  for (auto& [id, node] : nodes) list.push_back(std::move(node));
  return AttackGraph(std::move(list), std::move(edges), goal_id, source_id);
}

// Least fixpoint of derivability. Configs in `disabled` are unusable; every
// other config is usable.
std::vector<bool> derivation_closure(const AttackGraph& graph, const std::vector<bool>& disabled) {
  const std::size_t n = graph.size();
  std::vector<bool> done(n, false);
  std::vector<std::size_t> missing(n, 0);
  std::deque<NodeIndex> ready;
  for (NodeIndex i = 0; i < n; ++i) {
    const Node& node = graph.node(i);
    if (node.kind == NodeKind::Exploit) {
      missing[i] = graph.requirements(i).size();
      if (missing[i] == 0) ready.push_back(i);
    } else if (node.kind == NodeKind::Config && !disabled[i]) {
      ready.push_back(i);
    }
  }
  ready.push_back(graph.source());
  while (!ready.empty()) {
    NodeIndex i = ready.front();
    ready.pop_front();
    if (done[i]) continue;
    done[i] = true;
    for (NodeIndex d : graph.dependents(i)) {
      if (done[d]) continue;
      if (graph.node(d).kind == NodeKind::Exploit) {
        if (--missing[d] == 0) ready.push_back(d);
      } else if (graph.node(d).kind == NodeKind::Privilege) {
        ready.push_back(d);
      }
    }
  }
  return done;
}

// Attributes every node flagged in `is_new` to the least assignment whose
// fake config causally reaches it.
void attribute(std::vector<std::optional<Assignment>>& labels, const AttackGraph& graph,
               const std::vector<bool>& is_new) {
  std::vector<bool> labeled(graph.size(), false);
  std::map<Assignment, NodeIndex> roots;
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (graph.node(i).fake && graph.node(i).provenance) roots.emplace(*graph.node(i).provenance, i);
  }
  for (const auto& [assignment, root] : roots) {
    if (labeled[root]) continue;
    std::deque<NodeIndex> queue{root};
    labeled[root] = true;
    labels[root] = assignment;
    auto visit = [&](NodeIndex j) {
      if (is_new[j] && !labeled[j]) {
        labeled[j] = true;
        labels[j] = assignment;
        queue.push_back(j);
      }
    };
    while (!queue.empty()) {
      NodeIndex i = queue.front();
      queue.pop_front();
      for (NodeIndex d : graph.dependents(i)) visit(d);
      if (graph.node(i).kind == NodeKind::Exploit) {
        for (NodeIndex r : graph.requirements(i)) {
          if (graph.node(r).kind == NodeKind::Config && !graph.node(r).fake) visit(r);
        }
      }
    }
  }
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (is_new[i] && !labeled[i]) {
      throw std::logic_error("node " + graph.node(i).id + " is new but not caused by any assignment");
    }
  }
}

// Nodes that exist only because of fake configs: underivable without them
// (configs: used by no surviving exploit).
std::vector<bool> fake_dependent_nodes(const AttackGraph& graph) {
  std::vector<bool> fake_configs(graph.size(), false);
  for (NodeIndex i = 0; i < graph.size(); ++i) fake_configs[i] = graph.node(i).fake;
  const std::vector<bool> alive = derivation_closure(graph, fake_configs);
  std::vector<bool> is_new(graph.size(), false);
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    const Node& node = graph.node(i);
    if (i == graph.goal() || i == graph.source()) continue;
    if (node.kind == NodeKind::Config) {
      bool used = false;
      if (!node.fake) {
        for (NodeIndex d : graph.dependents(i)) used = used || alive[d];
      }
      is_new[i] = !used;
    } else {
      is_new[i] = !alive[i];
    }
  }
  return is_new;
}

AttackGraph with_attribution(const AttackGraph& graph) {
  std::vector<std::optional<Assignment>> provenance(graph.size());
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (graph.node(i).fake) provenance[i] = graph.node(i).provenance;
  }
  attribute(provenance, graph, fake_dependent_nodes(graph));
  return graph.with_provenance(std::move(provenance));
}

}  // namespace

AttackGraph build_attack_graph(const NetworkModel& network, const Catalog& catalog) {
  validate_network(network, catalog);
  return generate(network, catalog, {});
}

AttackGraph apply_assignments(const NetworkModel& network, const Catalog& catalog,
                              std::span<const Assignment> assignments) {
  validate_network(network, catalog);
  validate_assignments(network, catalog, assignments);
  const NetworkModel modified = apply_assignments(network, assignments);
  const std::set<Assignment> fakes(assignments.begin(), assignments.end());
  return with_attribution(generate(modified, catalog, fakes));
}

AttackGraph remove_assignment(const AttackGraph& graph, const Assignment& assignment) {
  std::vector<bool> owned(graph.size(), false);
  std::vector<bool> disabled(graph.size(), false);
  bool known = false;
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    const Node& node = graph.node(i);
    if (node.provenance == assignment) {
      known = true;
      owned[i] = true;
      if (node.fake) disabled[i] = true;
    }
  }
  if (!known) throw ValidationError("assignment " + to_string(assignment) + " has no nodes in the graph");

  const std::vector<bool> before = derivation_closure(graph, std::vector<bool>(graph.size(), false));
  const std::vector<bool> after = derivation_closure(graph, disabled);

  std::vector<bool> drop(graph.size(), false);
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (i == graph.goal() || i == graph.source()) continue;
    const Node& node = graph.node(i);
    if (node.kind == NodeKind::Config) continue;
    drop[i] = (before[i] && !after[i]) || (owned[i] && !after[i]);
  }
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    const Node& node = graph.node(i);
    if (node.kind != NodeKind::Config) continue;
    if (disabled[i]) {
      drop[i] = true;
      continue;
    }
    if (!node.provenance) continue;
    bool used = false;
    for (NodeIndex d : graph.dependents(i)) used = used || !drop[d];
    drop[i] = !used;
  }

  std::vector<Node> nodes;
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (!drop[i]) nodes.push_back(graph.node(i));
  }
  std::vector<Edge> edges;
  for (const auto& e : graph.edges()) {
    if (!drop[graph.index_of(e.from)] && !drop[graph.index_of(e.to)]) edges.push_back(e);
  }
  AttackGraph pruned(std::move(nodes), std::move(edges), graph.node(graph.goal()).id, graph.node(graph.source()).id);
  return with_attribution(pruned);
}

std::vector<Violation> validate(const AttackGraph& graph) {
  std::vector<Violation> out;
  if (graph.size() == 0) {
    out.push_back({"empty", "", "graph has no nodes"});
    return out;
  }
  const Node& goal = graph.node(graph.goal());
  if (goal.kind != NodeKind::Privilege) {
    out.push_back({"goal-kind", goal.id, "goal must be a privilege node, found " + to_string(goal.kind)});
  }
  const Node& source = graph.node(graph.source());
  if (source.kind != NodeKind::Privilege) {
    out.push_back({"source-kind", source.id, "source must be a privilege node, found " + to_string(source.kind)});
  }
  for (const auto& e : graph.edges()) {
    const NodeKind from = graph.node(graph.index_of(e.from)).kind;
    const NodeKind to = graph.node(graph.index_of(e.to)).kind;
    const bool ok = (from == NodeKind::Privilege && to == NodeKind::Exploit) ||
                    (from == NodeKind::Exploit && (to == NodeKind::Privilege || to == NodeKind::Config));
    if (!ok) {
      out.push_back({"edge-domain", e.from + " -> " + e.to,
                     "edge " + to_string(from) + " -> " + to_string(to) + " is not allowed"});
    }
  }
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    const Node& node = graph.node(i);
    const bool has_out = !graph.requirements(i).empty();
    if (node.kind == NodeKind::Exploit && !has_out) {
      out.push_back({"exploit-requirements", node.id, "exploit has no requirements"});
    }
    if (node.kind == NodeKind::Privilege && i != graph.source() && i != graph.goal() && !has_out) {
      out.push_back({"privilege-support", node.id, "privilege has no supporting exploit"});
    }
    if (node.kind == NodeKind::Config) {
      if (node.cost < Cost::zero() || node.cost > Cost::from_micros(Cost::kScale)) {
        out.push_back({"config-cost", node.id, "config cost " + node.cost.to_string() + " outside [0,1]"});
      }
      if (node.fake) {
        if (!node.provenance) {
          out.push_back({"fake-provenance", node.id, "fake config without provenance"});
        } else if (config_node_id(node.provenance->host_id, node.provenance->vuln_id) != node.id) {
          out.push_back({"fake-provenance", node.id, "fake config attributed to " + to_string(*node.provenance)});
        }
      } else if (node.provenance &&
                 config_node_id(node.provenance->host_id, node.provenance->vuln_id) == node.id) {
        out.push_back({"fake-provenance", node.id, "config created by an assignment is not flagged fake"});
      }
    } else {
      if (node.fake) out.push_back({"fake-kind", node.id, "only config nodes can be fake"});
      if (node.cost != Cost::zero()) out.push_back({"cost-kind", node.id, "only config nodes carry cost"});
    }
  }
  return out;
}

}  // namespace agobf
