#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agobf/cost.hpp"
#include "agobf/netmodel.hpp"

namespace agobf {

enum class NodeKind { Privilege, Exploit, Config };

std::string to_string(NodeKind kind);
NodeKind node_kind_from_string(std::string_view text);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Privilege;
  /// Only meaningful for config nodes.
  Cost cost;
  bool fake = false;
  /// Set for nodes that exist only because of a fake assignment.
  std::optional<Assignment> provenance;

  friend bool operator==(const Node&, const Node&) = default;
};

using NodeIndex = std::uint32_t;

struct Edge {
  std::string from;
  std::string to;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Logical attack graph (Np, Ne, Nc, E, g) plus the attacker's source
/// privilege. Edges point from a node to its logical requirements:
/// privilege -> supporting exploit, exploit -> required privilege/config.
///
/// Nodes are kept sorted by id, so NodeIndex order is id order. Values are
/// immutable; the with_* / remove functions return new graphs.
class AttackGraph {
 public:
  AttackGraph() = default;

  /// Throws ValidationError on duplicate node ids, edges naming unknown
  /// nodes, or unknown goal/source ids. Structural invariants are checked
  /// by validate(), not here.
  AttackGraph(std::vector<Node> nodes, std::vector<Edge> edges, std::string goal_id, std::string source_id);

  std::size_t size() const { return nodes_.size(); }
  const Node& node(NodeIndex i) const { return nodes_[i]; }
  std::span<const Node> nodes() const { return nodes_; }
  std::optional<NodeIndex> find(std::string_view id) const;
  /// Like find() but throws ValidationError for unknown ids.
  NodeIndex index_of(std::string_view id) const;

  /// Out-edges: what node i needs.
  std::span<const NodeIndex> requirements(NodeIndex i) const { return topology_->out[i]; }
  /// In-edges: nodes that need i. For an exploit, the privileges it
  /// supports; for a privilege or config, the exploits requiring it.
  std::span<const NodeIndex> dependents(NodeIndex i) const { return topology_->in[i]; }

  NodeIndex goal() const { return goal_; }
  NodeIndex source() const { return source_; }
  const std::vector<Edge>& edges() const { return topology_->edges; }

  std::vector<NodeIndex> nodes_of_kind(NodeKind kind) const;
  std::size_t count(NodeKind kind) const;

  /// Nodes grouped by the assignment that created them.
  std::map<Assignment, std::vector<NodeIndex>> provenance() const;
  /// Distinct assignments present in the graph.
  std::vector<Assignment> assignments() const;
  bool has_fakes() const;

  /// Copy with the given config costs replaced.
  AttackGraph with_costs(std::span<const std::pair<NodeIndex, Cost>> updates) const;
  /// Copy with per-node provenance replaced (indexed by NodeIndex).
  AttackGraph with_provenance(std::vector<std::optional<Assignment>> provenance) const;
  /// Copy with every fake flag cleared and provenance dropped.
  AttackGraph without_fake_marks() const;

  friend bool operator==(const AttackGraph& a, const AttackGraph& b) {
    return a.nodes_ == b.nodes_ && a.goal_ == b.goal_ && a.source_ == b.source_ &&
           (a.topology_ == b.topology_ || a.topology_->edges == b.topology_->edges);
  }

 private:
  // Shared between copies; cost/fake/provenance edits only touch nodes_.
  struct Topology {
    std::vector<Edge> edges;
    std::vector<std::vector<NodeIndex>> out;
    std::vector<std::vector<NodeIndex>> in;
  };

  std::vector<Node> nodes_;
  std::shared_ptr<const Topology> topology_ = std::make_shared<const Topology>();
  NodeIndex goal_ = 0;
  NodeIndex source_ = 0;
};

// Deterministic node ids.
std::string privilege_node_id(std::string_view location, std::string_view privilege = "root");
std::string config_node_id(std::string_view host, std::string_view vuln);
std::string exploit_node_id(std::string_view host, std::string_view vuln, std::string_view from_location);

/// Generates the attack graph with a single remote-exploit rule: for each
/// privilege on location L, each (L, h) reachability pair and each
/// vulnerability v on h there is an exploit requiring the privilege on L
/// and config (v, h), supporting the privilege on h. Config cost is the
/// normalized subscore of v.
AttackGraph build_attack_graph(const NetworkModel& network, const Catalog& catalog);

/// AA: the graph of the network with the assignments added as fake
/// vulnerabilities. Nodes absent from the baseline graph carry provenance;
/// fake configs are flagged. Throws ValidationError on invalid assignments.
AttackGraph apply_assignments(const NetworkModel& network, const Catalog& catalog,
                              std::span<const Assignment> assignments);

/// Removes the assignment's fake config and everything that can no longer
/// be derived without it. Surviving nodes keep or inherit provenance.
/// Throws ValidationError if the graph holds no node for the assignment.
AttackGraph remove_assignment(const AttackGraph& graph, const Assignment& assignment);

struct Violation {
  std::string kind;
  std::string subject;
  std::string message;
};

/// Empty iff every AttackGraph invariant holds.
std::vector<Violation> validate(const AttackGraph& graph);

}  // namespace agobf
