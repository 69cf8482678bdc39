#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agobf/aggraph.hpp"
#include "agobf/netmodel.hpp"
#include "agobf/planner.hpp"

namespace agobf {

struct SimulationIteration {
  AttackPlan plan;
  Cost paid_prefix_cost;
  std::optional<Assignment> discovered_fake;
  /// Config ids whose cost was set to zero after this iteration.
  std::vector<std::string> zeroed_configs;
  PlannerStats planning;

  friend bool operator==(const SimulationIteration& a, const SimulationIteration& b) {
    return a.plan == b.plan && a.paid_prefix_cost == b.paid_prefix_cost && a.discovered_fake == b.discovered_fake &&
           a.zeroed_configs == b.zeroed_configs && a.planning.expanded_states == b.planning.expanded_states;
  }
};

struct SimulationTrace {
  std::vector<SimulationIteration> iterations;
  Cost total_cost;
  PlannerStats planning_effort;
};

/// Actual total cost: the attacker plans optimally treating every visible
/// vulnerability as real, executes until the first exploit needing a fake
/// config, pays what it consumed (including the failed attempt), keeps the
/// privileges gained, drops the discovered assignment and replans.
///
/// Throws UnreachableError when no real attack path exists.
SimulationTrace aptc(const AttackGraph& graph, const PlannerOptions& options = {});

struct EvaluationReport {
  /// p1: number of plans computed.
  std::size_t recalculations = 0;
  /// p2.
  std::uint64_t planning_states = 0;
  std::chrono::nanoseconds planning_time{0};
  /// p3: APTC of the obfuscated graph over PTC of the original one.
  double relative_increase = 1.0;
  /// p4: (p1 - 1) / assignments placed; 1.0 by convention with no fakes.
  double precision = 1.0;
  bool precision_defined = false;
  /// (p1 - 1) / budget, when a budget is given.
  std::optional<double> budget_precision;
  std::size_t n_assignments = 0;
  Cost baseline_cost;
  Cost total_cost;
  std::uint64_t seed = 0;
  SimulationTrace trace;
};

EvaluationReport evaluate(const NetworkModel& network, const Catalog& catalog,
                          std::span<const Assignment> assignments, std::uint64_t seed,
                          std::optional<std::size_t> budget = std::nullopt, const PlannerOptions& options = {});

}  // namespace agobf
