#include "agobf/attacker.hpp"

#include <algorithm>
#include <set>

#include "agobf/errors.hpp"

namespace agobf {

SimulationTrace aptc(const AttackGraph& graph, const PlannerOptions& options) {
  if (!goal_derivable_without_fakes(graph)) {
    throw UnreachableError("no real attack path reaches " + graph.node(graph.goal()).id);
  }
  SimulationTrace trace;
  AttackGraph current = graph;
  while (true) {
    PlanOutcome outcome = optimal_plan(current, options);
    if (!outcome.plan) throw UnreachableError("planner found no path to " + current.node(current.goal()).id);
    trace.planning_effort += outcome.stats;

    SimulationIteration it;
    it.planning = outcome.stats;
    it.plan = std::move(*outcome.plan);

    std::optional<std::size_t> failed;
    std::optional<NodeIndex> fake_config;
    for (std::size_t k = 0; k < it.plan.exec_order.size() && !failed; ++k) {
      const NodeIndex e = current.index_of(it.plan.exec_order[k]);
      for (NodeIndex r : current.requirements(e)) {
        if (current.node(r).kind == NodeKind::Config && current.node(r).fake) {
          failed = k;
          fake_config = r;
          break;
        }
      }
    }

    if (!failed) {
      it.paid_prefix_cost = it.plan.cost;
      trace.total_cost += it.paid_prefix_cost;
      trace.iterations.push_back(std::move(it));
      return trace;
    }

    // Configs consumed by the executed prefix plus the failed attempt, each
    // paid once at its current cost.
    std::set<NodeIndex> consumed;
    std::set<NodeIndex> owned;
    for (std::size_t k = 0; k <= *failed; ++k) {
      const NodeIndex e = current.index_of(it.plan.exec_order[k]);
      for (NodeIndex r : current.requirements(e)) {
        if (current.node(r).kind != NodeKind::Config) continue;
        consumed.insert(r);
        if (k < *failed) owned.insert(r);
      }
    }
    for (NodeIndex c : consumed) it.paid_prefix_cost += current.node(c).cost;
    trace.total_cost += it.paid_prefix_cost;

    std::vector<std::pair<NodeIndex, Cost>> zeroed;
    for (NodeIndex c : owned) {
      zeroed.emplace_back(c, Cost::zero());
      it.zeroed_configs.push_back(current.node(c).id);
    }
    const Node& fake = current.node(*fake_config);
    if (!fake.provenance) throw std::logic_error("fake config " + fake.id + " has no provenance");
    it.discovered_fake = *fake.provenance;
    current = remove_assignment(current.with_costs(zeroed), *fake.provenance);
    trace.iterations.push_back(std::move(it));
  }
}

EvaluationReport evaluate(const NetworkModel& network, const Catalog& catalog,
                          std::span<const Assignment> assignments, std::uint64_t seed,
                          std::optional<std::size_t> budget, const PlannerOptions& options) {
  EvaluationReport report;
  report.seed = seed;
  report.n_assignments = assignments.size();
  report.baseline_cost = ptc(build_attack_graph(network, catalog), options);
  report.trace = aptc(apply_assignments(network, catalog, assignments), options);
  report.total_cost = report.trace.total_cost;
  report.recalculations = report.trace.iterations.size();
  report.planning_states = report.trace.planning_effort.expanded_states;
  report.planning_time = report.trace.planning_effort.elapsed;
  report.relative_increase = cost_ratio(report.total_cost, report.baseline_cost);
  const double discovered = static_cast<double>(report.recalculations - 1);
  if (report.n_assignments > 0) {
    report.precision = discovered / static_cast<double>(report.n_assignments);
    report.precision_defined = true;
  }
  if (budget && *budget > 0) report.budget_precision = discovered / static_cast<double>(*budget);
  return report;
}

}  // namespace agobf
