#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "agobf/aggraph.hpp"
#include "agobf/cost.hpp"

namespace agobf {

struct PlannerStats {
  std::uint64_t expanded_states = 0;
  std::uint64_t heuristic_evals = 0;
  std::chrono::nanoseconds elapsed{0};

  PlannerStats& operator+=(const PlannerStats& other) {
    expanded_states += other.expanded_states;
    heuristic_evals += other.heuristic_evals;
    elapsed += other.elapsed;
    return *this;
  }
};

/// A closed attack path with an executable exploit ordering.
struct AttackPlan {
  /// Sorted node ids.
  std::vector<std::string> node_set;
  /// Exploit ids in execution order.
  std::vector<std::string> exec_order;
  Cost cost;
  std::string source;
  std::string goal;

  friend bool operator==(const AttackPlan&, const AttackPlan&) = default;
};

/// Auto: the exact shortest-chain value when every exploit needs at most
/// one privilege and configs are only shared between exploits with the
/// same targets (true of every generated graph), LM-cut otherwise.
enum class PlannerHeuristic { Auto, HMax, LmCut };

struct PlannerOptions {
  PlannerHeuristic heuristic = PlannerHeuristic::Auto;
};

struct PlanOutcome {
  /// Empty when the goal is underivable.
  std::optional<AttackPlan> plan;
  PlannerStats stats;
};

/// Least-fixpoint derivability of the goal when only `usable_configs` may
/// be used.
bool derivable(const AttackGraph& graph, const std::vector<bool>& usable_configs);
/// Derivability with every config usable.
bool goal_derivable(const AttackGraph& graph);
/// Derivability with only non-fake configs usable.
bool goal_derivable_without_fakes(const AttackGraph& graph);

/// Globally minimum-cost plan (each config paid once). Fake flags are
/// ignored. Among equal-cost plans the one whose sorted config ids are
/// lexicographically smallest is returned.
PlanOutcome optimal_plan(const AttackGraph& graph, const PlannerOptions& options = {});

/// Perceived total cost. Throws UnreachableError.
Cost ptc(const AttackGraph& graph, const PlannerOptions& options = {});

/// Oracle: enumerates config subsets in increasing cost. Refuses graphs with
/// more than `max_configs` config nodes (ConfigError).
std::optional<AttackPlan> brute_force_optimal(const AttackGraph& graph, std::size_t max_configs = 16);

/// Minimal plan supported by the given config set, or nothing if the goal
/// is not derivable from it.
std::optional<AttackPlan> extract_plan(const AttackGraph& graph, const std::vector<bool>& usable_configs);

/// Problems found when checking the plan's closure, cost and execution
/// order against the graph; empty for a valid plan.
std::vector<std::string> check_plan(const AttackGraph& graph, const AttackPlan& plan);

}  // namespace agobf
