#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agobf/aggraph.hpp"
#include "agobf/netmodel.hpp"
#include "agobf/planner.hpp"

namespace agobf {

struct Candidate {
  Assignment assignment;
  Cost cost;
  /// host|cost|exploit-template; one candidate is kept per key.
  std::string equivalence_key;
  /// APTC of the graph with only this assignment applied.
  Cost singleton_utility;
};

/// All OS-compatible, non-duplicate assignments, deduplicated by
/// equivalence key (the smallest vuln id survives), sorted by assignment.
std::vector<Candidate> enumerate_candidates(const NetworkModel& network, const Catalog& catalog);

/// A goal-reaching host path that relies on at least one fake assignment
/// and is cheaper than the baseline plan.
struct PooledPath {
  std::vector<std::string> hosts;
  /// Sorted.
  std::vector<Assignment> fakes;
  Cost cost;
};

/// host id -> ids of pooled paths through that host.
class InvertedIndex {
 public:
  InvertedIndex() = default;
  explicit InvertedIndex(std::span<const PooledPath> pool);

  std::span<const std::size_t> paths_through(std::string_view host) const;
  /// Union of paths_through over the hosts, ascending, unique.
  std::vector<std::size_t> paths_through_any(std::span<const std::string> hosts) const;
  std::size_t size() const { return by_host_.size(); }

 private:
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_host_;
};

/// The `max_paths` cheapest simple host paths from the attacker to the goal
/// host that use at least one candidate fake and cost less than
/// `cost_bound`, cheapest first. Per hop the options are the cheapest real
/// vulnerability of the host and every candidate cheaper than it.
std::vector<PooledPath> build_path_pool(const NetworkModel& network, const Catalog& catalog,
                                        std::span<const Candidate> candidates, Cost cost_bound,
                                        std::size_t max_paths);

enum class Ordering { Utility, ShortestPath, Random };
enum class SearchHeuristic { H1, H2 };
enum class SearchAlgorithm { AStar, DfBnB };
/// AtMost: every subset of size <= K is a solution. Exact: the decision
/// tree also drops sub-trees that cannot reach K assignments.
enum class BudgetMode { AtMost, Exact };

std::string to_string(Ordering ordering);
std::string to_string(SearchHeuristic heuristic);
std::string to_string(SearchAlgorithm algorithm);
Ordering ordering_from_string(std::string_view text);
SearchHeuristic search_heuristic_from_string(std::string_view text);
SearchAlgorithm search_algorithm_from_string(std::string_view text);
std::string to_string(BudgetMode mode);
BudgetMode budget_mode_from_string(std::string_view text);

/// Everything the optimizer shares across the tree: baseline, candidate
/// table with singleton utilities, optional path pool, and a memo of
/// APTC per assignment set.
class SearchProblem {
 public:
  SearchProblem(NetworkModel network, Catalog catalog, PlannerOptions planner = {});
  /// Uses a given candidate list instead of enumerating (utilities are
  /// recomputed).
  SearchProblem(NetworkModel network, Catalog catalog, std::vector<Candidate> candidates,
                PlannerOptions planner = {});

  const NetworkModel& network() const { return network_; }
  const Catalog& catalog() const { return catalog_; }
  const AttackGraph& baseline() const { return baseline_; }
  Cost baseline_ptc() const { return baseline_ptc_; }
  const std::vector<Candidate>& candidates() const { return candidates_; }
  const Candidate& candidate(std::size_t i) const { return candidates_[i]; }

  /// APTC(AA(AG, chosen)); memoized on the sorted index set.
  Cost utility(std::span<const std::size_t> chosen) const;
  std::size_t utility_evaluations() const { return evaluations_; }

  std::vector<Assignment> assignments_of(std::span<const std::size_t> chosen) const;

  /// Builds the pool and inverted index used by shortest-path ordering.
  void build_path_index(std::size_t max_paths = 100);
  bool has_path_index() const { return pool_built_; }
  const std::vector<PooledPath>& path_pool() const { return pool_; }
  const InvertedIndex& inverted_index() const { return index_; }
  /// Pool paths expressed as candidate indices; paths using a fake outside
  /// the candidate table are dropped.
  const std::vector<std::vector<std::size_t>>& pool_candidates() const { return pool_candidates_; }

 private:
  void precompute_singleton_utilities();

  NetworkModel network_;
  Catalog catalog_;
  PlannerOptions planner_;
  AttackGraph baseline_;
  Cost baseline_ptc_;
  std::vector<Candidate> candidates_;
  mutable std::map<std::vector<std::size_t>, Cost> cache_;
  mutable std::size_t evaluations_ = 0;
  bool pool_built_ = false;
  std::vector<PooledPath> pool_;
  std::vector<std::vector<std::size_t>> pool_candidates_;
  InvertedIndex index_;
};

/// Decision-tree node. `chosen` is A(V) in insertion order, `remaining` is
/// the ordered AC(V) (head = ac_best); both hold candidate indices.
struct SearchNode {
  std::vector<std::size_t> chosen;
  std::vector<std::size_t> remaining;
  Cost utility;
  Cost heuristic;

  Cost f() const { return utility + heuristic; }
};

/// Reorders AC(V). Utility: descending singleton utility. ShortestPath:
/// candidates that complete the pooled paths closest to A(V) first, then
/// utility order. Random: seeded shuffle. Ties by candidate index.
/// Throws ConfigError for ShortestPath without a path index.
std::vector<std::size_t> order_candidates(const SearchProblem& problem, const SearchNode& node, Ordering mode,
                                          std::uint64_t seed);

/// Sum of the singleton utilities of the first K - |A(V)| entries of AC(V).
Cost h1(const SearchProblem& problem, const SearchNode& node, std::size_t budget);
/// PTC(AG) + h1.
Cost h2(const SearchProblem& problem, const SearchNode& node, std::size_t budget);
Cost heuristic_value(SearchHeuristic kind, const SearchProblem& problem, const SearchNode& node, std::size_t budget);

struct SearchConfig {
  std::size_t budget = 1;
  SearchAlgorithm algorithm = SearchAlgorithm::AStar;
  Ordering ordering = Ordering::Utility;
  SearchHeuristic heuristic = SearchHeuristic::H2;
  BudgetMode mode = BudgetMode::AtMost;
  std::uint64_t seed = 0;
  std::size_t path_pool_size = 100;
};

struct Children {
  std::optional<SearchNode> right;  // V+
  std::optional<SearchNode> left;   // V-
};

/// Root node: A = {}, AC = all candidates ordered per config, utility PTC.
SearchNode make_root(const SearchProblem& problem, const SearchConfig& config);

/// Splits on ac_best. V+ gets its utility evaluated and, for shortest-path
/// ordering, its candidate list reordered. Children that cannot hold a
/// solution are discarded.
Children expand(const SearchProblem& problem, const SearchNode& node, const SearchConfig& config);

struct SearchResult {
  /// Sorted.
  std::vector<Assignment> best_assignments;
  Cost best_utility;
  Cost baseline_ptc;
  std::uint64_t expanded_nodes = 0;
  std::uint64_t generated_nodes = 0;
  std::chrono::nanoseconds elapsed{0};
  std::size_t budget_used = 0;
};

SearchResult dfbnb(const SearchProblem& problem, const SearchConfig& config);
SearchResult astar(const SearchProblem& problem, const SearchConfig& config);
SearchResult run_search(const SearchProblem& problem, const SearchConfig& config);

/// Oracle: APTC of every subset of size <= budget. Throws ConfigError when
/// the number of subsets exceeds `max_subsets`.
SearchResult exhaustive_best(const SearchProblem& problem, std::size_t budget, std::size_t max_subsets = 200000);

/// True if (utility, set) beats the incumbent: higher utility, then fewer
/// assignments, then lexicographically smaller sorted assignments.
bool better_solution(Cost utility, const std::vector<Assignment>& set, Cost best_utility,
                     const std::vector<Assignment>& best_set);

}  // namespace agobf
