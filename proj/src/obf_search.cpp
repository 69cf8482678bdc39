#include "agobf/obf_search.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <set>

#include "agobf/attacker.hpp"
#include "agobf/errors.hpp"
#include "agobf/rng.hpp"

namespace agobf {

namespace {

using Clock = std::chrono::steady_clock;

// Exploits generated by the remote rule all share one template: the rule
// tag and the requirement kinds (privilege, config).
constexpr std::string_view kRemoteTemplate = "remoteExploit:config,privilege";

}  // namespace

std::vector<Candidate> enumerate_candidates(const NetworkModel& network, const Catalog& catalog) {
  std::vector<Candidate> out;
  for (const auto& [id, host] : network.hosts) {
    if (!catalog.knows_os(host.os)) continue;
    std::set<std::string> keys;
    for (const auto& vuln : compatible_vulns(catalog, host)) {
      Candidate c;
      c.assignment = {id, vuln};
      c.cost = catalog.cost_of(vuln);
      c.equivalence_key = id + "|" + c.cost.to_string() + "|" + std::string(kRemoteTemplate);
      if (keys.insert(c.equivalence_key).second) out.push_back(std::move(c));
    }
  }
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) { return a.assignment < b.assignment; });
  return out;
}

InvertedIndex::InvertedIndex(std::span<const PooledPath> pool) {
  for (std::size_t p = 0; p < pool.size(); ++p) {
    for (const auto& h : pool[p].hosts) {
      auto& list = by_host_[h];
      if (list.empty() || list.back() != p) list.push_back(p);
    }
  }
}

std::span<const std::size_t> InvertedIndex::paths_through(std::string_view host) const {
  auto it = by_host_.find(host);
  if (it == by_host_.end()) return {};
  return it->second;
}

std::vector<std::size_t> InvertedIndex::paths_through_any(std::span<const std::string> hosts) const {
  std::set<std::size_t> ids;
  for (const auto& h : hosts) {
    for (auto p : paths_through(h)) ids.insert(p);
  }
  return {ids.begin(), ids.end()};
}

std::vector<PooledPath> build_path_pool(const NetworkModel& network, const Catalog& catalog,
                                        std::span<const Candidate> candidates, Cost cost_bound,
                                        std::size_t max_paths) {
  constexpr std::size_t kMaxExpansions = 200000;
  const std::string& entry = network.attacker_entry;
  const std::string& goal = network.goal.host_id;
  if (max_paths == 0 || goal == entry || network.goal.privilege != "root") return {};

  struct HopOption {
    Cost cost;
    std::optional<Assignment> fake;
  };
  std::map<std::string, std::vector<HopOption>, std::less<>> options;
  std::map<std::string, Cost, std::less<>> cheapest;
  for (const auto& [id, host] : network.hosts) {
    std::optional<Cost> real;
    for (const auto& v : host.installed_vulns) {
      const Cost c = catalog.cost_of(v);
      if (!real || c < *real) real = c;
    }
    auto& list = options[id];
    if (real) list.push_back({*real, std::nullopt});
    for (const auto& cand : candidates) {
      if (cand.assignment.host_id == id && (!real || cand.cost < *real)) list.push_back({cand.cost, cand.assignment});
    }
    if (!list.empty()) {
      Cost best = list.front().cost;
      for (const auto& o : list) best = std::min(best, o.cost);
      cheapest[id] = best;
    }
  }

  std::map<std::string, std::vector<std::string>, std::less<>> out_edges, in_edges;
  for (const auto& [src, dst] : network.reachability) {
    if (dst == entry || !cheapest.contains(dst)) continue;
    out_edges[src].push_back(dst);
    in_edges[dst].push_back(src);
  }

  // Lower bound on the remaining cost from each location to the goal.
  std::map<std::string, Cost, std::less<>> bound;
  using Item = std::pair<Cost, std::string>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  pq.push({Cost::zero(), goal});
  while (!pq.empty()) {
    auto [d, loc] = pq.top();
    pq.pop();
    if (bound.contains(loc)) continue;
    bound[loc] = d;
    if (loc == entry) continue;
    auto it = in_edges.find(loc);
    if (it == in_edges.end()) continue;
    for (const auto& src : it->second) {
      if (!bound.contains(src)) pq.push({d + cheapest.at(loc), src});
    }
  }
  if (!bound.contains(entry)) return {};

  struct Partial {
    std::vector<std::string> hosts;
    std::vector<Assignment> fakes;
    Cost cost;
  };
  std::vector<Partial> partials;
  struct Entry {
    Cost f;
    std::size_t id;
    bool operator>(const Entry& o) const { return f != o.f ? f > o.f : id > o.id; }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  partials.push_back({{entry}, {}, Cost::zero()});
  open.push({bound.at(entry), 0});

  std::vector<PooledPath> pool;
  std::size_t expansions = 0;
  while (!open.empty() && pool.size() < max_paths && expansions < kMaxExpansions) {
    const Entry top = open.top();
    open.pop();
    ++expansions;
    const Partial current = partials[top.id];
    const std::string& last = current.hosts.back();
    if (last == goal) {
      if (!current.fakes.empty() && current.cost < cost_bound) {
        PooledPath path;
        path.hosts.assign(current.hosts.begin() + 1, current.hosts.end());
        path.fakes = current.fakes;
        std::sort(path.fakes.begin(), path.fakes.end());
        path.cost = current.cost;
        pool.push_back(std::move(path));
      }
      continue;
    }
    auto it = out_edges.find(last);
    if (it == out_edges.end()) continue;
    for (const auto& next : it->second) {
      if (std::find(current.hosts.begin(), current.hosts.end(), next) != current.hosts.end()) continue;
      auto lb = bound.find(next);
      if (lb == bound.end()) continue;
      for (const auto& option : options.at(next)) {
        const Cost cost = current.cost + option.cost;
        if (cost + lb->second >= cost_bound) continue;
        Partial extended{current.hosts, current.fakes, cost};
        extended.hosts.push_back(next);
        if (option.fake) extended.fakes.push_back(*option.fake);
        partials.push_back(std::move(extended));
        open.push({cost + lb->second, partials.size() - 1});
      }
    }
  }
  return pool;
}

std::string to_string(Ordering ordering) {
  switch (ordering) {
    case Ordering::Utility:
      return "utility";
    case Ordering::ShortestPath:
      return "shortest-path";
    case Ordering::Random:
      return "random";
  }
  return "?";
}

std::string to_string(SearchHeuristic heuristic) { return heuristic == SearchHeuristic::H1 ? "h1" : "h2"; }

std::string to_string(SearchAlgorithm algorithm) { return algorithm == SearchAlgorithm::AStar ? "astar" : "dfbnb"; }

std::string to_string(BudgetMode mode) { return mode == BudgetMode::AtMost ? "at-most" : "exact"; }

Ordering ordering_from_string(std::string_view text) {
  if (text == "utility") return Ordering::Utility;
  if (text == "shortest-path" || text == "shortest_path") return Ordering::ShortestPath;
  if (text == "random") return Ordering::Random;
  throw ConfigError("unknown ordering " + std::string(text));
}

SearchHeuristic search_heuristic_from_string(std::string_view text) {
  if (text == "h1") return SearchHeuristic::H1;
  if (text == "h2") return SearchHeuristic::H2;
  throw ConfigError("unknown heuristic " + std::string(text));
}

SearchAlgorithm search_algorithm_from_string(std::string_view text) {
  if (text == "astar") return SearchAlgorithm::AStar;
  if (text == "dfbnb") return SearchAlgorithm::DfBnB;
  throw ConfigError("unknown search algorithm " + std::string(text));
}

BudgetMode budget_mode_from_string(std::string_view text) {
  if (text == "at-most" || text == "at_most") return BudgetMode::AtMost;
  if (text == "exact") return BudgetMode::Exact;
  throw ConfigError("unknown budget mode " + std::string(text));
}

SearchProblem::SearchProblem(NetworkModel network, Catalog catalog, PlannerOptions planner)
    : network_(std::move(network)), catalog_(std::move(catalog)), planner_(planner) {
  baseline_ = build_attack_graph(network_, catalog_);
  baseline_ptc_ = ptc(baseline_, planner_);
  candidates_ = enumerate_candidates(network_, catalog_);
  precompute_singleton_utilities();
}

SearchProblem::SearchProblem(NetworkModel network, Catalog catalog, std::vector<Candidate> candidates,
                             PlannerOptions planner)
    : network_(std::move(network)), catalog_(std::move(catalog)), planner_(planner) {
  baseline_ = build_attack_graph(network_, catalog_);
  baseline_ptc_ = ptc(baseline_, planner_);
  candidates_ = std::move(candidates);
  std::vector<Assignment> all;
  for (const auto& c : candidates_) all.push_back(c.assignment);
  validate_assignments(network_, catalog_, all);
  precompute_singleton_utilities();
}

void SearchProblem::precompute_singleton_utilities() {
  for (std::size_t i = 0; i < candidates_.size(); ++i) {
    const std::size_t one[] = {i};
    candidates_[i].singleton_utility = utility(one);
  }
}

std::vector<Assignment> SearchProblem::assignments_of(std::span<const std::size_t> chosen) const {
  std::vector<Assignment> out;
  for (auto i : chosen) out.push_back(candidates_.at(i).assignment);
  std::sort(out.begin(), out.end());
  return out;
}

Cost SearchProblem::utility(std::span<const std::size_t> chosen) const {
  if (chosen.empty()) return baseline_ptc_;
  std::vector<std::size_t> key(chosen.begin(), chosen.end());
  std::sort(key.begin(), key.end());
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const std::vector<Assignment> assignments = assignments_of(key);
  const Cost value = aptc(apply_assignments(network_, catalog_, assignments), planner_).total_cost;
  ++evaluations_;
  cache_.emplace(std::move(key), value);
  return value;
}

void SearchProblem::build_path_index(std::size_t max_paths) {
  std::vector<PooledPath> pool = build_path_pool(network_, catalog_, candidates_, baseline_ptc_, max_paths);
  std::map<Assignment, std::size_t> position;
  for (std::size_t i = 0; i < candidates_.size(); ++i) position.emplace(candidates_[i].assignment, i);
  pool_.clear();
  pool_candidates_.clear();
  for (auto& path : pool) {
    std::vector<std::size_t> ids;
    bool known = true;
    for (const auto& fake : path.fakes) {
      auto it = position.find(fake);
      if (it == position.end()) {
        known = false;
        break;
      }
      ids.push_back(it->second);
    }
    if (!known) continue;
    pool_.push_back(std::move(path));
    pool_candidates_.push_back(std::move(ids));
  }
  index_ = InvertedIndex(pool_);
  pool_built_ = true;
}

namespace {

std::vector<std::size_t> utility_order(const SearchProblem& problem, std::vector<std::size_t> ids) {
  std::sort(ids.begin(), ids.end(), [&](std::size_t a, std::size_t b) {
    const Cost ua = problem.candidate(a).singleton_utility;
    const Cost ub = problem.candidate(b).singleton_utility;
    return ua != ub ? ua > ub : a < b;
  });
  return ids;
}

std::vector<std::size_t> shortest_path_order(const SearchProblem& problem, const SearchNode& node) {
  const std::set<std::size_t> chosen(node.chosen.begin(), node.chosen.end());
  const std::set<std::size_t> open(node.remaining.begin(), node.remaining.end());
  std::vector<std::string> chosen_hosts;
  for (auto c : node.chosen) chosen_hosts.push_back(problem.candidate(c).assignment.host_id);
  const std::vector<std::size_t> near = problem.inverted_index().paths_through_any(chosen_hosts);
  const std::set<std::size_t> touching(near.begin(), near.end());

  struct Live {
    std::size_t missing;
    bool far;
    Cost cost;
    std::size_t id;
    std::vector<std::size_t> needed;
  };
  std::vector<Live> live;
  const auto& paths = problem.pool_candidates();
  for (std::size_t p = 0; p < paths.size(); ++p) {
    std::vector<std::size_t> needed;
    bool dead = false;
    for (auto c : paths[p]) {
      if (chosen.contains(c)) continue;
      if (!open.contains(c)) {
        dead = true;
        break;
      }
      needed.push_back(c);
    }
    if (dead || needed.empty()) continue;
    live.push_back({needed.size(), !touching.contains(p), problem.path_pool()[p].cost, p,
                    utility_order(problem, std::move(needed))});
  }
  std::sort(live.begin(), live.end(), [](const Live& a, const Live& b) {
    return std::tie(a.missing, a.far, a.cost, a.id) < std::tie(b.missing, b.far, b.cost, b.id);
  });

  std::vector<std::size_t> out;
  std::set<std::size_t> placed;
  for (const auto& l : live) {
    for (auto c : l.needed) {
      if (placed.insert(c).second) out.push_back(c);
    }
  }
  for (auto c : utility_order(problem, node.remaining)) {
    if (placed.insert(c).second) out.push_back(c);
  }
  return out;
}

}  // namespace

std::vector<std::size_t> order_candidates(const SearchProblem& problem, const SearchNode& node, Ordering mode,
                                          std::uint64_t seed) {
  switch (mode) {
    case Ordering::Utility:
      return utility_order(problem, node.remaining);
    case Ordering::ShortestPath:
      if (!problem.has_path_index()) throw ConfigError("shortest-path ordering needs the path index");
      return shortest_path_order(problem, node);
    case Ordering::Random: {
      std::vector<std::size_t> ids = node.remaining;
      std::sort(ids.begin(), ids.end());
      Rng rng(seed);
      shuffle(ids, rng);
      return ids;
    }
  }
  return node.remaining;
}

Cost h1(const SearchProblem& problem, const SearchNode& node, std::size_t budget) {
  if (node.chosen.size() >= budget) return Cost::zero();
  const std::size_t take = std::min(budget - node.chosen.size(), node.remaining.size());
  Cost total;
  for (std::size_t i = 0; i < take; ++i) total += problem.candidate(node.remaining[i]).singleton_utility;
  return total;
}

Cost h2(const SearchProblem& problem, const SearchNode& node, std::size_t budget) {
  return problem.baseline_ptc() + h1(problem, node, budget);
}

Cost heuristic_value(SearchHeuristic kind, const SearchProblem& problem, const SearchNode& node, std::size_t budget) {
  return kind == SearchHeuristic::H1 ? h1(problem, node, budget) : h2(problem, node, budget);
}

SearchNode make_root(const SearchProblem& problem, const SearchConfig& config) {
  SearchNode root;
  for (std::size_t i = 0; i < problem.candidates().size(); ++i) root.remaining.push_back(i);
  root.remaining = order_candidates(problem, root, config.ordering, config.seed);
  root.utility = problem.baseline_ptc();
  root.heuristic = heuristic_value(config.heuristic, problem, root, config.budget);
  return root;
}

namespace {

bool viable(const SearchNode& node, const SearchConfig& config) {
  if (node.chosen.size() > config.budget) return false;
  if (config.mode == BudgetMode::Exact) return node.chosen.size() + node.remaining.size() >= config.budget;
  return true;
}

bool can_branch(const SearchNode& node, const SearchConfig& config) {
  return node.chosen.size() < config.budget && !node.remaining.empty();
}

bool is_solution(const SearchNode& node, const SearchConfig& config) {
  return config.mode == BudgetMode::AtMost || node.chosen.size() == config.budget;
}

}  // namespace

Children expand(const SearchProblem& problem, const SearchNode& node, const SearchConfig& config) {
  Children out;
  if (!can_branch(node, config)) return out;
  const std::size_t best = node.remaining.front();
  std::vector<std::size_t> rest(node.remaining.begin() + 1, node.remaining.end());

  SearchNode right;
  right.chosen = node.chosen;
  right.chosen.push_back(best);
  right.remaining = rest;
  if (viable(right, config)) {
    if (config.ordering == Ordering::ShortestPath) {
      right.remaining = order_candidates(problem, right, config.ordering, config.seed);
    }
    right.utility = problem.utility(right.chosen);
    right.heuristic = heuristic_value(config.heuristic, problem, right, config.budget);
    out.right = std::move(right);
  }

  SearchNode left;
  left.chosen = node.chosen;
  left.remaining = std::move(rest);
  left.utility = node.utility;
  // In at-most mode the left child's own set was already scored at its
  // parent, so it is only worth keeping if it can still branch.
  const bool keep_left = config.mode == BudgetMode::Exact ? viable(left, config) : can_branch(left, config);
  if (keep_left) {
    left.heuristic = heuristic_value(config.heuristic, problem, left, config.budget);
    out.left = std::move(left);
  }
  return out;
}

bool better_solution(Cost utility, const std::vector<Assignment>& set, Cost best_utility,
                     const std::vector<Assignment>& best_set) {
  if (utility != best_utility) return utility > best_utility;
  if (set.size() != best_set.size()) return set.size() < best_set.size();
  return set < best_set;
}

namespace {

struct Incumbent {
  Cost utility;
  std::vector<Assignment> set;

  void offer(const SearchProblem& problem, const SearchNode& node, const SearchConfig& config) {
    if (!is_solution(node, config)) return;
    std::vector<Assignment> candidate = problem.assignments_of(node.chosen);
    if (better_solution(node.utility, candidate, utility, set)) {
      utility = node.utility;
      set = std::move(candidate);
    }
  }
};

SearchResult finish(const SearchProblem& problem, Incumbent incumbent, std::uint64_t expanded,
                    std::uint64_t generated, Clock::time_point start) {
  SearchResult result;
  result.best_assignments = std::move(incumbent.set);
  result.best_utility = incumbent.utility;
  result.baseline_ptc = problem.baseline_ptc();
  result.expanded_nodes = expanded;
  result.generated_nodes = generated;
  result.budget_used = result.best_assignments.size();
  result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return result;
}

}  // namespace

SearchResult dfbnb(const SearchProblem& problem, const SearchConfig& config) {
  const auto start = Clock::now();
  Incumbent incumbent{problem.baseline_ptc(), {}};
  std::uint64_t expanded = 0, generated = 0;
  if (config.budget == 0 || problem.candidates().empty()) return finish(problem, incumbent, 0, 0, start);

  std::vector<SearchNode> stack{make_root(problem, config)};
  generated = 1;
  while (!stack.empty()) {
    SearchNode node = std::move(stack.back());
    stack.pop_back();
    if (node.f() <= incumbent.utility) continue;
    ++expanded;
    Children children = expand(problem, node, config);
    if (children.right) {
      ++generated;
      incumbent.offer(problem, *children.right, config);
    }
    if (children.left) ++generated;
    // Right child on top of the stack so it is explored first.
    if (children.left && can_branch(*children.left, config) && children.left->f() > incumbent.utility) {
      stack.push_back(std::move(*children.left));
    }
    if (children.right && can_branch(*children.right, config) && children.right->f() > incumbent.utility) {
      stack.push_back(std::move(*children.right));
    }
  }
  return finish(problem, incumbent, expanded, generated, start);
}

SearchResult astar(const SearchProblem& problem, const SearchConfig& config) {
  const auto start = Clock::now();
  Incumbent incumbent{problem.baseline_ptc(), {}};
  std::uint64_t expanded = 0, generated = 0;
  if (config.budget == 0 || problem.candidates().empty()) return finish(problem, incumbent, 0, 0, start);

  std::vector<SearchNode> nodes;
  struct Entry {
    Cost f;
    std::size_t seq;
    bool operator<(const Entry& o) const { return f != o.f ? f < o.f : seq > o.seq; }
  };
  std::priority_queue<Entry> open;
  nodes.push_back(make_root(problem, config));
  open.push({nodes.back().f(), 0});
  generated = 1;
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (top.f <= incumbent.utility) break;
    SearchNode node = std::move(nodes[top.seq]);
    ++expanded;
    Children children = expand(problem, node, config);
    for (auto* child : {&children.right, &children.left}) {
      if (!*child) continue;
      ++generated;
      if (child == &children.right) incumbent.offer(problem, **child, config);
      if (can_branch(**child, config) && (*child)->f() > incumbent.utility) {
        nodes.push_back(std::move(**child));
        open.push({nodes.back().f(), nodes.size() - 1});
      }
    }
  }
  return finish(problem, incumbent, expanded, generated, start);
}

SearchResult run_search(const SearchProblem& problem, const SearchConfig& config) {
  return config.algorithm == SearchAlgorithm::AStar ? astar(problem, config) : dfbnb(problem, config);
}

SearchResult exhaustive_best(const SearchProblem& problem, std::size_t budget, std::size_t max_subsets) {
  const auto start = Clock::now();
  const std::size_t m = problem.candidates().size();
  const std::size_t k_max = std::min(budget, m);
  std::size_t total = 0;
  std::size_t binom = 1;
  for (std::size_t k = 0; k <= k_max; ++k) {
    if (k > 0) binom = binom * (m - k + 1) / k;
    total += binom;
    if (total > max_subsets) {
      throw ConfigError("exhaustive search over more than " + std::to_string(max_subsets) + " subsets refused");
    }
  }
  Incumbent incumbent{problem.baseline_ptc(), {}};
  std::uint64_t evaluated = 1;
  for (std::size_t k = 1; k <= k_max; ++k) {
    std::vector<std::size_t> combo(k);
    for (std::size_t i = 0; i < k; ++i) combo[i] = i;
    while (true) {
      SearchNode node;
      node.chosen = combo;
      node.utility = problem.utility(combo);
      ++evaluated;
      SearchConfig any;
      any.mode = BudgetMode::AtMost;
      incumbent.offer(problem, node, any);
      std::size_t i = k;
      while (i > 0 && combo[i - 1] == m - k + i - 1) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return finish(problem, incumbent, evaluated, evaluated, start);
}

}  // namespace agobf
