#include "agobf/planner.hpp"

#include <algorithm>
#include <bit>
#include <deque>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>

#include "agobf/errors.hpp"

namespace agobf {
namespace {

using Clock = std::chrono::steady_clock;
constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max();

std::vector<bool> closure(const AttackGraph& graph, const std::vector<bool>& usable_configs) {
  const std::size_t n = graph.size();
  std::vector<bool> done(n, false);
  std::vector<std::size_t> missing(n, 0);
  std::deque<NodeIndex> ready;
  for (NodeIndex i = 0; i < n; ++i) {
    const NodeKind kind = graph.node(i).kind;
    if (kind == NodeKind::Exploit) {
      missing[i] = graph.requirements(i).size();
      if (missing[i] == 0) ready.push_back(i);
    } else if (kind == NodeKind::Config && usable_configs[i]) {
      ready.push_back(i);
    }
  }
  ready.push_back(graph.source());
  while (!ready.empty()) {
    const NodeIndex i = ready.front();
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

/// Derivation levels: configs and source 0, exploit 1 + max requirement,
/// privilege min over supporting exploits. Unreached nodes stay at kInf.
std::vector<std::int64_t> levels(const AttackGraph& graph, const std::vector<bool>& usable_configs) {
  const std::size_t n = graph.size();
  std::vector<std::int64_t> level(n, kInf);
  std::vector<std::size_t> missing(n, 0);
  std::vector<std::int64_t> max_req(n, 0);
  using Item = std::pair<std::int64_t, NodeIndex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (NodeIndex i = 0; i < n; ++i) {
    const NodeKind kind = graph.node(i).kind;
    if (kind == NodeKind::Exploit) {
      missing[i] = graph.requirements(i).size();
      if (missing[i] == 0) queue.push({1, i});
    } else if (kind == NodeKind::Config && usable_configs[i]) {
      queue.push({0, i});
    }
  }
  queue.push({0, graph.source()});
  while (!queue.empty()) {
    const auto [d, i] = queue.top();
    queue.pop();
    if (level[i] != kInf) continue;
    level[i] = d;
    for (NodeIndex dep : graph.dependents(i)) {
      if (level[dep] != kInf) continue;
      if (graph.node(dep).kind == NodeKind::Exploit) {
        max_req[dep] = std::max(max_req[dep], d);
        if (--missing[dep] == 0) queue.push({max_req[dep] + 1, dep});
      } else if (graph.node(dep).kind == NodeKind::Privilege) {
        queue.push({d, dep});
      }
    }
  }
  return level;
}

// Delete-free task compiled for search: configs are bought, exploits are
// free once their requirements hold.
struct Task {
  const AttackGraph* graph = nullptr;
  std::vector<NodeIndex> config_nodes;      // slot -> node
  std::vector<std::int32_t> slot_of;        // node -> slot or -1
  std::vector<std::int64_t> slot_cost;      // micros
  std::vector<NodeIndex> exploits;
  std::vector<std::vector<NodeIndex>> exploit_privs;   // privilege requirements
  std::vector<std::vector<std::uint32_t>> exploit_slots;
  std::vector<std::vector<NodeIndex>> exploit_targets;
  std::size_t words = 0;
  bool chain = true;
  std::vector<std::vector<std::size_t>> exploits_needing;  // privilege node -> exploit positions
  std::vector<std::size_t> rootless_exploits;               // no privilege requirement

  explicit Task(const AttackGraph& g) : graph(&g) {
    slot_of.assign(g.size(), -1);
    for (NodeIndex i = 0; i < g.size(); ++i) {
      const Node& node = g.node(i);
      if (node.kind == NodeKind::Config) {
        slot_of[i] = static_cast<std::int32_t>(config_nodes.size());
        config_nodes.push_back(i);
        slot_cost.push_back(node.cost.micros());
      } else if (node.kind == NodeKind::Exploit) {
        std::vector<NodeIndex> privs;
        std::vector<std::uint32_t> slots;
        std::vector<NodeIndex> targets;
        for (NodeIndex r : g.requirements(i)) {
          if (g.node(r).kind == NodeKind::Config) {
            slots.push_back(static_cast<std::uint32_t>(r));  // node for now; remapped below
          } else {
            privs.push_back(r);
          }
        }
        for (NodeIndex d : g.dependents(i)) {
          if (g.node(d).kind == NodeKind::Privilege) targets.push_back(d);
        }
        exploits.push_back(i);
        exploit_privs.push_back(std::move(privs));
        exploit_slots.push_back(std::move(slots));
        exploit_targets.push_back(std::move(targets));
      }
    }
    for (auto& slots : exploit_slots) {
      for (auto& s : slots) s = static_cast<std::uint32_t>(slot_of[s]);
      std::sort(slots.begin(), slots.end());
    }
    words = (config_nodes.size() + 63) / 64;

    exploits_needing.assign(g.size(), {});
    for (std::size_t k = 0; k < exploits.size(); ++k) {
      if (exploit_privs[k].size() > 1) chain = false;
      if (exploit_privs[k].empty()) {
        rootless_exploits.push_back(k);
      } else {
        for (NodeIndex p : exploit_privs[k]) exploits_needing[p].push_back(k);
      }
    }
    for (NodeIndex c : config_nodes) {
      const auto deps = g.dependents(c);
      for (NodeIndex e : deps) {
        if (!std::ranges::equal(g.dependents(e), g.dependents(deps.front()))) chain = false;
      }
    }
  }
};

using State = std::vector<std::uint64_t>;

bool has_slot(const State& s, std::size_t slot) { return (s[slot / 64] >> (slot % 64)) & 1U; }
void set_slot(State& s, std::size_t slot) { s[slot / 64] |= std::uint64_t{1} << (slot % 64); }
void clear_slot(State& s, std::size_t slot) { s[slot / 64] &= ~(std::uint64_t{1} << (slot % 64)); }

struct StateHash {
  std::size_t operator()(const State& s) const {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint64_t w : s) {
      h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

std::vector<bool> usable_from_state(const Task& task, const State& s) {
  std::vector<bool> usable(task.graph->size(), false);
  for (std::size_t slot = 0; slot < task.config_nodes.size(); ++slot) {
    if (has_slot(s, slot)) usable[task.config_nodes[slot]] = true;
  }
  return usable;
}

std::int64_t state_cost(const Task& task, const State& s) {
  std::int64_t total = 0;
  for (std::size_t slot = 0; slot < task.config_nodes.size(); ++slot) {
    if (has_slot(s, slot)) total += task.slot_cost[slot];
  }
  return total;
}

// Relaxed task for h_max / LM-cut. Facts are node indices plus one
// artificial init fact; actions are buy-config (pre: init) and exploits.
class RelaxedTask {
 public:
  explicit RelaxedTask(const Task& task) : task_(task) {
    const AttackGraph& g = *task.graph;
    init_fact_ = static_cast<std::uint32_t>(g.size());
    n_facts_ = g.size() + 1;
    for (std::size_t slot = 0; slot < task.config_nodes.size(); ++slot) {
      actions_.push_back({{init_fact_}, {task.config_nodes[slot]}, task.slot_cost[slot]});
    }
    for (std::size_t k = 0; k < task.exploits.size(); ++k) {
      Action a;
      for (NodeIndex r : g.requirements(task.exploits[k])) a.pre.push_back(r);
      if (a.pre.empty()) a.pre.push_back(init_fact_);
      a.eff = task.exploit_targets[k];
      a.cost = 0;
      actions_.push_back(std::move(a));
    }
    pre_of_.assign(n_facts_, {});
    eff_of_.assign(n_facts_, {});
    for (std::size_t a = 0; a < actions_.size(); ++a) {
      for (auto f : actions_[a].pre) pre_of_[f].push_back(a);
      for (auto f : actions_[a].eff) eff_of_[f].push_back(a);
    }
  }

  std::int64_t evaluate(const State& s, PlannerHeuristic kind) const {
    if (kind == PlannerHeuristic::Auto) {
      if (task_.chain) return shortest_chain(s);
      kind = PlannerHeuristic::LmCut;
    }
    std::vector<std::int64_t>& cost = scratch_cost_;
    cost.resize(actions_.size());
    for (std::size_t a = 0; a < actions_.size(); ++a) cost[a] = actions_[a].cost;
    std::vector<std::uint32_t>& init = scratch_init_;
    init.assign({init_fact_, task_.graph->source()});
    for (std::size_t slot = 0; slot < task_.config_nodes.size(); ++slot) {
      if (has_slot(s, slot)) init.push_back(task_.config_nodes[slot]);
    }
    const std::uint32_t goal = task_.graph->goal();

    Hmax& hm = scratch_hmax_;
    run_hmax(cost, init, hm);
    if (hm.fact[goal] == kInf) return kInf;
    if (kind == PlannerHeuristic::HMax) return hm.fact[goal];

    std::int64_t total = 0;
    std::vector<char>& in_goal_zone = scratch_goal_zone_;
    std::vector<char>& in_before = scratch_before_;
    in_goal_zone.resize(n_facts_);
    in_before.resize(n_facts_);
    while (hm.fact[goal] != 0) {
      std::fill(in_goal_zone.begin(), in_goal_zone.end(), 0);
      std::fill(in_before.begin(), in_before.end(), 0);
      std::vector<std::uint32_t> stack{goal};
      in_goal_zone[goal] = 1;
      while (!stack.empty()) {
        const auto f = stack.back();
        stack.pop_back();
        for (auto a : eff_of_[f]) {
          if (hm.unsat[a] != 0 || cost[a] != 0) continue;
          const auto p = hm.pcf[a];
          if (!in_goal_zone[p]) {
            in_goal_zone[p] = 1;
            stack.push_back(p);
          }
        }
      }
      std::vector<std::size_t>& cut = scratch_cut_;
      cut.clear();
      std::vector<char>& in_cut = scratch_in_cut_;
      in_cut.assign(actions_.size(), 0);
      for (auto f : init) {
        if (!in_before[f] && !in_goal_zone[f]) {
          in_before[f] = 1;
          stack.push_back(f);
        }
      }
      while (!stack.empty()) {
        const auto f = stack.back();
        stack.pop_back();
        for (auto a : pre_of_[f]) {
          if (hm.unsat[a] != 0 || hm.pcf[a] != f) continue;
          bool reaches_goal_zone = false;
          for (auto e : actions_[a].eff) reaches_goal_zone = reaches_goal_zone || in_goal_zone[e];
          if (reaches_goal_zone) {
            if (!in_cut[a]) {
              in_cut[a] = 1;
              cut.push_back(a);
            }
            continue;
          }
          for (auto e : actions_[a].eff) {
            if (!in_before[e]) {
              in_before[e] = 1;
              stack.push_back(e);
            }
          }
        }
      }
      if (cut.empty()) break;  // cannot happen for a consistent h_max
      std::int64_t m = kInf;
      for (auto a : cut) m = std::min(m, cost[a]);
      for (auto a : cut) cost[a] -= m;
      total += m;
      run_hmax(cost, init, hm);
    }
    return total;
  }

 private:
  // Cheapest derivation chain to the goal where each exploit costs its
  // configs outside s. Exact on chain-structured tasks: an optimal
  // completion never needs a privilege twice, so no config is counted
  // twice.
  std::int64_t shortest_chain(const State& s) const {
    const AttackGraph& g = *task_.graph;
    std::vector<std::int64_t>& dist = scratch_cost_;
    dist.assign(g.size(), kInf);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    auto exploit_cost = [&](std::size_t k) {
      std::int64_t c = 0;
      for (auto slot : task_.exploit_slots[k]) {
        if (!has_slot(s, slot)) c += task_.slot_cost[slot];
      }
      return c;
    };
    auto relax = [&](std::size_t k, std::int64_t base) {
      const std::int64_t d = base + exploit_cost(k);
      for (NodeIndex t : task_.exploit_targets[k]) {
        if (d < dist[t]) {
          dist[t] = d;
          queue.push({d, t});
        }
      }
    };
    dist[g.source()] = 0;
    queue.push({0, g.source()});
    for (auto k : task_.rootless_exploits) relax(k, 0);
    while (!queue.empty()) {
      const auto [d, p] = queue.top();
      queue.pop();
      if (d > dist[p]) continue;
      if (p == g.goal()) return d;
      for (auto k : task_.exploits_needing[p]) relax(k, d);
    }
    return dist[g.goal()];
  }

  struct Action {
    std::vector<std::uint32_t> pre;
    std::vector<std::uint32_t> eff;
    std::int64_t cost = 0;
  };
  struct Hmax {
    std::vector<std::int64_t> fact;
    std::vector<std::size_t> unsat;
    std::vector<std::uint32_t> pcf;
  };

  void run_hmax(const std::vector<std::int64_t>& cost, const std::vector<std::uint32_t>& init, Hmax& hm) const {
    hm.fact.assign(n_facts_, kInf);
    hm.unsat.resize(actions_.size());
    hm.pcf.assign(actions_.size(), 0);
    for (std::size_t a = 0; a < actions_.size(); ++a) hm.unsat[a] = actions_[a].pre.size();
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (auto f : init) {
      if (hm.fact[f] != 0) {
        hm.fact[f] = 0;
        queue.push({0, f});
      }
    }
    std::vector<char>& popped = scratch_popped_;
    popped.assign(n_facts_, 0);
    while (!queue.empty()) {
      const auto [d, f] = queue.top();
      queue.pop();
      if (popped[f]) continue;
      popped[f] = 1;
      for (auto a : pre_of_[f]) {
        if (--hm.unsat[a] != 0) continue;
        hm.pcf[a] = f;
        const std::int64_t value = d + cost[a];
        for (auto e : actions_[a].eff) {
          if (value < hm.fact[e]) {
            hm.fact[e] = value;
            queue.push({value, e});
          }
        }
      }
    }
  }

  using Item = std::pair<std::int64_t, std::uint32_t>;

  const Task& task_;
  // Reused between evaluations; the planner is single-threaded.
  mutable std::vector<std::int64_t> scratch_cost_;
  mutable std::vector<std::uint32_t> scratch_init_;
  mutable Hmax scratch_hmax_;
  mutable std::vector<char> scratch_goal_zone_, scratch_before_, scratch_in_cut_, scratch_popped_;
  mutable std::vector<std::size_t> scratch_cut_;
  std::uint32_t init_fact_ = 0;
  std::size_t n_facts_ = 0;
  std::vector<Action> actions_;
  std::vector<std::vector<std::size_t>> pre_of_;
  std::vector<std::vector<std::size_t>> eff_of_;
};

std::vector<std::size_t> slots_of(const Task& task, const State& s, bool positive_only) {
  std::vector<std::size_t> out;
  for (std::size_t slot = 0; slot < task.config_nodes.size(); ++slot) {
    if (has_slot(s, slot) && (!positive_only || task.slot_cost[slot] > 0)) out.push_back(slot);
  }
  return out;
}

bool state_reaches_goal(const Task& task, const State& s) {
  return closure(*task.graph, usable_from_state(task, s))[task.graph->goal()];
}

bool minimal_goal_state(const Task& task, const State& s) {
  State probe = s;
  for (std::size_t slot : slots_of(task, s, true)) {
    clear_slot(probe, slot);
    const bool still = state_reaches_goal(task, probe);
    set_slot(probe, slot);
    if (still) return false;
  }
  return true;
}

// Among goal states of optimal cost, the one whose positive-cost config set
// is inclusion-minimal and lexicographically smallest.
const State* canonical_goal(const Task& task, const std::vector<const State*>& goals) {
  const State* best = nullptr;
  std::vector<std::size_t> best_slots;
  bool best_minimal = false;
  for (const State* s : goals) {
    const bool minimal = minimal_goal_state(task, *s);
    std::vector<std::size_t> slots = slots_of(task, *s, true);
    const bool better = best == nullptr || (minimal && !best_minimal) ||
                        (minimal == best_minimal && slots < best_slots);
    if (better) {
      best = s;
      best_slots = std::move(slots);
      best_minimal = minimal;
    }
  }
  return best;
}

}  // namespace

bool derivable(const AttackGraph& graph, const std::vector<bool>& usable_configs) {
  return closure(graph, usable_configs)[graph.goal()];
}

bool goal_derivable(const AttackGraph& graph) {
  return derivable(graph, std::vector<bool>(graph.size(), true));
}

bool goal_derivable_without_fakes(const AttackGraph& graph) {
  std::vector<bool> usable(graph.size(), false);
  for (NodeIndex i = 0; i < graph.size(); ++i) usable[i] = !graph.node(i).fake;
  return derivable(graph, usable);
}

std::optional<AttackPlan> extract_plan(const AttackGraph& graph, const std::vector<bool>& usable_configs) {
  const std::vector<std::int64_t> level = levels(graph, usable_configs);
  if (level[graph.goal()] == kInf) return std::nullopt;

  std::vector<bool> in_plan(graph.size(), false);
  std::vector<NodeIndex> stack{graph.goal()};
  in_plan[graph.goal()] = true;
  while (!stack.empty()) {
    const NodeIndex i = stack.back();
    stack.pop_back();
    const Node& node = graph.node(i);
    std::vector<NodeIndex> next;
    if (node.kind == NodeKind::Privilege && i != graph.source()) {
      NodeIndex chosen = 0;
      std::int64_t chosen_level = kInf;
      for (NodeIndex e : graph.requirements(i)) {
        if (level[e] < chosen_level) {
          chosen = e;
          chosen_level = level[e];
        }
      }
      next.push_back(chosen);
    } else if (node.kind == NodeKind::Exploit) {
      for (NodeIndex r : graph.requirements(i)) next.push_back(r);
    }
    for (NodeIndex j : next) {
      if (!in_plan[j]) {
        in_plan[j] = true;
        stack.push_back(j);
      }
    }
  }

  AttackPlan plan;
  plan.source = graph.node(graph.source()).id;
  plan.goal = graph.node(graph.goal()).id;
  std::vector<NodeIndex> exploits;
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (!in_plan[i]) continue;
    const Node& node = graph.node(i);
    plan.node_set.push_back(node.id);
    if (node.kind == NodeKind::Config) plan.cost += node.cost;
    if (node.kind == NodeKind::Exploit) exploits.push_back(i);
  }

  // Greedy schedule: earliest-enabled exploit first, ties by id.
  std::vector<bool> owned(graph.size(), false);
  owned[graph.source()] = true;
  std::vector<bool> executed(exploits.size(), false);
  std::vector<std::size_t> enabled_at(exploits.size(), std::numeric_limits<std::size_t>::max());
  for (std::size_t step = 0; step < exploits.size(); ++step) {
    for (std::size_t k = 0; k < exploits.size(); ++k) {
      if (executed[k] || enabled_at[k] != std::numeric_limits<std::size_t>::max()) continue;
      bool ready = true;
      for (NodeIndex r : graph.requirements(exploits[k])) {
        if (graph.node(r).kind == NodeKind::Privilege && !owned[r]) ready = false;
      }
      if (ready) enabled_at[k] = step;
    }
    std::size_t pick = exploits.size();
    for (std::size_t k = 0; k < exploits.size(); ++k) {
      if (executed[k] || enabled_at[k] == std::numeric_limits<std::size_t>::max()) continue;
      if (pick == exploits.size() || enabled_at[k] < enabled_at[pick]) pick = k;
    }
    if (pick == exploits.size()) break;
    executed[pick] = true;
    plan.exec_order.push_back(graph.node(exploits[pick]).id);
    for (NodeIndex d : graph.dependents(exploits[pick])) {
      if (graph.node(d).kind == NodeKind::Privilege) owned[d] = true;
    }
  }
  return plan;
}

PlanOutcome optimal_plan(const AttackGraph& graph, const PlannerOptions& options) {
  const auto start = Clock::now();
  PlanOutcome outcome;
  const Task task(graph);
  const RelaxedTask relaxed(task);

  State initial(task.words, 0);
  for (std::size_t slot = 0; slot < task.config_nodes.size(); ++slot) {
    if (task.slot_cost[slot] == 0) set_slot(initial, slot);
  }

  // Heuristic values are computed lazily when a state is popped. A fresh
  // successor is keyed by max(parent f, own g): every goal state above it
  // also extends the parent, so the key is still a lower bound.
  std::vector<State> states;
  std::vector<std::int64_t> g_of;
  std::vector<std::int64_t> f_of;  // -1 until evaluated
  std::vector<bool> closed;
  std::unordered_map<State, std::size_t, StateHash> index;
  struct Entry {
    std::int64_t f;
    std::int64_t g;
    std::size_t id;
    bool operator>(const Entry& o) const {
      if (f != o.f) return f > o.f;
      if (g != o.g) return g < o.g;
      return id > o.id;
    }
  };
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

  auto push = [&](State s, std::int64_t key_floor) {
    if (index.contains(s)) return;
    const std::int64_t g = state_cost(task, s);
    const std::size_t id = states.size();
    index.emplace(s, id);
    states.push_back(std::move(s));
    g_of.push_back(g);
    f_of.push_back(-1);
    closed.push_back(false);
    open.push({std::max(g, key_floor), g, id});
  };
  push(initial, 0);

  std::optional<std::int64_t> best;
  std::vector<std::size_t> goal_states;
  while (!open.empty()) {
    const Entry top = open.top();
    open.pop();
    if (closed[top.id]) continue;
    if (best && top.f > *best) break;
    if (f_of[top.id] < 0) {
      const std::int64_t h = relaxed.evaluate(states[top.id], options.heuristic);
      ++outcome.stats.heuristic_evals;
      if (h == kInf) {
        closed[top.id] = true;
        continue;
      }
      f_of[top.id] = std::max(top.f, top.g + h);
      if (f_of[top.id] > top.f) {
        open.push({f_of[top.id], top.g, top.id});
        continue;
      }
    }
    closed[top.id] = true;
    ++outcome.stats.expanded_states;
    const State s = states[top.id];
    const std::vector<bool> derived = closure(graph, usable_from_state(task, s));
    if (derived[graph.goal()]) {
      if (!best) best = top.g;
      if (top.g == *best) goal_states.push_back(top.id);
      continue;
    }
    for (std::size_t k = 0; k < task.exploits.size(); ++k) {
      bool applicable = true;
      for (NodeIndex p : task.exploit_privs[k]) applicable = applicable && derived[p];
      if (!applicable) continue;
      bool gains = false;
      for (NodeIndex t : task.exploit_targets[k]) gains = gains || !derived[t];
      if (!gains) continue;
      State next = s;
      bool buys = false;
      for (auto slot : task.exploit_slots[k]) {
        if (!has_slot(next, slot)) {
          set_slot(next, slot);
          buys = true;
        }
      }
      if (buys) push(std::move(next), f_of[top.id]);
    }
  }

  if (!goal_states.empty()) {
    std::vector<const State*> goals;
    for (auto id : goal_states) goals.push_back(&states[id]);
    const State* chosen = canonical_goal(task, goals);
    outcome.plan = extract_plan(graph, usable_from_state(task, *chosen));
  }
  outcome.stats.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return outcome;
}

Cost ptc(const AttackGraph& graph, const PlannerOptions& options) {
  PlanOutcome outcome = optimal_plan(graph, options);
  if (!outcome.plan) throw UnreachableError("goal " + graph.node(graph.goal()).id + " is unreachable");
  return outcome.plan->cost;
}

std::optional<AttackPlan> brute_force_optimal(const AttackGraph& graph, std::size_t max_configs) {
  const Task task(graph);
  if (task.config_nodes.size() > max_configs) {
    throw ConfigError("brute force refuses " + std::to_string(task.config_nodes.size()) + " configs (limit " +
                      std::to_string(max_configs) + ")");
  }
  std::vector<std::size_t> positive;
  State base(task.words, 0);
  for (std::size_t slot = 0; slot < task.config_nodes.size(); ++slot) {
    if (task.slot_cost[slot] == 0) {
      set_slot(base, slot);
    } else {
      positive.push_back(slot);
    }
  }
  std::optional<std::int64_t> best_cost;
  std::vector<State> best_states;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << positive.size()); ++mask) {
    State s = base;
    for (std::size_t b = 0; b < positive.size(); ++b) {
      if ((mask >> b) & 1U) set_slot(s, positive[b]);
    }
    const std::int64_t cost = state_cost(task, s);
    if (best_cost && cost > *best_cost) continue;
    if (!state_reaches_goal(task, s)) continue;
    if (!best_cost || cost < *best_cost) {
      best_cost = cost;
      best_states.clear();
    }
    best_states.push_back(std::move(s));
  }
  if (!best_cost) return std::nullopt;
  std::vector<const State*> goals;
  for (const auto& s : best_states) goals.push_back(&s);
  return extract_plan(graph, usable_from_state(task, *canonical_goal(task, goals)));
}

std::vector<std::string> check_plan(const AttackGraph& graph, const AttackPlan& plan) {
  std::vector<std::string> problems;
  std::vector<bool> in_plan(graph.size(), false);
  if (!std::is_sorted(plan.node_set.begin(), plan.node_set.end()) ||
      std::adjacent_find(plan.node_set.begin(), plan.node_set.end()) != plan.node_set.end()) {
    problems.push_back("node_set is not sorted and unique");
  }
  for (const auto& id : plan.node_set) {
    auto i = graph.find(id);
    if (!i) {
      problems.push_back("unknown node " + id);
      continue;
    }
    in_plan[*i] = true;
  }
  if (plan.source != graph.node(graph.source()).id) problems.push_back("source mismatch");
  if (plan.goal != graph.node(graph.goal()).id) problems.push_back("goal mismatch");
  if (!in_plan[graph.source()]) problems.push_back("source not in plan");
  if (!in_plan[graph.goal()]) problems.push_back("goal not in plan");

  Cost cost;
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (!in_plan[i]) continue;
    const Node& node = graph.node(i);
    if (node.kind == NodeKind::Config) cost += node.cost;
    if (node.kind == NodeKind::Exploit) {
      for (NodeIndex r : graph.requirements(i)) {
        if (!in_plan[r]) problems.push_back("exploit " + node.id + " misses requirement " + graph.node(r).id);
      }
    }
    if (node.kind == NodeKind::Privilege && i != graph.source()) {
      bool supported = false;
      for (NodeIndex e : graph.requirements(i)) supported = supported || in_plan[e];
      if (!supported) problems.push_back("privilege " + node.id + " has no supporting exploit in the plan");
    }
  }
  if (cost != plan.cost) problems.push_back("cost " + plan.cost.to_string() + " != config sum " + cost.to_string());

  std::vector<bool> owned(graph.size(), false);
  owned[graph.source()] = true;
  std::set<std::string> seen;
  for (const auto& id : plan.exec_order) {
    auto i = graph.find(id);
    if (!i || graph.node(*i).kind != NodeKind::Exploit || !in_plan[*i]) {
      problems.push_back("exec_order entry " + id + " is not a plan exploit");
      continue;
    }
    if (!seen.insert(id).second) problems.push_back("exploit " + id + " executed twice");
    for (NodeIndex r : graph.requirements(*i)) {
      if (graph.node(r).kind == NodeKind::Privilege && !owned[r]) {
        problems.push_back("exploit " + id + " runs before " + graph.node(r).id + " is held");
      }
    }
    for (NodeIndex d : graph.dependents(*i)) {
      if (graph.node(d).kind == NodeKind::Privilege) owned[d] = true;
    }
  }
  for (NodeIndex i = 0; i < graph.size(); ++i) {
    if (in_plan[i] && graph.node(i).kind == NodeKind::Exploit && !seen.contains(graph.node(i).id)) {
      problems.push_back("exploit " + graph.node(i).id + " missing from exec_order");
    }
  }
  if (!owned[graph.goal()]) problems.push_back("goal not held after execution");
  return problems;
}

}  // namespace agobf
