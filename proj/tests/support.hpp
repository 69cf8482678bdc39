#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "agobf/aggraph.hpp"
#include "agobf/netmodel.hpp"
#include "agobf/rng.hpp"

namespace agobf::testing {

inline std::string padded(const char* prefix, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%s%02zu", prefix, i);
  return buf;
}

struct RandomGraphParams {
  std::size_t privileges = 6;
  std::size_t configs = 8;
  std::size_t max_supporters = 3;
  std::size_t max_privilege_preconditions = 2;
  std::size_t max_config_preconditions = 2;
  /// Probability that a config costs 0.
  double zero_cost_probability = 0.1;
};

/// Arbitrary AND/OR graph: privileges p00 (source) .. pNN (goal), configs
/// shared freely between exploits, cycles allowed. The goal may be
/// underivable.
inline AttackGraph random_and_or_graph(const RandomGraphParams& params, Rng& rng) {
  std::vector<Node> nodes;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < params.privileges; ++i) {
    nodes.push_back({padded("p", i), NodeKind::Privilege, Cost::zero(), false, std::nullopt});
  }
  for (std::size_t i = 0; i < params.configs; ++i) {
    const Cost cost = uniform_unit(rng) < params.zero_cost_probability
                          ? Cost::zero()
                          : Cost::from_micros(static_cast<std::int64_t>(uniform_between(rng, 1, 10)) * 100'000);
    nodes.push_back({padded("c", i), NodeKind::Config, cost, false, std::nullopt});
  }
  std::size_t exploit = 0;
  for (std::size_t p = 1; p < params.privileges; ++p) {
    const std::size_t supporters = uniform_between(rng, 1, params.max_supporters);
    for (std::size_t s = 0; s < supporters; ++s) {
      const std::string id = padded("e", exploit++);
      nodes.push_back({id, NodeKind::Exploit, Cost::zero(), false, std::nullopt});
      edges.push_back({padded("p", p), id});
      const std::size_t privs = uniform_between(rng, 1, params.max_privilege_preconditions);
      for (std::size_t k = 0; k < privs; ++k) {
        // Mostly lower-numbered privileges, so most goals stay derivable.
        const std::size_t q = uniform_unit(rng) < 0.8 ? uniform_below(rng, p) : uniform_below(rng, params.privileges);
        edges.push_back({id, padded("p", q)});
      }
      const std::size_t confs = uniform_between(rng, 1, params.max_config_preconditions);
      for (std::size_t k = 0; k < confs; ++k) {
        edges.push_back({id, padded("c", uniform_below(rng, params.configs))});
      }
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return AttackGraph(std::move(nodes), std::move(edges), padded("p", params.privileges - 1), padded("p", 0));
}

/// Small random network over two operating systems. Every host but the
/// goal may lack vulnerabilities, so fakes have room to open new paths.
inline NetworkModel random_network(std::size_t n_hosts, const Catalog& catalog, Rng& rng) {
  std::vector<std::string> by_os[2];
  for (const auto& [id, rec] : catalog.records()) {
    for (const auto& os : rec.affected_os) by_os[os == "linux" ? 0 : 1].push_back(id);
  }
  NetworkModel net;
  net.network_id = "rnd";
  for (std::size_t i = 0; i < n_hosts; ++i) {
    Host h{padded("H", i), uniform_below(rng, 2) == 0 ? "linux" : "win", {}, std::nullopt};
    const auto& pool = by_os[h.os == "linux" ? 0 : 1];
    const bool is_goal = i + 1 == n_hosts;
    if (!pool.empty() && (is_goal || uniform_unit(rng) < 0.7)) {
      h.installed_vulns.insert(pool[uniform_below(rng, pool.size())]);
    }
    net.hosts.emplace(h.host_id, h);
  }
  const std::string internet(kExternalLocation);
  for (std::size_t i = 0; i < n_hosts; ++i) {
    if (i < 2 || uniform_unit(rng) < 0.2) net.reachability.emplace(internet, padded("H", i));
    for (std::size_t j = i + 1; j < n_hosts; ++j) {
      if (j == i + 1 || uniform_unit(rng) < 0.25) net.reachability.emplace(padded("H", i), padded("H", j));
    }
  }
  net.goal = Goal{padded("H", n_hosts - 1), "root"};
  return net;
}

/// linux/win catalog with costs on the one-decimal V2 grid.
inline Catalog small_catalog(std::size_t per_os, Rng& rng) {
  Catalog c;
  for (std::size_t i = 0; i < per_os; ++i) {
    c.add({padded("L", i), CvssVersion::V2, static_cast<double>(uniform_between(rng, 1, 10)), {"linux"}});
    c.add({padded("W", i), CvssVersion::V2, static_cast<double>(uniform_between(rng, 1, 10)), {"win"}});
  }
  return c;
}

}  // namespace agobf::testing
