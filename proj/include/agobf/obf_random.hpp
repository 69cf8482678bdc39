#pragma once

#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "agobf/aggraph.hpp"
#include "agobf/netmodel.hpp"

namespace agobf {

struct RandomObfuscationParams {
  /// Deceptive hosts as a fraction of all hosts (rounded up) or as a count.
  std::variant<double, std::size_t> hosts = 0.0;
  /// Selection weight of a vulnerability is 1 / (cost + epsilon).
  double low_cost_epsilon = 0.01;
  /// Stop once this many fakes are placed.
  std::optional<std::size_t> max_assignments;
};

struct RandomObfuscation {
  /// Sorted.
  std::vector<Assignment> assignments;
  std::vector<std::string> deceptive_hosts;
  AttackGraph graph;
};

/// Random deceptive-host selection with random, low-cost-biased fake
/// vulnerabilities per host. Throws ConfigError for fractions outside
/// [0,1] or counts above the host count.
RandomObfuscation obfuscate_random(const NetworkModel& network, const Catalog& catalog,
                                   const RandomObfuscationParams& params, std::uint64_t seed);

}  // namespace agobf
