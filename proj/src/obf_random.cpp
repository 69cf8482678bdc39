#include "agobf/obf_random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "agobf/errors.hpp"
#include "agobf/rng.hpp"

namespace agobf {

RandomObfuscation obfuscate_random(const NetworkModel& network, const Catalog& catalog,
                                   const RandomObfuscationParams& params, std::uint64_t seed) {
  validate_network(network, catalog);
  const std::size_t n = network.hosts.size();
  std::size_t count = 0;
  if (const double* fraction = std::get_if<double>(&params.hosts)) {
    if (!(*fraction >= 0.0 && *fraction <= 1.0)) {
      throw ConfigError("deceptive host fraction must lie in [0,1], got " + std::to_string(*fraction));
    }
    count = static_cast<std::size_t>(std::ceil(*fraction * static_cast<double>(n) - 1e-9));
  } else {
    count = std::get<std::size_t>(params.hosts);
    if (count > n) {
      throw ConfigError("cannot pick " + std::to_string(count) + " deceptive hosts out of " + std::to_string(n));
    }
  }
  if (params.low_cost_epsilon <= 0.0) throw ConfigError("low_cost_epsilon must be positive");

  Rng rng(seed);
  std::vector<std::string> hosts;
  for (const auto& [id, host] : network.hosts) hosts.push_back(id);
  shuffle(hosts, rng);
  hosts.resize(count);

  RandomObfuscation out;
  const std::size_t cap = params.max_assignments.value_or(std::numeric_limits<std::size_t>::max());
  for (const auto& id : hosts) {
    if (out.assignments.size() >= cap) break;
    const Host& host = network.hosts.at(id);
    out.deceptive_hosts.push_back(id);
    if (!catalog.knows_os(host.os)) continue;
    const std::vector<std::string> valid = compatible_vulns(catalog, host);
    const std::size_t num_to_add = uniform_between(rng, 0, valid.size());
    std::vector<double> weights;
    for (const auto& v : valid) weights.push_back(1.0 / (catalog.cost_of(v).to_double() + params.low_cost_epsilon));
    for (std::size_t pick : weighted_sample_without_replacement(weights, num_to_add, rng)) {
      if (out.assignments.size() >= cap) break;
      out.assignments.push_back({id, valid[pick]});
    }
  }
  std::sort(out.assignments.begin(), out.assignments.end());
  std::sort(out.deceptive_hosts.begin(), out.deceptive_hosts.end());
  out.graph = apply_assignments(network, catalog, out.assignments);
  return out;
}

}  // namespace agobf
