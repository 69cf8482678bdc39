#include "agobf/netmodel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "agobf/errors.hpp"
#include "agobf/rng.hpp"

namespace agobf {

namespace {

double max_subscore(CvssVersion version) { return version == CvssVersion::V2 ? 10.0 : 3.9; }

void check_record(const VulnerabilityRecord& record) {
  if (record.vuln_id.empty()) throw ValidationError("vulnerability record with empty vuln_id");
  const double hi = max_subscore(record.cvss_version);
  if (!(record.exploitability_subscore >= 0.0 && record.exploitability_subscore <= hi)) {
    std::ostringstream msg;
    msg << "vulnerability " << record.vuln_id << ": exploitability subscore " << record.exploitability_subscore
        << " outside [0, " << hi << "] for CVSS " << to_string(record.cvss_version);
    throw ValidationError(msg.str());
  }
  if (record.affected_os.empty()) {
    throw ValidationError("vulnerability " + record.vuln_id + " has no affected OS");
  }
}

std::string padded(std::size_t value, std::size_t width) {
  std::ostringstream out;
  out << std::setw(static_cast<int>(width)) << std::setfill('0') << value;
  return out.str();
}

}  // namespace

Catalog::Catalog(std::vector<VulnerabilityRecord> records) {
  for (auto& record : records) add(std::move(record));
}

void Catalog::add(VulnerabilityRecord record) {
  check_record(record);
  if (records_.contains(record.vuln_id)) throw ValidationError("duplicate vulnerability " + record.vuln_id);
  std::string key = record.vuln_id;
  records_.emplace(std::move(key), std::move(record));
}

const VulnerabilityRecord& Catalog::at(std::string_view vuln_id) const {
  auto it = records_.find(vuln_id);
  if (it == records_.end()) throw ValidationError("unknown vulnerability " + std::string(vuln_id));
  return it->second;
}

bool Catalog::contains(std::string_view vuln_id) const { return records_.find(vuln_id) != records_.end(); }

bool Catalog::knows_os(std::string_view os) const {
  return std::any_of(records_.begin(), records_.end(), [&](const auto& entry) {
    return entry.second.affected_os.contains(std::string(os));
  });
}

Cost Catalog::cost_of(std::string_view vuln_id) const { return normalize_cost(at(vuln_id)); }

std::string to_string(const Assignment& assignment) { return assignment.host_id + ":" + assignment.vuln_id; }

Cost normalize_cost(const VulnerabilityRecord& record) {
  check_record(record);
  return Cost::from_double(record.exploitability_subscore / max_subscore(record.cvss_version));
}

std::vector<std::string> compatible_vulns(const Catalog& catalog, const Host& host) {
  if (host.os.empty()) throw ValidationError("host " + host.host_id + " has no OS");
  if (catalog.empty()) return {};
  if (!catalog.knows_os(host.os)) {
    throw ValidationError("host " + host.host_id + ": unknown OS identifier " + host.os);
  }
  std::vector<std::string> out;
  for (const auto& [id, record] : catalog.records()) {
    if (record.affected_os.contains(host.os) && !host.installed_vulns.contains(id)) out.push_back(id);
  }
  return out;
}

void validate_network(const NetworkModel& network, const Catalog& catalog) {
  for (const auto& [key, host] : network.hosts) {
    if (key != host.host_id) throw ValidationError("host key " + key + " does not match host_id " + host.host_id);
    if (host.host_id.empty()) throw ValidationError("host with empty id");
    if (host.host_id == kExternalLocation) {
      throw ValidationError("host id '" + host.host_id + "' is reserved for the external attacker location");
    }
    if (host.os.empty()) throw ValidationError("host " + host.host_id + " has no OS");
    for (const auto& vuln : host.installed_vulns) {
      if (!catalog.contains(vuln)) {
        throw ValidationError("host " + host.host_id + " lists unknown vulnerability " + vuln);
      }
    }
  }
  for (const auto& [src, dst] : network.reachability) {
    if (src != kExternalLocation && !network.hosts.contains(src)) {
      throw ValidationError("reachability source " + src + " is not a host");
    }
    if (!network.hosts.contains(dst)) throw ValidationError("reachability target " + dst + " is not a host");
  }
  if (network.attacker_entry != kExternalLocation && !network.hosts.contains(network.attacker_entry)) {
    throw ValidationError("attacker entry " + network.attacker_entry + " is neither external nor a host");
  }
  if (!network.hosts.contains(network.goal.host_id)) {
    throw ValidationError("goal host " + network.goal.host_id + " is not a host");
  }
}

void validate_assignments(const NetworkModel& network, const Catalog& catalog,
                          std::span<const Assignment> assignments) {
  std::set<Assignment> seen;
  for (const auto& a : assignments) {
    auto host = network.hosts.find(a.host_id);
    if (host == network.hosts.end()) throw ValidationError("assignment " + to_string(a) + ": unknown host");
    if (!catalog.contains(a.vuln_id)) throw ValidationError("assignment " + to_string(a) + ": unknown vulnerability");
    if (!catalog.at(a.vuln_id).affected_os.contains(host->second.os)) {
      throw ValidationError("assignment " + to_string(a) + ": vulnerability does not affect OS " + host->second.os);
    }
    if (host->second.installed_vulns.contains(a.vuln_id)) {
      throw ValidationError("assignment " + to_string(a) + ": vulnerability already installed on host");
    }
    if (!seen.insert(a).second) throw ValidationError("assignment " + to_string(a) + " given twice");
  }
}

NetworkModel apply_assignments(const NetworkModel& network, std::span<const Assignment> assignments) {
  NetworkModel out = network;
  for (const auto& a : assignments) {
    auto host = out.hosts.find(a.host_id);
    if (host == out.hosts.end()) throw ValidationError("assignment " + to_string(a) + ": unknown host");
    host->second.installed_vulns.insert(a.vuln_id);
  }
  return out;
}

NetworkModel generate_synthetic_network(const SyntheticNetworkParams& params, const Catalog& catalog,
                                        std::uint64_t seed) {
  const std::size_t n = params.n_hosts;
  if (n < 3) throw ConfigError("synthetic network needs at least 3 hosts to populate DMZ, Internal and Secured");
  double sum = 0.0;
  for (double f : params.layer_fractions) {
    if (f < 0.0) throw ConfigError("layer fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw ConfigError("layer fractions must sum to 1");
  if (catalog.empty()) throw ConfigError("synthetic network needs a non-empty catalog");
  if (params.vulns_per_host_range.first > params.vulns_per_host_range.second) {
    throw ConfigError("vulns_per_host_range is empty");
  }
  if (params.dead_hosts >= n) throw ConfigError("dead_hosts must leave at least one live host");

  std::size_t dmz = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(n * params.layer_fractions[0])));
  std::size_t secured =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(n * params.layer_fractions[2])));
  while (dmz + secured >= n) {
    if (dmz >= secured && dmz > 1) {
      --dmz;
    } else if (secured > 1) {
      --secured;
    } else {
      throw ConfigError("too few hosts to populate all three layers");
    }
  }
  const std::size_t internal = n - dmz - secured;

  std::set<std::string> os_set;
  for (const auto& [id, record] : catalog.records()) os_set.insert(record.affected_os.begin(), record.affected_os.end());
  const std::vector<std::string> operating_systems(os_set.begin(), os_set.end());

  Rng rng(seed);
  NetworkModel net;
  net.network_id = "synthetic-n" + std::to_string(n) + "-s" + std::to_string(seed);
  const std::size_t width = std::to_string(n).size();

  std::array<std::vector<std::string>, 3> layer_hosts;
  const std::array<std::pair<const char*, std::size_t>, 3> layout{
      {{"dmz-", dmz}, {"int-", internal}, {"sec-", secured}}};
  for (std::size_t l = 0; l < 3; ++l) {
    for (std::size_t k = 0; k < layout[l].second; ++k) {
      Host host;
      host.host_id = std::string(layout[l].first) + padded(k, width);
      host.layer = static_cast<Layer>(l);
      host.os = operating_systems[uniform_below(rng, operating_systems.size())];
      std::vector<std::string> options = compatible_vulns(catalog, host);
      const std::size_t lo = std::max<std::size_t>(1, params.vulns_per_host_range.first);
      const std::size_t hi = std::max(lo, params.vulns_per_host_range.second);
      std::size_t want = std::min<std::size_t>(uniform_between(rng, lo, hi), options.size());
      shuffle(options, rng);
      host.installed_vulns.insert(options.begin(), options.begin() + static_cast<std::ptrdiff_t>(want));
      layer_hosts[l].push_back(host.host_id);
      net.hosts.emplace(host.host_id, std::move(host));
    }
  }

  for (const auto& h : layer_hosts[0]) net.reachability.emplace(std::string(kExternalLocation), h);
  for (std::size_t l = 1; l < 3; ++l) {
    const auto& upstream = layer_hosts[l - 1];
    for (const auto& h : layer_hosts[l]) {
      std::vector<std::string> sources = upstream;
      shuffle(sources, rng);
      const std::size_t links = std::clamp<std::size_t>(params.upstream_links, 1, sources.size());
      for (std::size_t k = 0; k < links; ++k) net.reachability.emplace(sources[k], h);
    }
  }
  for (const auto& layer : layer_hosts) {
    for (const auto& a : layer) {
      for (const auto& b : layer) {
        if (a != b && uniform_unit(rng) < params.intra_layer_link_probability) net.reachability.emplace(a, b);
      }
    }
  }

  net.goal.host_id = layer_hosts[2][uniform_below(rng, layer_hosts[2].size())];
  net.goal.privilege = "root";

  if (params.dead_hosts > 0) {
    std::vector<std::string> ids;
    for (const auto& [id, host] : net.hosts) {
      if (id != net.goal.host_id) ids.push_back(id);
    }
    shuffle(ids, rng);
    for (std::size_t k = 0; k < std::min(params.dead_hosts, ids.size()); ++k) {
      net.hosts.at(ids[k]).installed_vulns.clear();
    }
  }
  return net;
}

Catalog generate_synthetic_catalog(const SyntheticCatalogParams& params, std::uint64_t seed) {
  if (params.operating_systems.empty() || params.vulns_per_os == 0) {
    throw ConfigError("synthetic catalog needs at least one OS and one vulnerability per OS");
  }
  Rng rng(seed);
  Catalog catalog;
  std::size_t serial = 1;
  for (const auto& os : params.operating_systems) {
    for (std::size_t k = 0; k < params.vulns_per_os; ++k) {
      VulnerabilityRecord record;
      record.vuln_id = "CVE-2099-" + padded(serial++, 4);
      record.affected_os = {os};
      if (uniform_unit(rng) < params.v3_fraction) {
        record.cvss_version = CvssVersion::V3;
        record.exploitability_subscore = static_cast<double>(uniform_between(rng, 1, 39)) / 10.0;
      } else {
        record.cvss_version = CvssVersion::V2;
        record.exploitability_subscore = static_cast<double>(uniform_between(rng, 10, 100)) / 10.0;
      }
      catalog.add(std::move(record));
    }
  }
  return catalog;
}

std::string to_string(Layer layer) {
  switch (layer) {
    case Layer::DMZ:
      return "DMZ";
    case Layer::Internal:
      return "Internal";
    case Layer::Secured:
      return "Secured";
  }
  return "?";
}

Layer layer_from_string(std::string_view text) {
  if (text == "DMZ") return Layer::DMZ;
  if (text == "Internal") return Layer::Internal;
  if (text == "Secured") return Layer::Secured;
  throw ValidationError("unknown layer " + std::string(text));
}

std::string to_string(CvssVersion version) { return version == CvssVersion::V2 ? "V2" : "V3"; }

CvssVersion cvss_version_from_string(std::string_view text) {
  if (text == "V2" || text == "v2" || text == "2" || text == "2.0") return CvssVersion::V2;
  if (text == "V3" || text == "v3" || text == "3" || text == "3.0" || text == "3.1") return CvssVersion::V3;
  throw ValidationError("unknown CVSS version " + std::string(text));
}

}  // namespace agobf
