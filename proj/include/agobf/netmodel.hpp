#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agobf/cost.hpp"

namespace agobf {

enum class CvssVersion { V2, V3 };

/// One catalog entry, mirroring the NVD fields the cost model needs.
struct VulnerabilityRecord {
  std::string vuln_id;
  CvssVersion cvss_version = CvssVersion::V2;
  double exploitability_subscore = 0.0;
  std::set<std::string> affected_os;

  friend bool operator==(const VulnerabilityRecord&, const VulnerabilityRecord&) = default;
};

/// Vulnerability catalog keyed by vuln_id.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(std::vector<VulnerabilityRecord> records);

  /// Throws ValidationError on duplicate ids or records that break the
  /// range / non-empty-OS invariants.
  void add(VulnerabilityRecord record);

  const VulnerabilityRecord& at(std::string_view vuln_id) const;
  bool contains(std::string_view vuln_id) const;
  bool knows_os(std::string_view os) const;
  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }

  /// Normalized cost of a known vulnerability.
  Cost cost_of(std::string_view vuln_id) const;

  const std::map<std::string, VulnerabilityRecord, std::less<>>& records() const { return records_; }

  friend bool operator==(const Catalog&, const Catalog&) = default;

 private:
  std::map<std::string, VulnerabilityRecord, std::less<>> records_;
};

enum class Layer { DMZ, Internal, Secured };

struct Host {
  std::string host_id;
  std::string os;
  std::set<std::string> installed_vulns;
  std::optional<Layer> layer;

  friend bool operator==(const Host&, const Host&) = default;
};

/// Location id of the attacker when it starts outside the network.
inline constexpr std::string_view kExternalLocation = "internet";

struct Goal {
  std::string host_id;
  std::string privilege = "root";

  friend bool operator==(const Goal&, const Goal&) = default;
};

using Reachability = std::set<std::pair<std::string, std::string>>;

struct NetworkModel {
  std::string network_id;
  std::map<std::string, Host, std::less<>> hosts;
  /// Directed (src, dst) pairs; src may be kExternalLocation.
  Reachability reachability;
  std::string attacker_entry = std::string(kExternalLocation);
  Goal goal;

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

/// A fake (host, vulnerability) pair. Every assignment is fake; the unit
/// of the deception budget.
struct Assignment {
  std::string host_id;
  std::string vuln_id;

  friend auto operator<=>(const Assignment&, const Assignment&) = default;
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

std::string to_string(const Assignment& assignment);

/// Exploitability subscore normalized to [0,1]: /10 for CVSS v2, /3.9 for v3.
Cost normalize_cost(const VulnerabilityRecord& record);

/// Catalog entries affecting host.os, excluding installed ones, ascending id.
std::vector<std::string> compatible_vulns(const Catalog& catalog, const Host& host);

/// Throws ValidationError describing the first broken NetworkModel invariant.
void validate_network(const NetworkModel& network, const Catalog& catalog);

/// Throws ValidationError if any assignment is unknown, OS-incompatible, or
/// duplicates an installed vulnerability or another assignment.
void validate_assignments(const NetworkModel& network, const Catalog& catalog,
                          std::span<const Assignment> assignments);

/// Network with each assignment's vulnerability added to its host.
NetworkModel apply_assignments(const NetworkModel& network, std::span<const Assignment> assignments);

struct SyntheticNetworkParams {
  std::size_t n_hosts = 10;
  /// DMZ / Internal / Secured.
  std::array<double, 3> layer_fractions{0.2, 0.5, 0.3};
  std::pair<std::size_t, std::size_t> vulns_per_host_range{1, 2};
  /// Each Internal / Secured host is reachable from this many hosts of the
  /// previous layer (clamped to the layer size).
  std::size_t upstream_links = 2;
  /// Probability of an extra edge between two hosts of the same layer.
  double intra_layer_link_probability = 0.1;
  /// Hosts left without any installed vulnerability.
  std::size_t dead_hosts = 0;
};

/// Three-layer network: internet -> DMZ -> Internal -> Secured, goal on a
/// Secured host. Deterministic for a fixed seed.
NetworkModel generate_synthetic_network(const SyntheticNetworkParams& params, const Catalog& catalog,
                                        std::uint64_t seed);

struct SyntheticCatalogParams {
  std::vector<std::string> operating_systems{"linux", "windows", "bsd"};
  std::size_t vulns_per_os = 4;
  /// Share of records scored with CVSS v3 instead of v2.
  double v3_fraction = 0.3;
};

/// Seeded catalog with one-decimal subscores spread over the version range.
Catalog generate_synthetic_catalog(const SyntheticCatalogParams& params, std::uint64_t seed);

std::string to_string(Layer layer);
Layer layer_from_string(std::string_view text);
std::string to_string(CvssVersion version);
CvssVersion cvss_version_from_string(std::string_view text);

}  // namespace agobf
