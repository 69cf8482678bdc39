#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "agobf/netmodel.hpp"
#include "agobf/obf_search.hpp"

namespace agobf {

/// Where a sweep network comes from: a file, or the synthetic generator.
struct SweepNetwork {
  std::string id;
  std::optional<std::filesystem::path> path;
  SyntheticNetworkParams generate;
  std::uint64_t generate_seed = 1;
};

/// approach "random": random deceptive hosts over a host fraction.
/// approach "random-k": the same over all hosts with at most K fakes.
/// approach "search": the optimizer with budget K.
struct SweepSpec {
  std::vector<SweepNetwork> networks;
  std::optional<std::filesystem::path> catalog_path;
  SyntheticCatalogParams catalog_params;
  std::uint64_t catalog_seed = 1;
  std::vector<std::string> approaches{"random"};
  std::vector<double> fractions{0.1, 0.3, 0.5};
  std::vector<std::size_t> budgets{1, 2};
  std::size_t trials = 1;
  std::uint64_t seed = 1;
  SearchConfig search;
  bool with_timings = false;
};

/// Relative paths inside the spec resolve against `base_dir`.
SweepSpec sweep_spec_from_json(const nlohmann::json& json, const std::filesystem::path& base_dir);

struct SweepRow {
  std::string network_id;
  std::size_t n_hosts = 0;
  std::string approach;
  std::string budget;
  std::size_t n_assignments = 0;
  std::size_t p1 = 0;
  std::uint64_t p2_states = 0;
  double p2_ms = 0.0;
  double p3 = 0.0;
  double p4 = 0.0;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  std::uint64_t expanded_nodes = 0;
  std::size_t budget_used = 0;
  double search_ms = 0.0;
  std::string error;
};

struct SweepOutput {
  std::vector<SweepRow> rows;
  std::string csv;
  nlohmann::json summary;
};

/// One row per (network, approach, budget, trial). Failures become rows
/// with an error tag; the sweep carries on.
SweepOutput run_sweep(const SweepSpec& spec);

std::string sweep_csv_header();
std::string sweep_row_to_csv(const SweepRow& row, bool with_timings);

}  // namespace agobf
