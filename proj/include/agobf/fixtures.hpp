#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "agobf/netmodel.hpp"

namespace agobf {

/// A small network with known expected values, shipped as a golden.
struct Fixture {
  std::string name;
  NetworkModel network;
  Catalog catalog;
  /// Assignments the expected values refer to.
  std::vector<Assignment> assignments;
  std::size_t budget = 0;
};

/// Two fakes that only open a cheaper path together. Baseline PTC 10,
/// PTC with both fakes 9, APTC with both fakes 6 + 7 + 9 = 22, each fake
/// alone leaves APTC at 10.
Fixture h1_counterexample_fixture();

/// Three candidate assignments with budget 2.
Fixture search_space_k2_fixture();

std::vector<std::string> fixture_names();
/// Throws ConfigError for unknown names.
Fixture fixture_by_name(std::string_view name);

/// Writes <dir>/<name>.network.json, .catalog.json, .graph.json (with the
/// fixture assignments applied) and .expected.json. Returns written paths.
std::vector<std::filesystem::path> export_fixture(std::string_view name, const std::filesystem::path& dir);

}  // namespace agobf
