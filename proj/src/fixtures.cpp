#include "agobf/fixtures.hpp"

#include "agobf/aggraph.hpp"
#include "agobf/errors.hpp"
#include "agobf/io.hpp"

namespace agobf {

namespace {

Host linux_host(const std::string& id, const std::string& vuln) { return Host{id, "linux", {vuln}, std::nullopt}; }

void chain(NetworkModel& net, const std::string& prefix, int first, int last) {
  for (int i = first; i < last; ++i) {
    net.reachability.emplace(prefix + std::to_string(i), prefix + std::to_string(i + 1));
  }
}

void add_hosts(NetworkModel& net, const std::string& prefix, int count, const std::string& vuln) {
  for (int i = 1; i <= count; ++i) {
    Host h = linux_host(prefix + std::to_string(i), vuln);
    net.hosts.emplace(h.host_id, h);
  }
}

}  // namespace

// Every real hop costs 1. Real routes to T: R1..R9 (10 hops) and
// A1..A5, B1..B6, Z1..Z8 (20 hops). IP1 and IP2 have no real
// vulnerabilities; faking both opens A1..A5, IP1, IP2, Y1, T (9 hops), and
// IP2 alone is reachable from B6 at 14 hops.
Fixture h1_counterexample_fixture() {
  Fixture f;
  f.name = "h1-counterexample";
  f.catalog.add({"R", CvssVersion::V2, 10.0, {"linux"}});
  f.catalog.add({"F", CvssVersion::V2, 10.0, {"win"}});

  NetworkModel& net = f.network;
  net.network_id = "h1-counterexample";
  add_hosts(net, "A", 5, "R");
  add_hosts(net, "B", 6, "R");
  add_hosts(net, "Z", 8, "R");
  add_hosts(net, "R", 9, "R");
  add_hosts(net, "Y", 1, "R");
  net.hosts.emplace("T", linux_host("T", "R"));
  net.hosts.emplace("IP1", Host{"IP1", "win", {}, std::nullopt});
  net.hosts.emplace("IP2", Host{"IP2", "win", {}, std::nullopt});

  const std::string internet(kExternalLocation);
  net.reachability.emplace(internet, "A1");
  chain(net, "A", 1, 5);
  net.reachability.emplace("A5", "IP1");
  net.reachability.emplace("IP1", "IP2");
  net.reachability.emplace("IP2", "Y1");
  net.reachability.emplace("Y1", "T");
  net.reachability.emplace("A5", "B1");
  chain(net, "B", 1, 6);
  net.reachability.emplace("B6", "IP2");
  net.reachability.emplace("B6", "Z1");
  chain(net, "Z", 1, 8);
  net.reachability.emplace("Z8", "T");
  net.reachability.emplace(internet, "R1");
  chain(net, "R", 1, 9);
  net.reachability.emplace("R9", "T");

  net.attacker_entry = internet;
  net.goal = Goal{"T", "root"};
  f.assignments = {{"IP1", "F"}, {"IP2", "F"}};
  f.budget = 2;
  return f;
}

// Baseline internet -> D1 -> G at cost 2. X1..X3 run an OS with no
// installed vulnerability and reach G directly, so each of the three
// candidate fakes opens a 1.2 path.
Fixture search_space_k2_fixture() {
  Fixture f;
  f.name = "searchspace-k2";
  f.catalog.add({"R", CvssVersion::V2, 10.0, {"linux"}});
  f.catalog.add({"F", CvssVersion::V2, 2.0, {"win"}});

  NetworkModel& net = f.network;
  net.network_id = "searchspace-k2";
  net.hosts.emplace("D1", linux_host("D1", "R"));
  net.hosts.emplace("G", linux_host("G", "R"));
  const std::string internet(kExternalLocation);
  net.reachability.emplace(internet, "D1");
  net.reachability.emplace("D1", "G");
  for (int i = 1; i <= 3; ++i) {
    const std::string id = "X" + std::to_string(i);
    net.hosts.emplace(id, Host{id, "win", {}, std::nullopt});
    net.reachability.emplace(internet, id);
    net.reachability.emplace(id, "G");
  }
  net.attacker_entry = internet;
  net.goal = Goal{"G", "root"};
  f.assignments = {};
  f.budget = 2;
  return f;
}

std::vector<std::string> fixture_names() { return {"h1-counterexample", "searchspace-k2"}; }

Fixture fixture_by_name(std::string_view name) {
  if (name == "h1-counterexample") return h1_counterexample_fixture();
  if (name == "searchspace-k2") return search_space_k2_fixture();
  throw ConfigError("unknown fixture " + std::string(name));
}

namespace {

Json expected_values(std::string_view name) {
  if (name == "h1-counterexample") {
    return Json{{"ptc_baseline", 10},
                {"ptc_obfuscated", 9},
                {"aptc_obfuscated", 22},
                {"aptc_segments", {6, 7, 9}},
                {"singleton_utilities", {{"IP1|F", 10}, {"IP2|F", 10}}},
                {"h1_root", 20},
                {"h2_root", 30},
                {"budget", 2}};
  }
  return Json{{"budget", 2},
              {"candidates", {"X1|F", "X2|F", "X3|F"}},
              {"root", {{"chosen", Json::array()}, {"remaining", {"X1|F", "X2|F", "X3|F"}}}},
              {"root_right", {{"chosen", {"X1|F"}}, {"remaining", {"X2|F", "X3|F"}}}},
              {"root_left", {{"chosen", Json::array()}, {"remaining", {"X2|F", "X3|F"}}}},
              {"pruned", {{"chosen", Json::array()}, {"remaining", {"X3|F"}}}}};
}

}  // namespace

std::vector<std::filesystem::path> export_fixture(std::string_view name, const std::filesystem::path& dir) {
  const Fixture f = fixture_by_name(name);
  const std::string base = f.name;
  std::vector<std::filesystem::path> written{dir / (base + ".network.json"), dir / (base + ".catalog.json"),
                                             dir / (base + ".graph.json"), dir / (base + ".expected.json")};
  write_json_file(written[0], network_to_json(f.network));
  write_json_file(written[1], catalog_to_json(f.catalog));
  write_json_file(written[2], graph_to_json(apply_assignments(f.network, f.catalog, f.assignments)));
  Json expected = expected_values(name);
  expected["assignments"] = assignments_to_json(f.assignments);
  write_json_file(written[3], expected);
  return written;
}

}  // namespace agobf
