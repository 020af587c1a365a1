#pragma once

#include <string>

#include "desim/net_model.hpp"

namespace desim::testing {

// Triangle a-b-c: capacities 1000, metrics 10, latencies 1 ms.
inline Topology triangle(const std::string& srlg = "") {
  std::vector<Node> nodes = {{"a", true, true}, {"b", true, true},
                             {"c", true, true}};
  std::vector<Circuit> circuits = {
      {"ab", "a", "b", 1000.0, 1.0, 10, {}},
      {"bc", "b", "c", 1000.0, 1.0, 10, {}},
      {"ca", "c", "a", 1000.0, 1.0, 10, {}},
  };
  if (!srlg.empty()) {
    circuits[0].srlg_ids.insert(srlg);
    circuits[1].srlg_ids.insert(srlg);
  }
  return Topology(std::move(nodes), std::move(circuits));
}

// Square a-b, b-d, a-c, c-d: uniform metrics 10; a->d is two-way ECMP.
// Latencies: ab=bd=1 and ac=cd=2 when asymmetric, all 1 otherwise.
inline Topology square(bool asymmetric_latency = false) {
  double l2 = asymmetric_latency ? 2.0 : 1.0;
  std::vector<Node> nodes = {
      {"a", true, true}, {"b", false, true}, {"c", false, true},
      {"d", true, true}};
  std::vector<Circuit> circuits = {
      {"ab", "a", "b", 1000.0, 1.0, 10, {}},
      {"bd", "b", "d", 1000.0, 1.0, 10, {}},
      {"ac", "a", "c", 1000.0, l2, 10, {}},
      {"cd", "c", "d", 1000.0, l2, 10, {}},
  };
  return Topology(std::move(nodes), std::move(circuits));
}

inline std::string triangle_json() {
  return R"({
    "version": 1,
    "nodes": [
      {"id": "a", "dc": true, "access": true},
      {"id": "b", "dc": true, "access": true},
      {"id": "c", "dc": true, "access": true}
    ],
    "circuits": [
      {"id": "ab", "a": "a", "b": "b", "capacity_mbps": 1000, "latency_ms": 1.0, "metric": 10},
      {"id": "bc", "a": "b", "b": "c", "capacity_mbps": 1000, "latency_ms": 1.0, "metric": 10},
      {"id": "ca", "a": "c", "b": "a", "capacity_mbps": 1000, "latency_ms": 1.0, "metric": 10}
    ]
  })";
}

// Ring of 10 sites with a kcy hub and a chi-hst chord; wdc-nyc is a hot
// 1 Gbps circuit, everything else 10 Gbps. Access everywhere, DCs at
// chi/nyc/kcy/sjc; sjc sits behind two 14 ms circuits.
inline Topology eleven_site_fixture() {
  std::vector<Node> nodes;
  for (const char* id : {"chi", "nyc", "kcy", "sjc", "lax", "sea", "hst",
                         "atl", "mia", "wdc", "bos"}) {
    bool dc = std::string(id) == "chi" || std::string(id) == "nyc" ||
              std::string(id) == "kcy" || std::string(id) == "sjc";
    nodes.push_back({id, dc, true});
  }
  auto circuit = [](std::string a, std::string b, double cap, double lat) {
    Circuit c;
    c.id = a + "-" + b;
    c.end_a = std::move(a);
    c.end_b = std::move(b);
    c.capacity_mbps = cap;
    c.latency_ms = lat;
    c.igp_metric = static_cast<int>(lat * 10 + 0.5);
    return c;
  };
  std::vector<Circuit> circuits = {
      circuit("sea", "sjc", 10000, 14.0), circuit("sjc", "lax", 10000, 14.0),
      circuit("lax", "hst", 10000, 7.0),  circuit("hst", "mia", 10000, 7.0),
      circuit("mia", "atl", 10000, 7.0),  circuit("atl", "wdc", 10000, 7.0),
      circuit("wdc", "nyc", 1000, 7.0),   circuit("nyc", "bos", 10000, 7.0),
      circuit("bos", "chi", 10000, 7.0),  circuit("chi", "sea", 10000, 7.0),
      circuit("kcy", "chi", 10000, 5.0),  circuit("kcy", "hst", 10000, 5.0),
      circuit("kcy", "wdc", 10000, 5.0),  circuit("kcy", "lax", 10000, 5.0),
      circuit("chi", "hst", 10000, 9.0),
  };
  return Topology(std::move(nodes), std::move(circuits));
}

// Existing traffic that leaves wdc->nyc with 900 Mbps of 1000.
inline TrafficMatrix eleven_site_existing() {
  TrafficMatrix m;
  m.demands.push_back({"bg-wdc-nyc", "wdc", "nyc", 900.0});
  return m;
}

// Published-style asymmetric study topology: the same 11 sites with mixed
// 2.5/10 Gbps capacities around the eastern ring.
inline Topology asymmetric_study_topology() {
  std::vector<Node> nodes;
  for (const char* id : {"chi", "nyc", "kcy", "sjc", "lax", "sea", "hst",
                         "atl", "mia", "wdc", "bos"}) {
    bool dc = std::string(id) == "chi" || std::string(id) == "nyc" ||
              std::string(id) == "kcy" || std::string(id) == "sjc";
    nodes.push_back({id, dc, true});
  }
  auto circuit = [](std::string a, std::string b, double cap, double lat) {
    Circuit c;
    c.id = a + "-" + b;
    c.end_a = std::move(a);
    c.end_b = std::move(b);
    c.capacity_mbps = cap;
    c.latency_ms = lat;
    c.igp_metric = static_cast<int>(lat * 10 + 0.5);
    return c;
  };
  std::vector<Circuit> circuits = {
      circuit("sea", "sjc", 10000, 14.0), circuit("sjc", "lax", 10000, 14.0),
      circuit("lax", "hst", 10000, 7.0),  circuit("hst", "mia", 2500, 7.0),
      circuit("mia", "atl", 2500, 7.0),   circuit("atl", "wdc", 2500, 7.0),
      circuit("wdc", "nyc", 2500, 7.0),   circuit("nyc", "bos", 2500, 7.0),
      circuit("bos", "chi", 10000, 7.0),  circuit("chi", "sea", 10000, 7.0),
      circuit("kcy", "chi", 10000, 5.0),  circuit("kcy", "hst", 10000, 5.0),
      circuit("kcy", "wdc", 2500, 5.0),   circuit("kcy", "lax", 10000, 5.0),
      circuit("chi", "hst", 2500, 9.0),
  };
  return Topology(std::move(nodes), std::move(circuits));
}

// Symmetric ECMP-rich study topology: 4-cycle plus a hub spoked to every
// cycle node, uniform metrics and capacities, DCs on two adjacent sites.
inline Topology symmetric_study_topology() {
  std::vector<Node> nodes = {{"n1", true, true},
                             {"n2", true, true},
                             {"n3", false, true},
                             {"n4", false, true},
                             {"n5", false, true}};
  auto circuit = [](std::string a, std::string b) {
    Circuit c;
    c.id = a + "-" + b;
    c.end_a = std::move(a);
    c.end_b = std::move(b);
    c.capacity_mbps = 20000;
    c.latency_ms = 1.0;
    c.igp_metric = 10;
    return c;
  };
  std::vector<Circuit> circuits = {
      circuit("n1", "n2"), circuit("n2", "n3"), circuit("n3", "n4"),
      circuit("n4", "n1"), circuit("n5", "n1"), circuit("n5", "n2"),
      circuit("n5", "n3"), circuit("n5", "n4"),
  };
  return Topology(std::move(nodes), std::move(circuits));
}

// One access site, one DC, a single 1000 Mbps bottleneck between them.
inline Topology bottleneck_topology() {
  std::vector<Node> nodes = {
      {"x", false, true}, {"y", false, false}, {"d", true, false}};
  std::vector<Circuit> circuits = {
      {"xy", "x", "y", 1000.0, 1.0, 10, {}},
      {"yd", "y", "d", 100000.0, 1.0, 10, {}},
  };
  return Topology(std::move(nodes), std::move(circuits));
}

}  // namespace desim::testing
