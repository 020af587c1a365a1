#pragma once

#include <optional>
#include <string>
#include <vector>

#include "desim/net_model.hpp"
#include "desim/routing.hpp"

namespace desim {

struct UtilizationReport {
  std::vector<FailureScenario> scenarios;
  std::vector<std::vector<double>> per_scenario_loads;  // [scenario][edge]
  std::vector<double> wc_link_util;                     // [edge]
  double network_wc_util = 0.0;
  // (scenario index, demand id) pairs that could not be routed
  std::vector<std::pair<int, std::string>> unrouted;
};

// Two readings of worst-case path utilisation:
//   union_of_used_edges: max over the union of edges used in any scenario of
//     their across-scenario worst-case utilisation.
//   per_scenario: max over scenarios of the utilisation, in that scenario, of
//     the edges used in that scenario.
enum class WcpuReading { union_of_used_edges, per_scenario };

struct PathImpact {
  std::vector<int> used_edges;  // touched by the new demands in any scenario
  double wc_path_util = 0.0;
  double wc_path_latency_ms = 0.0;
  bool any_unrouted = false;
};

// Loads from routing every demand of the matrix under one scenario.
// Demands whose src or dst node is failed are excluded (not unrouted).
std::vector<double> link_loads(const Topology& topo,
                               const TrafficMatrix& matrix,
                               const FailureScenario& scenario,
                               std::vector<std::string>* unrouted = nullptr);

// Exhaustive per-scenario rerouting; no caching.
UtilizationReport worst_case_utilization(
    const Topology& topo, const TrafficMatrix& matrix,
    const std::vector<FailureScenario>& scenarios);

PathImpact path_impact(const Topology& topo, const TrafficMatrix& existing,
                       const std::vector<Demand>& new_demands,
                       const std::vector<FailureScenario>& scenarios,
                       WcpuReading reading = WcpuReading::union_of_used_edges);

// CSV: "scenario,edge,load_mbps,utilization" rows plus a summary row.
std::string report_to_csv(const Topology& topo, const UtilizationReport& rep);

// Informational: threshold / network_wc_util, the uniform-growth headroom
// factor. nullopt when network_wc_util is zero.
std::optional<double> resilient_throughput_factor(const UtilizationReport& rep,
                                                  double threshold);

// Keeps per-scenario residuals, SPF results and base-matrix loads so that
// repeated candidate evaluations against a growing committed matrix stay
// cheap. Routing is demand-independent, so base loads update by
// superposition on commit.
class ScenarioEngine {
 public:
  ScenarioEngine(const Topology& topo, std::vector<FailureScenario> scenarios);

  void set_base_matrix(const TrafficMatrix& matrix);
  void add_base_demand(const Demand& d);

  const std::vector<FailureScenario>& scenarios() const { return scenarios_; }
  const std::vector<double>& base_loads(int scenario) const {
    return base_loads_[scenario];
  }

  // SPF from src under scenario, computed once and cached.
  const SpfResult& spf(int scenario, int src);

  PathImpact evaluate(const std::vector<Demand>& new_demands,
                      WcpuReading reading);

  double network_wc_util() const;

 private:
  const Topology* topo_;
  std::vector<FailureScenario> scenarios_;
  std::vector<ResidualTopology> residuals_;
  std::vector<std::vector<double>> base_loads_;
  // spf_cache_[scenario][node]
  std::vector<std::vector<std::optional<SpfResult>>> spf_cache_;
};

}  // namespace desim
