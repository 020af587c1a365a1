#include "desim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace desim {

std::vector<double> link_loads(const Topology& topo,
                               const TrafficMatrix& matrix,
                               const FailureScenario& scenario,
                               std::vector<std::string>* unrouted) {
  ResidualTopology res = apply_failure(topo, scenario);
  std::vector<double> load(topo.num_edges(), 0.0);
  for (const Demand& d : matrix.demands) {
    int src = topo.node_index(d.src);
    int dst = topo.node_index(d.dst);
    if (src < 0 || dst < 0)
      throw ValidationError("link_loads: demand '" + d.id +
                            "' has unknown endpoints");
    // Demands terminating on a failed node are excluded from the scenario.
    if (!res.node_alive[src] || !res.node_alive[dst]) continue;
    FlowMap fm = route_demand(res, d);
    if (!fm.routed) {
      if (unrouted) unrouted->push_back(d.id);
      continue;
    }
    for (int e = 0; e < topo.num_edges(); ++e) load[e] += fm.load[e];
  }
  return load;
}

UtilizationReport worst_case_utilization(
    const Topology& topo, const TrafficMatrix& matrix,
    const std::vector<FailureScenario>& scenarios) {
  if (scenarios.empty())
    throw ValidationError("worst_case_utilization: empty scenario set");
  UtilizationReport rep;
  rep.scenarios = scenarios;
  rep.wc_link_util.assign(topo.num_edges(), 0.0);
  for (int s = 0; s < static_cast<int>(scenarios.size()); ++s) {
    std::vector<std::string> unrouted;
    std::vector<double> load = link_loads(topo, matrix, scenarios[s], &unrouted);
    for (const std::string& id : unrouted) rep.unrouted.emplace_back(s, id);
    for (int e = 0; e < topo.num_edges(); ++e) {
      double util = load[e] / topo.edges()[e].capacity_mbps;
      rep.wc_link_util[e] = std::max(rep.wc_link_util[e], util);
    }
    rep.per_scenario_loads.push_back(std::move(load));
  }
  rep.network_wc_util = 0.0;
  for (double u : rep.wc_link_util)
    rep.network_wc_util = std::max(rep.network_wc_util, u);
  return rep;
}

std::string report_to_csv(const Topology& topo, const UtilizationReport& rep) {
  std::ostringstream out;
  out << "scenario,edge,load_mbps,utilization\n";
  out.precision(9);
  out << std::fixed;
  for (size_t s = 0; s < rep.scenarios.size(); ++s)
    for (int e = 0; e < topo.num_edges(); ++e)
      out << rep.scenarios[s].name() << "," << topo.edge_name(e) << ","
          << rep.per_scenario_loads[s][e] << ","
          << rep.per_scenario_loads[s][e] / topo.edges()[e].capacity_mbps
          << "\n";
  out << "summary,network_wc_util,," << rep.network_wc_util << "\n";
  return out.str();
}

std::optional<double> resilient_throughput_factor(const UtilizationReport& rep,
                                                  double threshold) {
  if (rep.network_wc_util <= 0.0) return std::nullopt;
  return threshold / rep.network_wc_util;
}

ScenarioEngine::ScenarioEngine(const Topology& topo,
                               std::vector<FailureScenario> scenarios)
    : topo_(&topo), scenarios_(std::move(scenarios)) {
  if (scenarios_.empty())
    throw ValidationError("ScenarioEngine: empty scenario set");
  for (const FailureScenario& s : scenarios_)
    residuals_.push_back(apply_failure(topo, s));
  base_loads_.assign(scenarios_.size(),
                     std::vector<double>(topo.num_edges(), 0.0));
  spf_cache_.assign(scenarios_.size(),
                    std::vector<std::optional<SpfResult>>(topo.num_nodes()));
}

const SpfResult& ScenarioEngine::spf(int scenario, int src) {
  auto& slot = spf_cache_[scenario][src];
  if (!slot) slot = shortest_paths(residuals_[scenario], src);
  return *slot;
}

void ScenarioEngine::add_base_demand(const Demand& d) {
  int src = topo_->node_index(d.src);
  int dst = topo_->node_index(d.dst);
  for (size_t s = 0; s < scenarios_.size(); ++s) {
    const ResidualTopology& res = residuals_[s];
    if (!res.node_alive[src] || !res.node_alive[dst]) continue;
    route_on_spf(res, spf(static_cast<int>(s), src), dst, d.bandwidth_mbps,
                 base_loads_[s]);
  }
}

void ScenarioEngine::set_base_matrix(const TrafficMatrix& matrix) {
  for (auto& loads : base_loads_)
    std::fill(loads.begin(), loads.end(), 0.0);
  for (const Demand& d : matrix.demands) add_base_demand(d);
}

double ScenarioEngine::network_wc_util() const {
  double wc = 0.0;
  for (const auto& loads : base_loads_)
    for (int e = 0; e < topo_->num_edges(); ++e)
      wc = std::max(wc, loads[e] / topo_->edges()[e].capacity_mbps);
  return wc;
}

PathImpact ScenarioEngine::evaluate(const std::vector<Demand>& new_demands,
                                    WcpuReading reading) {
  const Topology& topo = *topo_;
  PathImpact impact;
  std::vector<char> used(topo.num_edges(), 0);
  std::vector<double> new_load(topo.num_edges(), 0.0);
  // wc utilisation across scenarios of (base + new) loads, per edge
  std::vector<double> wc_util(topo.num_edges(), 0.0);

  for (size_t s = 0; s < scenarios_.size(); ++s) {
    const ResidualTopology& res = residuals_[s];
    std::fill(new_load.begin(), new_load.end(), 0.0);
    for (const Demand& d : new_demands) {
      int src = topo.node_index(d.src);
      int dst = topo.node_index(d.dst);
      if (src < 0 || dst < 0)
        throw ValidationError("evaluate: demand '" + d.id +
                              "' has unknown endpoints");
      if (!res.node_alive[src] || !res.node_alive[dst]) continue;
      const SpfResult& sp = spf(static_cast<int>(s), src);
      if (!route_on_spf(res, sp, dst, d.bandwidth_mbps, new_load)) {
        impact.any_unrouted = true;
        continue;
      }
      LatencyExtremes lat = path_latency_extremes(res, sp, dst);
      impact.wc_path_latency_ms =
          std::max(impact.wc_path_latency_ms, lat.max_ms);
    }
    double scenario_wcpu = 0.0;
    for (int e = 0; e < topo.num_edges(); ++e) {
      double util =
          (base_loads_[s][e] + new_load[e]) / topo.edges()[e].capacity_mbps;
      if (new_load[e] > 0.0) {
        used[e] = 1;
        scenario_wcpu = std::max(scenario_wcpu, util);
      }
      wc_util[e] = std::max(wc_util[e], util);
    }
    if (reading == WcpuReading::per_scenario)
      impact.wc_path_util = std::max(impact.wc_path_util, scenario_wcpu);
  }

  for (int e = 0; e < topo.num_edges(); ++e)
    if (used[e]) {
      impact.used_edges.push_back(e);
      if (reading == WcpuReading::union_of_used_edges)
        impact.wc_path_util = std::max(impact.wc_path_util, wc_util[e]);
    }
  return impact;
}

PathImpact path_impact(const Topology& topo, const TrafficMatrix& existing,
                       const std::vector<Demand>& new_demands,
                       const std::vector<FailureScenario>& scenarios,
                       WcpuReading reading) {
  ScenarioEngine engine(topo, scenarios);
  engine.set_base_matrix(existing);
  return engine.evaluate(new_demands, reading);
}

}  // namespace desim
