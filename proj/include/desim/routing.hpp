#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "desim/net_model.hpp"

namespace desim {

inline constexpr int64_t kUnreachableMetric =
    std::numeric_limits<int64_t>::max();

// The base topology with a failure scenario applied: failed circuits drop
// both directed edges, failed nodes drop all incident edges.
struct ResidualTopology {
  const Topology* base = nullptr;
  FailureScenario scenario;
  std::vector<char> node_alive;  // indexed by node
  std::vector<char> edge_alive;  // indexed by directed edge
};

ResidualTopology apply_failure(const Topology& topo,
                               const FailureScenario& scenario);

struct SpfResult {
  int source = -1;
  std::vector<int64_t> dist;  // kUnreachableMetric if unreachable
  // ecmp_preds[v]: incoming directed edges (u->v) with dist[u]+metric==dist[v]
  std::vector<std::vector<int>> ecmp_preds;
};

// Dijkstra over alive edges; ties processed in node-id order.
SpfResult shortest_paths(const ResidualTopology& res, int src);

struct FlowMap {
  bool routed = false;
  std::vector<double> load;  // per directed edge, Mbps
};

// ECMP routing with per-hop equal split across shortest-path next hops.
// Unreachable (or failed) endpoints yield routed=false with an empty map,
// not an error.
FlowMap route_demand(const ResidualTopology& res, const Demand& d);

// Same split rule, reusing a precomputed SPF from the demand's source.
// Adds the flow into `load` (sized num_edges); returns false if unroutable.
bool route_on_spf(const ResidualTopology& res, const SpfResult& spf, int dst,
                  double bandwidth_mbps, std::vector<double>& load);

struct LatencyExtremes {
  bool reachable = false;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

// Min/max latency over all equal-cost shortest (by metric) paths src->dst.
LatencyExtremes path_latency_extremes(const ResidualTopology& res, int src,
                                      int dst);
LatencyExtremes path_latency_extremes(const ResidualTopology& res,
                                      const SpfResult& spf, int dst);

}  // namespace desim
