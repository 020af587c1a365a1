#include "desim/routing.hpp"

#include <algorithm>
#include <queue>

namespace desim {

ResidualTopology apply_failure(const Topology& topo,
                               const FailureScenario& scenario) {
  ResidualTopology res;
  res.base = &topo;
  res.scenario = scenario;
  res.node_alive.assign(topo.num_nodes(), 1);
  res.edge_alive.assign(topo.num_edges(), 1);
  for (const std::string& nid : scenario.failed_nodes) {
    int n = topo.node_index(nid);
    if (n < 0)
      throw ValidationError("failure scenario names unknown node '" + nid +
                            "'");
    res.node_alive[n] = 0;
    for (int e : topo.out_edges()[n]) res.edge_alive[e] = 0;
    for (int e : topo.in_edges()[n]) res.edge_alive[e] = 0;
  }
  for (const std::string& cid : scenario.failed_circuits) {
    int c = topo.circuit_index(cid);
    if (c < 0)
      throw ValidationError("failure scenario names unknown circuit '" + cid +
                            "'");
    res.edge_alive[2 * c] = 0;
    res.edge_alive[2 * c + 1] = 0;
  }
  return res;
}

SpfResult shortest_paths(const ResidualTopology& res, int src) {
  const Topology& topo = *res.base;
  if (src < 0 || src >= topo.num_nodes() || !res.node_alive[src])
    throw ValidationError("shortest_paths: source not alive");

  SpfResult out;
  out.source = src;
  out.dist.assign(topo.num_nodes(), kUnreachableMetric);
  out.ecmp_preds.assign(topo.num_nodes(), {});
  out.dist[src] = 0;

  // Tie-break by node id for a deterministic processing order.
  auto cmp = [&](const std::pair<int64_t, int>& a,
                 const std::pair<int64_t, int>& b) {
    if (a.first != b.first) return a.first > b.first;
    return topo.nodes()[a.second].id > topo.nodes()[b.second].id;
  };
  std::priority_queue<std::pair<int64_t, int>,
                      std::vector<std::pair<int64_t, int>>, decltype(cmp)>
      pq(cmp);
  pq.push({0, src});
  std::vector<char> done(topo.num_nodes(), 0);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[u]) continue;
    done[u] = 1;
    for (int e : topo.out_edges()[u]) {
      if (!res.edge_alive[e]) continue;
      const Topology::Edge& edge = topo.edges()[e];
      int v = edge.dst;
      int64_t nd = d + edge.metric;
      if (nd < out.dist[v]) {
        out.dist[v] = nd;
        out.ecmp_preds[v].clear();
        out.ecmp_preds[v].push_back(e);
        pq.push({nd, v});
      } else if (nd == out.dist[v]) {
        out.ecmp_preds[v].push_back(e);
      }
    }
  }
  return out;
}

namespace {

// Nodes of the ECMP sub-DAG src->dst, found by walking ecmp_preds back from
// dst. Returned in increasing-dist order (valid topological order).
std::vector<int> dag_nodes(const Topology& topo, const SpfResult& spf,
                           int dst, std::vector<char>& on_dag) {
  on_dag.assign(topo.num_nodes(), 0);
  std::vector<int> stack{dst};
  on_dag[dst] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : spf.ecmp_preds[v]) {
      int u = topo.edges()[e].src;
      if (!on_dag[u]) {
        on_dag[u] = 1;
        stack.push_back(u);
      }
    }
  }
  std::vector<int> order;
  for (int v = 0; v < topo.num_nodes(); ++v)
    if (on_dag[v]) order.push_back(v);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return spf.dist[a] < spf.dist[b]; });
  return order;
}

}  // namespace

bool route_on_spf(const ResidualTopology& res, const SpfResult& spf, int dst,
                  double bandwidth_mbps, std::vector<double>& load) {
  const Topology& topo = *res.base;
  if (dst < 0 || dst >= topo.num_nodes() || !res.node_alive[dst]) return false;
  if (spf.dist[dst] == kUnreachableMetric) return false;
  if (dst == spf.source) return false;

  std::vector<char> on_dag;
  std::vector<int> order = dag_nodes(topo, spf, dst, on_dag);

  std::vector<double> arrival(topo.num_nodes(), 0.0);
  arrival[spf.source] = bandwidth_mbps;
  for (int u : order) {
    if (u == dst || arrival[u] == 0.0) continue;
    int n_next = 0;
    for (int e : topo.out_edges()[u]) {
      const Topology::Edge& edge = topo.edges()[e];
      if (res.edge_alive[e] && on_dag[edge.dst] &&
          spf.dist[u] + edge.metric == spf.dist[edge.dst])
        ++n_next;
    }
    double share = arrival[u] / n_next;
    for (int e : topo.out_edges()[u]) {
      const Topology::Edge& edge = topo.edges()[e];
      if (res.edge_alive[e] && on_dag[edge.dst] &&
          spf.dist[u] + edge.metric == spf.dist[edge.dst]) {
        load[e] += share;
        arrival[edge.dst] += share;
      }
    }
  }
  return true;
}

FlowMap route_demand(const ResidualTopology& res, const Demand& d) {
  const Topology& topo = *res.base;
  FlowMap fm;
  int src = topo.node_index(d.src);
  int dst = topo.node_index(d.dst);
  if (src < 0 || dst < 0)
    throw ValidationError("route_demand: demand '" + d.id +
                          "' has unknown endpoints");
  if (!res.node_alive[src] || !res.node_alive[dst]) return fm;
  SpfResult spf = shortest_paths(res, src);
  std::vector<double> load(topo.num_edges(), 0.0);
  if (!route_on_spf(res, spf, dst, d.bandwidth_mbps, load)) return fm;
  fm.routed = true;
  fm.load = std::move(load);
  return fm;
}

LatencyExtremes path_latency_extremes(const ResidualTopology& res,
                                      const SpfResult& spf, int dst) {
  const Topology& topo = *res.base;
  LatencyExtremes out;
  if (dst < 0 || dst >= topo.num_nodes() || !res.node_alive[dst]) return out;
  if (spf.dist[dst] == kUnreachableMetric) return out;
  if (dst == spf.source) {
    out.reachable = true;
    return out;
  }
  std::vector<char> on_dag;
  std::vector<int> order = dag_nodes(topo, spf, dst, on_dag);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> minlat(topo.num_nodes(), kInf);
  std::vector<double> maxlat(topo.num_nodes(), -kInf);
  minlat[spf.source] = maxlat[spf.source] = 0.0;
  for (int v : order) {
    if (v == spf.source) continue;
    for (int e : spf.ecmp_preds[v]) {
      const Topology::Edge& edge = topo.edges()[e];
      if (!on_dag[edge.src]) continue;
      minlat[v] = std::min(minlat[v], minlat[edge.src] + edge.latency_ms);
      maxlat[v] = std::max(maxlat[v], maxlat[edge.src] + edge.latency_ms);
    }
  }
  out.reachable = true;
  out.min_ms = minlat[dst];
  out.max_ms = maxlat[dst];
  return out;
}

LatencyExtremes path_latency_extremes(const ResidualTopology& res, int src,
                                      int dst) {
  if (src < 0 || src >= res.base->num_nodes() || !res.node_alive[src])
    throw ValidationError("path_latency_extremes: source not alive");
  SpfResult spf = shortest_paths(res, src);
  return path_latency_extremes(res, spf, dst);
}

}  // namespace desim
