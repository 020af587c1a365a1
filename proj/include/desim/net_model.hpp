#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace desim {

// Thrown on malformed input documents (bad JSON/CSV, wrong version, ...).
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a document is well-formed but violates a model invariant
// (dangling node reference, duplicate id, nonpositive capacity, ...).
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Node {
  std::string id;
  bool is_dc_site = false;
  bool is_access_site = false;
};

// A circuit is bidirectional: it expands to two directed edges (a->b, b->a)
// sharing capacity, latency, metric and failure fate.
struct Circuit {
  std::string id;
  std::string end_a;
  std::string end_b;
  double capacity_mbps = 0.0;   // per direction
  double latency_ms = 0.0;      // one-way
  int igp_metric = 0;
  std::set<std::string> srlg_ids;
};

class Topology {
 public:
  // Directed edge derived from a circuit. Edge 2*i is end_a->end_b of
  // circuit i, edge 2*i+1 is the reverse.
  struct Edge {
    int src = -1;
    int dst = -1;
    int circuit = -1;
    double capacity_mbps = 0.0;
    double latency_ms = 0.0;
    int metric = 0;
  };

  Topology() = default;
  Topology(std::vector<Node> nodes, std::vector<Circuit> circuits);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Circuit>& circuits() const { return circuits_; }
  const std::map<std::string, std::set<std::string>>& srlgs() const {
    return srlgs_;
  }

  int num_nodes() const { return static_cast<int>(nodes_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  // -1 if unknown.
  int node_index(const std::string& id) const;
  int circuit_index(const std::string& id) const;

  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<std::vector<int>>& out_edges() const { return out_edges_; }
  const std::vector<std::vector<int>>& in_edges() const { return in_edges_; }

  // "circuit-id:a->b", stable across runs.
  std::string edge_name(int edge) const;

  std::vector<std::string> dc_sites() const;
  std::vector<std::string> access_sites() const;

  // Non-fatal validation findings (currently: disconnected no-failure graph).
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  void build();

  std::vector<Node> nodes_;
  std::vector<Circuit> circuits_;
  std::map<std::string, std::set<std::string>> srlgs_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> out_edges_;
  std::vector<std::vector<int>> in_edges_;
  std::unordered_map<std::string, int> node_by_id_;
  std::unordered_map<std::string, int> circuit_by_id_;
  std::vector<std::string> warnings_;
};

struct Demand {
  std::string id;
  std::string src;
  std::string dst;
  double bandwidth_mbps = 0.0;
};

struct TrafficMatrix {
  std::vector<Demand> demands;

  double total_mbps() const;
};

enum class FailureKind { none, circuit, node, srlg };

struct FailureScenario {
  FailureKind kind = FailureKind::none;
  std::string element;  // the failed circuit/node/srlg id; empty for none
  std::set<std::string> failed_circuits;
  std::set<std::string> failed_nodes;

  // "none", "circuit:<id>", "node:<id>", "srlg:<id>"
  std::string name() const;

  static FailureScenario none();
};

struct FailureSetSpec {
  bool include_none = true;  // the no-failure scenario is always evaluated
  bool include_circuits = false;
  bool include_nodes = false;
  bool include_srlgs = false;

  bool operator==(const FailureSetSpec&) const = default;
};

// Topology document is JSON with a top-level "version": 1.
Topology parse_topology(const std::string& text);
std::string serialize_topology(const Topology& topo);

// Demand document is CSV: "# version: 1" marker, header "id,src,dst,mbps".
TrafficMatrix parse_demands(const std::string& text, const Topology& topo);
std::string serialize_demands(const TrafficMatrix& matrix);

// Deterministic order: none, then circuits, nodes, SRLGs each in id order.
std::vector<FailureScenario> enumerate_scenarios(const Topology& topo,
                                                 const FailureSetSpec& spec);

}  // namespace desim
