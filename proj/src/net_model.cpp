#include "desim/net_model.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

#include "json.hpp"

namespace desim {

using nlohmann::json;

Topology::Topology(std::vector<Node> nodes, std::vector<Circuit> circuits)
    : nodes_(std::move(nodes)), circuits_(std::move(circuits)) {
  build();
}

void Topology::build() {
  node_by_id_.clear();
  for (int i = 0; i < static_cast<int>(nodes_.size()); ++i) {
    if (nodes_[i].id.empty()) throw ValidationError("node with empty id");
    if (!node_by_id_.emplace(nodes_[i].id, i).second)
      throw ValidationError("duplicate node id '" + nodes_[i].id + "'");
  }
  circuit_by_id_.clear();
  for (int i = 0; i < static_cast<int>(circuits_.size()); ++i) {
    const Circuit& c = circuits_[i];
    if (c.id.empty()) throw ValidationError("circuit with empty id");
    if (!circuit_by_id_.emplace(c.id, i).second)
      throw ValidationError("duplicate circuit id '" + c.id + "'");
    for (const std::string* end : {&c.end_a, &c.end_b}) {
      if (node_by_id_.find(*end) == node_by_id_.end())
        throw ValidationError("circuit '" + c.id +
                              "' references unknown node '" + *end + "'");
    }
    if (c.end_a == c.end_b)
      throw ValidationError("circuit '" + c.id + "' is a self-loop");
    if (!(c.capacity_mbps > 0.0))
      throw ValidationError("circuit '" + c.id + "' has nonpositive capacity");
    if (c.latency_ms < 0.0)
      throw ValidationError("circuit '" + c.id + "' has negative latency");
    if (c.igp_metric <= 0)
      throw ValidationError("circuit '" + c.id + "' has nonpositive metric");
  }

  srlgs_.clear();
  for (const Circuit& c : circuits_)
    for (const std::string& g : c.srlg_ids) srlgs_[g].insert(c.id);

  edges_.clear();
  out_edges_.assign(nodes_.size(), {});
  in_edges_.assign(nodes_.size(), {});
  for (int i = 0; i < static_cast<int>(circuits_.size()); ++i) {
    const Circuit& c = circuits_[i];
    int a = node_by_id_.at(c.end_a);
    int b = node_by_id_.at(c.end_b);
    for (auto [s, d] : {std::pair{a, b}, std::pair{b, a}}) {
      Edge e;
      e.src = s;
      e.dst = d;
      e.circuit = i;
      e.capacity_mbps = c.capacity_mbps;
      e.latency_ms = c.latency_ms;
      e.metric = c.igp_metric;
      out_edges_[s].push_back(static_cast<int>(edges_.size()));
      in_edges_[d].push_back(static_cast<int>(edges_.size()));
      edges_.push_back(e);
    }
  }

  warnings_.clear();
  if (!nodes_.empty()) {
    std::vector<char> seen(nodes_.size(), 0);
    std::deque<int> q{0};
    seen[0] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int e : out_edges_[u])
        if (!seen[edges_[e].dst]) {
          seen[edges_[e].dst] = 1;
          q.push_back(edges_[e].dst);
        }
    }
    if (std::count(seen.begin(), seen.end(), 1) !=
        static_cast<long>(nodes_.size()))
      warnings_.push_back("topology is not connected under no failures");
  }
}

int Topology::node_index(const std::string& id) const {
  auto it = node_by_id_.find(id);
  return it == node_by_id_.end() ? -1 : it->second;
}

int Topology::circuit_index(const std::string& id) const {
  auto it = circuit_by_id_.find(id);
  return it == circuit_by_id_.end() ? -1 : it->second;
}

std::string Topology::edge_name(int edge) const {
  const Edge& e = edges_.at(edge);
  return circuits_[e.circuit].id + ":" + nodes_[e.src].id + "->" +
         nodes_[e.dst].id;
}

std::vector<std::string> Topology::dc_sites() const {
  std::vector<std::string> out;
  for (const Node& n : nodes_)
    if (n.is_dc_site) out.push_back(n.id);
  return out;
}

std::vector<std::string> Topology::access_sites() const {
  std::vector<std::string> out;
  for (const Node& n : nodes_)
    if (n.is_access_site) out.push_back(n.id);
  return out;
}

double TrafficMatrix::total_mbps() const {
  double t = 0.0;
  for (const Demand& d : demands) t += d.bandwidth_mbps;
  return t;
}

std::string FailureScenario::name() const {
  switch (kind) {
    case FailureKind::none:
      return "none";
    case FailureKind::circuit:
      return "circuit:" + element;
    case FailureKind::node:
      return "node:" + element;
    case FailureKind::srlg:
      return "srlg:" + element;
  }
  return "?";
}

FailureScenario FailureScenario::none() { return FailureScenario{}; }

Topology parse_topology(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("topology document: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("topology document: not an object");
  if (doc.value("version", 0) != 1)
    throw ParseError("topology document: missing or unsupported version");

  std::vector<Node> nodes;
  std::vector<Circuit> circuits;
  try {
    for (const json& jn : doc.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<std::string>();
      n.is_dc_site = jn.value("dc", false);
      n.is_access_site = jn.value("access", false);
      nodes.push_back(std::move(n));
    }
    for (const json& jc : doc.at("circuits")) {
      Circuit c;
      c.id = jc.at("id").get<std::string>();
      c.end_a = jc.at("a").get<std::string>();
      c.end_b = jc.at("b").get<std::string>();
      c.capacity_mbps = jc.at("capacity_mbps").get<double>();
      c.latency_ms = jc.at("latency_ms").get<double>();
      c.igp_metric = jc.at("metric").get<int>();
      if (jc.contains("srlgs"))
        for (const json& g : jc.at("srlgs"))
          c.srlg_ids.insert(g.get<std::string>());
      circuits.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("topology document: ") + e.what());
  }
  return Topology(std::move(nodes), std::move(circuits));
}

std::string serialize_topology(const Topology& topo) {
  json doc;
  doc["version"] = 1;
  doc["nodes"] = json::array();
  for (const Node& n : topo.nodes())
    doc["nodes"].push_back(
        {{"id", n.id}, {"dc", n.is_dc_site}, {"access", n.is_access_site}});
  doc["circuits"] = json::array();
  for (const Circuit& c : topo.circuits()) {
    json jc = {{"id", c.id},
               {"a", c.end_a},
               {"b", c.end_b},
               {"capacity_mbps", c.capacity_mbps},
               {"latency_ms", c.latency_ms},
               {"metric", c.igp_metric}};
    jc["srlgs"] = json::array();
    for (const std::string& g : c.srlg_ids) jc["srlgs"].push_back(g);
    doc["circuits"].push_back(std::move(jc));
  }
  return doc.dump(2) + "\n";
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  size_t e = s.find_last_not_of(" \t");
  return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

}  // namespace

TrafficMatrix parse_demands(const std::string& text, const Topology& topo) {
  TrafficMatrix matrix;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool saw_version = false, saw_header = false;
  std::set<std::string> ids;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      if (t.find("version:") != std::string::npos) {
        if (trim(t.substr(t.find("version:") + 8)) != "1")
          throw ParseError("demand document line " + std::to_string(lineno) +
                           ": unsupported version");
        saw_version = true;
      }
      continue;
    }
    if (!saw_version)
      throw ParseError("demand document: missing '# version: 1' marker");
    if (!saw_header) {
      if (t != "id,src,dst,mbps")
        throw ParseError("demand document line " + std::to_string(lineno) +
                         ": expected header 'id,src,dst,mbps'");
      saw_header = true;
      continue;
    }
    std::vector<std::string> f = split_csv_line(t);
    if (f.size() != 4)
      throw ParseError("demand document line " + std::to_string(lineno) +
                       ": expected 4 fields, got " + std::to_string(f.size()));
    Demand d;
    d.id = trim(f[0]);
    d.src = trim(f[1]);
    d.dst = trim(f[2]);
    try {
      size_t pos = 0;
      d.bandwidth_mbps = std::stod(trim(f[3]), &pos);
      if (pos != trim(f[3]).size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ParseError("demand document line " + std::to_string(lineno) +
                       ": bad bandwidth '" + f[3] + "'");
    }
    if (!ids.insert(d.id).second)
      throw ValidationError("duplicate demand id '" + d.id + "'");
    if (topo.node_index(d.src) < 0)
      throw ValidationError("demand '" + d.id + "': unknown endpoint '" +
                            d.src + "'");
    if (topo.node_index(d.dst) < 0)
      throw ValidationError("demand '" + d.id + "': unknown endpoint '" +
                            d.dst + "'");
    if (d.src == d.dst)
      throw ValidationError("demand '" + d.id + "': src equals dst");
    if (d.bandwidth_mbps < 0.0)
      throw ValidationError("demand '" + d.id + "': negative bandwidth");
    matrix.demands.push_back(std::move(d));
  }
  if (!matrix.demands.empty() && !saw_header)
    throw ParseError("demand document: missing header");
  return matrix;
}

std::string serialize_demands(const TrafficMatrix& matrix) {
  std::ostringstream out;
  out << "# version: 1\n";
  out << "id,src,dst,mbps\n";
  out.precision(15);
  for (const Demand& d : matrix.demands)
    out << d.id << "," << d.src << "," << d.dst << "," << d.bandwidth_mbps
        << "\n";
  return out.str();
}

std::vector<FailureScenario> enumerate_scenarios(const Topology& topo,
                                                 const FailureSetSpec& spec) {
  std::vector<FailureScenario> out;
  if (spec.include_none) out.push_back(FailureScenario::none());
  if (spec.include_circuits) {
    std::vector<std::string> ids;
    for (const Circuit& c : topo.circuits()) ids.push_back(c.id);
    std::sort(ids.begin(), ids.end());
    for (const std::string& id : ids) {
      FailureScenario s;
      s.kind = FailureKind::circuit;
      s.element = id;
      s.failed_circuits.insert(id);
      out.push_back(std::move(s));
    }
  }
  if (spec.include_nodes) {
    std::vector<std::string> ids;
    for (const Node& n : topo.nodes()) ids.push_back(n.id);
    std::sort(ids.begin(), ids.end());
    for (const std::string& id : ids) {
      FailureScenario s;
      s.kind = FailureKind::node;
      s.element = id;
      s.failed_nodes.insert(id);
      for (const Circuit& c : topo.circuits())
        if (c.end_a == id || c.end_b == id) s.failed_circuits.insert(c.id);
      out.push_back(std::move(s));
    }
  }
  if (spec.include_srlgs) {
    for (const auto& [gid, members] : topo.srlgs()) {
      FailureScenario s;
      s.kind = FailureKind::srlg;
      s.element = gid;
      s.failed_circuits = members;
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace desim
