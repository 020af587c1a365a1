#include "desim/service.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"

namespace desim {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v ? std::string(v) : fallback;
}

json error_body(const std::string& message, const std::string& field = "") {
  json j = {{"error", message}};
  if (!field.empty()) j["field"] = field;
  return j;
}

// Returns the unknown-key paths found under strict/lenient field checking.
std::vector<std::string> unknown_fields(const json& obj,
                                        const std::vector<std::string>& known,
                                        const std::string& prefix) {
  std::vector<std::string> out;
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      out.push_back(prefix + it.key());
  }
  return out;
}

json verdict_json(const CandidateEvaluation& eval) {
  return {{"candidate", eval.candidate},
          {"verdict", to_string(eval.verdict)},
          {"wc_path_util", eval.wc_path_util},
          {"remaining_r", eval.remaining_r},
          {"wc_path_latency_ms", eval.wc_path_latency_ms}};
}

json decision_json(const PlacementDecision& d) {
  json evals = json::array();
  for (const CandidateEvaluation& e : d.evaluations)
    evals.push_back(verdict_json(e));
  json j = {{"api_version", 1},
            {"request_id", d.request_id},
            {"chosen", d.chosen ? json(*d.chosen) : json(nullptr)},
            {"committed", d.committed},
            {"evaluations", evals}};
  return j;
}

json demand_json(const Demand& d) {
  return {{"id", d.id}, {"src", d.src}, {"dst", d.dst}, {"mbps", d.bandwidth_mbps}};
}

Demand demand_from_json(const json& j) {
  return {j.at("id").get<std::string>(), j.at("src").get<std::string>(),
          j.at("dst").get<std::string>(), j.at("mbps").get<double>()};
}

}  // namespace

ServiceConfig load_service_config(const std::string& path) {
  ServiceConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ParseError("config file '" + path + "': " + e.what());
    }
    cfg.listen_host = doc.value("listen_host", cfg.listen_host);
    cfg.listen_port = doc.value("listen_port", cfg.listen_port);
    cfg.topology_path = doc.value("topology", cfg.topology_path);
    cfg.demands_path = doc.value("demands", cfg.demands_path);
    cfg.options.strict_json = doc.value("strict_json", false);
    cfg.options.decision_log_path =
        doc.value("decision_log", cfg.options.decision_log_path);
    std::string reading = doc.value("wcpu_reading", "a");
    if (reading == "b")
      cfg.options.wcpu_reading = WcpuReading::per_scenario;
    else if (reading != "a")
      throw ParseError("config: wcpu_reading must be 'a' or 'b'");
  }
  cfg.listen_host = env_or("DESIM_LISTEN_HOST", cfg.listen_host);
  std::string port = env_or("DESIM_LISTEN_PORT", "");
  if (!port.empty()) cfg.listen_port = std::stoi(port);
  cfg.topology_path = env_or("DESIM_TOPOLOGY", cfg.topology_path);
  cfg.demands_path = env_or("DESIM_DEMANDS", cfg.demands_path);
  std::string strict = env_or("DESIM_STRICT_JSON", "");
  if (!strict.empty()) cfg.options.strict_json = (strict == "1" || strict == "true");
  std::string reading = env_or("DESIM_WCPU_READING", "");
  if (reading == "a") cfg.options.wcpu_reading = WcpuReading::union_of_used_edges;
  if (reading == "b") cfg.options.wcpu_reading = WcpuReading::per_scenario;
  cfg.options.decision_log_path =
      env_or("DESIM_DECISION_LOG", cfg.options.decision_log_path);
  return cfg;
}

PlacementService::PlacementService(ServiceOptions options)
    : options_(std::move(options)) {}

PlacementService::PlacementService(Topology topo, TrafficMatrix seed_matrix,
                                   ServiceOptions options)
    : options_(std::move(options)) {
  load(std::move(topo), std::move(seed_matrix));
}

PlacementService::~PlacementService() = default;

void PlacementService::load(Topology topo, TrafficMatrix seed_matrix) {
  std::lock_guard lock(mu_);
  state_.emplace(std::move(topo), std::move(seed_matrix),
                 options_.wcpu_reading);
  replay_log();
}

void PlacementService::append_log_line(const std::string& line) {
  if (options_.decision_log_path.empty()) return;
  std::ofstream out(options_.decision_log_path, std::ios::app);
  out << line << "\n";
}

void PlacementService::replay_log() {
  if (options_.decision_log_path.empty()) return;
  std::ifstream in(options_.decision_log_path);
  if (!in) return;  // nothing persisted yet
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json entry = json::parse(line);
    std::string type = entry.at("type").get<std::string>();
    if (type == "placement") {
      PlacementDecision d;
      const json& jd = entry.at("decision");
      d.request_id = jd.at("request_id").get<std::string>();
      if (!jd.at("chosen").is_null())
        d.chosen = jd.at("chosen").get<std::string>();
      d.committed = jd.at("committed").get<bool>();
      for (const json& je : jd.at("evaluations")) {
        CandidateEvaluation e;
        e.candidate = je.at("candidate").get<std::string>();
        std::string v = je.at("verdict").get<std::string>();
        e.verdict = v == "feasible"          ? Verdict::feasible
                    : v == "reject_capacity" ? Verdict::reject_capacity
                    : v == "reject_latency"  ? Verdict::reject_latency
                                             : Verdict::reject_unroutable;
        e.wc_path_util = je.at("wc_path_util").get<double>();
        e.remaining_r = je.at("remaining_r").get<double>();
        e.wc_path_latency_ms = je.at("wc_path_latency_ms").get<double>();
        d.evaluations.push_back(e);
      }
      for (const json& jm : entry.at("demands"))
        d.committed_demands.push_back(demand_from_json(jm));
      state_->restore_decision(d);
      replies_[d.request_id] = {entry.at("request_body").get<std::string>(),
                                entry.at("response_body").get<std::string>()};
    } else if (type == "rollback") {
      state_->rollback(entry.at("request_id").get<std::string>());
    }
  }
}

ApiResult PlacementService::handle_placement(const std::string& body) {
  std::lock_guard lock(mu_);
  if (!state_) return {503, error_body("state not loaded").dump(), ""};

  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::parse_error& e) {
    return {400, error_body(std::string("malformed JSON: ") + e.what()).dump(),
            ""};
  }
  if (!doc.is_object())
    return {400, error_body("request body must be an object").dump(), ""};

  std::string warning;
  std::vector<std::string> unknown = unknown_fields(
      doc,
      {"api_version", "request_id", "a_ends", "candidates", "legs", "l_max_ms",
       "util_threshold", "failure_sets"},
      "");
  if (doc.contains("legs") && doc["legs"].is_array())
    for (size_t i = 0; i < doc["legs"].size(); ++i)
      if (doc["legs"][i].is_object())
        for (const std::string& u :
             unknown_fields(doc["legs"][i], {"a_end", "to_mbps", "from_mbps"},
                            "legs[" + std::to_string(i) + "]."))
          unknown.push_back(u);
  if (doc.contains("failure_sets") && doc["failure_sets"].is_object())
    for (const std::string& u :
         unknown_fields(doc["failure_sets"],
                        {"none", "circuits", "nodes", "srlgs"},
                        "failure_sets."))
      unknown.push_back(u);
  if (!unknown.empty()) {
    if (options_.strict_json)
      return {400, error_body("unknown field", unknown.front()).dump(), ""};
    warning = "ignored unknown fields: ";
    for (size_t i = 0; i < unknown.size(); ++i)
      warning += (i ? ", " : "") + unknown[i];
  }

  PlacementRequest req;
  try {
    if (doc.value("api_version", 1) != 1)
      return {400, error_body("unsupported api_version", "api_version").dump(),
              warning};
    req.request_id = doc.at("request_id").get<std::string>();
    for (const json& a : doc.at("a_ends"))
      req.a_ends.push_back(a.get<std::string>());
    for (const json& c : doc.at("candidates"))
      req.candidates.push_back(c.get<std::string>());
    for (const json& jl : doc.at("legs")) {
      Leg leg;
      leg.a_end = jl.at("a_end").get<std::string>();
      leg.to_candidate_mbps = jl.at("to_mbps").get<double>();
      leg.from_candidate_mbps = jl.at("from_mbps").get<double>();
      req.legs.push_back(leg);
    }
    req.l_max_ms = doc.at("l_max_ms").get<double>();
    req.util_threshold = doc.at("util_threshold").get<double>();
    if (doc.contains("failure_sets")) {
      const json& fs = doc.at("failure_sets");
      req.failure_spec.include_none = fs.value("none", true);
      req.failure_spec.include_circuits = fs.value("circuits", false);
      req.failure_spec.include_nodes = fs.value("nodes", false);
      req.failure_spec.include_srlgs = fs.value("srlgs", false);
    }
  } catch (const json::exception& e) {
    return {400, error_body(std::string("bad request: ") + e.what()).dump(),
            warning};
  }

  // Idempotent replay: same id + same body returns the original decision.
  std::string canonical = doc.dump();
  auto it = replies_.find(req.request_id);
  if (it != replies_.end()) {
    if (it->second.first != canonical)
      return {409,
              error_body("request_id reused with different body", "request_id")
                  .dump(),
              warning};
    return {200, it->second.second, warning};
  }

  PlacementDecision decision;
  try {
    decision = state_->place(req);
  } catch (const RequestError& e) {
    return {400, error_body(e.what()).dump(), warning};
  }

  std::string response = decision_json(decision).dump();
  replies_[req.request_id] = {canonical, response};
  json entry = {{"type", "placement"},
                {"decision", decision_json(decision)},
                {"demands", json::array()},
                {"request_body", canonical},
                {"response_body", response}};
  for (const Demand& d : decision.committed_demands)
    entry["demands"].push_back(demand_json(d));
  append_log_line(entry.dump());
  return {200, response, warning};
}

ApiResult PlacementService::handle_state() {
  std::lock_guard lock(mu_);
  if (!state_) return {503, error_body("state not loaded").dump(), ""};
  const Topology& topo = state_->topology();
  json j = {{"api_version", 1},
            {"nodes", topo.num_nodes()},
            {"circuits", topo.circuits().size()},
            {"committed_demands", state_->committed_matrix().demands.size()},
            {"network_wc_util",
             state_->committed_network_wc_util(FailureSetSpec{})}};
  return {200, j.dump(), ""};
}

ApiResult PlacementService::handle_delete(const std::string& request_id) {
  std::lock_guard lock(mu_);
  if (!state_) return {503, error_body("state not loaded").dump(), ""};
  bool known = false;
  for (const PlacementDecision& d : state_->decision_log())
    if (d.request_id == request_id) known = true;
  if (!known)
    return {404, error_body("unknown request_id", "request_id").dump(), ""};
  try {
    state_->rollback(request_id);
  } catch (const RequestError& e) {
    return {409, error_body(e.what()).dump(), ""};
  }
  replies_.erase(request_id);
  append_log_line(
      json({{"type", "rollback"}, {"request_id", request_id}}).dump());
  return {200, json({{"rolled_back", request_id}}).dump(), ""};
}

bool PlacementService::serve(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  auto reply = [](httplib::Response& res, const ApiResult& r) {
    res.status = r.status;
    if (!r.warning.empty()) res.set_header("X-Desim-Warning", r.warning);
    res.set_content(r.body, "application/json");
  };
  server_->Post("/v1/placements",
                [&](const httplib::Request& req, httplib::Response& res) {
                  reply(res, handle_placement(req.body));
                });
  server_->Get("/v1/state",
               [&](const httplib::Request&, httplib::Response& res) {
                 reply(res, handle_state());
               });
  server_->Delete("/v1/placements/:id",
                  [&](const httplib::Request& req, httplib::Response& res) {
                    reply(res, handle_delete(req.path_params.at("id")));
                  });
  return server_->listen(host, port);
}

void PlacementService::stop() {
  if (server_) server_->stop();
}

}  // namespace desim
