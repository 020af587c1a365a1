#include "desim/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace desim {

namespace {

constexpr double kTieEps = 1e-9;

unsigned spec_key(const FailureSetSpec& s) {
  return (s.include_none ? 1u : 0u) | (s.include_circuits ? 2u : 0u) |
         (s.include_nodes ? 4u : 0u) | (s.include_srlgs ? 8u : 0u);
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::feasible:
      return "feasible";
    case Verdict::reject_capacity:
      return "reject_capacity";
    case Verdict::reject_latency:
      return "reject_latency";
    case Verdict::reject_unroutable:
      return "reject_unroutable";
  }
  return "?";
}

ControllerState::ControllerState(Topology topo, TrafficMatrix seed_matrix,
                                 WcpuReading reading)
    : topo_(std::move(topo)),
      committed_(std::move(seed_matrix)),
      reading_(reading) {
  for (const Demand& d : committed_.demands)
    if (topo_.node_index(d.src) < 0 || topo_.node_index(d.dst) < 0)
      throw ValidationError("seed matrix demand '" + d.id +
                            "' has unknown endpoints");
}

void ControllerState::validate_request(const PlacementRequest& req) const {
  if (req.a_ends.empty()) throw RequestError("request has no a_ends");
  if (req.candidates.empty()) throw RequestError("request has no candidates");
  if (req.legs.size() != req.a_ends.size())
    throw RequestError("request needs one leg per a_end");
  for (size_t i = 0; i < req.a_ends.size(); ++i) {
    if (topo_.node_index(req.a_ends[i]) < 0)
      throw RequestError("unknown a_end '" + req.a_ends[i] + "'");
    if (req.legs[i].a_end != req.a_ends[i])
      throw RequestError("leg " + std::to_string(i) +
                         " does not match a_end order");
    if (req.legs[i].to_candidate_mbps < 0.0 ||
        req.legs[i].from_candidate_mbps < 0.0)
      throw RequestError("negative leg bandwidth for a_end '" +
                         req.a_ends[i] + "'");
  }
  for (const std::string& c : req.candidates)
    if (topo_.node_index(c) < 0)
      throw RequestError("unknown candidate '" + c + "'");
  if (!(req.l_max_ms > 0.0)) throw RequestError("l_max_ms must be positive");
  if (!(req.util_threshold > 0.0))
    throw RequestError("util_threshold must be positive");
  if (!req.failure_spec.include_none)
    throw RequestError("failure spec must include the no-failure scenario");
}

std::vector<Demand> ControllerState::build_new_demands(
    const PlacementRequest& req, const std::string& candidate) const {
  std::vector<Demand> out;
  for (const Leg& leg : req.legs) {
    if (leg.a_end == candidate) continue;  // degenerate leg, no network impact
    out.push_back({req.request_id + "/" + leg.a_end + "->" + candidate,
                   leg.a_end, candidate, leg.to_candidate_mbps});
    out.push_back({req.request_id + "/" + candidate + "->" + leg.a_end,
                   candidate, leg.a_end, leg.from_candidate_mbps});
  }
  return out;
}

ScenarioEngine& ControllerState::engine_for(const FailureSetSpec& spec) {
  unsigned key = spec_key(spec);
  auto it = engines_.find(key);
  if (it == engines_.end()) {
    auto engine = std::make_unique<ScenarioEngine>(
        topo_, enumerate_scenarios(topo_, spec));
    engine->set_base_matrix(committed_);
    it = engines_.emplace(key, std::move(engine)).first;
  }
  return *it->second;
}

CandidateEvaluation ControllerState::evaluate_candidate(
    const PlacementRequest& req, const std::string& candidate) {
  std::vector<Demand> new_demands = build_new_demands(req, candidate);
  PathImpact impact =
      engine_for(req.failure_spec).evaluate(new_demands, reading_);

  CandidateEvaluation eval;
  eval.candidate = candidate;
  eval.wc_path_util = impact.wc_path_util;
  eval.remaining_r = 1.0 - impact.wc_path_util;
  eval.wc_path_latency_ms = impact.wc_path_latency_ms;
  // Check order mirrors the admission sequence: reachability, then capacity
  // (boundary equality admits), then latency.
  if (impact.any_unrouted)
    eval.verdict = Verdict::reject_unroutable;
  else if (impact.wc_path_util > req.util_threshold)
    eval.verdict = Verdict::reject_capacity;
  else if (impact.wc_path_latency_ms > req.l_max_ms)
    eval.verdict = Verdict::reject_latency;
  else
    eval.verdict = Verdict::feasible;
  return eval;
}

void ControllerState::commit(PlacementDecision& decision,
                             const PlacementRequest& req) {
  decision.committed_demands = build_new_demands(req, *decision.chosen);
  for (const Demand& d : decision.committed_demands) {
    committed_.demands.push_back(d);
    for (auto& [key, engine] : engines_) engine->add_base_demand(d);
  }
  decision.committed = true;
}

PlacementDecision ControllerState::place(const PlacementRequest& req) {
  validate_request(req);
  if (!seen_request_ids_.insert(req.request_id).second)
    throw RequestError("request id '" + req.request_id + "' already used");

  PlacementDecision decision;
  decision.request_id = req.request_id;
  for (const std::string& c : req.candidates)
    decision.evaluations.push_back(evaluate_candidate(req, c));

  const CandidateEvaluation* best = nullptr;
  for (const CandidateEvaluation& eval : decision.evaluations) {
    if (eval.verdict != Verdict::feasible) continue;
    if (!best) {
      best = &eval;
      continue;
    }
    double du = eval.wc_path_util - best->wc_path_util;
    if (du < -kTieEps) {
      best = &eval;
    } else if (std::abs(du) <= kTieEps) {
      double dl = eval.wc_path_latency_ms - best->wc_path_latency_ms;
      if (dl < -kTieEps ||
          (std::abs(dl) <= kTieEps && eval.candidate < best->candidate))
        best = &eval;
    }
  }
  if (best) {
    decision.chosen = best->candidate;
    commit(decision, req);
  }
  log_.push_back(decision);
  return decision;
}

PlacementDecision ControllerState::place_ordered(
    const PlacementRequest& req, const std::vector<size_t>& order,
    bool retry_all) {
  validate_request(req);
  if (!seen_request_ids_.insert(req.request_id).second)
    throw RequestError("request id '" + req.request_id + "' already used");

  PlacementDecision decision;
  decision.request_id = req.request_id;
  for (size_t idx : order) {
    CandidateEvaluation eval = evaluate_candidate(req, req.candidates[idx]);
    decision.evaluations.push_back(eval);
    if (eval.verdict == Verdict::feasible) {
      decision.chosen = eval.candidate;
      commit(decision, req);
      break;
    }
    if (!retry_all) break;  // the workload is the unit of failure
  }
  log_.push_back(decision);
  return decision;
}

PlacementDecision ControllerState::place_random(const PlacementRequest& req,
                                                std::mt19937_64& rng,
                                                bool retry_all_candidates) {
  size_t n = req.candidates.size();
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  // Fisher-Yates with modulo draws: deterministic across platforms.
  for (size_t i = 0; i + 1 < n; ++i) {
    size_t j = i + static_cast<size_t>(rng() % (n - i));
    std::swap(order[i], order[j]);
  }
  if (!retry_all_candidates) order.resize(std::min<size_t>(1, n));
  return place_ordered(req, order, retry_all_candidates);
}

double ControllerState::average_path_latency(const PlacementRequest& req,
                                             const std::string& candidate) {
  ScenarioEngine& engine = engine_for(FailureSetSpec{});
  ResidualTopology res = apply_failure(topo_, FailureScenario::none());
  int cand = topo_.node_index(candidate);
  double sum = 0.0;
  int count = 0;
  for (const Leg& leg : req.legs) {
    if (leg.a_end == candidate) continue;
    int a = topo_.node_index(leg.a_end);
    LatencyExtremes fwd = path_latency_extremes(res, engine.spf(0, a), cand);
    LatencyExtremes rev = path_latency_extremes(res, engine.spf(0, cand), a);
    if (!fwd.reachable || !rev.reachable)
      return std::numeric_limits<double>::infinity();
    sum += fwd.max_ms + rev.max_ms;
    count += 2;
  }
  return count == 0 ? 0.0 : sum / count;
}

PlacementDecision ControllerState::place_lowest_latency(
    const PlacementRequest& req, bool retry_all_candidates) {
  validate_request(req);
  size_t n = req.candidates.size();
  std::vector<std::pair<double, size_t>> ranked;
  for (size_t i = 0; i < n; ++i)
    ranked.emplace_back(average_path_latency(req, req.candidates[i]), i);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const auto& a, const auto& b) {
                     if (a.first != b.first) return a.first < b.first;
                     return req.candidates[a.second] < req.candidates[b.second];
                   });
  std::vector<size_t> order;
  for (const auto& [lat, idx] : ranked) order.push_back(idx);
  if (!retry_all_candidates) order.resize(std::min<size_t>(1, n));
  return place_ordered(req, order, retry_all_candidates);
}

void ControllerState::rollback(const std::string& request_id) {
  int target = -1;
  for (int i = 0; i < static_cast<int>(log_.size()); ++i)
    if (log_[i].request_id == request_id) target = i;
  if (target < 0)
    throw RequestError("no decision with request id '" + request_id + "'");
  PlacementDecision& decision = log_[target];
  if (!decision.committed || decision.rolled_back)
    throw RequestError("decision '" + request_id + "' has no active commit");
  for (int i = target + 1; i < static_cast<int>(log_.size()); ++i)
    if (log_[i].committed && !log_[i].rolled_back)
      throw RequestError("decision '" + request_id +
                         "' is not the most recent commit (LIFO only)");

  auto& demands = committed_.demands;
  demands.erase(demands.end() - decision.committed_demands.size(),
                demands.end());
  decision.rolled_back = true;
  engines_.clear();  // rebuilt lazily against the restored matrix
}

double ControllerState::committed_network_wc_util(const FailureSetSpec& spec) {
  return engine_for(spec).network_wc_util();
}

void ControllerState::restore_decision(const PlacementDecision& decision) {
  if (!seen_request_ids_.insert(decision.request_id).second)
    throw RequestError("request id '" + decision.request_id +
                       "' already used");
  log_.push_back(decision);
  if (decision.committed && !decision.rolled_back) {
    for (const Demand& d : decision.committed_demands) {
      committed_.demands.push_back(d);
      for (auto& [key, engine] : engines_) engine->add_base_demand(d);
    }
  }
}

}  // namespace desim
