#pragma once

#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "desim/analysis.hpp"
#include "desim/net_model.hpp"

namespace desim {

// Thrown on invalid controller inputs (unknown node ids, bad rollback, ...).
struct RequestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Per-A-end bandwidths of the workload's two legs; may be asymmetric.
struct Leg {
  std::string a_end;
  double to_candidate_mbps = 0.0;
  double from_candidate_mbps = 0.0;
};

struct PlacementRequest {
  std::string request_id;
  std::vector<std::string> a_ends;
  std::vector<std::string> candidates;
  std::vector<Leg> legs;  // one per a_end, same order
  double l_max_ms = 0.0;
  double util_threshold = 1.0;  // T, in (0,1] for SLA use; harness passes cap
  FailureSetSpec failure_spec;
};

enum class Verdict { feasible, reject_capacity, reject_latency, reject_unroutable };

std::string to_string(Verdict v);

struct CandidateEvaluation {
  std::string candidate;
  double wc_path_util = 0.0;
  double remaining_r = 1.0;  // 1 - wc_path_util
  double wc_path_latency_ms = 0.0;
  Verdict verdict = Verdict::feasible;
};

struct PlacementDecision {
  std::string request_id;
  std::vector<CandidateEvaluation> evaluations;  // candidates, input order
  std::optional<std::string> chosen;
  bool committed = false;
  bool rolled_back = false;
  std::vector<Demand> committed_demands;
};

// Holds the topology, the committed traffic matrix and the decision log.
// Placements are serialised transactions: every candidate of one request is
// evaluated against the same committed-matrix snapshot, and commits are
// atomic. Per-failure-spec scenario engines cache routing state; commits
// update them by superposition, rollbacks invalidate them.
class ControllerState {
 public:
  ControllerState(Topology topo, TrafficMatrix seed_matrix,
                  WcpuReading reading = WcpuReading::union_of_used_edges);

  const Topology& topology() const { return topo_; }
  const TrafficMatrix& committed_matrix() const { return committed_; }
  const std::vector<PlacementDecision>& decision_log() const { return log_; }
  WcpuReading wcpu_reading() const { return reading_; }

  CandidateEvaluation evaluate_candidate(const PlacementRequest& req,
                                         const std::string& candidate);

  // Minimise-WCPU policy with admission control; commits on success.
  PlacementDecision place(const PlacementRequest& req);

  // Baseline: uniform random candidate; commits only if the pick stays
  // within req.util_threshold (no latency/SLA checks beyond the request's).
  PlacementDecision place_random(const PlacementRequest& req,
                                 std::mt19937_64& rng,
                                 bool retry_all_candidates = false);

  // Baseline: lowest average no-failure path latency across the legs.
  PlacementDecision place_lowest_latency(const PlacementRequest& req,
                                         bool retry_all_candidates = false);

  // LIFO only: the decision must be the most recent committed one.
  void rollback(const std::string& request_id);

  // Average over the request's constituent demands of the no-failure
  // max-ECMP-path latency to/from the candidate. Used by the lowest-latency
  // baseline; infinite if any leg endpoint is unreachable.
  double average_path_latency(const PlacementRequest& req,
                              const std::string& candidate);

  double committed_network_wc_util(const FailureSetSpec& spec);

  // Replay helper for decision-log persistence: re-commits the demands of a
  // previously made decision without re-evaluating it.
  void restore_decision(const PlacementDecision& decision);

 private:
  void validate_request(const PlacementRequest& req) const;
  std::vector<Demand> build_new_demands(const PlacementRequest& req,
                                        const std::string& candidate) const;
  ScenarioEngine& engine_for(const FailureSetSpec& spec);
  void commit(PlacementDecision& decision, const PlacementRequest& req);
  PlacementDecision place_ordered(const PlacementRequest& req,
                                  const std::vector<size_t>& order,
                                  bool retry_all);

  Topology topo_;
  TrafficMatrix committed_;
  std::vector<PlacementDecision> log_;
  std::unordered_set<std::string> seen_request_ids_;
  WcpuReading reading_;
  // keyed by the 4 include bits of FailureSetSpec
  std::unordered_map<unsigned, std::unique_ptr<ScenarioEngine>> engines_;
};

}  // namespace desim
