#pragma once

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "desim/controller.hpp"
#include "desim/net_model.hpp"

namespace desim {

enum class Algorithm { demand_engineering, random_dc, lowest_latency };

std::string to_string(Algorithm a);
std::optional<Algorithm> algorithm_from_string(const std::string& s);

struct StudyConfig {
  uint64_t seed = 1;
  int iterations = 100;
  std::vector<Algorithm> algorithms = {Algorithm::demand_engineering,
                                       Algorithm::random_dc,
                                       Algorithm::lowest_latency};
  double bw_min_mbps = 50.0;
  double bw_max_mbps = 500.0;
  double util_cap = 1.0;
  FailureSetSpec failure_spec;       // default: none-only
  bool retry_all_candidates = false;  // baselines retry other DCs on failure
};

// A bundle of bidirectional demands between a random subset of access sites
// and one chosen DC; every leg carries the same bandwidth.
struct Workload {
  std::vector<std::string> a_ends;
  double bandwidth_mbps = 0.0;

  // |a_ends| * 2 * bandwidth
  double nominal_mbps() const;
};

struct TraceEntry {
  int workload_index = 0;
  int n_a_ends = 0;
  std::vector<std::string> a_ends;
  double bandwidth_mbps = 0.0;
  std::optional<std::string> chosen;  // nullopt: workload not placed
  double max_path_util_after = 0.0;   // WCPU of the committed placement
};

struct RunResult {
  Algorithm algorithm = Algorithm::demand_engineering;
  int workloads_placed = 0;
  double aggregate_mbps = 0.0;
  std::vector<TraceEntry> trace;
  // The workload that ended the run (no candidate could be committed).
  Workload final_rejected;
};

struct StudyReport {
  StudyConfig config;
  // results[algorithm index][iteration]
  std::vector<std::vector<RunResult>> results;

  double total_mbps(size_t algo_index) const;
};

// Uniform subset size on 1..|sites|, then a uniform subset of that size;
// bandwidth uniform on [bw_min, bw_max].
Workload generate_workload(std::mt19937_64& rng,
                           const std::vector<std::string>& access_sites,
                           const StudyConfig& config);

PlacementRequest request_for_workload(const Workload& w,
                                      const std::vector<std::string>& dc_sites,
                                      const StudyConfig& config,
                                      const std::string& request_id);

// One run to saturation from an empty (or seeded) committed matrix. The
// workload stream depends only on (config.seed, iteration), never on the
// algorithm, so runs are comparable under common random numbers.
RunResult run_iteration(const Topology& topo, Algorithm algo, int iteration,
                        const StudyConfig& config,
                        const TrafficMatrix& seed_matrix = {});

StudyReport run_study(const Topology& topo, const StudyConfig& config);

// study.csv: algorithm,iterations,workloads_placed,aggregate_mbps,pct_of_de
std::string study_csv(const StudyReport& report);
std::string study_table(const StudyReport& report);
// traces/iter-K-ALGO.csv rows
std::string trace_csv(const RunResult& run);

}  // namespace desim
