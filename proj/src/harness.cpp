#include "desim/harness.hpp"

#include <algorithm>
#include <sstream>

namespace desim {

namespace {

uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  // splitmix64 step
  uint64_t z = seed + salt * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::demand_engineering:
      return "demand_engineering";
    case Algorithm::random_dc:
      return "random";
    case Algorithm::lowest_latency:
      return "lowest_latency";
  }
  return "?";
}

std::optional<Algorithm> algorithm_from_string(const std::string& s) {
  if (s == "de" || s == "demand_engineering")
    return Algorithm::demand_engineering;
  if (s == "random") return Algorithm::random_dc;
  if (s == "latency" || s == "lowest_latency") return Algorithm::lowest_latency;
  return std::nullopt;
}

double Workload::nominal_mbps() const {
  return static_cast<double>(a_ends.size()) * 2.0 * bandwidth_mbps;
}

double StudyReport::total_mbps(size_t algo_index) const {
  double t = 0.0;
  for (const RunResult& r : results[algo_index]) t += r.aggregate_mbps;
  return t;
}

Workload generate_workload(std::mt19937_64& rng,
                           const std::vector<std::string>& access_sites,
                           const StudyConfig& config) {
  if (access_sites.empty())
    throw ValidationError("generate_workload: no access sites");
  size_t n = access_sites.size();
  size_t size = 1 + static_cast<size_t>(rng() % n);
  std::vector<size_t> idx(n);
  for (size_t i = 0; i < n; ++i) idx[i] = i;
  for (size_t i = 0; i < size; ++i) {
    size_t j = i + static_cast<size_t>(rng() % (n - i));
    std::swap(idx[i], idx[j]);
  }
  Workload w;
  for (size_t i = 0; i < size; ++i) w.a_ends.push_back(access_sites[idx[i]]);
  std::sort(w.a_ends.begin(), w.a_ends.end());
  w.bandwidth_mbps =
      config.bw_min_mbps +
      uniform01(rng) * (config.bw_max_mbps - config.bw_min_mbps);
  return w;
}

PlacementRequest request_for_workload(const Workload& w,
                                      const std::vector<std::string>& dc_sites,
                                      const StudyConfig& config,
                                      const std::string& request_id) {
  PlacementRequest req;
  req.request_id = request_id;
  req.a_ends = w.a_ends;
  req.candidates = dc_sites;
  for (const std::string& a : w.a_ends)
    req.legs.push_back({a, w.bandwidth_mbps, w.bandwidth_mbps});
  req.l_max_ms = std::numeric_limits<double>::max();
  req.util_threshold = config.util_cap;
  req.failure_spec = config.failure_spec;
  return req;
}

RunResult run_iteration(const Topology& topo, Algorithm algo, int iteration,
                        const StudyConfig& config,
                        const TrafficMatrix& seed_matrix) {
  std::mt19937_64 workload_rng(mix_seed(config.seed, 2 * iteration + 1));
  std::mt19937_64 pick_rng(mix_seed(config.seed, 2 * iteration + 2));
  ControllerState state(topo, seed_matrix);
  std::vector<std::string> dcs = topo.dc_sites();
  std::vector<std::string> access = topo.access_sites();
  if (dcs.empty()) throw ValidationError("run_iteration: no DC sites");

  RunResult run;
  run.algorithm = algo;
  constexpr int kMaxWorkloads = 1000000;
  for (int idx = 0; idx < kMaxWorkloads; ++idx) {
    Workload w = generate_workload(workload_rng, access, config);
    PlacementRequest req =
        request_for_workload(w, dcs, config, "w" + std::to_string(idx));

    PlacementDecision decision;
    switch (algo) {
      case Algorithm::demand_engineering:
        decision = state.place(req);
        break;
      case Algorithm::random_dc:
        decision =
            state.place_random(req, pick_rng, config.retry_all_candidates);
        break;
      case Algorithm::lowest_latency:
        decision =
            state.place_lowest_latency(req, config.retry_all_candidates);
        break;
    }

    TraceEntry entry;
    entry.workload_index = idx;
    entry.n_a_ends = static_cast<int>(w.a_ends.size());
    entry.a_ends = w.a_ends;
    entry.bandwidth_mbps = w.bandwidth_mbps;
    if (decision.chosen) {
      entry.chosen = decision.chosen;
      for (const CandidateEvaluation& eval : decision.evaluations)
        if (eval.candidate == *decision.chosen)
          entry.max_path_util_after = eval.wc_path_util;
      run.workloads_placed += 1;
      run.aggregate_mbps += w.nominal_mbps();
      run.trace.push_back(entry);
      continue;
    }
    run.trace.push_back(entry);

    // The pick failed; the run only stops once no candidate fits at all.
    bool any_feasible = false;
    for (const std::string& c : dcs)
      if (state.evaluate_candidate(req, c).verdict == Verdict::feasible) {
        any_feasible = true;
        break;
      }
    if (!any_feasible) {
      run.final_rejected = w;
      break;
    }
  }
  return run;
}

StudyReport run_study(const Topology& topo, const StudyConfig& config) {
  if (config.iterations < 1)
    throw ValidationError("run_study: iterations must be >= 1");
  if (config.bw_min_mbps > config.bw_max_mbps)
    throw ValidationError("run_study: bw_min > bw_max");
  if (config.algorithms.empty())
    throw ValidationError("run_study: no algorithms selected");
  StudyReport report;
  report.config = config;
  for (Algorithm algo : config.algorithms) {
    std::vector<RunResult> runs;
    for (int it = 0; it < config.iterations; ++it)
      runs.push_back(run_iteration(topo, algo, it, config));
    report.results.push_back(std::move(runs));
  }
  return report;
}

std::string study_csv(const StudyReport& report) {
  std::ostringstream out;
  out << "algorithm,iterations,workloads_placed,aggregate_mbps,pct_of_de\n";
  out.precision(3);
  out << std::fixed;
  std::optional<double> de_total;
  bool single = report.config.algorithms.size() == 1;
  for (size_t i = 0; i < report.config.algorithms.size(); ++i)
    if (report.config.algorithms[i] == Algorithm::demand_engineering)
      de_total = report.total_mbps(i);
  for (size_t i = 0; i < report.config.algorithms.size(); ++i) {
    long placed = 0;
    for (const RunResult& r : report.results[i]) placed += r.workloads_placed;
    out << to_string(report.config.algorithms[i]) << ","
        << report.config.iterations << "," << placed << ","
        << report.total_mbps(i) << ",";
    if (de_total && *de_total > 0.0 && !single)
      out << 100.0 * report.total_mbps(i) / *de_total;
    out << "\n";
  }
  return out.str();
}

std::string study_table(const StudyReport& report) {
  std::ostringstream out;
  out << "Algorithm            Placed   Aggregate Mbps   % of DE\n";
  std::optional<double> de_total;
  for (size_t i = 0; i < report.config.algorithms.size(); ++i)
    if (report.config.algorithms[i] == Algorithm::demand_engineering)
      de_total = report.total_mbps(i);
  out.precision(0);
  out << std::fixed;
  for (size_t i = 0; i < report.config.algorithms.size(); ++i) {
    long placed = 0;
    for (const RunResult& r : report.results[i]) placed += r.workloads_placed;
    std::string name = to_string(report.config.algorithms[i]);
    name.resize(20, ' ');
    out << name << " " << placed << "\t" << report.total_mbps(i) << "\t";
    if (de_total && *de_total > 0.0)
      out << 100.0 * report.total_mbps(i) / *de_total << "%";
    out << "\n";
  }
  return out.str();
}

std::string trace_csv(const RunResult& run) {
  std::ostringstream out;
  out << "placement_index,n_a_ends,workload_mbps,chosen_site,max_path_util\n";
  out.precision(6);
  out << std::fixed;
  for (const TraceEntry& e : run.trace)
    out << e.workload_index << "," << e.n_a_ends << "," << e.bandwidth_mbps
        << "," << (e.chosen ? *e.chosen : "") << "," << e.max_path_util_after
        << "\n";
  return out.str();
}

}  // namespace desim
