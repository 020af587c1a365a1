#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "desim/analysis.hpp"
#include "desim/harness.hpp"
#include "desim/net_model.hpp"
#include "desim/service.hpp"

namespace fs = std::filesystem;
using namespace desim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitInternal = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

FailureSetSpec parse_failures(const std::string& csv) {
  FailureSetSpec spec;
  spec.include_none = false;
  std::istringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "none")
      spec.include_none = true;
    else if (item == "circuits")
      spec.include_circuits = true;
    else if (item == "nodes")
      spec.include_nodes = true;
    else if (item == "srlgs")
      spec.include_srlgs = true;
    else
      throw ParseError("unknown failure class '" + item + "'");
  }
  if (!spec.include_none)
    throw ParseError("failure set must include 'none'");
  return spec;
}

Topology load_topology(const std::string& path) {
  return parse_topology(slurp(path));
}

TrafficMatrix load_demands(const std::string& path, const Topology& topo) {
  if (path.empty()) return {};
  return parse_demands(slurp(path), topo);
}

int cmd_check(const std::string& topo_path, const std::string& demands_path) {
  Topology topo = load_topology(topo_path);
  TrafficMatrix matrix = load_demands(demands_path, topo);
  for (const std::string& w : topo.warnings())
    std::cerr << "warning: " << w << "\n";
  std::cout << "ok: " << topo.num_nodes() << " nodes, "
            << topo.circuits().size() << " circuits, " << matrix.demands.size()
            << " demands\n";
  return kExitOk;
}

int cmd_report(const std::string& topo_path, const std::string& demands_path,
               const std::string& failures, const std::string& out_path) {
  Topology topo = load_topology(topo_path);
  TrafficMatrix matrix = load_demands(demands_path, topo);
  std::vector<FailureScenario> scenarios =
      enumerate_scenarios(topo, parse_failures(failures));
  UtilizationReport rep = worst_case_utilization(topo, matrix, scenarios);
  std::string csv = report_to_csv(topo, rep);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot write '" + out_path + "'");
    out << csv;
  }
  std::cerr << "network_wc_util: " << rep.network_wc_util << "\n";
  if (auto factor = resilient_throughput_factor(rep, 1.0))
    std::cerr << "resilient_throughput_factor (informational): " << *factor
              << "\n";
  return kExitOk;
}

int cmd_place(const std::string& topo_path, const std::string& demands_path,
              const std::string& request_path, const std::string& reading) {
  Topology topo = load_topology(topo_path);
  TrafficMatrix matrix = load_demands(demands_path, topo);
  ServiceOptions options;
  options.wcpu_reading =
      reading == "b" ? WcpuReading::per_scenario : WcpuReading::union_of_used_edges;
  PlacementService service(std::move(topo), std::move(matrix), options);
  ApiResult result = service.handle_placement(slurp(request_path));
  std::cout << result.body << "\n";
  if (!result.warning.empty()) std::cerr << "warning: " << result.warning << "\n";
  return result.status == 200 ? kExitOk : kExitInput;
}

int cmd_study(const std::string& topo_path, const StudyConfig& config,
              const std::string& out_dir, bool dump_traces) {
  Topology topo = load_topology(topo_path);
  StudyReport report = run_study(topo, config);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream out(fs::path(out_dir) / "study.csv");
    if (!out) throw ParseError("cannot write study.csv under '" + out_dir + "'");
    out << study_csv(report);
    if (dump_traces) {
      fs::create_directories(fs::path(out_dir) / "traces");
      for (size_t a = 0; a < config.algorithms.size(); ++a)
        for (int it = 0; it < config.iterations; ++it) {
          fs::path p = fs::path(out_dir) / "traces" /
                       ("iter-" + std::to_string(it) + "-" +
                        to_string(config.algorithms[a]) + ".csv");
          std::ofstream t(p);
          t << trace_csv(report.results[a][it]);
        }
    }
  }
  std::cout << study_table(report);
  return kExitOk;
}

int cmd_serve(const std::string& config_path, bool check_only) {
  ServiceConfig cfg = load_service_config(config_path);
  if (cfg.topology_path.empty())
    throw ParseError("service config: topology path required");
  Topology topo = load_topology(cfg.topology_path);
  TrafficMatrix matrix = load_demands(cfg.demands_path, topo);
  for (const std::string& w : topo.warnings())
    std::cerr << "warning: " << w << "\n";
  if (check_only) {
    std::cout << "ok\n";
    return kExitOk;
  }
  PlacementService service(std::move(topo), std::move(matrix), cfg.options);
  std::cerr << "listening on " << cfg.listen_host << ":" << cfg.listen_port
            << "\n";
  if (!service.serve(cfg.listen_host, cfg.listen_port)) {
    std::cerr << "error: failed to bind " << cfg.listen_host << ":"
              << cfg.listen_port << "\n";
    return kExitInternal;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"demand placement controller and simulation toolkit"};
  app.require_subcommand(1);

  std::string topo_path, demands_path, out_path, request_path;
  std::string failures = "none";
  std::string reading = "a";

  auto* check = app.add_subcommand("check", "validate input documents");
  check->add_option("--topology", topo_path, "topology JSON")->required();
  check->add_option("--demands", demands_path, "demand CSV");

  auto* report = app.add_subcommand("report", "worst-case utilisation report");
  report->add_option("--topology", topo_path, "topology JSON")->required();
  report->add_option("--demands", demands_path, "demand CSV");
  report->add_option("--failures", failures,
                     "comma list of none,circuits,nodes,srlgs");
  report->add_option("--out", out_path, "output CSV (default stdout)");

  auto* place = app.add_subcommand("place", "one-shot placement decision");
  place->add_option("--topology", topo_path, "topology JSON")->required();
  place->add_option("--demands", demands_path, "demand CSV");
  place->add_option("--request", request_path, "placement request JSON")
      ->required();
  place->add_option("--wcpu-reading", reading, "a|b");

  StudyConfig config;
  std::string algorithms = "de,random,latency";
  std::string study_failures = "none";
  bool dump_traces = false;
  auto* study = app.add_subcommand("study", "placement-algorithm comparison");
  study->add_option("--topology", topo_path, "topology JSON")->required();
  study->add_option("--seed", config.seed, "study seed");
  study->add_option("--iterations", config.iterations, "iterations");
  study->add_option("--algorithms", algorithms, "comma list of de,random,latency");
  study->add_option("--bw-min", config.bw_min_mbps, "min workload Mbps");
  study->add_option("--bw-max", config.bw_max_mbps, "max workload Mbps");
  study->add_option("--util-cap", config.util_cap, "stop-rule utilisation cap");
  study->add_option("--failures", study_failures,
                    "failure classes evaluated during placement");
  study->add_flag("--retry-all", config.retry_all_candidates,
                  "baselines retry other DCs after a failed pick");
  study->add_flag("--traces", dump_traces, "dump per-iteration traces");
  study->add_option("--out", out_path, "output directory");

  std::string config_path;
  bool check_only = false;
  auto* serve = app.add_subcommand("serve", "run the placement API service");
  serve->add_option("--config", config_path, "service config JSON");
  serve->add_flag("--check", check_only, "validate inputs and exit");

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(topo_path, demands_path);
    if (report->parsed())
      return cmd_report(topo_path, demands_path, failures, out_path);
    if (place->parsed())
      return cmd_place(topo_path, demands_path, request_path, reading);
    if (study->parsed()) {
      config.failure_spec = parse_failures(study_failures);
      config.algorithms.clear();
      std::istringstream in(algorithms);
      std::string item;
      while (std::getline(in, item, ',')) {
        auto algo = algorithm_from_string(item);
        if (!algo) throw ParseError("unknown algorithm '" + item + "'");
        config.algorithms.push_back(*algo);
      }
      return cmd_study(topo_path, config, out_path, dump_traces);
    }
    if (serve->parsed()) return cmd_serve(config_path, check_only);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}
