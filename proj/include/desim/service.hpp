#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include <memory>

#include "desim/controller.hpp"

namespace httplib {
class Server;
}

namespace desim {

struct ServiceOptions {
  bool strict_json = false;
  WcpuReading wcpu_reading = WcpuReading::union_of_used_edges;
  std::string decision_log_path;  // empty: no persistence
};

struct ServiceConfig {
  std::string listen_host = "127.0.0.1";
  int listen_port = 8080;
  std::string topology_path;
  std::string demands_path;  // optional seed matrix
  ServiceOptions options;
};

// Config file is JSON; DESIM_* environment variables override fields
// (LISTEN_HOST, LISTEN_PORT, TOPOLOGY, DEMANDS, STRICT_JSON, WCPU_READING,
// DECISION_LOG).
ServiceConfig load_service_config(const std::string& path);

struct ApiResult {
  int status = 200;
  std::string body;
  std::string warning;  // non-strict mode: unknown-field notice
};

// The controller behind an HTTP-style JSON protocol. Handlers are exposed
// directly so tests can drive them without sockets; serve() wires them into
// an httplib server.
class PlacementService {
 public:
  PlacementService(Topology topo, TrafficMatrix seed_matrix,
                   ServiceOptions options);
  // Unloaded service: endpoints answer 503 until load() is called.
  explicit PlacementService(ServiceOptions options);

  void load(Topology topo, TrafficMatrix seed_matrix);

  ApiResult handle_placement(const std::string& body);
  ApiResult handle_state();
  ApiResult handle_delete(const std::string& request_id);

  // Blocks; returns false if the port could not be bound.
  bool serve(const std::string& host, int port);
  void stop();

  const ControllerState& state() const { return *state_; }

 private:
  void append_log_line(const std::string& line);
  void replay_log();

  ServiceOptions options_;
  std::optional<ControllerState> state_;
  // request_id -> (canonical request body, stored response body)
  std::unordered_map<std::string, std::pair<std::string, std::string>>
      replies_;
  std::mutex mu_;
  std::unique_ptr<httplib::Server> server_;

 public:
  ~PlacementService();
};

}  // namespace desim
