#include "desim/service.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <thread>

#include "doctest.h"
#include "fixtures.hpp"
#include "httplib.h"
#include "json.hpp"

using namespace desim;
using namespace desim::testing;
using nlohmann::json;

namespace {

std::string valid_request(const std::string& id, double bw = 300.0) {
  json j = {{"api_version", 1},
            {"request_id", id},
            {"a_ends", {"a"}},
            {"candidates", {"b"}},
            {"legs", {{{"a_end", "a"}, {"to_mbps", bw}, {"from_mbps", bw}}}},
            {"l_max_ms", 25.0},
            {"util_threshold", 0.95},
            {"failure_sets", {{"none", true}}}};
  return j.dump();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) {
    path = (std::filesystem::temp_directory_path() / name).string();
    std::remove(path.c_str());
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("placement endpoint business outcomes") {
  PlacementService service(triangle(), {}, {});
  SUBCASE("valid request chooses b") {
    ApiResult r = service.handle_placement(valid_request("r1"));
    REQUIRE(r.status == 200);
    json body = json::parse(r.body);
    CHECK(body["chosen"] == "b");
    CHECK(body["committed"] == true);
    REQUIRE(body["evaluations"].size() == 1);
    CHECK(body["evaluations"][0]["verdict"] == "feasible");
  }
  SUBCASE("admission failure is a 200 with chosen null") {
    ApiResult r = service.handle_placement(valid_request("r1", 2000.0));
    REQUIRE(r.status == 200);
    json body = json::parse(r.body);
    CHECK(body["chosen"].is_null());
    CHECK(body["committed"] == false);
  }
  SUBCASE("unknown node yields 400 with the offending name") {
    json j = json::parse(valid_request("r1"));
    j["candidates"] = {"zzz"};
    ApiResult r = service.handle_placement(j.dump());
    CHECK(r.status == 400);
    CHECK(r.body.find("zzz") != std::string::npos);
  }
  SUBCASE("malformed JSON yields 400") {
    CHECK(service.handle_placement("{oops").status == 400);
  }
  SUBCASE("replayed request_id returns the identical response, one commit") {
    ApiResult first = service.handle_placement(valid_request("r1"));
    size_t committed = service.state().committed_matrix().demands.size();
    ApiResult replay = service.handle_placement(valid_request("r1"));
    CHECK(replay.status == 200);
    CHECK(replay.body == first.body);
    CHECK(service.state().committed_matrix().demands.size() == committed);
  }
  SUBCASE("request_id reuse with a different body is 409") {
    service.handle_placement(valid_request("r1"));
    CHECK(service.handle_placement(valid_request("r1", 301.0)).status == 409);
  }
}

TEST_CASE("strict versus lenient unknown fields") {
  json j = json::parse(valid_request("r1"));
  j["surprise"] = 1;
  SUBCASE("lenient mode warns") {
    PlacementService service(triangle(), {}, {});
    ApiResult r = service.handle_placement(j.dump());
    CHECK(r.status == 200);
    CHECK(r.warning.find("surprise") != std::string::npos);
  }
  SUBCASE("strict mode rejects with the field path") {
    ServiceOptions options;
    options.strict_json = true;
    PlacementService service(triangle(), {}, options);
    ApiResult r = service.handle_placement(j.dump());
    CHECK(r.status == 400);
    CHECK(r.body.find("surprise") != std::string::npos);
  }
}

TEST_CASE("state endpoint") {
  SUBCASE("503 before load") {
    PlacementService service{ServiceOptions{}};
    CHECK(service.handle_state().status == 503);
    CHECK(service.handle_placement(valid_request("r1")).status == 503);
  }
  SUBCASE("committed demand count tracks placements") {
    TrafficMatrix seed;
    seed.demands = {{"bg", "c", "b", 10.0}};
    PlacementService service(triangle(), seed, {});
    json s0 = json::parse(service.handle_state().body);
    CHECK(s0["committed_demands"] == 1);
    service.handle_placement(valid_request("r1"));
    json s1 = json::parse(service.handle_state().body);
    CHECK(s1["committed_demands"] == 3);  // +2 legs
    CHECK(s1["nodes"] == 3);
  }
}

TEST_CASE("delete endpoint implements LIFO rollback") {
  PlacementService service(triangle(), {}, {});
  service.handle_placement(valid_request("r1", 10.0));
  std::string mid = serialize_demands(service.state().committed_matrix());
  service.handle_placement(valid_request("r2", 10.0));
  SUBCASE("deleting the most recent placement restores the matrix") {
    CHECK(service.handle_delete("r2").status == 200);
    CHECK(serialize_demands(service.state().committed_matrix()) == mid);
  }
  SUBCASE("unknown id is 404") {
    CHECK(service.handle_delete("nope").status == 404);
  }
  SUBCASE("older-than-latest is 409") {
    CHECK(service.handle_delete("r1").status == 409);
  }
}

TEST_CASE("decision log replay reproduces the committed matrix") {
  TempFile log("desim-test-log.jsonl");
  ServiceOptions options;
  options.decision_log_path = log.path;
  std::string final_matrix, response_r1;
  {
    PlacementService service(triangle(), {}, options);
    response_r1 = service.handle_placement(valid_request("r1", 20.0)).body;
    service.handle_placement(valid_request("r2", 30.0));
    service.handle_placement(valid_request("r3", 40.0));
    service.handle_delete("r3");
    final_matrix = serialize_demands(service.state().committed_matrix());
  }
  PlacementService revived(triangle(), {}, options);
  CHECK(serialize_demands(revived.state().committed_matrix()) == final_matrix);
  // idempotency map survives the restart
  ApiResult replay = revived.handle_placement(valid_request("r1", 20.0));
  CHECK(replay.body == response_r1);
}

TEST_CASE("HTTP round trip with concurrent reads") {
  PlacementService service(triangle(), {}, {});
  const int port = 18231;
  std::thread server([&] { service.serve("127.0.0.1", port); });
  httplib::Client client("127.0.0.1", port);
  client.set_connection_timeout(5);
  for (int i = 0; i < 50; ++i) {
    if (auto res = client.Get("/v1/state")) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }

  std::atomic<bool> stop{false};
  std::thread reader([&] {
    while (!stop) {
      auto res = client.Get("/v1/state");
      if (res) {
        json s = json::parse(res->body);
        // snapshot is never torn: counts are always 0 mod 2
        CHECK(s["committed_demands"].get<int>() % 2 == 0);
      }
    }
  });

  httplib::Client poster("127.0.0.1", port);
  for (int i = 0; i < 20; ++i) {
    auto res = poster.Post("/v1/placements", valid_request("h" + std::to_string(i), 1.0),
                           "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
  }
  auto replay = poster.Post("/v1/placements", valid_request("h0", 1.0),
                            "application/json");
  REQUIRE(replay);
  CHECK(replay->status == 200);

  auto del = poster.Delete("/v1/placements/h19");
  REQUIRE(del);
  CHECK(del->status == 200);
  auto del_old = poster.Delete("/v1/placements/h5");
  REQUIRE(del_old);
  CHECK(del_old->status == 409);

  stop = true;
  reader.join();
  service.stop();
  server.join();
  CHECK(service.state().committed_matrix().demands.size() == 19 * 2);
}

TEST_CASE("service config file and env overrides") {
  TempFile cfg("desim-test-cfg.json");
  {
    std::ofstream out(cfg.path);
    out << R"({"listen_port": 9000, "topology": "topo.json",
               "strict_json": true, "wcpu_reading": "b"})";
  }
  ServiceConfig parsed = load_service_config(cfg.path);
  CHECK(parsed.listen_port == 9000);
  CHECK(parsed.topology_path == "topo.json");
  CHECK(parsed.options.strict_json);
  CHECK(parsed.options.wcpu_reading == WcpuReading::per_scenario);

  setenv("DESIM_LISTEN_PORT", "9100", 1);
  setenv("DESIM_WCPU_READING", "a", 1);
  ServiceConfig overridden = load_service_config(cfg.path);
  CHECK(overridden.listen_port == 9100);
  CHECK(overridden.options.wcpu_reading == WcpuReading::union_of_used_edges);
  unsetenv("DESIM_LISTEN_PORT");
  unsetenv("DESIM_WCPU_READING");
}
