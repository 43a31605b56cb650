#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "blade/service.hpp"
#include "httplib.h"

using namespace blade;

namespace {

const char* kRequest = R"({
  "strict": [{"criterion": "smart-contracts", "op": "equals", "value": true}],
  "preferences": [{"criterion": "throughput-tps", "weight": 0.8},
                  {"criterion": "latency-s", "weight": 0.5}]
})";

json body(const HttpResponse& r) { return json::parse(r.body); }

}  // namespace

TEST(Service, Health) {
  Service s(fixture_knowledge_base());
  const auto r = s.handle("GET", "/health", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(body(r)["kb_version"], 1);
}

TEST(Service, KbIsCanonicalSerialization) {
  Service s(fixture_knowledge_base());
  EXPECT_EQ(s.handle("GET", "/kb", "").body, serialize(fixture_knowledge_base()));
}

TEST(Service, EvaluateMatchesLibrary) {
  Service s(fixture_knowledge_base());
  const auto r = s.handle("POST", "/evaluate", kRequest);
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.body,
            render_ranking(evaluate(fixture_knowledge_base(), requirements_from_json(json::parse(kRequest)))));
}

TEST(Service, ErrorMapping) {
  Service s(fixture_knowledge_base());
  auto r = s.handle("POST", "/evaluate", "{not json");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(body(r)["code"], "malformed_request");
  r = s.handle("POST", "/evaluate", R"({"preferences": [{"criterion": "ghost", "weight": 1}]})");
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(body(r)["code"], "validation_failed");
  EXPECT_FALSE(body(r)["findings"].empty());
  r = s.handle("GET", "/nowhere", "");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(body(r)["code"], "not_found");
  r = s.handle("POST", "/kb/refine", R"({"profile": "nope", "params": {}, "workload": {"entries": [{"method": "store", "rate": 1}]}})");
  EXPECT_EQ(r.status, 404);
}

TEST(Service, WhatIf) {
  Service s(fixture_knowledge_base());
  json req = {{"requirements", json::parse(kRequest)}, {"criterion", "latency-s"}, {"grid", {0.0, 1.0}}};
  const auto r = s.handle("POST", "/whatif", req.dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(body(r)["points"].size(), 2u);
  req["grid"] = "x";
  EXPECT_EQ(s.handle("POST", "/whatif", req.dump()).status, 400);
}

TEST(Service, SimulateAndBpmnProfile) {
  Service s(fixture_knowledge_base());
  json req = {{"params", {{"block_time", 2}, {"block_capacity", 160}}},
              {"workload", {{"entries", {{{"method", "store"}, {"rate", 20}}}}}},
              {"duration", 100}};
  auto r = s.handle("POST", "/simulate", req.dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(body(r)["throughput"], 10.0);

  std::ifstream f(BLADE_DATA_DIR "/sample_process.bpmn");
  const std::string xml((std::istreambuf_iterator<char>(f)), {});
  r = s.handle("POST", "/bpmn/profile", xml, {{"rate", "2"}});
  ASSERT_EQ(r.status, 200);
  EXPECT_NEAR(body(r)["tx_rate"].get<double>(), 4.8, 1e-12);
  EXPECT_EQ(s.handle("POST", "/bpmn/profile", xml).status, 400);
  EXPECT_EQ(s.handle("POST", "/bpmn/profile", xml, {{"rate", "fast"}}).status, 400);
}

TEST(Service, RefineSwapsSnapshot) {
  Service s(fixture_knowledge_base());
  const auto before = s.snapshot();
  json req = {{"profile", "corda"},
              {"params", {{"block_time", 2}, {"block_capacity", 160}}},
              {"workload", {{"entries", {{{"method", "store"}, {"rate", 5}}}}}}};
  const auto r = s.handle("POST", "/kb/refine", req.dump());
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(body(r)["kb_version"], 2);
  EXPECT_EQ(before->kb_version, 1);
  EXPECT_EQ(s.snapshot()->kb_version, 2);
  EXPECT_EQ(body(s.handle("GET", "/health", ""))["kb_version"], 2);
}

TEST(Service, BindAddress) {
  auto o = parse_bind_address("0.0.0.0:9000");
  EXPECT_EQ(o.host, "0.0.0.0");
  EXPECT_EQ(o.port, 9000);
  EXPECT_EQ(parse_bind_address(":81").port, 81);
  EXPECT_EQ(parse_bind_address("82").host, "127.0.0.1");
  EXPECT_THROW(parse_bind_address("host:port"), FormatError);
  EXPECT_THROW(parse_bind_address("h:70000"), FormatError);
}

TEST(HttpServer, ServesApiAndStaticUi) {
  const auto ui = std::filesystem::temp_directory_path() / "blade_ui_test";
  std::filesystem::create_directories(ui);
  std::ofstream(ui / "index.html") << "<h1>ui</h1>";

  Service service(fixture_knowledge_base());
  ServeOptions opts;
  opts.port = 0;
  opts.ui_dir = ui.string();
  HttpServer server(service, opts);
  const int port = server.bind();
  std::thread t([&] { server.listen(); });

  httplib::Client client("127.0.0.1", port);
  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  auto eval = client.Post("/evaluate", kRequest, "application/json");
  ASSERT_TRUE(eval);
  EXPECT_EQ(eval->body, service.handle("POST", "/evaluate", kRequest).body);
  auto bad = client.Post("/evaluate", "{", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  auto missing = client.Get("/nowhere");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["code"], "not_found");
  auto page = client.Get("/ui/index.html");
  ASSERT_TRUE(page);
  EXPECT_EQ(page->status, 200);
  EXPECT_EQ(page->body, "<h1>ui</h1>");

  server.stop();
  t.join();
  std::filesystem::remove_all(ui);
}
