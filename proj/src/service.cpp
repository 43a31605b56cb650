#include "blade/service.hpp"

#include <charconv>
#include <cmath>
#include <iostream>

#include "blade/bpmn.hpp"
#include "blade/perfsim.hpp"
#include "blade/requirements.hpp"
#include "httplib.h"

namespace blade {

namespace {

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON body: ") + e.what());
  }
}

const json& member(const json& j, const char* key) {
  if (!j.is_object()) throw FormatError("request body must be a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError(std::string("request body lacks '") + key + "'");
  return *it;
}

HttpResponse ok(const json& j) { return {200, j.dump(2) + "\n", "application/json"}; }

HttpResponse error_response(const ApiError& e) {
  return {http_status(e.code), e.to_json().dump(2) + "\n", "application/json"};
}

double query_number(const std::map<std::string, std::string>& query, const std::string& key,
                    std::optional<double> fallback) {
  auto it = query.find(key);
  if (it == query.end()) {
    if (!fallback) throw FormatError("missing query parameter '" + key + "'");
    return *fallback;
  }
  double x = 0.0;
  const auto& s = it->second;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(x)) {
    throw FormatError("query parameter '" + key + "' must be a number");
  }
  return x;
}

}  // namespace

std::string_view to_string(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::malformed_request: return "malformed_request";
    case ApiErrorCode::not_found: return "not_found";
    case ApiErrorCode::validation_failed: return "validation_failed";
    case ApiErrorCode::internal_error: return "internal_error";
  }
  return "internal_error";
}

int http_status(ApiErrorCode code) {
  switch (code) {
    case ApiErrorCode::malformed_request: return 400;
    case ApiErrorCode::not_found: return 404;
    case ApiErrorCode::validation_failed: return 422;
    case ApiErrorCode::internal_error: return 500;
  }
  return 500;
}

json ApiError::to_json() const {
  json j = {{"status", http_status(code)}, {"code", to_string(code)}, {"message", message}};
  if (!findings.empty()) {
    json f = json::array();
    for (const auto& x : findings) {
      f.push_back({{"severity", blade::to_string(x.severity)}, {"message", x.message}});
    }
    j["findings"] = std::move(f);
  }
  return j;
}

std::string render_ranking(const RankingResult& result) { return to_json(result).dump(2) + "\n"; }

Service::Service(KnowledgeBase kb) : kb_(std::make_shared<const KnowledgeBase>(std::move(kb))) {}

std::shared_ptr<const KnowledgeBase> Service::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return kb_;
}

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body,
                             const std::map<std::string, std::string>& query) {
  try {
    return dispatch(method, path, body, query);
  } catch (const ValidationError& e) {
    return error_response({ApiErrorCode::validation_failed, e.what(), e.findings()});
  } catch (const NotFoundError& e) {
    return error_response({ApiErrorCode::not_found, e.what(), {}});
  } catch (const FormatError& e) {
    return error_response({ApiErrorCode::malformed_request, e.what(), {}});
  } catch (const std::exception& e) {
    return error_response({ApiErrorCode::internal_error, e.what(), {}});
  }
}

HttpResponse Service::dispatch(std::string_view method, std::string_view path,
                               std::string_view body,
                               const std::map<std::string, std::string>& query) {
  const auto kb = snapshot();
  if (method == "GET" && path == "/health") {
    return ok({{"status", "ok"}, {"kb_version", kb->kb_version}});
  }
  if (method == "GET" && path == "/kb") return {200, serialize(*kb), "application/json"};
  if (method == "POST" && path == "/evaluate") {
    const auto reqs = requirements_from_json(parse_body(body));
    return {200, render_ranking(evaluate(*kb, reqs)), "application/json"};
  }
  if (method == "POST" && path == "/whatif") {
    const auto j = parse_body(body);
    const auto reqs = requirements_from_json(member(j, "requirements"));
    const auto& criterion = member(j, "criterion");
    const auto& grid = member(j, "grid");
    if (!criterion.is_string()) throw FormatError("'criterion' must be a string");
    if (!grid.is_array()) throw FormatError("'grid' must be an array of numbers");
    std::vector<double> weights;
    for (const auto& g : grid) {
      if (!g.is_number()) throw FormatError("'grid' must be an array of numbers");
      weights.push_back(g.get<double>());
    }
    return ok({{"criterion", criterion},
               {"kb_version", kb->kb_version},
               {"points", to_json(sensitivity(*kb, reqs, criterion.get<std::string>(), weights))}});
  }
  if (method == "POST" && path == "/simulate") {
    const auto j = parse_body(body);
    const auto params = chain_params_from_json(member(j, "params"));
    const auto workload = workload_from_json(member(j, "workload"));
    const auto& duration = member(j, "duration");
    if (!duration.is_number()) throw FormatError("'duration' must be a number");
    return ok(to_json(simulate(params, workload, duration.get<double>())));
  }
  if (method == "POST" && path == "/bpmn/profile") {
    const double rate = query_number(query, "rate", std::nullopt);
    auto marker = query.count("marker") ? query.at("marker") : std::string(kDefaultOnchainMarker);
    const auto model = parse_bpmn(body);
    auto j = to_json(build_profile(model, rate, marker));
    for (const auto& w : model.warnings) j["warnings"].push_back(w);
    return ok(j);
  }
  if (method == "POST" && path == "/kb/refine") return refine(body);
  throw NotFoundError("no route for " + std::string(method) + " " + std::string(path));
}

HttpResponse Service::refine(std::string_view body) {
  const auto j = parse_body(body);
  const auto& profile = member(j, "profile");
  if (!profile.is_string()) throw FormatError("'profile' must be a string");
  const auto params = chain_params_from_json(member(j, "params"));
  const auto workload = workload_from_json(member(j, "workload"));

  std::lock_guard writer(refine_mutex_);
  const auto current = snapshot();
  auto next = std::make_shared<const KnowledgeBase>(refine_intervals(
      *current, profile.get<std::string>(), {{profile.get<std::string>(), params}}, workload));
  const auto version = next->kb_version;
  {
    std::lock_guard lock(snapshot_mutex_);
    kb_ = std::move(next);
  }
  return ok({{"kb_version", version}});
}

ServeOptions parse_bind_address(std::string_view address) {
  ServeOptions opts;
  std::string_view port_text = address;
  if (auto colon = address.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) opts.host = std::string(address.substr(0, colon));
    port_text = address.substr(colon + 1);
  }
  int port = 0;
  auto [end, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || end != port_text.data() + port_text.size() || port < 0 || port > 65535) {
    throw FormatError("invalid bind address '" + std::string(address) + "'");
  }
  opts.port = port;
  return opts;
}

struct HttpServer::Impl {
  Impl(Service& s, ServeOptions o) : service(s), options(std::move(o)) {}

  Service& service;
  ServeOptions options;
  httplib::Server server;
  int port = -1;
};

HttpServer::HttpServer(Service& service, ServeOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [k, v] : req.params) query[k] = v;
    auto out = impl_->service.handle(req.method, req.path, req.body, query);
    res.status = out.status;
    res.set_content(out.body, out.content_type);
  };
  for (const char* path : {"/health", "/kb"}) impl_->server.Get(path, route);
  for (const char* path : {"/evaluate", "/whatif", "/simulate", "/bpmn/profile", "/kb/refine"}) {
    impl_->server.Post(path, route);
  }
  impl_->server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (!res.body.empty()) return;
    const ApiError e{res.status == 404 ? ApiErrorCode::not_found : ApiErrorCode::malformed_request,
                     "no route for " + req.method + " " + req.path, {}};
    res.status = http_status(e.code);
    res.set_content(e.to_json().dump(2) + "\n", "application/json");
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.ui_dir && !impl_->server.set_mount_point("/ui", *o.ui_dir)) {
    throw FormatError("cannot mount UI directory '" + *o.ui_dir + "'");
  }
  impl_->port = o.port == 0 ? impl_->server.bind_to_any_port(o.host)
                            : (impl_->server.bind_to_port(o.host, o.port) ? o.port : -1);
  if (impl_->port < 0) {
    throw FormatError("cannot bind " + o.host + ":" + std::to_string(o.port));
  }
  return impl_->port;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_->server.is_running()) impl_->server.stop();
}

void serve(const std::string& kb_path, const ServeOptions& options) {
  Service service(load_knowledge_base_file(kb_path));
  HttpServer server(service, options);
  const int port = server.bind();
  std::cerr << "blade: serving kb_version " << service.snapshot()->kb_version << " on "
            << options.host << ":" << port << "\n";
  server.listen();
}

}  // namespace blade
