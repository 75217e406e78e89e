#include "posthoc/app/server.hpp"

#include <httplib.h>

#include <cmath>
#include <numeric>

#include "posthoc/app/report.hpp"
#include "posthoc/app/selection.hpp"

namespace posthoc::app {
namespace {

ApiResponse json_response(int status, const Json& body) {
  return {status, canonical_dump(body, -1)};
}

ApiResponse error(int status, const std::string& message) {
  Json body;
  body["error"] = message;
  return json_response(status, body);
}

ApiResponse not_ready() { return error(503, "server is still initializing"); }

MethodSpec method_from(const std::string& name, const std::string& tpl, std::size_t k0) {
  return MethodSpec::parse(name, tpl.empty() ? "beta" : tpl, k0);
}

}  // namespace

void Api::publish(std::shared_ptr<const Session> session) {
  if (!session) throw std::invalid_argument("cannot publish an empty session");
  if (owner_) throw std::logic_error("session already published");
  owner_ = std::move(session);
  current_.store(owner_.get(), std::memory_order_release);
}

ApiResponse Api::meta() const {
  const Session* s = current_.load(std::memory_order_acquire);
  if (s == nullptr) return not_ready();
  const auto& in = s->inputs();
  Json j;
  j["m"] = s->m();
  j["n1"] = in.dataset ? Json(in.dataset->n1()) : Json(nullptr);
  j["n2"] = in.dataset ? Json(in.dataset->n2()) : Json(nullptr);
  Json templates = Json::array();
  Json lambdas = Json::object();
  for (const auto& [name, cal] : s->calibrations()) {
    templates.push_back(name);
    lambdas[name] = cal.lambda;
  }
  j["templates"] = std::move(templates);
  j["alpha"] = s->config().alpha;
  j["lambda"] = std::move(lambdas);
  Json methods = Json::array({"simes", "bonf"});
  for (const auto& [name, cal] : s->calibrations()) methods.push_back("calibrated-" + name);
  if (s->spatial() != nullptr) methods.push_back("spatial");
  j["methods"] = std::move(methods);
  j["dataset_sha256"] = s->dataset_digest();
  return json_response(200, j);
}

ApiResponse Api::points() const {
  const Session* s = current_.load(std::memory_order_acquire);
  if (s == nullptr) return not_ready();
  const auto& in = s->inputs();
  if (!in.fold_change) return error(404, "p-value sessions have no fold changes");
  std::vector<std::size_t> order(in.m());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&in](std::size_t a, std::size_t b) { return in.ids[a] < in.ids[b]; });
  Json rows = Json::array();
  for (std::size_t i : order) {
    Json r;
    r["id"] = in.ids[i];
    r["p"] = in.pvalues[i];
    const double lfc = in.fold_change->log_ratio[i];
    r["log_fc"] = std::isfinite(lfc) ? Json(lfc) : Json(nullptr);
    rows.push_back(std::move(r));
  }
  return json_response(200, rows);
}

ApiResponse Api::bound(const std::string& body) const {
  const Session* s = current_.load(std::memory_order_acquire);
  if (s == nullptr) return not_ready();
  Json req;
  try {
    req = Json::parse(body);
  } catch (const Json::parse_error& e) {
    return error(400, std::string("request body is not valid JSON: ") + e.what());
  }
  if (!req.is_object()) return error(400, "request body must be a JSON object");
  try {
    const std::string method_name = req.value("method", std::string("simes"));
    const std::string tpl = req.value("template", std::string());
    const auto k0 = req.value("k0", std::size_t{1});
    const MethodSpec method = method_from(method_name, tpl, k0);

    IndexSet selection;
    const auto it = req.find("selection");
    if (it == req.end() || it->is_null()) {
      selection = IndexSet{};
    } else if (it->is_array()) {
      selection = resolve_ids(it->get<std::vector<std::string>>(), s->inputs());
    } else if (it->is_string()) {
      selection = resolve_selection(it->get<std::string>(), s->inputs());
    } else if (it->is_object() && it->contains("ids")) {
      selection = resolve_ids(it->at("ids").get<std::vector<std::string>>(), s->inputs());
    } else if (it->is_object() && it->contains("predicate")) {
      selection = resolve_selection(it->at("predicate").get<std::string>(), s->inputs());
    } else {
      return error(400, "selection must be a list of ids, a spec string, {ids} or {predicate}");
    }
    return json_response(200, bound_json(s->bound(selection, method)));
  } catch (const UnknownIdsError& e) {
    Json body_json;
    body_json["error"] = e.what();
    body_json["unknown_ids"] = e.ids();
    return json_response(400, body_json);
  } catch (const Json::exception& e) {
    return error(400, std::string("malformed request: ") + e.what());
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  }
}

ApiResponse Api::envelope(const std::map<std::string, std::string>& query) const {
  const Session* s = current_.load(std::memory_order_acquire);
  if (s == nullptr) return not_ready();
  auto get = [&query](const char* key, const char* fallback) {
    const auto it = query.find(key);
    return it == query.end() ? std::string(fallback) : it->second;
  };
  try {
    std::size_t k0 = 1;
    const auto k0_text = get("k0", "1");
    std::size_t used = 0;
    try {
      k0 = std::stoul(k0_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != k0_text.size()) return error(400, "k0 must be a positive integer");
    const MethodSpec method = method_from(get("method", "simes"), get("template", ""), k0);
    return json_response(200, envelope_json(s->envelope(method), s->inputs()));
  } catch (const std::invalid_argument& e) {
    return error(400, e.what());
  }
}

struct HttpServer::Impl {
  const Api& api;
  ServeOptions options;
  httplib::Server server;
};

HttpServer::HttpServer(const Api& api, ServeOptions options)
    : impl_(new Impl{api, std::move(options), {}}) {
  auto& srv = impl_->server;
  const Api& a = api;
  auto send = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  srv.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                           {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                           {"Access-Control-Allow-Headers", "Content-Type"}});
  srv.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  srv.Get("/api/meta", [&a, send](const httplib::Request&, httplib::Response& res) {
    send(res, a.meta());
  });
  srv.Get("/api/points", [&a, send](const httplib::Request&, httplib::Response& res) {
    send(res, a.points());
  });
  srv.Post("/api/bound", [&a, send](const httplib::Request& req, httplib::Response& res) {
    send(res, a.bound(req.body));
  });
  srv.Get("/api/envelope", [&a, send](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> query;
    for (const auto& [key, value] : req.params) query[key] = value;
    send(res, a.envelope(query));
  });
  if (!impl_->options.static_dir.empty() &&
      !srv.set_mount_point("/", impl_->options.static_dir)) {
    throw InputError("static directory '" + impl_->options.static_dir + "' does not exist");
  }
}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
  if (impl_->options.port == 0) return impl_->server.bind_to_any_port(impl_->options.host);
  if (!impl_->server.bind_to_port(impl_->options.host, impl_->options.port)) return -1;
  return impl_->options.port;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace posthoc::app
