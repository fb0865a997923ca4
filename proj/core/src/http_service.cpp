#include "aegis/http_service.hpp"

#include <charconv>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "aegis/base64.hpp"

namespace aegis {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  send_json(res, status, json{{"error", code}, {"message", message}});
}

json parse_body(const httplib::Request& req) {
  try {
    auto body = json::parse(req.body);
    if (!body.is_object()) throw GatewayError(400, "BAD_REQUEST", "body must be a JSON object");
    return body;
  } catch (const json::exception& e) {
    throw GatewayError(400, "BAD_REQUEST", std::string("invalid JSON: ") + e.what());
  }
}

std::string required_string(const json& body, const char* field) {
  if (!body.contains(field) || !body[field].is_string()) {
    throw GatewayError(400, "BAD_REQUEST", std::string("missing string field '") + field + "'");
  }
  return body[field].get<std::string>();
}

std::vector<std::uint8_t> image_field(const json& body) {
  auto bytes = base64_decode(required_string(body, "image_pgm_b64"));
  if (!bytes) throw GatewayError(400, "BAD_IMAGE", "image_pgm_b64 is not valid base64");
  return std::move(*bytes);
}

std::uint64_t query_number(const httplib::Request& req, const char* name, std::uint64_t fallback) {
  if (!req.has_param(name)) return fallback;
  const auto text = req.get_param_value(name);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw GatewayError(400, "BAD_REQUEST", std::string("query parameter '") + name + "' must be a non-negative integer");
  }
  return v;
}

// Maps exceptions thrown by a route body onto HTTP errors.
template <typename F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const GatewayError& e) {
    send_error(res, e.status(), e.code(), e.what());
  } catch (const StorageError& e) {
    send_error(res, 500, "STORAGE", e.what());
  } catch (const std::invalid_argument& e) {
    send_error(res, 400, "BAD_REQUEST", e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "BAD_REQUEST", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "INTERNAL", e.what());
  }
}

}  // namespace

struct HttpService::Impl {
  Gateway& gateway;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Gateway& g) : gateway(g) { routes(); }

  void routes() {
    server.Post("/v1/access-request", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        const auto device = required_string(body, "device_id");
        const auto image = image_field(body);
        send_json(res, 200, gateway.handle_access_request(device, image));
      });
    });

    server.Post("/v1/users", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto body = parse_body(req);
        EnrollmentRequest er;
        er.display_name = required_string(body, "display_name");
        er.access_level = access_level_from_string(body.value("access_level", std::string("standard")));
        er.image_pgm = image_field(body);
        if (body.contains("user_id")) er.user_id = required_string(body, "user_id");
        send_json(res, 201, gateway.handle_enroll(er));
      });
    });

    server.Delete(R"(/v1/faces/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const std::string face_id = req.matches[1];
        gateway.handle_revoke(face_id);
        send_json(res, 200, json{{"face_id", face_id}, {"deleted", true}});
      });
    });

    server.Get("/v1/events", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto since = query_number(req, "since", 0);
        const auto limit = query_number(req, "limit", 100);
        send_json(res, 200, json{{"events", gateway.handle_get_events(since, limit)}});
      });
    });

    server.Get("/v1/config", [this](const httplib::Request&, httplib::Response& res) {
      guarded(res, [&] { send_json(res, 200, gateway.handle_get_config()); });
    });

    server.Put("/v1/config", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        GatewayConfig cfg;
        try {
          cfg = parse_body(req).get<GatewayConfig>();
        } catch (const json::exception& e) {
          throw GatewayError(400, "BAD_CONFIG", e.what());
        }
        gateway.handle_put_config(cfg);
        send_json(res, 200, gateway.handle_get_config());
      });
    });
  }
};

HttpService::HttpService(Gateway& gateway) : impl_(std::make_unique<Impl>(gateway)) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpService::serve() { impl_->server.listen_after_bind(); }

void HttpService::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::pair<std::string, int> parse_listen_address(const std::string& spec) {
  const auto colon = spec.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == spec.size()) {
    throw std::invalid_argument("listen address must be host:port, got '" + spec + "'");
  }
  int port = 0;
  const auto* first = spec.data() + colon + 1;
  const auto* last = spec.data() + spec.size();
  const auto [ptr, ec] = std::from_chars(first, last, port);
  if (ec != std::errc() || ptr != last || port < 0 || port > 65535) {
    throw std::invalid_argument("invalid port in '" + spec + "'");
  }
  return {spec.substr(0, colon), port};
}

}  // namespace aegis
