#include "aegis/edge.hpp"

#include <cstdio>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "aegis/base64.hpp"
#include "aegis/fs_util.hpp"
#include "aegis/pgm.hpp"

namespace aegis::edge {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::uint8_t> capture(const fs::path& path) {
  std::optional<std::vector<std::uint8_t>> bytes;
  try {
    bytes = read_file(path);
  } catch (const StorageError& e) {
    throw InputError(e.what());
  }
  if (!bytes) throw InputError("no such image: " + path.string());
  if (!looks_like_pgm(*bytes)) throw InputError(path.string() + " is not a PGM image");
  return std::move(*bytes);
}

GatewayClient::GatewayClient(std::string base_url, std::chrono::milliseconds timeout)
    : base_url_(std::move(base_url)), timeout_(timeout) {
  while (!base_url_.empty() && base_url_.back() == '/') base_url_.pop_back();
}

std::string GatewayClient::send(const std::string& method, const std::string& path, const std::string& body) {
  httplib::Client cli(base_url_);
  if (!cli.is_valid()) throw InputError("invalid gateway url: " + base_url_);
  cli.set_connection_timeout(timeout_);
  cli.set_read_timeout(timeout_);
  cli.set_write_timeout(timeout_);

  last_attempts_ = 0;
  httplib::Error last_error = httplib::Error::Success;
  for (int attempt = 1; attempt <= 2; ++attempt) {
    last_attempts_ = attempt;
    httplib::Result res;
    if (method == "GET") {
      res = cli.Get(path);
    } else if (method == "POST") {
      res = cli.Post(path, body, "application/json");
    } else if (method == "PUT") {
      res = cli.Put(path, body, "application/json");
    } else {
      res = cli.Delete(path);
    }
    if (res) {
      if (res->status >= 400) throw ServerError(res->status, res->body);
      return res->body;
    }
    last_error = res.error();
  }
  throw NetworkError("gateway unreachable at " + base_url_ + ": " + httplib::to_string(last_error));
}

namespace {

json parse_response(const std::string& body) {
  try {
    return json::parse(body);
  } catch (const json::exception& e) {
    throw ServerError(200, "unparseable response: " + body);
  }
}

}  // namespace

AccessDecision GatewayClient::request_access(const std::string& device_id, const std::vector<std::uint8_t>& image) {
  const json body{{"device_id", device_id}, {"image_pgm_b64", base64_encode(image)}};
  return parse_response(send("POST", "/v1/access-request", body.dump())).get<AccessDecision>();
}

EnrollmentRecord GatewayClient::enroll(const std::string& display_name, AccessLevel level,
                                       const std::vector<std::uint8_t>& image,
                                       const std::optional<std::string>& user_id) {
  json body{{"display_name", display_name},
            {"access_level", to_string(level)},
            {"image_pgm_b64", base64_encode(image)}};
  if (user_id) body["user_id"] = *user_id;
  return parse_response(send("POST", "/v1/users", body.dump())).get<EnrollmentRecord>();
}

void GatewayClient::revoke(const std::string& face_id) { send("DELETE", "/v1/faces/" + face_id, ""); }

GatewayConfig GatewayClient::get_config() {
  return parse_response(send("GET", "/v1/config", "")).get<GatewayConfig>();
}

GatewayConfig GatewayClient::put_config(const GatewayConfig& config) {
  return parse_response(send("PUT", "/v1/config", json(config).dump())).get<GatewayConfig>();
}

std::vector<AccessEvent> GatewayClient::events(std::uint64_t since, std::size_t limit) {
  const auto path = "/v1/events?since=" + std::to_string(since) + "&limit=" + std::to_string(limit);
  return parse_response(send("GET", path, "")).at("events").get<std::vector<AccessEvent>>();
}

std::string verdict_line(const AccessDecision& d) {
  if (d.granted) {
    char sim[32];
    std::snprintf(sim, sizeof sim, "%.1f", d.similarity.value_or(0.0));
    return "ACCESS GRANTED: " + d.display_name.value_or(d.user_id.value_or("unknown")) + " (similarity " + sim + ")";
  }
  return std::string("ACCESS DENIED: ") + to_string(d.reason);
}

std::optional<DoorState> read_door_state(const fs::path& path) {
  std::optional<std::vector<std::uint8_t>> bytes;
  try {
    bytes = read_file(path);
  } catch (const StorageError&) {
    return std::nullopt;
  }
  if (!bytes) return std::nullopt;
  try {
    const auto j = json::parse(bytes->begin(), bytes->end());
    DoorState s;
    s.unlocked = j.at("state").get<std::string>() == "unlocked";
    if (s.unlocked) {
      s.until = parse_rfc3339(j.at("until").get<std::string>());
      if (!s.until) return std::nullopt;
    }
    return s;
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

void write_door_state(const fs::path& path, const DoorState& state) {
  json j{{"state", state.unlocked ? "unlocked" : "locked"}};
  if (state.unlocked) j["until"] = format_rfc3339(*state.until);
  try {
    atomic_write_file(path, j.dump() + "\n");
  } catch (const StorageError& e) {
    throw InputError(std::string("cannot write door state: ") + e.what());
  }
}

DoorState actuate_door(const AccessDecision& decision, std::chrono::seconds hold, const fs::path& state_path,
                       SystemTime now) {
  DoorState next;
  if (decision.granted && decision.reason == Reason::granted) {
    // Millisecond precision, matching what the state file can hold.
    SystemTime until = std::chrono::time_point_cast<std::chrono::milliseconds>(now + hold);
    if (const auto current = read_door_state(state_path); current && current->unlocked && *current->until > until) {
      until = *current->until;
    }
    next = DoorState{true, until};
  }
  write_door_state(state_path, next);
  return next;
}

std::optional<DoorState> relock_if_expired(const fs::path& state_path, SystemTime now) {
  auto current = read_door_state(state_path);
  if (current && current->unlocked && *current->until <= now) {
    current = DoorState{};
    write_door_state(state_path, *current);
  }
  return current;
}

}  // namespace aegis::edge
