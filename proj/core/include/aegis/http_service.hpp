#pragma once

#include <memory>
#include <string>
#include <utility>

#include "aegis/gateway.hpp"

namespace aegis {

/// HTTP/1.1 + JSON front end for a Gateway.
///
///   POST   /v1/access-request  {device_id, image_pgm_b64}               -> AccessDecision
///   POST   /v1/users           {display_name, access_level, image_pgm_b64[, user_id]} -> EnrollmentRecord
///   DELETE /v1/faces/{face_id}
///   GET    /v1/events?since=&limit=
///   GET    /v1/config, PUT /v1/config
///
/// Errors come back as {"error": CODE, "message": text}.
class HttpService {
 public:
  explicit HttpService(Gateway& gateway);
  ~HttpService();

  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds the socket; port 0 picks a free port. Returns the bound port, or
  /// -1 on failure.
  int bind(const std::string& host, int port);

  /// Serves on the calling thread until stop().
  void serve();

  /// Serves on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Splits "host:port". Throws std::invalid_argument on malformed input.
std::pair<std::string, int> parse_listen_address(const std::string& spec);

}  // namespace aegis
