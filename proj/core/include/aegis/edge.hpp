#pragma once

// Edge agent: the camera, network client and door relay of an entry point,
// with files standing in for the camera and the GPIO relay.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aegis/gateway.hpp"
#include "aegis/timeutil.hpp"

namespace aegis::edge {

/// Exit codes shared by the edge CLI.
enum ExitCode : int { kExitOk = 0, kExitInput = 2, kExitNetwork = 3, kExitServer = 4 };

class InputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class NetworkError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

class ServerError : public std::runtime_error {
 public:
  ServerError(int status, std::string body)
      : std::runtime_error("gateway returned HTTP " + std::to_string(status) + ": " + body),
        status_(status),
        body_(std::move(body)) {}
  int status() const { return status_; }
  const std::string& body() const { return body_; }

 private:
  int status_;
  std::string body_;
};

/// Reads an image file and checks it carries a PGM header.
std::vector<std::uint8_t> capture(const std::filesystem::path& path);

/// Thin JSON client for the gateway endpoints. Every call is retried once
/// on a transport failure; a second failure raises NetworkError.
class GatewayClient {
 public:
  explicit GatewayClient(std::string base_url,
                         std::chrono::milliseconds timeout = std::chrono::milliseconds(10000));

  AccessDecision request_access(const std::string& device_id, const std::vector<std::uint8_t>& image);
  EnrollmentRecord enroll(const std::string& display_name, AccessLevel level,
                          const std::vector<std::uint8_t>& image,
                          const std::optional<std::string>& user_id = std::nullopt);
  void revoke(const std::string& face_id);
  GatewayConfig get_config();
  GatewayConfig put_config(const GatewayConfig& config);
  std::vector<AccessEvent> events(std::uint64_t since, std::size_t limit);

  /// Transport attempts made by the most recent call (1 or 2).
  int last_attempts() const { return last_attempts_; }
  const std::string& base_url() const { return base_url_; }

 private:
  std::string send(const std::string& method, const std::string& path, const std::string& body);

  std::string base_url_;
  std::chrono::milliseconds timeout_;
  int last_attempts_ = 0;
};

/// "ACCESS GRANTED: <name> (similarity <s>)" or "ACCESS DENIED: <REASON>".
std::string verdict_line(const AccessDecision& decision);

struct DoorState {
  bool unlocked = false;
  std::optional<SystemTime> until;  // present iff unlocked
};

std::optional<DoorState> read_door_state(const std::filesystem::path& path);
void write_door_state(const std::filesystem::path& path, const DoorState& state);

/// Grants unlock until max(current expiry, now + hold); denials lock.
/// The file is replaced atomically. Throws InputError if it cannot be written.
DoorState actuate_door(const AccessDecision& decision, std::chrono::seconds hold,
                       const std::filesystem::path& state_path,
                       SystemTime now = std::chrono::system_clock::now());

/// Rewrites an expired unlock as locked. Returns the state now on disk.
std::optional<DoorState> relock_if_expired(const std::filesystem::path& state_path,
                                           SystemTime now = std::chrono::system_clock::now());

}  // namespace aegis::edge
