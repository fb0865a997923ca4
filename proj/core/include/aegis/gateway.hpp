#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aegis/credential_store.hpp"
#include "aegis/event_log.hpp"
#include "aegis/object_store.hpp"
#include "aegis/prng.hpp"
#include "aegis/recognition.hpp"
#include "aegis/records.hpp"

namespace aegis {

/// Grant threshold on the 0-100 similarity scale.
inline constexpr double kDefaultSimilarityThreshold = 80.0;
/// Below this best score a denial reads NO_MATCH rather than LOW_SIMILARITY.
inline constexpr double kNoMatchCeiling = 40.0;
/// Midpoint between the highest spoof and lowest live Laplacian energy on
/// the default corpus (seed 7, 16.6-17.3 vs 71.6-74.8), rounded to one decimal.
inline constexpr double kDefaultLivenessThreshold = 44.4;

struct GatewayConfig {
  double similarity_threshold = kDefaultSimilarityThreshold;
  bool liveness_enabled = false;
  double liveness_threshold = kDefaultLivenessThreshold;
  DetectionParams detection;

  bool operator==(const GatewayConfig&) const = default;
};

/// Throws std::invalid_argument on the first violated invariant.
void validate(const GatewayConfig& config);

struct AccessDecision {
  bool granted = false;
  Reason reason = Reason::no_face;
  std::optional<double> similarity;
  std::optional<std::string> face_id;
  std::optional<std::string> user_id;
  std::optional<std::string> display_name;
  std::optional<double> liveness_score;

  bool operator==(const AccessDecision&) const = default;
};

struct EnrollmentRequest {
  std::string display_name;
  AccessLevel access_level = AccessLevel::standard;
  std::vector<std::uint8_t> image_pgm;
  /// Link the new face to an existing user instead of creating one.
  std::optional<std::string> user_id;
};

struct EnrollmentRecord {
  std::string user_id;
  std::string face_id;
  std::string object_key;

  bool operator==(const EnrollmentRecord&) const = default;
};

/// Request-level failure carrying the HTTP status it maps to.
class GatewayError : public std::runtime_error {
 public:
  GatewayError(int status, std::string code, const std::string& what)
      : std::runtime_error(what), status_(status), code_(std::move(code)) {}
  int status() const { return status_; }
  const std::string& code() const { return code_; }

 private:
  int status_;
  std::string code_;
};

struct GatewayOptions {
  /// Seed for face/user id generation; entropy when unset.
  std::optional<std::uint64_t> id_seed;
};

/// The decision service behind the HTTP surface. Thread-safe: requests run
/// concurrently against committed store state; config changes are atomic
/// swaps seen by requests that start afterwards.
class Gateway {
 public:
  explicit Gateway(const std::filesystem::path& data_root, GatewayOptions options = {});

  AccessDecision handle_access_request(std::string_view device_id, std::span<const std::uint8_t> image_pgm);
  EnrollmentRecord handle_enroll(const EnrollmentRequest& request);
  void handle_revoke(const std::string& face_id);
  std::vector<AccessEvent> handle_get_events(std::uint64_t since, std::size_t limit) const;
  GatewayConfig handle_get_config() const;
  void handle_put_config(const GatewayConfig& config);

  ObjectStore& objects() { return objects_; }
  CredentialStore& credentials() { return credentials_; }
  const EventLog& events() const { return events_; }

 private:
  std::string next_id();
  std::shared_ptr<const GatewayConfig> config_snapshot() const;
  AccessDecision decide(const Image& frame, const GatewayConfig& config) const;

  std::filesystem::path root_;
  ObjectStore objects_;
  CredentialStore credentials_;
  EventLog events_;

  mutable std::mutex config_mu_;
  std::shared_ptr<const GatewayConfig> config_;

  std::mutex id_mu_;
  Xorshift64Star ids_;
};

void to_json(nlohmann::json& j, const GatewayConfig& c);
void from_json(const nlohmann::json& j, GatewayConfig& c);
void to_json(nlohmann::json& j, const AccessDecision& d);
void from_json(const nlohmann::json& j, AccessDecision& d);
void to_json(nlohmann::json& j, const EnrollmentRecord& r);
void from_json(const nlohmann::json& j, EnrollmentRecord& r);

}  // namespace aegis
