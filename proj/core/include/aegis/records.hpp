#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "aegis/embedding.hpp"

namespace aegis {

enum class AccessLevel { standard, admin };

const char* to_string(AccessLevel level);
AccessLevel access_level_from_string(const std::string& s);

struct UserRecord {
  std::string user_id;
  std::string display_name;
  AccessLevel access_level = AccessLevel::standard;
  bool active = true;

  bool operator==(const UserRecord&) const = default;
};

/// One enrolled gallery entry.
struct FaceRecord {
  std::string face_id;  // 16 lowercase hex chars
  std::string user_id;
  std::string object_key;
  Embedding embedding;
  std::string enrolled_at;  // RFC 3339, UTC

  bool operator==(const FaceRecord&) const = default;
};

enum class Reason { granted, no_face, no_match, low_similarity, spoof_suspected, user_inactive };

const char* to_string(Reason r);
Reason reason_from_string(const std::string& s);

struct AccessEvent {
  std::uint64_t event_id = 0;
  std::string timestamp;
  std::string device_id;
  bool granted = false;
  Reason reason = Reason::no_face;
  std::optional<std::string> face_id;
  std::optional<double> similarity;
  std::optional<double> liveness_score;

  bool operator==(const AccessEvent&) const = default;
};

void to_json(nlohmann::json& j, const UserRecord& r);
void from_json(const nlohmann::json& j, UserRecord& r);
void to_json(nlohmann::json& j, const FaceRecord& r);
void from_json(const nlohmann::json& j, FaceRecord& r);
void to_json(nlohmann::json& j, const AccessEvent& e);
void from_json(const nlohmann::json& j, AccessEvent& e);

}  // namespace aegis
