#include "aegis/records.hpp"

#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aegis {

const char* to_string(AccessLevel level) {
  return level == AccessLevel::admin ? "admin" : "standard";
}

AccessLevel access_level_from_string(const std::string& s) {
  if (s == "standard") return AccessLevel::standard;
  if (s == "admin") return AccessLevel::admin;
  throw std::invalid_argument("unknown access_level '" + s + "'");
}

const char* to_string(Reason r) {
  switch (r) {
    case Reason::granted: return "GRANTED";
    case Reason::no_face: return "NO_FACE";
    case Reason::no_match: return "NO_MATCH";
    case Reason::low_similarity: return "LOW_SIMILARITY";
    case Reason::spoof_suspected: return "SPOOF_SUSPECTED";
    case Reason::user_inactive: return "USER_INACTIVE";
  }
  return "UNKNOWN";
}

Reason reason_from_string(const std::string& s) {
  for (auto r : {Reason::granted, Reason::no_face, Reason::no_match, Reason::low_similarity,
                 Reason::spoof_suspected, Reason::user_inactive}) {
    if (s == to_string(r)) return r;
  }
  throw std::invalid_argument("unknown reason '" + s + "'");
}

void to_json(nlohmann::json& j, const UserRecord& r) {
  j = nlohmann::json{{"user_id", r.user_id},
                     {"display_name", r.display_name},
                     {"access_level", to_string(r.access_level)},
                     {"active", r.active}};
}

void from_json(const nlohmann::json& j, UserRecord& r) {
  j.at("user_id").get_to(r.user_id);
  j.at("display_name").get_to(r.display_name);
  r.access_level = access_level_from_string(j.at("access_level").get<std::string>());
  j.at("active").get_to(r.active);
}

void to_json(nlohmann::json& j, const FaceRecord& r) {
  j = nlohmann::json{{"face_id", r.face_id},
                     {"user_id", r.user_id},
                     {"object_key", r.object_key},
                     {"embedding", r.embedding},
                     {"enrolled_at", r.enrolled_at}};
}

void from_json(const nlohmann::json& j, FaceRecord& r) {
  j.at("face_id").get_to(r.face_id);
  j.at("user_id").get_to(r.user_id);
  j.at("object_key").get_to(r.object_key);
  j.at("embedding").get_to(r.embedding);
  j.at("enrolled_at").get_to(r.enrolled_at);
}

void to_json(nlohmann::json& j, const AccessEvent& e) {
  j = nlohmann::json{{"event_id", e.event_id},
                     {"timestamp", e.timestamp},
                     {"device_id", e.device_id},
                     {"decision", e.granted ? "granted" : "denied"},
                     {"reason", to_string(e.reason)}};
  if (e.face_id) j["face_id"] = *e.face_id;
  if (e.similarity) j["similarity"] = *e.similarity;
  if (e.liveness_score) j["liveness_score"] = *e.liveness_score;
}

void from_json(const nlohmann::json& j, AccessEvent& e) {
  j.at("event_id").get_to(e.event_id);
  j.at("timestamp").get_to(e.timestamp);
  j.at("device_id").get_to(e.device_id);
  const auto decision = j.at("decision").get<std::string>();
  if (decision != "granted" && decision != "denied") throw std::invalid_argument("bad decision " + decision);
  e.granted = decision == "granted";
  e.reason = reason_from_string(j.at("reason").get<std::string>());
  e.face_id = j.contains("face_id") ? std::optional(j["face_id"].get<std::string>()) : std::nullopt;
  e.similarity = j.contains("similarity") ? std::optional(j["similarity"].get<double>()) : std::nullopt;
  e.liveness_score =
      j.contains("liveness_score") ? std::optional(j["liveness_score"].get<double>()) : std::nullopt;
}

}  // namespace aegis
