#include "aegis/gateway.hpp"

#include <cstdio>
#include <random>

#include <nlohmann/json.hpp>

#include "aegis/embedding.hpp"
#include "aegis/liveness.hpp"
#include "aegis/pgm.hpp"
#include "aegis/timeutil.hpp"

namespace aegis {

namespace fs = std::filesystem;

namespace {

constexpr const char* kFaceBucket = "faces";

std::uint64_t entropy_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

fs::path config_path(const fs::path& root) { return root / "config.json"; }

Image decode_or_400(std::span<const std::uint8_t> bytes) {
  try {
    return decode_pgm(bytes);
  } catch (const PgmError& e) {
    throw GatewayError(400, "BAD_IMAGE", std::string("undecodable image: ") + e.what());
  }
}

}  // namespace

void validate(const GatewayConfig& c) {
  if (!(c.similarity_threshold >= 0.0 && c.similarity_threshold <= 100.0)) {
    throw std::invalid_argument("similarity_threshold must be in [0, 100]");
  }
  if (!(c.liveness_threshold >= 0.0)) throw std::invalid_argument("liveness_threshold must be >= 0");
  validate(c.detection);
}

Gateway::Gateway(const fs::path& data_root, GatewayOptions options)
    : root_(data_root),
      objects_(data_root),
      credentials_(data_root),
      events_(data_root),
      ids_(options.id_seed ? *options.id_seed : entropy_seed()) {
  GatewayConfig cfg;
  if (auto bytes = read_file(config_path(root_))) {
    try {
      cfg = nlohmann::json::parse(bytes->begin(), bytes->end()).get<GatewayConfig>();
      validate(cfg);
    } catch (const std::exception& e) {
      throw StorageError(StorageErrorKind::io, "invalid stored config: " + std::string(e.what()));
    }
  }
  config_ = std::make_shared<const GatewayConfig>(cfg);
}

std::string Gateway::next_id() {
  std::lock_guard lock(id_mu_);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(ids_.next()));
  return buf;
}

std::shared_ptr<const GatewayConfig> Gateway::config_snapshot() const {
  std::lock_guard lock(config_mu_);
  return config_;
}

AccessDecision Gateway::decide(const Image& frame, const GatewayConfig& config) const {
  AccessDecision d;

  std::vector<BoundingBox> boxes;
  try {
    boxes = detect_faces(frame, config.detection);
  } catch (const std::invalid_argument&) {
    // frame smaller than any window: nothing a face could fit in
  }
  const auto primary = select_primary_face(boxes);
  if (!primary) {
    d.reason = Reason::no_face;
    return d;
  }

  const Image face = crop(frame, *primary);
  if (config.liveness_enabled) {
    const auto verdict = assess_liveness(face, config.liveness_threshold);
    d.liveness_score = verdict.score;
    if (!verdict.is_live) {
      d.reason = Reason::spoof_suspected;
      return d;
    }
  }

  const Embedding probe = embed(face);
  const auto faces = credentials_.list_faces();
  const auto best = best_match(probe, faces);
  if (best) d.similarity = best->similarity;
  if (!best || best->similarity < config.similarity_threshold) {
    d.reason = (!best || best->similarity < kNoMatchCeiling) ? Reason::no_match : Reason::low_similarity;
    return d;
  }

  d.face_id = best->face_id;
  d.user_id = best->user_id;
  const auto user = credentials_.get_user(best->user_id);
  if (user) d.display_name = user->display_name;
  if (!user || !user->active) {
    d.reason = Reason::user_inactive;
    return d;
  }

  d.granted = true;
  d.reason = Reason::granted;
  return d;
}

AccessDecision Gateway::handle_access_request(std::string_view device_id, std::span<const std::uint8_t> image_pgm) {
  const Image frame = decode_or_400(image_pgm);
  const auto config = config_snapshot();
  AccessDecision decision = decide(frame, *config);

  AccessEvent ev;
  ev.device_id = std::string(device_id);
  ev.granted = decision.granted;
  ev.reason = decision.reason;
  ev.face_id = decision.face_id;
  ev.similarity = decision.similarity;
  ev.liveness_score = decision.liveness_score;
  events_.append(std::move(ev));  // StorageError propagates as a 500; no response without an event
  return decision;
}

EnrollmentRecord Gateway::handle_enroll(const EnrollmentRequest& request) {
  if (request.display_name.empty()) throw GatewayError(400, "BAD_REQUEST", "display_name must not be empty");
  const Image frame = decode_or_400(request.image_pgm);
  const auto config = config_snapshot();

  std::vector<BoundingBox> boxes;
  try {
    boxes = detect_faces(frame, config->detection);
  } catch (const std::invalid_argument&) {
  }
  const auto primary = select_primary_face(boxes);
  if (!primary) throw GatewayError(422, "NO_FACE", "no face found in enrollment image");

  std::optional<UserRecord> user;
  if (request.user_id) {
    user = credentials_.get_user(*request.user_id);
    if (!user) throw GatewayError(404, "UNKNOWN_USER", "no user " + *request.user_id);
  }

  FaceRecord face;
  face.face_id = next_id();
  face.embedding = embed(crop(frame, *primary));
  face.enrolled_at = now_rfc3339();

  const std::string key = face.face_id + ".pgm";
  objects_.put(kFaceBucket, key, request.image_pgm);
  if (!objects_.get(kFaceBucket, key)) {
    throw GatewayError(500, "STORAGE", "enrolled image not resolvable after write");
  }
  face.object_key = std::string(kFaceBucket) + "/" + key;

  if (!user) {
    user = UserRecord{"user-" + next_id(), request.display_name, request.access_level, true};
    credentials_.put(*user);
  }
  face.user_id = user->user_id;
  credentials_.put(face);
  return {face.user_id, face.face_id, face.object_key};
}

void Gateway::handle_revoke(const std::string& face_id) { credentials_.delete_face(face_id); }

std::vector<AccessEvent> Gateway::handle_get_events(std::uint64_t since, std::size_t limit) const {
  return events_.list(since, limit);
}

GatewayConfig Gateway::handle_get_config() const { return *config_snapshot(); }

void Gateway::handle_put_config(const GatewayConfig& config) {
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw GatewayError(400, "BAD_CONFIG", e.what());
  }
  std::lock_guard lock(config_mu_);
  atomic_write_file(config_path(root_), nlohmann::json(config).dump(2) + "\n");
  config_ = std::make_shared<const GatewayConfig>(config);
}

void to_json(nlohmann::json& j, const GatewayConfig& c) {
  j = nlohmann::json{{"similarity_threshold", c.similarity_threshold},
                     {"liveness_enabled", c.liveness_enabled},
                     {"liveness_threshold", c.liveness_threshold},
                     {"detection", c.detection}};
}

void from_json(const nlohmann::json& j, GatewayConfig& c) {
  const GatewayConfig d;
  c.similarity_threshold = j.value("similarity_threshold", d.similarity_threshold);
  c.liveness_enabled = j.value("liveness_enabled", d.liveness_enabled);
  c.liveness_threshold = j.value("liveness_threshold", d.liveness_threshold);
  c.detection = j.value("detection", d.detection);
}

void to_json(nlohmann::json& j, const AccessDecision& d) {
  j = nlohmann::json{{"granted", d.granted}, {"reason", to_string(d.reason)}};
  if (d.similarity) j["similarity"] = *d.similarity;
  if (d.face_id) j["face_id"] = *d.face_id;
  if (d.user_id) j["user_id"] = *d.user_id;
  if (d.display_name) j["display_name"] = *d.display_name;
  if (d.liveness_score) j["liveness_score"] = *d.liveness_score;
}

void from_json(const nlohmann::json& j, AccessDecision& d) {
  j.at("granted").get_to(d.granted);
  d.reason = reason_from_string(j.at("reason").get<std::string>());
  const auto opt_str = [&](const char* k) {
    return j.contains(k) ? std::optional(j[k].get<std::string>()) : std::nullopt;
  };
  const auto opt_num = [&](const char* k) {
    return j.contains(k) ? std::optional(j[k].get<double>()) : std::nullopt;
  };
  d.similarity = opt_num("similarity");
  d.face_id = opt_str("face_id");
  d.user_id = opt_str("user_id");
  d.display_name = opt_str("display_name");
  d.liveness_score = opt_num("liveness_score");
}

void to_json(nlohmann::json& j, const EnrollmentRecord& r) {
  j = nlohmann::json{{"user_id", r.user_id}, {"face_id", r.face_id}, {"object_key", r.object_key}};
}

void from_json(const nlohmann::json& j, EnrollmentRecord& r) {
  j.at("user_id").get_to(r.user_id);
  j.at("face_id").get_to(r.face_id);
  j.at("object_key").get_to(r.object_key);
}

}  // namespace aegis
