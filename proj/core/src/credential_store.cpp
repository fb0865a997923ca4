#include "aegis/credential_store.hpp"

#include <mutex>

namespace aegis {

namespace fs = std::filesystem;

JsonTable::JsonTable(fs::path file) : file_(std::move(file)) {
  const auto bytes = read_file(file_);
  if (!bytes) return;
  try {
    const auto doc = nlohmann::json::parse(bytes->begin(), bytes->end());
    if (!doc.is_object()) throw StorageError(StorageErrorKind::io, file_.string() + " is not a JSON object");
    for (const auto& [id, rec] : doc.items()) rows_.emplace(id, rec);
  } catch (const nlohmann::json::exception& e) {
    throw StorageError(StorageErrorKind::io, "corrupt table " + file_.string() + ": " + e.what());
  }
}

void JsonTable::persist(const std::map<std::string, nlohmann::json>& rows) const {
  nlohmann::json doc = nlohmann::json::object();
  for (const auto& [id, rec] : rows) doc[id] = rec;
  atomic_write_file(file_, doc.dump(2) + "\n");
}

void JsonTable::put(const std::string& id, nlohmann::json record) {
  std::unique_lock lock(mu_);
  auto next = rows_;
  next[id] = std::move(record);
  persist(next);
  rows_ = std::move(next);
}

std::optional<nlohmann::json> JsonTable::get(const std::string& id) const {
  std::shared_lock lock(mu_);
  const auto it = rows_.find(id);
  if (it == rows_.end()) return std::nullopt;
  return std::optional<nlohmann::json>(std::in_place, it->second);
}

void JsonTable::remove(const std::string& id) {
  std::unique_lock lock(mu_);
  if (!rows_.contains(id)) return;
  auto next = rows_;
  next.erase(id);
  persist(next);
  rows_ = std::move(next);
}

std::vector<nlohmann::json> JsonTable::list() const {
  std::shared_lock lock(mu_);
  std::vector<nlohmann::json> out;
  out.reserve(rows_.size());
  for (const auto& [id, rec] : rows_) out.push_back(rec);
  return out;
}

std::size_t JsonTable::size() const {
  std::shared_lock lock(mu_);
  return rows_.size();
}

CredentialStore::CredentialStore(const fs::path& root)
    : users_(root / "tables" / "users.json"), faces_(root / "tables" / "faces.json") {}

void CredentialStore::put(const UserRecord& user) { users_.put(user.user_id, user); }
void CredentialStore::put(const FaceRecord& face) { faces_.put(face.face_id, face); }

std::optional<UserRecord> CredentialStore::get_user(const std::string& user_id) const {
  auto j = users_.get(user_id);
  if (!j) return std::nullopt;
  return j->get<UserRecord>();
}

std::optional<FaceRecord> CredentialStore::get_face(const std::string& face_id) const {
  auto j = faces_.get(face_id);
  if (!j) return std::nullopt;
  return j->get<FaceRecord>();
}

void CredentialStore::delete_user(const std::string& user_id) { users_.remove(user_id); }
void CredentialStore::delete_face(const std::string& face_id) { faces_.remove(face_id); }

std::vector<UserRecord> CredentialStore::list_users() const {
  std::vector<UserRecord> out;
  for (const auto& j : users_.list()) out.push_back(j.get<UserRecord>());
  return out;
}

std::vector<FaceRecord> CredentialStore::list_faces() const {
  std::vector<FaceRecord> out;
  for (const auto& j : faces_.list()) out.push_back(j.get<FaceRecord>());
  return out;
}

}  // namespace aegis
