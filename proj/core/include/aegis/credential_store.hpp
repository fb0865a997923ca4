#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "aegis/fs_util.hpp"
#include "aegis/records.hpp"

namespace aegis {

/// Schema-agnostic id -> JSON document table, held in memory and persisted
/// as one JSON object per table, rewritten atomically on every mutation.
class JsonTable {
 public:
  explicit JsonTable(std::filesystem::path file);

  void put(const std::string& id, nlohmann::json record);
  std::optional<nlohmann::json> get(const std::string& id) const;
  void remove(const std::string& id);
  /// Sorted by id.
  std::vector<nlohmann::json> list() const;
  std::size_t size() const;

 private:
  void persist(const std::map<std::string, nlohmann::json>& rows) const;

  std::filesystem::path file_;
  std::map<std::string, nlohmann::json> rows_;
  mutable std::shared_mutex mu_;
};

/// The "users" and "faces" tables under <root>/tables/.
class CredentialStore {
 public:
  explicit CredentialStore(const std::filesystem::path& root);

  void put(const UserRecord& user);
  void put(const FaceRecord& face);

  std::optional<UserRecord> get_user(const std::string& user_id) const;
  std::optional<FaceRecord> get_face(const std::string& face_id) const;

  void delete_user(const std::string& user_id);
  void delete_face(const std::string& face_id);

  std::vector<UserRecord> list_users() const;
  std::vector<FaceRecord> list_faces() const;

  JsonTable& users() { return users_; }
  JsonTable& faces() { return faces_; }

 private:
  JsonTable users_;
  JsonTable faces_;
};

}  // namespace aegis
