#include "aegis/object_store.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>

namespace aegis {

namespace fs = std::filesystem;

bool ObjectStore::valid_name(std::string_view name) {
  if (name.empty() || name.size() > 64 || name == "." || name == "..") return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '.' || c == '_' || c == '-';
  });
}

std::string fnv1a_hex(std::span<const std::uint8_t> data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : data) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ObjectStore::ObjectStore(fs::path root) : dir_(std::move(root) / "objects") {}

fs::path ObjectStore::object_path(std::string_view bucket, std::string_view key) const {
  if (!valid_name(bucket)) throw StorageError(StorageErrorKind::invalid_name, "invalid bucket name");
  if (!valid_name(key)) throw StorageError(StorageErrorKind::invalid_name, "invalid object key");
  return dir_ / std::string(bucket) / std::string(key);
}

ObjectVersion ObjectStore::put(std::string_view bucket, std::string_view key, std::span<const std::uint8_t> data) {
  const auto path = object_path(bucket, key);
  std::unique_lock lock(mu_);
  atomic_write_file(path, data);
  return {std::string(bucket), std::string(key), data.size(), fnv1a_hex(data)};
}

std::optional<std::vector<std::uint8_t>> ObjectStore::get(std::string_view bucket, std::string_view key) const {
  const auto path = object_path(bucket, key);
  std::shared_lock lock(mu_);
  return read_file(path);
}

void ObjectStore::remove(std::string_view bucket, std::string_view key) {
  const auto path = object_path(bucket, key);
  std::unique_lock lock(mu_);
  std::error_code ec;
  fs::remove(path, ec);
  if (ec) throw StorageError(StorageErrorKind::io, "cannot remove " + path.string() + ": " + ec.message());
}

std::vector<std::string> ObjectStore::list(std::string_view bucket, std::string_view prefix) const {
  if (!valid_name(bucket)) throw StorageError(StorageErrorKind::invalid_name, "invalid bucket name");
  std::vector<std::string> keys;
  std::shared_lock lock(mu_);
  const fs::path dir = dir_ / std::string(bucket);
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return keys;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    auto name = entry.path().filename().string();
    // in-flight temporaries carry a '~' and never pass the name check
    if (!valid_name(name)) continue;
    if (name.starts_with(prefix)) keys.push_back(std::move(name));
  }
  if (ec) throw StorageError(StorageErrorKind::io, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace aegis
