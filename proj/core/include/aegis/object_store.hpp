#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aegis/fs_util.hpp"

namespace aegis {

struct ObjectVersion {
  std::string bucket;
  std::string key;
  std::uint64_t size = 0;
  std::string etag;  // FNV-1a 64 of the payload, hex
};

/// File-backed blob store laid out as <root>/objects/<bucket>/<key>.
/// Bucket and key names must match [a-z0-9._-]{1,64}; buckets are implicit.
class ObjectStore {
 public:
  explicit ObjectStore(std::filesystem::path root);

  ObjectVersion put(std::string_view bucket, std::string_view key, std::span<const std::uint8_t> data);
  std::optional<std::vector<std::uint8_t>> get(std::string_view bucket, std::string_view key) const;
  /// Idempotent.
  void remove(std::string_view bucket, std::string_view key);
  std::vector<std::string> list(std::string_view bucket, std::string_view prefix = {}) const;

  static bool valid_name(std::string_view name);

 private:
  std::filesystem::path object_path(std::string_view bucket, std::string_view key) const;

  std::filesystem::path dir_;
  mutable std::shared_mutex mu_;
};

std::string fnv1a_hex(std::span<const std::uint8_t> data);

}  // namespace aegis
