#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aegis {

enum class StorageErrorKind { invalid_name, io };

class StorageError : public std::runtime_error {
 public:
  StorageError(StorageErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  StorageErrorKind kind() const { return kind_; }

 private:
  StorageErrorKind kind_;
};

/// Writes `data` to a temporary sibling, fsyncs it, renames it over `path`
/// and fsyncs the directory. Readers see either the old or the new file.
void atomic_write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void atomic_write_file(const std::filesystem::path& path, const std::string& text);

/// Whole-file read; nullopt if the file does not exist.
std::optional<std::vector<std::uint8_t>> read_file(const std::filesystem::path& path);

/// Creates `dir` if needed and probes that a file can be created in it.
void ensure_writable_dir(const std::filesystem::path& dir);

}  // namespace aegis
