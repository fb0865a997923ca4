#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <vector>

#include "aegis/records.hpp"

namespace aegis {

/// Append-only audit log at <root>/events.log, one JSON document per line.
///
/// On open the file is replayed; a trailing line without its newline (a
/// crash mid-append) is cut off, so the log always ends on a whole event.
class EventLog {
 public:
  explicit EventLog(const std::filesystem::path& root);
  ~EventLog();

  EventLog(const EventLog&) = delete;
  EventLog& operator=(const EventLog&) = delete;

  /// Assigns the next event_id (and the timestamp, if empty), writes and
  /// fsyncs the line, and returns the stored event.
  AccessEvent append(AccessEvent event);

  /// Events with event_id > since, ascending, at most `limit`.
  std::vector<AccessEvent> list(std::uint64_t since, std::size_t limit) const;

  std::uint64_t last_id() const;

 private:
  std::filesystem::path file_;
  int fd_ = -1;
  std::uintmax_t size_ = 0;
  std::vector<AccessEvent> events_;
  mutable std::mutex mu_;
};

}  // namespace aegis
