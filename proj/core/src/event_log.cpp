#include "aegis/event_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include <nlohmann/json.hpp>

#include "aegis/fs_util.hpp"
#include "aegis/timeutil.hpp"

namespace aegis {

namespace fs = std::filesystem;

EventLog::EventLog(const fs::path& root) : file_(root / "events.log") {
  std::error_code ec;
  fs::create_directories(root, ec);

  if (auto bytes = read_file(file_)) {
    std::size_t good = 0;
    std::size_t start = 0;
    while (start < bytes->size()) {
      const auto nl = std::find(bytes->begin() + static_cast<std::ptrdiff_t>(start), bytes->end(), '\n');
      if (nl == bytes->end()) break;  // torn tail
      const auto end = static_cast<std::size_t>(nl - bytes->begin());
      if (end > start) {
        try {
          auto ev = nlohmann::json::parse(bytes->begin() + static_cast<std::ptrdiff_t>(start), nl).get<AccessEvent>();
          if (!events_.empty() && ev.event_id <= events_.back().event_id) {
            throw StorageError(StorageErrorKind::io, "event ids out of order in " + file_.string());
          }
          events_.push_back(std::move(ev));
        } catch (const nlohmann::json::exception& e) {
          throw StorageError(StorageErrorKind::io, "corrupt event log line: " + std::string(e.what()));
        }
      }
      start = end + 1;
      good = start;
    }
    if (good < bytes->size()) fs::resize_file(file_, good, ec);
  }

  size_ = fs::exists(file_) ? fs::file_size(file_) : 0;
  fd_ = ::open(file_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw StorageError(StorageErrorKind::io, "cannot open " + file_.string() + ": " + std::strerror(errno));
  }
}

EventLog::~EventLog() {
  if (fd_ >= 0) ::close(fd_);
}

AccessEvent EventLog::append(AccessEvent event) {
  std::lock_guard lock(mu_);
  event.event_id = events_.empty() ? 1 : events_.back().event_id + 1;
  if (event.timestamp.empty()) event.timestamp = now_rfc3339();

  const std::string line = nlohmann::json(event).dump() + "\n";
  std::size_t written = 0;
  while (written < line.size()) {
    const ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      const std::string err = std::strerror(errno);
      // best effort; a torn tail is also cut on the next open
      [[maybe_unused]] const int rc = ::ftruncate(fd_, static_cast<off_t>(size_));
      throw StorageError(StorageErrorKind::io, "event append failed: " + err);
    }
    written += static_cast<std::size_t>(n);
  }
  if (::fdatasync(fd_) != 0) {
    throw StorageError(StorageErrorKind::io, "event fsync failed: " + std::string(std::strerror(errno)));
  }
  size_ += line.size();
  events_.push_back(event);
  return event;
}

std::vector<AccessEvent> EventLog::list(std::uint64_t since, std::size_t limit) const {
  std::lock_guard lock(mu_);
  auto it = std::upper_bound(events_.begin(), events_.end(), since,
                             [](std::uint64_t s, const AccessEvent& e) { return s < e.event_id; });
  std::vector<AccessEvent> out;
  for (; it != events_.end() && out.size() < limit; ++it) out.push_back(*it);
  return out;
}

std::uint64_t EventLog::last_id() const {
  std::lock_guard lock(mu_);
  return events_.empty() ? 0 : events_.back().event_id;
}

}  // namespace aegis
