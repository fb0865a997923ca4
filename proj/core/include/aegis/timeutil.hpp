#pragma once

#include <chrono>
#include <optional>
#include <string>

namespace aegis {

using SystemTime = std::chrono::system_clock::time_point;

/// "YYYY-MM-DDTHH:MM:SS.mmmZ"
std::string format_rfc3339(SystemTime t);
std::string now_rfc3339();

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff]Z" (UTC only).
std::optional<SystemTime> parse_rfc3339(const std::string& s);

}  // namespace aegis
