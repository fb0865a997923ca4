#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aegis {

/// Standard alphabet (RFC 4648) with '=' padding.
std::string base64_encode(std::span<const std::uint8_t> data);

/// Strict decode: padded input only, no whitespace. nullopt on any error.
std::optional<std::vector<std::uint8_t>> base64_decode(std::string_view text);

}  // namespace aegis
