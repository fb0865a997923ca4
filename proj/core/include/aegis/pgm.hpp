#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "aegis/image.hpp"

namespace aegis {

enum class PgmErrorCode {
  bad_magic,
  maxval_too_large,
  truncated_data,
  bad_header_token,
};

const char* to_string(PgmErrorCode code);

class PgmError : public std::runtime_error {
 public:
  PgmError(PgmErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  PgmErrorCode code() const { return code_; }

 private:
  PgmErrorCode code_;
};

/// Decodes binary (P5) or ASCII (P2) PGM with maxval <= 255.
Image decode_pgm(std::span<const std::uint8_t> bytes);

/// Encodes as binary P5, maxval 255.
std::vector<std::uint8_t> encode_pgm(const Image& img);

/// True when `bytes` starts with a parseable P2/P5 header. Cheap check for
/// inputs that are about to be sent elsewhere.
bool looks_like_pgm(std::span<const std::uint8_t> bytes);

}  // namespace aegis
