#include "aegis/pgm.hpp"

#include <cctype>
#include <limits>
#include <optional>
#include <string>

namespace aegis {

const char* to_string(PgmErrorCode code) {
  switch (code) {
    case PgmErrorCode::bad_magic: return "bad_magic";
    case PgmErrorCode::maxval_too_large: return "maxval_too_large";
    case PgmErrorCode::truncated_data: return "truncated_data";
    case PgmErrorCode::bad_header_token: return "bad_header_token";
  }
  return "unknown";
}

namespace {

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= bytes_.size(); }

  // Skips whitespace and '#' comments (which run to end of line).
  void skip_separators() {
    while (pos_ < bytes_.size()) {
      const auto c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(c)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Reads one non-negative decimal token. Returns nullopt at end of input.
  std::optional<unsigned long> number(const char* what) {
    skip_separators();
    if (done()) return std::nullopt;
    unsigned long value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > std::numeric_limits<int>::max()) {
        throw PgmError(PgmErrorCode::bad_header_token, std::string(what) + " out of range");
      }
      ++pos_;
      ++digits;
    }
    if (digits == 0 || (pos_ < bytes_.size() && !std::isspace(bytes_[pos_]) && bytes_[pos_] != '#')) {
      throw PgmError(PgmErrorCode::bad_header_token, std::string("non-numeric ") + what);
    }
    return value;
  }

  std::span<const std::uint8_t> rest() const { return bytes_.subspan(pos_); }
  void advance(std::size_t n) { pos_ += n; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

unsigned long header_field(Reader& r, const char* what) {
  auto v = r.number(what);
  if (!v) throw PgmError(PgmErrorCode::truncated_data, std::string("header ends before ") + what);
  return *v;
}

}  // namespace

Image decode_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) {
    throw PgmError(PgmErrorCode::bad_magic, "not a P2/P5 PGM");
  }
  const bool binary = bytes[1] == '5';
  if (bytes.size() > 2 && !std::isspace(bytes[2]) && bytes[2] != '#') {
    throw PgmError(PgmErrorCode::bad_magic, "magic number not followed by whitespace");
  }

  Reader r(bytes);
  r.advance(2);
  const auto width = header_field(r, "width");
  const auto height = header_field(r, "height");
  const auto maxval = header_field(r, "maxval");
  if (width == 0 || height == 0) throw PgmError(PgmErrorCode::bad_header_token, "zero image dimension");
  if (maxval == 0) throw PgmError(PgmErrorCode::bad_header_token, "maxval must be positive");
  if (maxval > 255) throw PgmError(PgmErrorCode::maxval_too_large, "maxval > 255 not supported");

  const std::size_t count = static_cast<std::size_t>(width) * height;
  std::vector<std::uint8_t> pixels;
  pixels.reserve(count);

  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    if (r.done()) throw PgmError(PgmErrorCode::truncated_data, "missing pixel data");
    r.advance(1);
    const auto data = r.rest();
    if (data.size() < count) {
      throw PgmError(PgmErrorCode::truncated_data,
                     "expected " + std::to_string(count) + " data bytes, got " + std::to_string(data.size()));
    }
    for (std::size_t i = 0; i < count; ++i) {
      if (data[i] > maxval) throw PgmError(PgmErrorCode::bad_header_token, "sample exceeds maxval");
      pixels.push_back(data[i]);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const auto v = r.number("sample");
      if (!v) {
        throw PgmError(PgmErrorCode::truncated_data,
                       "expected " + std::to_string(count) + " samples, got " + std::to_string(i));
      }
      if (*v > maxval) throw PgmError(PgmErrorCode::bad_header_token, "sample exceeds maxval");
      pixels.push_back(static_cast<std::uint8_t>(*v));
    }
  }
  return Image(static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

std::vector<std::uint8_t> encode_pgm(const Image& img) {
  const std::string header =
      "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.pixels.begin(), img.pixels.end());
  return out;
}

bool looks_like_pgm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2')) return false;
  try {
    Reader r(bytes);
    r.advance(2);
    const auto w = header_field(r, "width");
    const auto h = header_field(r, "height");
    const auto maxval = header_field(r, "maxval");
    return w > 0 && h > 0 && maxval > 0 && maxval <= 255;
  } catch (const PgmError&) {
    return false;
  }
}

}  // namespace aegis
