#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace aegis {

/// Axis-aligned rectangle in pixel coordinates; (x, y) is the top-left corner.
struct BoundingBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  long long area() const { return static_cast<long long>(w) * h; }
  bool operator==(const BoundingBox&) const = default;
};

long long intersection_area(const BoundingBox& a, const BoundingBox& b);
double iou(const BoundingBox& a, const BoundingBox& b);

/// 8-bit grayscale raster, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(int w, int h, std::uint8_t fill = 0);
  Image(int w, int h, std::vector<std::uint8_t> data);

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }

  bool empty() const { return pixels.empty(); }
  double mean() const;

  bool operator==(const Image&) const = default;
};

/// Rounds half-way values up (toward +inf), clamped to [0, 255].
std::uint8_t round_to_gray(double v);

/// Copies the pixels under `box`. Throws std::out_of_range if the box leaves the image.
Image crop(const Image& img, const BoundingBox& box);

/// Writes `src` into `dst` with its top-left corner at (x, y).
void blit(Image& dst, const Image& src, int x, int y);

/// Area-average resampling: each output pixel is the rounded mean of the
/// source rectangle it covers. Computed in exact integer arithmetic.
Image resample(const Image& img, int out_w, int out_h);

}  // namespace aegis
