#include "aegis/image.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace aegis {

long long intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const int x0 = std::max(a.x, b.x);
  const int y0 = std::max(a.y, b.y);
  const int x1 = std::min(a.x + a.w, b.x + b.w);
  const int y1 = std::min(a.y + a.h, b.y + b.h);
  if (x1 <= x0 || y1 <= y0) return 0;
  return static_cast<long long>(x1 - x0) * (y1 - y0);
}

double iou(const BoundingBox& a, const BoundingBox& b) {
  const long long inter = intersection_area(a, b);
  const long long uni = a.area() + b.area() - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

Image::Image(int w, int h, std::uint8_t fill) : width(w), height(h) {
  if (w < 1 || h < 1) throw std::invalid_argument("image dimensions must be >= 1");
  pixels.assign(static_cast<std::size_t>(w) * h, fill);
}

Image::Image(int w, int h, std::vector<std::uint8_t> data) : width(w), height(h), pixels(std::move(data)) {
  if (w < 1 || h < 1) throw std::invalid_argument("image dimensions must be >= 1");
  if (pixels.size() != static_cast<std::size_t>(w) * h) {
    throw std::invalid_argument("pixel count " + std::to_string(pixels.size()) + " does not match " +
                                std::to_string(w) + "x" + std::to_string(h));
  }
}

double Image::mean() const {
  if (pixels.empty()) return 0.0;
  const auto sum = std::accumulate(pixels.begin(), pixels.end(), 0ull);
  return static_cast<double>(sum) / static_cast<double>(pixels.size());
}

std::uint8_t round_to_gray(double v) {
  const double r = std::floor(v + 0.5);
  if (r <= 0.0) return 0;
  if (r >= 255.0) return 255;
  return static_cast<std::uint8_t>(r);
}

Image crop(const Image& img, const BoundingBox& box) {
  if (box.w < 1 || box.h < 1 || box.x < 0 || box.y < 0 || box.x + box.w > img.width ||
      box.y + box.h > img.height) {
    throw std::out_of_range("crop box outside image");
  }
  Image out(box.w, box.h);
  for (int y = 0; y < box.h; ++y) {
    const auto* row = &img.pixels[static_cast<std::size_t>(box.y + y) * img.width + box.x];
    std::copy(row, row + box.w, &out.pixels[static_cast<std::size_t>(y) * box.w]);
  }
  return out;
}

void blit(Image& dst, const Image& src, int x, int y) {
  if (x < 0 || y < 0 || x + src.width > dst.width || y + src.height > dst.height) {
    throw std::out_of_range("blit target outside image");
  }
  for (int row = 0; row < src.height; ++row) {
    const auto* s = &src.pixels[static_cast<std::size_t>(row) * src.width];
    std::copy(s, s + src.width, &dst.pixels[static_cast<std::size_t>(y + row) * dst.width + x]);
  }
}

namespace {

// Overlap weights for one axis. Coordinates are scaled so that input pixel k
// spans [k*out, (k+1)*out) and output pixel i spans [i*in, (i+1)*in); every
// overlap is then an integer and each output's weights sum to `in`.
struct AxisWeights {
  std::vector<int> first;               // first contributing input index per output
  std::vector<std::vector<long long>> w;  // weights for consecutive inputs
};

AxisWeights axis_weights(int in, int out) {
  AxisWeights aw;
  aw.first.resize(out);
  aw.w.resize(out);
  for (int i = 0; i < out; ++i) {
    const long long lo = static_cast<long long>(i) * in;
    const long long hi = lo + in;
    const int k0 = static_cast<int>(lo / out);
    aw.first[i] = k0;
    for (int k = k0; k < in; ++k) {
      const long long plo = static_cast<long long>(k) * out;
      const long long phi = plo + out;
      if (plo >= hi) break;
      aw.w[i].push_back(std::min(hi, phi) - std::max(lo, plo));
    }
  }
  return aw;
}

}  // namespace

Image resample(const Image& img, int out_w, int out_h) {
  if (out_w < 1 || out_h < 1) throw std::invalid_argument("resample target must be at least 1x1");
  if (img.empty()) throw std::invalid_argument("resample of empty image");
  if (out_w == img.width && out_h == img.height) return img;

  const AxisWeights wx = axis_weights(img.width, out_w);
  const AxisWeights wy = axis_weights(img.height, out_h);
  const long long denom = static_cast<long long>(img.width) * img.height;

  Image out(out_w, out_h);
  for (int j = 0; j < out_h; ++j) {
    for (int i = 0; i < out_w; ++i) {
      long long sum = 0;
      for (std::size_t dy = 0; dy < wy.w[j].size(); ++dy) {
        const int y = wy.first[j] + static_cast<int>(dy);
        long long row = 0;
        for (std::size_t dx = 0; dx < wx.w[i].size(); ++dx) {
          row += wx.w[i][dx] * img.at(wx.first[i] + static_cast<int>(dx), y);
        }
        sum += row * wy.w[j][dy];
      }
      // round-half-up of sum / denom
      out.at(i, j) = static_cast<std::uint8_t>((2 * sum + denom) / (2 * denom));
    }
  }
  return out;
}

}  // namespace aegis
