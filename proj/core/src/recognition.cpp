#include "aegis/recognition.hpp"

#include <algorithm>
#include <stdexcept>
#include <tuple>

#include <nlohmann/json.hpp>

namespace aegis {

void validate(const DetectionParams& p) {
  if (p.window_sizes.empty()) throw std::invalid_argument("window_sizes must not be empty");
  for (int w : p.window_sizes) {
    if (w < 1) throw std::invalid_argument("window sizes must be >= 1");
  }
  if (p.stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (!(p.variance_threshold > 0.0)) throw std::invalid_argument("variance_threshold must be positive");
  if (!(p.nms_iou > 0.0 && p.nms_iou < 1.0)) throw std::invalid_argument("nms_iou must be in (0, 1)");
}

namespace {

// Summed-area tables of values and squares, (w+1) x (h+1).
struct IntegralImage {
  int stride = 0;
  std::vector<long long> sum;
  std::vector<long long> sq;

  explicit IntegralImage(const Image& img) : stride(img.width + 1) {
    sum.assign(static_cast<std::size_t>(stride) * (img.height + 1), 0);
    sq.assign(sum.size(), 0);
    for (int y = 0; y < img.height; ++y) {
      long long rs = 0;
      long long rq = 0;
      for (int x = 0; x < img.width; ++x) {
        const long long p = img.at(x, y);
        rs += p;
        rq += p * p;
        const std::size_t i = static_cast<std::size_t>(y + 1) * stride + (x + 1);
        sum[i] = sum[i - stride] + rs;
        sq[i] = sq[i - stride] + rq;
      }
    }
  }

  std::pair<long long, long long> box(int x, int y, int w, int h) const {
    const auto at = [&](const std::vector<long long>& t, int xx, int yy) {
      return t[static_cast<std::size_t>(yy) * stride + xx];
    };
    const long long s = at(sum, x + w, y + h) - at(sum, x, y + h) - at(sum, x + w, y) + at(sum, x, y);
    const long long q = at(sq, x + w, y + h) - at(sq, x, y + h) - at(sq, x + w, y) + at(sq, x, y);
    return {s, q};
  }
};

bool ranks_before(const WindowScore& a, const WindowScore& b) {
  if (a.score != b.score) return a.score > b.score;
  return std::tie(a.box.y, a.box.x, a.box.w) < std::tie(b.box.y, b.box.x, b.box.w);
}

}  // namespace

std::vector<WindowScore> candidate_windows(const Image& frame, const DetectionParams& params) {
  validate(params);
  const IntegralImage ii(frame);
  std::vector<WindowScore> out;
  for (int w : params.window_sizes) {
    if (w > frame.width || w > frame.height) continue;
    const long long n = static_cast<long long>(w) * w;
    for (int y = 0; y + w <= frame.height; y += params.stride) {
      for (int x = 0; x + w <= frame.width; x += params.stride) {
        const auto [s, q] = ii.box(x, y, w, w);
        const double var = static_cast<double>(n * q - s * s) / static_cast<double>(n * n);
        if (var >= params.variance_threshold) out.push_back({{x, y, w, w}, var, var * w});
      }
    }
  }
  return out;
}

std::vector<WindowScore> suppress(std::vector<WindowScore> candidates, const DetectionParams& params) {
  std::sort(candidates.begin(), candidates.end(), ranks_before);
  std::vector<WindowScore> kept;
  const int margin = params.stride;
  for (const auto& c : candidates) {
    const bool dominated = std::any_of(kept.begin(), kept.end(), [&](const WindowScore& k) {
      if (iou(c.box, k.box) > params.nms_iou) return true;
      if (!params.suppress_overlapping) return false;
      // An off-grid face can leave a strip narrower than the stride outside
      // its best window; grow the accepted box so that strip is claimed too.
      const BoundingBox grown{k.box.x - margin, k.box.y - margin, k.box.w + 2 * margin, k.box.h + 2 * margin};
      return intersection_area(c.box, grown) > 0;
    });
    if (!dominated) kept.push_back(c);
  }
  return kept;
}

std::vector<BoundingBox> detect_faces(const Image& frame, const DetectionParams& params) {
  validate(params);
  const int smallest = *std::min_element(params.window_sizes.begin(), params.window_sizes.end());
  if (frame.width < smallest || frame.height < smallest) {
    throw std::invalid_argument("frame is smaller than every detection window");
  }

  std::vector<BoundingBox> boxes;
  for (const auto& k : suppress(candidate_windows(frame, params), params)) boxes.push_back(k.box);
  std::sort(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    if (a.area() != b.area()) return a.area() > b.area();
    return std::tie(a.y, a.x) < std::tie(b.y, b.x);
  });
  return boxes;
}

std::optional<FaceMatch> best_match(const Embedding& probe, std::span<const FaceRecord> collection) {
  std::optional<FaceMatch> best;
  for (const auto& rec : collection) {
    const double s = similarity(probe, rec.embedding);
    if (!best || s > best->similarity || (s == best->similarity && rec.face_id < best->face_id)) {
      best = FaceMatch{rec.face_id, rec.user_id, s, {}};
    }
  }
  return best;
}

std::optional<FaceMatch> search_collection(const Embedding& probe, std::span<const FaceRecord> collection,
                                           double threshold) {
  auto best = best_match(probe, collection);
  if (best && best->similarity >= threshold) return best;
  return std::nullopt;
}

std::optional<BoundingBox> select_primary_face(std::span<const BoundingBox> boxes) {
  if (boxes.empty()) return std::nullopt;
  return *std::min_element(boxes.begin(), boxes.end(), [](const BoundingBox& a, const BoundingBox& b) {
    if (a.area() != b.area()) return a.area() > b.area();
    return std::tie(a.y, a.x) < std::tie(b.y, b.x);
  });
}

void to_json(nlohmann::json& j, const DetectionParams& p) {
  j = nlohmann::json{{"window_sizes", p.window_sizes},
                     {"stride", p.stride},
                     {"variance_threshold", p.variance_threshold},
                     {"nms_iou", p.nms_iou},
                     {"suppress_overlapping", p.suppress_overlapping}};
}

void from_json(const nlohmann::json& j, DetectionParams& p) {
  const DetectionParams d;
  p.window_sizes = j.value("window_sizes", d.window_sizes);
  p.stride = j.value("stride", d.stride);
  p.variance_threshold = j.value("variance_threshold", d.variance_threshold);
  p.nms_iou = j.value("nms_iou", d.nms_iou);
  p.suppress_overlapping = j.value("suppress_overlapping", d.suppress_overlapping);
}

}  // namespace aegis
