#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aegis/embedding.hpp"
#include "aegis/image.hpp"
#include "aegis/records.hpp"

namespace aegis {

struct DetectionParams {
  std::vector<int> window_sizes{16, 24, 32, 48, 64};
  int stride = 4;
  /// Minimum window variance, in gray levels squared.
  double variance_threshold = 100.0;
  double nms_iou = 0.3;
  /// Also drop any candidate within `stride` pixels of an already accepted
  /// box. Faces in a frame never overlap, so such a window is a partial view
  /// of the accepted face.
  bool suppress_overlapping = true;

  bool operator==(const DetectionParams&) const = default;
};

/// Throws std::invalid_argument if any parameter is out of range.
void validate(const DetectionParams& params);

/// A sliding-window candidate before suppression.
struct WindowScore {
  BoundingBox box;
  double variance = 0.0;
  /// variance * window edge; peaks on the window that exactly frames a
  /// uniform-contrast region (sub-windows and padded windows both score lower).
  double score = 0.0;
};

/// All windows whose variance reaches the threshold, unsorted.
std::vector<WindowScore> candidate_windows(const Image& frame, const DetectionParams& params);

/// Greedy suppression in descending score order (ties by y, then x, then
/// smaller window). Returned in acceptance order.
std::vector<WindowScore> suppress(std::vector<WindowScore> candidates, const DetectionParams& params);

/// Face boxes sorted by descending area, ties by (y, x).
/// Throws std::invalid_argument if the frame is smaller than every window.
std::vector<BoundingBox> detect_faces(const Image& frame, const DetectionParams& params = {});

struct FaceMatch {
  std::string face_id;
  std::string user_id;
  double similarity = 0.0;
  BoundingBox box;
};

/// Highest-scoring record regardless of threshold; ties by smallest face_id.
std::optional<FaceMatch> best_match(const Embedding& probe, std::span<const FaceRecord> collection);

/// best_match, but only if its score reaches `threshold`.
std::optional<FaceMatch> search_collection(const Embedding& probe, std::span<const FaceRecord> collection,
                                           double threshold);

/// Largest box (area stands in for proximity); ties by (y, x).
std::optional<BoundingBox> select_primary_face(std::span<const BoundingBox> boxes);

void to_json(nlohmann::json& j, const DetectionParams& p);
void from_json(const nlohmann::json& j, DetectionParams& p);

}  // namespace aegis
