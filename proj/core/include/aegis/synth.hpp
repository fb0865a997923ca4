#pragma once

// Synthetic faces and capture-condition transforms.
//
// A face is a procedural texture: a 16x16 lattice of gray levels drawn
// uniformly from [64, 192] by xorshift64* and rendered at the requested edge
// length by nearest-cell lookup. Rendering at any multiple of 16 and
// resampling back to 16x16 therefore recovers the lattice exactly.

#include <array>
#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "aegis/image.hpp"

namespace aegis {

inline constexpr int kTextureGrid = 16;
inline constexpr int kTextureMin = 64;
inline constexpr int kTextureMax = 192;
inline constexpr std::uint8_t kLensGray = 16;

inline constexpr std::array<int, 5> kFaceSizes{16, 24, 32, 48, 64};
inline constexpr std::array<int, 3> kYawAngles{0, 45, 90};

/// Named illumination levels used by the scenario corpus.
inline constexpr double kBright = 1.0;
inline constexpr double kDim = 0.4;
inline constexpr double kDark = 0.02;

enum class Accessory { none, sunglasses };

struct PlacementSpec {
  std::uint64_t identity_seed = 0;
  int x = 0;
  int y = 0;
  int size = 32;
  double illumination = 1.0;
  int yaw_degrees = 0;
  Accessory accessory = Accessory::none;
  bool spoof = false;

  BoundingBox box() const { return {x, y, size, size}; }
  bool operator==(const PlacementSpec&) const = default;
};

struct SceneSpec {
  int width = 128;
  int height = 96;
  int background_level = 128;
  double background_noise_sigma = 2.0;
  std::vector<PlacementSpec> placements;
  std::uint64_t seed = 0;

  bool operator==(const SceneSpec&) const = default;
};

struct GroundTruth {
  PlacementSpec placement;
  BoundingBox box;
};

struct Scene {
  Image frame;
  std::vector<GroundTruth> ground_truth;
};

Image generate_identity_texture(std::uint64_t identity_seed, int size);

/// p -> round(p * level); throws std::invalid_argument unless level is in [0, 1].
Image apply_illumination(const Image& img, double level);

/// Keeps the leftmost round(cos(yaw) * width) columns and replaces the rest
/// with a texture drawn from `bg_seed`, which has the same distribution as a
/// face. Only 0, 45 and 90 degrees are accepted.
Image apply_yaw(const Image& img, int yaw_degrees, std::uint64_t bg_seed);

/// Number of original columns apply_yaw keeps for a given width.
int yaw_visible_columns(int yaw_degrees, int width);

/// Dark lens band over rows [round(0.25 h), round(0.4375 h)).
Image apply_accessory(const Image& img, Accessory kind);

/// 3x3 box blur with clamped edges: a re-photographed print.
Image apply_spoof(const Image& img);

/// Throws std::invalid_argument describing the first violated invariant.
void validate(const SceneSpec& spec);

Scene compose_scene(const SceneSpec& spec);

/// Renders one placement through the full transform chain (without blitting).
Image render_face(const PlacementSpec& placement, std::uint64_t bg_seed);

const char* to_string(Accessory a);
Accessory accessory_from_string(const std::string& s);

void to_json(nlohmann::json& j, const PlacementSpec& p);
void from_json(const nlohmann::json& j, PlacementSpec& p);
void to_json(nlohmann::json& j, const SceneSpec& s);
void from_json(const nlohmann::json& j, SceneSpec& s);
void to_json(nlohmann::json& j, const BoundingBox& b);
void from_json(const nlohmann::json& j, BoundingBox& b);

}  // namespace aegis
