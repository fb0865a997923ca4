#include "aegis/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "aegis/prng.hpp"

namespace aegis {

namespace {

std::array<std::uint8_t, kTextureGrid * kTextureGrid> texture_lattice(std::uint64_t seed) {
  Xorshift64Star rng(seed);
  std::array<std::uint8_t, kTextureGrid * kTextureGrid> cells{};
  for (auto& c : cells) c = static_cast<std::uint8_t>(rng.uniform_int(kTextureMin, kTextureMax));
  return cells;
}

// Nearest-cell rendering for arbitrary w x h; used for faces and yaw fill.
Image render_lattice(std::uint64_t seed, int w, int h) {
  const auto cells = texture_lattice(seed);
  Image out(w, h);
  for (int y = 0; y < h; ++y) {
    const int cy = static_cast<int>(static_cast<long long>(y) * kTextureGrid / h);
    for (int x = 0; x < w; ++x) {
      const int cx = static_cast<int>(static_cast<long long>(x) * kTextureGrid / w);
      out.at(x, y) = cells[static_cast<std::size_t>(cy) * kTextureGrid + cx];
    }
  }
  return out;
}

bool is_supported_yaw(int yaw) {
  return std::find(kYawAngles.begin(), kYawAngles.end(), yaw) != kYawAngles.end();
}

}  // namespace

Image generate_identity_texture(std::uint64_t identity_seed, int size) {
  if (size < kTextureGrid) {
    throw std::invalid_argument("face size must be >= 16, got " + std::to_string(size));
  }
  return render_lattice(identity_seed, size, size);
}

Image apply_illumination(const Image& img, double level) {
  if (!(level >= 0.0 && level <= 1.0)) {
    throw std::invalid_argument("illumination level must be in [0, 1]");
  }
  Image out = img;
  for (auto& p : out.pixels) p = round_to_gray(p * level);
  return out;
}

int yaw_visible_columns(int yaw_degrees, int width) {
  if (!is_supported_yaw(yaw_degrees)) {
    throw std::invalid_argument("unsupported yaw angle " + std::to_string(yaw_degrees));
  }
  const double f = std::cos(yaw_degrees * std::numbers::pi / 180.0);
  return std::clamp(static_cast<int>(std::floor(f * width + 0.5)), 0, width);
}

Image apply_yaw(const Image& img, int yaw_degrees, std::uint64_t bg_seed) {
  const int keep = yaw_visible_columns(yaw_degrees, img.width);
  if (img.width != img.height) throw std::invalid_argument("apply_yaw expects a square image");
  if (keep == img.width) return img;

  const Image fill = render_lattice(bg_seed, img.width, img.height);
  Image out = img;
  for (int y = 0; y < img.height; ++y) {
    for (int x = keep; x < img.width; ++x) out.at(x, y) = fill.at(x, y);
  }
  return out;
}

Image apply_accessory(const Image& img, Accessory kind) {
  if (kind == Accessory::none) return img;
  if (kind != Accessory::sunglasses) throw std::invalid_argument("unsupported accessory");
  if (img.width != img.height || img.height < 16) {
    throw std::invalid_argument("apply_accessory expects a square image with height >= 16");
  }
  const int top = static_cast<int>(std::floor(0.25 * img.height + 0.5));
  const int bottom = static_cast<int>(std::floor(0.4375 * img.height + 0.5));
  Image out = img;
  for (int y = top; y < bottom; ++y) {
    std::fill_n(&out.pixels[static_cast<std::size_t>(y) * out.width], out.width, kLensGray);
  }
  return out;
}

Image apply_spoof(const Image& img) {
  if (img.width < 3 || img.height < 3) throw std::invalid_argument("apply_spoof needs at least 3x3");
  Image out(img.width, img.height);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      int sum = 0;
      for (int dy = -1; dy <= 1; ++dy) {
        const int yy = std::clamp(y + dy, 0, img.height - 1);
        for (int dx = -1; dx <= 1; ++dx) {
          sum += img.at(std::clamp(x + dx, 0, img.width - 1), yy);
        }
      }
      out.at(x, y) = static_cast<std::uint8_t>((2 * sum + 9) / 18);
    }
  }
  return out;
}

void validate(const SceneSpec& spec) {
  if (spec.width < 1 || spec.height < 1) throw std::invalid_argument("scene dimensions must be >= 1");
  if (spec.background_level < 0 || spec.background_level > 255) {
    throw std::invalid_argument("background_level must be in [0, 255]");
  }
  if (!(spec.background_noise_sigma >= 0.0)) throw std::invalid_argument("background_noise_sigma must be >= 0");

  for (std::size_t i = 0; i < spec.placements.size(); ++i) {
    const auto& p = spec.placements[i];
    const std::string tag = "placement " + std::to_string(i) + ": ";
    if (std::find(kFaceSizes.begin(), kFaceSizes.end(), p.size) == kFaceSizes.end()) {
      throw std::invalid_argument(tag + "size must be one of 16/24/32/48/64");
    }
    if (!is_supported_yaw(p.yaw_degrees)) throw std::invalid_argument(tag + "yaw must be 0, 45 or 90");
    if (!(p.illumination >= 0.0 && p.illumination <= 1.0)) {
      throw std::invalid_argument(tag + "illumination must be in [0, 1]");
    }
    if (p.x < 0 || p.y < 0 || p.x + p.size > spec.width || p.y + p.size > spec.height) {
      throw std::invalid_argument(tag + "out of frame");
    }
    for (std::size_t k = 0; k < i; ++k) {
      if (intersection_area(p.box(), spec.placements[k].box()) > 0) {
        throw std::invalid_argument(tag + "overlaps placement " + std::to_string(k));
      }
    }
  }
}

Image render_face(const PlacementSpec& p, std::uint64_t bg_seed) {
  Image face = generate_identity_texture(p.identity_seed, p.size);
  face = apply_yaw(face, p.yaw_degrees, bg_seed);
  if (p.accessory != Accessory::none) face = apply_accessory(face, p.accessory);
  face = apply_illumination(face, p.illumination);
  if (p.spoof) face = apply_spoof(face);
  return face;
}

Scene compose_scene(const SceneSpec& spec) {
  validate(spec);

  Scene scene;
  scene.frame = Image(spec.width, spec.height);
  Xorshift64Star rng(spec.seed);
  for (auto& px : scene.frame.pixels) {
    px = round_to_gray(spec.background_level + spec.background_noise_sigma * rng.normal());
  }

  for (std::size_t i = 0; i < spec.placements.size(); ++i) {
    const auto& p = spec.placements[i];
    const Image face = render_face(p, mix_seed(spec.seed + 1 + i));
    blit(scene.frame, face, p.x, p.y);
    scene.ground_truth.push_back({p, p.box()});
  }
  return scene;
}

const char* to_string(Accessory a) {
  return a == Accessory::sunglasses ? "sunglasses" : "none";
}

Accessory accessory_from_string(const std::string& s) {
  if (s == "none") return Accessory::none;
  if (s == "sunglasses") return Accessory::sunglasses;
  throw std::invalid_argument("unknown accessory '" + s + "'");
}

void to_json(nlohmann::json& j, const PlacementSpec& p) {
  j = nlohmann::json{{"identity_seed", p.identity_seed},
                     {"x", p.x},
                     {"y", p.y},
                     {"size", p.size},
                     {"illumination", p.illumination},
                     {"yaw_degrees", p.yaw_degrees},
                     {"accessory", to_string(p.accessory)},
                     {"spoof", p.spoof}};
}

void from_json(const nlohmann::json& j, PlacementSpec& p) {
  j.at("identity_seed").get_to(p.identity_seed);
  j.at("x").get_to(p.x);
  j.at("y").get_to(p.y);
  j.at("size").get_to(p.size);
  p.illumination = j.value("illumination", 1.0);
  p.yaw_degrees = j.value("yaw_degrees", 0);
  p.accessory = accessory_from_string(j.value("accessory", std::string("none")));
  p.spoof = j.value("spoof", false);
}

void to_json(nlohmann::json& j, const SceneSpec& s) {
  j = nlohmann::json{{"width", s.width},
                     {"height", s.height},
                     {"background_level", s.background_level},
                     {"background_noise_sigma", s.background_noise_sigma},
                     {"placements", s.placements},
                     {"seed", s.seed}};
}

void from_json(const nlohmann::json& j, SceneSpec& s) {
  j.at("width").get_to(s.width);
  j.at("height").get_to(s.height);
  s.background_level = j.value("background_level", 128);
  s.background_noise_sigma = j.value("background_noise_sigma", 2.0);
  s.placements = j.value("placements", std::vector<PlacementSpec>{});
  j.at("seed").get_to(s.seed);
}

void to_json(nlohmann::json& j, const BoundingBox& b) {
  j = nlohmann::json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}};
}

void from_json(const nlohmann::json& j, BoundingBox& b) {
  j.at("x").get_to(b.x);
  j.at("y").get_to(b.y);
  j.at("w").get_to(b.w);
  j.at("h").get_to(b.h);
}

}  // namespace aegis
