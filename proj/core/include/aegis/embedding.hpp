#pragma once

#include <array>
#include <cstddef>

#include <nlohmann/json_fwd.hpp>

#include "aegis/image.hpp"

namespace aegis {

inline constexpr int kEmbedSide = 16;
inline constexpr std::size_t kEmbeddingDim = kEmbedSide * kEmbedSide;

/// 16x16 crop signature: zero mean per row, unit Euclidean norm. The all-zero
/// vector is reserved for crops with no usable contrast.
struct Embedding {
  std::array<double, kEmbeddingDim> values{};

  bool is_zero() const;
  double dot(const Embedding& other) const;
  double norm() const;
  bool operator==(const Embedding&) const = default;
};

/// Resamples to 16x16, removes each row's mean and normalizes to unit length.
Embedding embed(const Image& crop);

/// max(0, a . b) * 100, clamped to [0, 100].
double similarity(const Embedding& a, const Embedding& b);

void to_json(nlohmann::json& j, const Embedding& e);
void from_json(const nlohmann::json& j, Embedding& e);

}  // namespace aegis
