#include "aegis/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace aegis {

bool Embedding::is_zero() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

double Embedding::dot(const Embedding& other) const {
  double s = 0.0;
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) s += values[i] * other.values[i];
  return s;
}

double Embedding::norm() const { return std::sqrt(dot(*this)); }

Embedding embed(const Image& crop) {
  if (crop.empty()) throw std::invalid_argument("embed of empty crop");
  const Image small = resample(crop, kEmbedSide, kEmbedSide);

  // Row-wise centering: a uniform band (sunglasses, a shadow line) drops out
  // of the signature instead of dominating it.
  Embedding e;
  for (int y = 0; y < kEmbedSide; ++y) {
    double row_mean = 0.0;
    for (int x = 0; x < kEmbedSide; ++x) row_mean += small.at(x, y);
    row_mean /= kEmbedSide;
    for (int x = 0; x < kEmbedSide; ++x) {
      e.values[static_cast<std::size_t>(y) * kEmbedSide + x] = small.at(x, y) - row_mean;
    }
  }

  const double n = e.norm();
  if (n < 1e-9) return Embedding{};
  for (auto& v : e.values) v /= n;
  return e;
}

double similarity(const Embedding& a, const Embedding& b) {
  return std::clamp(a.dot(b), 0.0, 1.0) * 100.0;
}

void to_json(nlohmann::json& j, const Embedding& e) {
  j = nlohmann::json::array();
  for (double v : e.values) j.push_back(v);
}

void from_json(const nlohmann::json& j, Embedding& e) {
  if (!j.is_array() || j.size() != kEmbeddingDim) {
    throw std::invalid_argument("embedding must be an array of 256 numbers");
  }
  for (std::size_t i = 0; i < kEmbeddingDim; ++i) e.values[i] = j[i].get<double>();
}

}  // namespace aegis
