#pragma once

#include "aegis/image.hpp"

namespace aegis {

struct LivenessVerdict {
  double score = 0.0;
  double threshold = 0.0;
  bool is_live = false;
};

/// Mean absolute 4-neighbour Laplacian over interior pixels.
/// Throws std::invalid_argument for crops smaller than 3x3.
double laplacian_energy(const Image& crop);

LivenessVerdict assess_liveness(const Image& crop, double threshold);

}  // namespace aegis
