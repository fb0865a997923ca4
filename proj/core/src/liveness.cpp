#include "aegis/liveness.hpp"

#include <cstdlib>
#include <stdexcept>

namespace aegis {

double laplacian_energy(const Image& crop) {
  if (crop.width < 3 || crop.height < 3) throw std::invalid_argument("laplacian_energy needs at least 3x3");
  long long total = 0;
  for (int y = 1; y + 1 < crop.height; ++y) {
    for (int x = 1; x + 1 < crop.width; ++x) {
      const int lap = 4 * crop.at(x, y) - crop.at(x - 1, y) - crop.at(x + 1, y) - crop.at(x, y - 1) -
                      crop.at(x, y + 1);
      total += std::abs(lap);
    }
  }
  const long long interior = static_cast<long long>(crop.width - 2) * (crop.height - 2);
  return static_cast<double>(total) / static_cast<double>(interior);
}

LivenessVerdict assess_liveness(const Image& crop, double threshold) {
  const double score = laplacian_energy(crop);
  return {score, threshold, score >= threshold};
}

}  // namespace aegis
