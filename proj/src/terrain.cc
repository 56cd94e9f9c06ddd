#include "bipedmpc/terrain.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bipedmpc {

Terrain::Terrain(std::vector<StairSegment> segments)
    : segments_(std::move(segments)) {
  for (size_t i = 0; i < segments_.size(); ++i) {
    if (!std::isfinite(segments_[i].x_start) ||
        !std::isfinite(segments_[i].height)) {
      throw std::invalid_argument("Terrain: segment values must be finite");
    }
    if (i > 0 && !(segments_[i].x_start > segments_[i - 1].x_start)) {
      throw std::invalid_argument(
          "Terrain: segments must be sorted by x_start without overlap");
    }
  }
}

double Terrain::height(double x, double /*y*/) const {
  const auto it = std::upper_bound(
      segments_.begin(), segments_.end(), x,
      [](double value, const StairSegment& s) { return value < s.x_start; });
  if (it == segments_.begin()) return 0.0;
  return std::prev(it)->height;
}

}  // namespace bipedmpc
