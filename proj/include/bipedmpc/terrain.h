#pragma once

#include <vector>

namespace bipedmpc {

struct StairSegment {
  double x_start = 0.0;  // m
  double height = 0.0;   // m
};

/// Piecewise-constant heightfield along x. Height is 0 before the first
/// segment; a segment covers [x_start, next x_start).
class Terrain {
 public:
  Terrain() = default;
  /// Throws std::invalid_argument unless segments are strictly increasing in
  /// x_start with finite values.
  explicit Terrain(std::vector<StairSegment> segments);

  double height(double x, double y) const;
  const std::vector<StairSegment>& segments() const { return segments_; }
  bool flat() const { return segments_.empty(); }

 private:
  std::vector<StairSegment> segments_;
};

inline double terrain_height(const Terrain& terrain, double x, double y) {
  return terrain.height(x, y);
}

}  // namespace bipedmpc
