#include "bipedmpc/terrain.h"

#include <cmath>
#include <limits>

#include <gtest/gtest.h>

namespace bipedmpc {
namespace {

TEST(Terrain, FlatByDefault) {
  const Terrain t;
  EXPECT_TRUE(t.flat());
  EXPECT_EQ(t.height(-3.0, 1.0), 0.0);
  EXPECT_EQ(t.height(100.0, -2.0), 0.0);
}

TEST(Terrain, SingleStair) {
  const Terrain t({{0.5, 0.075}});
  EXPECT_EQ(t.height(0.49, 0.0), 0.0);
  EXPECT_EQ(t.height(0.5, 0.0), 0.075);
  EXPECT_EQ(t.height(7.0, 0.3), 0.075);
}

TEST(Terrain, SegmentStartBelongsToThatSegment) {
  const Terrain t({{0.3, 0.02}, {0.55, 0.075}, {0.85, 0.0}});
  EXPECT_EQ(t.height(0.3, 0.0), 0.02);
  EXPECT_EQ(t.height(std::nextafter(0.55, 0.0), 0.0), 0.02);
  EXPECT_EQ(t.height(0.55, 0.0), 0.075);
  EXPECT_EQ(t.height(0.85, 0.0), 0.0);
  EXPECT_EQ(t.height(-1.0, 0.0), 0.0);
}

TEST(Terrain, IndependentOfY) {
  const Terrain t({{0.0, 0.04}, {1.0, 0.01}});
  for (double y : {-1.0, 0.0, 0.097, 5.0}) {
    EXPECT_EQ(t.height(0.5, y), 0.04);
    EXPECT_EQ(terrain_height(t, 1.5, y), 0.01);
  }
}

TEST(Terrain, RejectsInvalidSegments) {
  EXPECT_THROW(Terrain({{1.0, 0.1}, {1.0, 0.2}}), std::invalid_argument);
  EXPECT_THROW(Terrain({{1.0, 0.1}, {0.5, 0.2}}), std::invalid_argument);
  EXPECT_THROW(Terrain({{std::numeric_limits<double>::quiet_NaN(), 0.1}}),
               std::invalid_argument);
  EXPECT_THROW(Terrain({{0.0, std::numeric_limits<double>::infinity()}}),
               std::invalid_argument);
}

}  // namespace
}  // namespace bipedmpc
