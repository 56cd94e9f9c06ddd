#pragma once

#include <array>
#include <string>
#include <vector>

#include "bipedmpc/rigidmath.h"
#include "bipedmpc/terrain.h"

namespace bipedmpc {

enum class GaitType { kStand, kWalk, kHop, kRun };

const char* to_string(GaitType type);
/// Accepts "stand", "walk", "hop", "run"; throws std::invalid_argument.
GaitType parse_gait_type(const std::string& name);

/// Timing-only gait. A foot is in stance while its phase
/// frac(t / period - offset) is below its stance fraction.
struct GaitSchedule {
  GaitType type = GaitType::kStand;
  double period = 0.3;  // s
  std::array<double, 2> offsets{0.0, 0.0};
  std::array<double, 2> stance_fraction{1.0, 1.0};

  /// Standard timings: walk alternates with 0.5 offset and 0.5 stance;
  /// hop keeps both feet down for the first 3/4 of the cycle; run
  /// alternates with 0.4 stance (experimental).
  static GaitSchedule make(GaitType type, double period = 0.3);

  void validate() const;
  double stance_duration(Foot foot) const {
    return stance_fraction[index(foot)] * period;
  }
  double swing_duration(Foot foot) const {
    return (1.0 - stance_fraction[index(foot)]) * period;
  }
};

struct ContactState {
  std::array<bool, 2> stance{true, true};
  /// Progress through the current stance or swing sub-phase, in [0, 1).
  std::array<double, 2> progress{0.0, 0.0};

  bool operator==(const ContactState& o) const { return stance == o.stance; }
};

ContactState contact_state(double t, const GaitSchedule& schedule);

/// Row i is contact_state(t + i * dt).stance.
std::vector<std::array<bool, 2>> horizon_schedule(double t,
                                                  const GaitSchedule& schedule,
                                                  int k, double dt);

/// Touchdown target p_hip + v * dt_stance / 2 in x and y, on the terrain.
Vec3 foot_placement(const Vec3& hip, const Vec3& com_velocity,
                    double stance_duration, const Terrain& terrain);

struct SwingTrajectory {
  Vec3 lift_off = Vec3::Zero();
  Vec3 target = Vec3::Zero();
  double apex_height = 0.08;  // m above the chord
  double duration = 0.15;     // s
};

struct SwingSample {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();      // m/s
  Vec3 acceleration = Vec3::Zero();  // m/s^2
};

/// Smoothstep interpolation in x and y, a raised-cosine bump in z. `s` is
/// the normalized swing phase, clamped to [0, 1].
SwingSample swing_reference(const SwingTrajectory& traj, double s);

}  // namespace bipedmpc
