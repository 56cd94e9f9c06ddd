#pragma once

#include <array>
#include <optional>
#include <string>

#include "bipedmpc/gait.h"
#include "bipedmpc/leg.h"
#include "bipedmpc/rigidmath.h"
#include "bipedmpc/terrain.h"

namespace bipedmpc {

struct FootContact {
  bool in_contact = false;
  Vec3 anchor = Vec3::Zero();  // world, fixed while in contact
  double yaw = 0.0;            // sole heading while in contact
  bool held = false;           // swing foot resting on terrain before its stance
};

/// Plant state: a single rigid body with two massless 5-DoF legs. Feet in
/// contact are pinned to their anchors.
struct PlantState {
  BodyState body;
  std::array<FootContact, 2> contacts;
  std::array<LegConfig, 2> legs;
  std::array<Vec3, 2> foot_position{Vec3::Zero(), Vec3::Zero()};
  std::array<Vec3, 2> foot_velocity{Vec3::Zero(), Vec3::Zero()};
  double t = 0.0;
  long tick = 0;

  BodyPose pose() const { return {body.rotation, body.position}; }

  /// Level body at `height` above the terrain under (x, y) with both feet
  /// in contact directly below the hips.
  static PlantState standing(const RobotParams& params, const Terrain& terrain,
                             double height, double x = 0.0, double y = 0.0,
                             double yaw = 0.0);
};

/// Wrench the ground applies to the robot at one foot point, world frame.
struct FootLoad {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};

struct PlantInput {
  std::array<FootLoad, 2> loads;
  std::array<bool, 2> stance{true, true};  // scheduled contact this tick
  std::array<SwingSample, 2> swing;        // references for swing feet
  std::array<double, 2> swing_progress{0.0, 0.0};
};

struct SimSettings {
  double dt = 0.001;            // s
  double fall_angle = 0.6;      // rad
  double fall_margin = 0.1;     // m above terrain
  double swing_bandwidth = 150.0;  // rad/s, critically damped foot tracking
  int orthonormalize_every = 100;  // ticks
  void validate() const;
};

/// Touchdown for scheduled-stance feet not yet in contact (anchor at the
/// current foot point, dropped onto the terrain) and lift-off for feet whose
/// stance has ended. Returns which feet lifted off.
std::array<bool, 2> apply_schedule(PlantState* state,
                                   const std::array<bool, 2>& stance,
                                   const Terrain& terrain);

/// The part of a joint-torque vector a line foot can push against: force
/// plus moments about the sole's lateral axis and world z, found from
/// J5^T w = tau.
FootLoad realized_foot_wrench(const RobotParams& params, const LegConfig& leg,
                              const BodyPose& pose, const JointVec& tau);

/// Advances one tick. Loads act only at feet in contact.
PlantState step(const PlantState& state, const PlantInput& input,
                const RobotParams& params, const Terrain& terrain,
                const SimSettings& settings);

/// Reason string when the body has fallen; empty otherwise.
std::optional<std::string> fall_check(const PlantState& state,
                                      const Terrain& terrain,
                                      const SimSettings& settings);

/// Translational plus rotational kinetic and gravitational potential energy.
double mechanical_energy(const BodyState& body, const RobotParams& params);

}  // namespace bipedmpc
