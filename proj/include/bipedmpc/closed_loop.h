#pragma once

#include <array>
#include <string>
#include <vector>

#include "bipedmpc/leg.h"
#include "bipedmpc/mpc.h"
#include "bipedmpc/rigidmath.h"
#include "bipedmpc/scenario.h"

namespace bipedmpc {

struct LogRow {
  double t = 0.0;
  BodyState body;
  std::array<FootWrench, 2> wrench;  // commanded, zero for feet not in contact
  std::array<JointVec, 2> tau{JointVec::Zero(), JointVec::Zero()};
  std::array<bool, 2> stance{true, true};  // foot in contact
  int qp_iterations = -1;                   // -1 on ticks without a solve
  double qp_time_us = -1.0;                 // -1 unless timing is recorded
  Command command;
  std::array<Vec3, 2> foot_position{Vec3::Zero(), Vec3::Zero()};
};

struct SimLog {
  double dt = 0.001;
  std::vector<LogRow> rows;
  bool fell = false;
  std::string fall_reason;
  int mpc_solves = 0;
  int solver_failures = 0;
  int saturated_ticks = 0;
  /// Wall time and iteration count of every solve, always collected.
  std::vector<double> solve_time_us;
  std::vector<int> solve_iterations;
};

/// Closed loop at the plant rate: each tick updates contacts from the gait,
/// re-solves the MPC every round(mpc.dt / sim.dt) ticks (first at t = 0),
/// maps wrenches and swing forces to joint torques, logs, then steps the
/// plant. Stops after the tick on which a fall is detected.
SimLog run_scenario(const ScenarioConfig& config);

}  // namespace bipedmpc
