#include "bipedmpc/closed_loop.h"

#include <chrono>
#include <cmath>
#include <random>

#include "bipedmpc/gait.h"
#include "bipedmpc/sim.h"

namespace bipedmpc {
namespace {

void perturb_initial_state(PlantState* plant, const RobotParams& params,
                           std::uint64_t seed, double sigma) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  BodyState& b = plant->body;
  for (int i = 0; i < 3; ++i) b.position(i) += normal(rng);
  b.euler.x() += normal(rng);
  b.euler.y() += normal(rng);
  b.rotation = rotm_from_euler(b.euler);
  for (int f = 0; f < 2; ++f) {
    const IkResult ik =
        inverse_kinematics(params, kFeet[f], plant->pose(), plant->foot_position[f],
                           plant->contacts[f].yaw, plant->legs[f].q);
    plant->legs[f].q = ik.q;
  }
}

}  // namespace

SimLog run_scenario(const ScenarioConfig& config) {
  config.validate();
  const RobotParams& params = config.robot;
  const Terrain& terrain = config.terrain;
  MpcConfig mpc_cfg = config.mpc;
  mpc_cfg.friction = params.friction;
  mpc_cfg.force_min = params.force_min;
  mpc_cfg.force_max = params.force_max;
  mpc_cfg.max_torque = params.max_torque;
  const ModelVariant variant = mpc_cfg.variant;
  const GaitSchedule gait = config.schedule();
  Mpc mpc(params, mpc_cfg);

  const double dt = config.sim.dt;
  const long every = std::lround(mpc_cfg.dt / dt);
  const long last_tick = std::lround(config.duration / dt);

  const double h0 =
      config.init_height > 0.0 ? config.init_height : config.cmd_height.at(0.0);
  PlantState plant = PlantState::standing(params, terrain, h0, config.init_x,
                                          config.init_y, config.init_yaw);
  if (config.init_noise > 0.0) {
    perturb_initial_state(&plant, params, config.seed, config.init_noise);
  }

  SimLog log;
  log.dt = dt;
  log.rows.reserve(last_tick + 1);

  double yaw_desired = plant.body.euler.z();
  std::array<SwingTrajectory, 2> swing;
  std::array<double, 2> swing_start{0.0, 0.0};
  std::array<double, 2> ground{plant.contacts[0].anchor.z(),
                               plant.contacts[1].anchor.z()};
  VecX u = VecX::Zero(input_dim(variant));

  for (long n = 0;; ++n) {
    const double t = n * dt;
    const ContactState contact = contact_state(t, gait);
    const std::array<bool, 2> lifted = apply_schedule(&plant, contact.stance, terrain);
    for (int f = 0; f < 2; ++f) {
      if (lifted[f]) {
        swing[f].lift_off = plant.foot_position[f];
        swing[f].target = plant.foot_position[f];
        swing[f].apex_height = config.swing_height;
        swing[f].duration = gait.swing_duration(kFeet[f]);
        swing_start[f] = t;
      }
      if (plant.contacts[f].in_contact) ground[f] = plant.contacts[f].anchor.z();
    }

    Command cmd;
    cmd.vx = config.cmd_vx.at(t);
    cmd.vy = config.cmd_vy.at(t);
    cmd.yaw_rate = config.cmd_yaw_rate.at(t);
    cmd.height = config.cmd_height.at(t);
    cmd.roll = config.cmd_roll.at(t);
    cmd.pitch = config.cmd_pitch.at(t);
    cmd.yaw = yaw_desired;

    const BodyPose pose = plant.pose();
    const BodyState& body = plant.body;
    Vec3 planar_velocity = body.velocity;
    planar_velocity.z() = 0.0;
    for (int f = 0; f < 2; ++f) {
      if (plant.contacts[f].in_contact) continue;
      const double remaining =
          std::max(0.0, swing_start[f] + swing[f].duration - t);
      const Vec3 hip = body.position +
                       rotz(body.euler.z()) * params.hip_offset(kFeet[f]) +
                       planar_velocity * remaining;
      swing[f].target = foot_placement(hip, planar_velocity,
                                       gait.stance_duration(kFeet[f]), terrain);
    }

    LogRow row;
    if (n % every == 0) {
      FootInfo feet;
      feet.position = plant.foot_position;
      feet.ground_height = 0.5 * (ground[0] + ground[1]);
      const ReferenceTrajectory ref =
          build_reference(cmd, body, gait, t, feet, params, terrain,
                          mpc_cfg.horizon, mpc_cfg.dt);
      std::array<std::optional<LegJacobian>, 2> jacobians;
      for (int f = 0; f < 2; ++f) {
        if (plant.contacts[f].in_contact && contact.stance[f]) {
          jacobians[f] = jacobian(params, plant.legs[f], pose);
        }
      }
      const MpcResult result = mpc.solve(body, ref, jacobians);
      u = result.u_first;
      ++log.mpc_solves;
      const double us = result.qp.wall_time * 1e6;
      log.solve_time_us.push_back(us);
      log.solve_iterations.push_back(result.qp.iterations);
      row.qp_iterations = result.qp.iterations;
      if (config.record_timing) row.qp_time_us = us;
    }

    PlantInput input;
    input.stance = contact.stance;
    bool saturated = false;
    for (int f = 0; f < 2; ++f) {
      const Foot foot = kFeet[f];
      const LegConfig& leg = plant.legs[f];
      if (plant.contacts[f].in_contact) {
        const std::vector<int> idx = foot_input_indices(variant, foot);
        VecX foot_u(idx.size());
        for (size_t j = 0; j < idx.size(); ++j) foot_u(j) = u(idx[j]);
        const TorqueResult tau = clamp_torques(
            stance_torques_raw(jacobian(params, leg, pose), foot_u, variant),
            params.max_torque);
        input.loads[f] = realized_foot_wrench(params, leg, pose, tau.tau);
        row.tau[f] = tau.tau;
        row.wrench[f] = foot_wrench_from_input(u, variant, foot, params,
                                               plant.contacts[f].yaw);
        saturated = saturated || tau.saturated;
      } else {
        const double progress = (t - swing_start[f]) / swing[f].duration;
        const SwingSample ref = swing_reference(swing[f], progress);
        const Vec3 foot_velocity = plant.foot_velocity[f];
        const Vec3 force = swing_force(plant.foot_position[f], foot_velocity,
                                       ref.position, ref.velocity, config.swing_gains);
        const TorqueResult tau = swing_torques(params, leg, pose, force);
        row.tau[f] = tau.tau;
        input.swing[f] = ref;
        input.swing_progress[f] = progress;
        saturated = saturated || tau.saturated;
      }
    }
    if (saturated) ++log.saturated_ticks;

    row.t = t;
    row.body = body;
    row.stance = {plant.contacts[0].in_contact, plant.contacts[1].in_contact};
    row.command = cmd;
    row.foot_position = plant.foot_position;
    log.rows.push_back(row);

    if (log.fell || n == last_tick) break;
    plant = step(plant, input, params, terrain, config.sim);
    yaw_desired += cmd.yaw_rate * dt;
    if (const auto reason = fall_check(plant, terrain, config.sim)) {
      log.fell = true;
      log.fall_reason = *reason;
    }
  }
  log.solver_failures = mpc.failure_count();
  return log;
}

}  // namespace bipedmpc
