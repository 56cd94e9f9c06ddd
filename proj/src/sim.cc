#include "bipedmpc/sim.h"

#include <cmath>
#include <stdexcept>

namespace bipedmpc {
namespace {

Vec3 angular_acceleration(const Mat3& inertia, const Mat3& inertia_inv,
                          const Vec3& moment, const Vec3& w) {
  return inertia_inv * (moment - w.cross(inertia * w));
}

void solve_legs(PlantState* s, const RobotParams& params, double dt) {
  const BodyPose pose = s->pose();
  for (int f = 0; f < 2; ++f) {
    LegConfig& leg = s->legs[f];
    const FootContact& c = s->contacts[f];
    const double yaw = c.in_contact ? c.yaw : s->body.euler.z();
    const IkResult ik = inverse_kinematics(params, kFeet[f], pose,
                                           s->foot_position[f], yaw, leg.q);
    if (dt > 0.0) leg.qd = (ik.q - leg.q) / dt;
    leg.q = ik.q;
  }
}

}  // namespace

void SimSettings::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim.dt must be > 0");
  if (!(fall_angle > 0.0)) throw std::invalid_argument("sim.fall_angle must be > 0");
  if (!(swing_bandwidth > 0.0)) {
    throw std::invalid_argument("sim.swing_bandwidth must be > 0");
  }
  if (orthonormalize_every < 1) {
    throw std::invalid_argument("sim.orthonormalize_every must be >= 1");
  }
}

PlantState PlantState::standing(const RobotParams& params, const Terrain& terrain,
                                double height, double x, double y, double yaw) {
  PlantState s;
  s.body.euler = Vec3(0.0, 0.0, yaw);
  s.body.rotation = rotz(yaw);
  s.body.position = Vec3(x, y, terrain.height(x, y) + height);
  s.body.gravity_state = -params.gravity;
  for (int f = 0; f < 2; ++f) {
    s.legs[f].side = kFeet[f];
    s.legs[f].q = crouch_seed();
    Vec3 hip = s.body.position + s.body.rotation * params.hip_offset(kFeet[f]);
    hip.z() = terrain.height(hip.x(), hip.y());
    s.foot_position[f] = hip;
    s.contacts[f].in_contact = true;
    s.contacts[f].anchor = hip;
    s.contacts[f].yaw = yaw;
  }
  solve_legs(&s, params, 0.0);
  return s;
}

std::array<bool, 2> apply_schedule(PlantState* s,
                                   const std::array<bool, 2>& stance,
                                   const Terrain& terrain) {
  std::array<bool, 2> lifted{false, false};
  for (int f = 0; f < 2; ++f) {
    FootContact& c = s->contacts[f];
    if (stance[f] && !c.in_contact) {
      Vec3 p = s->foot_position[f];
      p.z() = terrain.height(p.x(), p.y());
      c.in_contact = true;
      c.held = false;
      c.anchor = p;
      c.yaw = s->body.euler.z();
      s->foot_position[f] = p;
      s->foot_velocity[f].setZero();
    } else if (!stance[f] && c.in_contact) {
      c.in_contact = false;
      c.held = false;
      s->foot_velocity[f].setZero();
      lifted[f] = true;
    }
  }
  return lifted;
}

FootLoad realized_foot_wrench(const RobotParams& params, const LegConfig& leg,
                              const BodyPose& pose, const JointVec& tau) {
  const LegFrames frames = leg_frames(params, leg.side, leg.q, pose);
  LegJacobian j;
  for (int k = 0; k < kLegJoints; ++k) {
    j.block<3, 1>(0, k) = frames.axes[k].cross(frames.foot - frames.origins[k]);
    j.block<3, 1>(3, k) = frames.axes[k];
  }
  const Vec3 lateral = frames.foot_rotation.col(1);
  Eigen::Matrix<double, 5, 5> j5;
  j5.topRows<3>() = j.topRows<3>();
  j5.row(3) = lateral.transpose() * j.bottomRows<3>();
  j5.row(4) = Vec3::UnitZ().transpose() * j.bottomRows<3>();

  constexpr double kDamping = 1e-8;
  const Eigen::Matrix<double, 5, 5> normal =
      j5 * j5.transpose() + kDamping * Eigen::Matrix<double, 5, 5>::Identity();
  const Eigen::Matrix<double, 5, 1> w = normal.ldlt().solve(j5 * tau);

  FootLoad load;
  load.force = w.head<3>();
  load.moment = w(3) * lateral + w(4) * Vec3::UnitZ();
  return load;
}

PlantState step(const PlantState& in, const PlantInput& input,
                const RobotParams& params, const Terrain& terrain,
                const SimSettings& settings) {
  PlantState s = in;
  apply_schedule(&s, input.stance, terrain);
  const double dt = settings.dt;
  BodyState& b = s.body;

  Vec3 force(0.0, 0.0, -params.mass * params.gravity);
  Vec3 moment = Vec3::Zero();
  for (int f = 0; f < 2; ++f) {
    if (!s.contacts[f].in_contact) continue;
    const FootLoad& load = input.loads[f];
    force += load.force;
    moment += (s.contacts[f].anchor - b.position).cross(load.force) + load.moment;
  }

  const Vec3 accel = force / params.mass;
  b.position += b.velocity * dt + 0.5 * accel * dt * dt;
  b.velocity += accel * dt;

  // Euler's equations in the body frame, RK4 with the moment held constant.
  const Mat3 inertia = params.body_inertia();
  const Mat3 inertia_inv = inertia.inverse();
  const Vec3 m_body = b.rotation.transpose() * moment;
  const Vec3 w0 = b.rotation.transpose() * b.angular_velocity;
  auto rate = [&](const Vec3& w) {
    return angular_acceleration(inertia, inertia_inv, m_body, w);
  };
  const Vec3 k1 = rate(w0);
  const Vec3 k2 = rate(w0 + 0.5 * dt * k1);
  const Vec3 k3 = rate(w0 + 0.5 * dt * k2);
  const Vec3 k4 = rate(w0 + dt * k3);
  const Vec3 w1 = w0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  b.rotation = b.rotation * so3_exp(0.5 * (w0 + w1) * dt);
  if ((s.tick + 1) % settings.orthonormalize_every == 0) {
    b.rotation = orthonormalize(b.rotation);
  }
  b.angular_velocity = b.rotation * w1;
  const double cos_pitch = std::hypot(b.rotation(2, 1), b.rotation(2, 2));
  if (cos_pitch > 1e-6) b.euler = euler_from_rotm(b.rotation);

  // Feet: pinned when in contact, critically damped tracking otherwise.
  const double wn = settings.swing_bandwidth;
  for (int f = 0; f < 2; ++f) {
    FootContact& c = s.contacts[f];
    if (c.in_contact) {
      s.foot_position[f] = c.anchor;
      s.foot_velocity[f].setZero();
      continue;
    }
    if (c.held) continue;
    const SwingSample& ref = input.swing[f];
    Vec3& p = s.foot_position[f];
    Vec3& v = s.foot_velocity[f];
    const Vec3 a =
        ref.acceleration + wn * wn * (ref.position - p) + 2.0 * wn * (ref.velocity - v);
    v += a * dt;
    p += v * dt;
    const double ground = terrain.height(p.x(), p.y());
    if (input.swing_progress[f] > 0.5 && p.z() <= ground) {
      p.z() = ground;
      v.setZero();
      c.held = true;
    }
  }

  solve_legs(&s, params, dt);
  s.t = in.t + dt;
  s.tick = in.tick + 1;
  return s;
}

std::optional<std::string> fall_check(const PlantState& s, const Terrain& terrain,
                                      const SimSettings& settings) {
  const BodyState& b = s.body;
  const double cos_pitch = std::hypot(b.rotation(2, 1), b.rotation(2, 2));
  if (cos_pitch <= 1e-6) return "gimbal lock";
  if (std::abs(b.euler.x()) > settings.fall_angle) return "roll limit";
  if (std::abs(b.euler.y()) > settings.fall_angle) return "pitch limit";
  if (b.position.z() < terrain.height(b.position.x(), b.position.y()) +
                           settings.fall_margin) {
    return "body too low";
  }
  return std::nullopt;
}

double mechanical_energy(const BodyState& b, const RobotParams& params) {
  const Vec3 w_body = b.rotation.transpose() * b.angular_velocity;
  return 0.5 * params.mass * b.velocity.squaredNorm() +
         0.5 * w_body.dot(params.body_inertia() * w_body) +
         params.mass * params.gravity * b.position.z();
}

}  // namespace bipedmpc
