#include "bipedmpc/leg.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bipedmpc {

void SwingGains::validate() const {
  if ((kp.array() < 0.0).any() || (kd.array() < 0.0).any()) {
    throw std::invalid_argument("SwingGains: gains must be non-negative");
  }
}

LegFrames leg_frames(const RobotParams& params, Foot side, const JointVec& q,
                     const BodyPose& pose) {
  LegFrames f;
  f.hip = pose.position + pose.rotation * params.hip_offset(side);
  const Mat3 r1 = pose.rotation * rotx(q(0));
  const Mat3 r2 = r1 * rotz(q(1));
  const Mat3 r3 = r2 * roty(q(2));
  const Mat3 r4 = r3 * roty(q(3));
  const Mat3 r5 = r4 * roty(q(4));
  f.knee = f.hip + r3 * Vec3(0.0, 0.0, -params.thigh_length);
  f.foot = f.knee + r4 * Vec3(0.0, 0.0, -params.calf_length);
  f.foot_rotation = r5;

  f.origins = {f.hip, f.hip, f.hip, f.knee, f.foot};
  f.axes = {pose.rotation.col(0), r1.col(2), r2.col(1), r3.col(1), r4.col(1)};
  return f;
}

FootPoints forward_kinematics(const RobotParams& params, const LegConfig& leg,
                              const BodyPose& pose) {
  const LegFrames f = leg_frames(params, leg.side, leg.q, pose);
  return {f.foot, f.hip};
}

namespace {

LegJacobian jacobian_from_frames(const LegFrames& f) {
  LegJacobian j;
  for (int k = 0; k < kLegJoints; ++k) {
    j.block<3, 1>(0, k) = f.axes[k].cross(f.foot - f.origins[k]);
    j.block<3, 1>(3, k) = f.axes[k];
  }
  return j;
}

}  // namespace

LegJacobian jacobian(const RobotParams& params, const LegConfig& leg,
                     const BodyPose& pose) {
  return jacobian_from_frames(leg_frames(params, leg.side, leg.q, pose));
}

Vec3 foot_velocity(const RobotParams& params, const LegConfig& leg,
                   const BodyPose& pose, const BodyTwist& twist) {
  const LegFrames f = leg_frames(params, leg.side, leg.q, pose);
  const LegJacobian j = jacobian_from_frames(f);
  return j.topRows<3>() * leg.qd + twist.linear_velocity +
         twist.angular_velocity.cross(f.foot - pose.position);
}

TorqueResult clamp_torques(const JointVec& tau, double max_torque) {
  TorqueResult r;
  for (int k = 0; k < kLegJoints; ++k) {
    r.tau(k) = std::clamp(tau(k), -max_torque, max_torque);
    if (std::abs(tau(k)) > max_torque) r.saturated = true;
  }
  return r;
}

JointVec stance_torques_raw(const LegJacobian& j, const VecX& u,
                            ModelVariant variant) {
  const auto jv = j.topRows<3>();
  const auto jw = j.bottomRows<3>();
  switch (variant) {
    case ModelVariant::kModel3:
      if (u.size() != 5) break;
      return jv.transpose() * u.head<3>() +
             jw.transpose() * (moment_selector() * u.tail<2>());
    case ModelVariant::kModel2:
      if (u.size() != 6) break;
      return jv.transpose() * u.head<3>() + jw.transpose() * u.tail<3>();
    case ModelVariant::kModel1:
      if (u.size() != 6) break;
      return jv.transpose() * (u.head<3>() + u.tail<3>());
  }
  throw DimensionMismatch("stance_torques: foot input size does not match variant");
}

TorqueResult stance_torques(const RobotParams& params, const LegConfig& leg,
                            const BodyPose& pose, const FootWrench& wrench) {
  VecX u(5);
  u << wrench.force, wrench.moment;
  return clamp_torques(
      stance_torques_raw(jacobian(params, leg, pose), u, ModelVariant::kModel3),
      params.max_torque);
}

Vec3 swing_force(const Vec3& p, const Vec3& pd, const Vec3& p_target,
                 const Vec3& pd_target, const SwingGains& gains) {
  return gains.kp.cwiseProduct(p_target - p) +
         gains.kd.cwiseProduct(pd_target - pd);
}

TorqueResult swing_torques(const RobotParams& params, const LegConfig& leg,
                           const BodyPose& pose, const Vec3& force) {
  const LegJacobian j = jacobian(params, leg, pose);
  return clamp_torques(j.topRows<3>().transpose() * force, params.max_torque);
}

GuardedTarget workspace_guard(const Vec3& hip, const Vec3& target,
                              double reach) {
  const double limit = reach - 1e-3;
  const Vec3 d = target - hip;
  const double dist = d.norm();
  if (dist <= limit) return {target, false};
  return {hip + d * (limit / dist), true};
}

JointVec crouch_seed(double knee_bend) {
  JointVec q;
  q << 0.0, 0.0, -0.5 * knee_bend, knee_bend, -0.5 * knee_bend;
  return q;
}

IkResult inverse_kinematics(const RobotParams& params, Foot side,
                            const BodyPose& pose, const Vec3& target,
                            double foot_yaw, const JointVec& seed) {
  IkResult out;
  const Vec3 hip = pose.position + pose.rotation * params.hip_offset(side);
  const GuardedTarget guarded = workspace_guard(hip, target, params.leg_reach());
  out.projected = guarded.projected;
  const Vec3 normal(-std::sin(foot_yaw), std::cos(foot_yaw), 0.0);

  JointVec q = seed;
  constexpr int kMaxIterations = 30;
  constexpr double kDamping = 1e-6;
  for (int it = 0; it < kMaxIterations; ++it) {
    const LegFrames f = leg_frames(params, side, q, pose);
    const Vec3 sole_x = f.foot_rotation.col(0);
    Eigen::Matrix<double, 5, 1> r;
    r << f.foot - guarded.target, sole_x.z(), sole_x.dot(normal);
    if (r.lpNorm<Eigen::Infinity>() < 1e-11) {
      out.converged = true;
      break;
    }
    Eigen::Matrix<double, 5, 5> jac;
    for (int k = 0; k < kLegJoints; ++k) {
      jac.block<3, 1>(0, k) = f.axes[k].cross(f.foot - f.origins[k]);
      const Vec3 d_sole = f.axes[k].cross(sole_x);
      jac(3, k) = d_sole.z();
      jac(4, k) = d_sole.dot(normal);
    }
    const Eigen::Matrix<double, 5, 5> normal_eq =
        jac.transpose() * jac +
        kDamping * Eigen::Matrix<double, 5, 5>::Identity();
    JointVec dq = -normal_eq.ldlt().solve(jac.transpose() * r);
    // Limit each step so the iteration cannot jump between knee branches.
    const double step = dq.lpNorm<Eigen::Infinity>();
    if (step > 0.3) dq *= 0.3 / step;
    q += dq;
  }
  out.q = q;
  return out;
}

}  // namespace bipedmpc
