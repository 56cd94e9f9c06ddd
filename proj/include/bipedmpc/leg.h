#pragma once

#include <array>

#include "bipedmpc/dynamics.h"
#include "bipedmpc/rigidmath.h"

namespace bipedmpc {

inline constexpr int kLegJoints = 5;
using JointVec = Eigen::Matrix<double, kLegJoints, 1>;
using LegJacobian = Eigen::Matrix<double, 6, kLegJoints>;

/// Joint order: [hip roll (x), hip yaw (z), hip pitch, knee pitch,
/// ankle pitch (y)]. q = 0 is a straight leg pointing down with the sole
/// level. The foot point is the ankle joint, at the middle of the sole.
struct LegConfig {
  Foot side = Foot::kLeft;
  JointVec q = JointVec::Zero();
  JointVec qd = JointVec::Zero();
};

struct BodyPose {
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();
};

struct BodyTwist {
  Vec3 angular_velocity = Vec3::Zero();  // world
  Vec3 linear_velocity = Vec3::Zero();   // world, of the body origin (CoM)
};

struct SwingGains {
  Vec3 kp{700.0, 700.0, 900.0};  // N/m
  Vec3 kd{10.0, 10.0, 10.0};     // N s/m
  void validate() const;
};

/// Joint frames along the chain, in world coordinates.
struct LegFrames {
  std::array<Vec3, kLegJoints> origins;
  std::array<Vec3, kLegJoints> axes;
  Vec3 hip = Vec3::Zero();
  Vec3 knee = Vec3::Zero();
  Vec3 foot = Vec3::Zero();
  Mat3 foot_rotation = Mat3::Identity();
};

LegFrames leg_frames(const RobotParams& params, Foot side, const JointVec& q,
                     const BodyPose& pose);

struct FootPoints {
  Vec3 foot = Vec3::Zero();
  Vec3 hip = Vec3::Zero();
};

FootPoints forward_kinematics(const RobotParams& params, const LegConfig& leg,
                              const BodyPose& pose);

/// Rows [J_v; J_w]: foot-point linear and foot angular velocity per unit
/// joint rate, body held fixed.
LegJacobian jacobian(const RobotParams& params, const LegConfig& leg,
                     const BodyPose& pose);

/// J_v qd plus the velocity of the foot point carried by the body twist.
Vec3 foot_velocity(const RobotParams& params, const LegConfig& leg,
                   const BodyPose& pose, const BodyTwist& twist);

struct TorqueResult {
  JointVec tau = JointVec::Zero();
  bool saturated = false;
};

/// Clamps each entry to [-max_torque, max_torque].
TorqueResult clamp_torques(const JointVec& tau, double max_torque);

/// Joint torques producing this foot's share of the MPC input. `foot_input`
/// holds the entries listed by foot_input_indices(variant, side), in order.
///  Model3: tau = J_v^T F + J_w^T L M
///  Model2: tau = J_v^T F + J_w^T M
///  Model1: tau = J_v^T (F_toe + F_heel)
/// The sign convention is that of the wrench the ground applies to the
/// robot, so that the torques realize it.
JointVec stance_torques_raw(const LegJacobian& j, const VecX& foot_input,
                            ModelVariant variant);

/// Model3 mapping with saturation against params.max_torque.
TorqueResult stance_torques(const RobotParams& params, const LegConfig& leg,
                            const BodyPose& pose, const FootWrench& wrench);

/// F = K_P (p_d - p) + K_D (pd_d - pd), element-wise gains.
Vec3 swing_force(const Vec3& p, const Vec3& pd, const Vec3& p_target,
                 const Vec3& pd_target, const SwingGains& gains);

/// tau = J_v^T F, saturated.
TorqueResult swing_torques(const RobotParams& params, const LegConfig& leg,
                           const BodyPose& pose, const Vec3& force);

struct GuardedTarget {
  Vec3 target = Vec3::Zero();
  bool projected = false;
};

/// Pulls targets farther than reach - 1e-3 from the hip onto that sphere.
GuardedTarget workspace_guard(const Vec3& hip, const Vec3& target,
                              double reach);

struct IkResult {
  JointVec q = JointVec::Zero();
  bool converged = false;
  bool projected = false;
};

/// Joint angles placing the foot point at `target` with the sole level and
/// its heading at `foot_yaw`. Damped Newton iteration from `seed`; targets
/// outside the workspace are projected first.
IkResult inverse_kinematics(const RobotParams& params, Foot side,
                            const BodyPose& pose, const Vec3& target,
                            double foot_yaw, const JointVec& seed);

/// A bent-knee seed for the inverse kinematics.
JointVec crouch_seed(double knee_bend = 0.6);

}  // namespace bipedmpc
