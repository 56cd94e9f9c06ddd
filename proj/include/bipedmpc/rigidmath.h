#pragma once

#include <array>
#include <stdexcept>

#include <Eigen/Dense>

namespace bipedmpc {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Length of the MPC state [Θ, p_c, ω, ṗ_c, g].
inline constexpr int kStateDim = 13;
inline constexpr double kGravity = 9.81;

enum class Foot { kLeft = 0, kRight = 1 };
inline constexpr std::array<Foot, 2> kFeet = {Foot::kLeft, Foot::kRight};
inline constexpr int index(Foot foot) { return static_cast<int>(foot); }

class GimbalLockError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Physical and actuator parameters of the 10-DoF biped. Defaults are the
/// robot the controller was designed for; anything loaded from a config
/// goes through validate() before use.
struct RobotParams {
  double mass = 11.84;                    // kg
  Vec3 inertia_diag{0.0443, 0.0535, 0.0214};  // body frame, kg m^2
  double body_length = 0.114;             // m
  double body_width = 0.194;
  double body_height = 0.247;
  double thigh_length = 0.2;
  double calf_length = 0.2;
  double toe_length = 0.09;
  double heel_length = 0.05;
  double max_torque = 33.5;               // N m
  double max_joint_speed = 21.0;          // rad/s
  double friction = 0.6;
  double force_min = 5.0;                 // N, vertical force bounds
  double force_max = 500.0;
  double gravity = kGravity;

  Mat3 body_inertia() const { return inertia_diag.asDiagonal(); }
  /// Hip joint location in the body frame for the given leg.
  Vec3 hip_offset(Foot foot) const;
  double leg_reach() const { return thigh_length + calf_length; }

  /// Throws std::invalid_argument naming the first violated invariant.
  void validate() const;
};

/// Rigid-body state. `rotation` is the plant's ground truth; `euler` is kept
/// consistent with it (ZYX, roll-pitch-yaw) by whoever constructs the state.
struct BodyState {
  Vec3 euler = Vec3::Zero();             // [roll, pitch, yaw]
  Vec3 position = Vec3::Zero();          // CoM, world
  Vec3 angular_velocity = Vec3::Zero();  // world
  Vec3 velocity = Vec3::Zero();          // CoM, world
  double gravity_state = -kGravity;
  Mat3 rotation = Mat3::Identity();

  /// The 13-entry MPC state vector.
  Eigen::Matrix<double, kStateDim, 1> to_vector() const;
  /// Builds a state from an MPC vector; rotation is rebuilt from the angles.
  static BodyState from_vector(const Eigen::Ref<const VecX>& x);
};

/// Per-foot contact force and the two moments (about y and z) a line foot
/// can transmit.
struct FootWrench {
  Vec3 force = Vec3::Zero();
  Vec2 moment = Vec2::Zero();  // [M_y, M_z]

  bool is_zero() const { return force.isZero(0.0) && moment.isZero(0.0); }
};

struct ContactWrench {
  std::array<FootWrench, 2> feet;

  FootWrench& operator[](Foot f) { return feet[index(f)]; }
  const FootWrench& operator[](Foot f) const { return feet[index(f)]; }

  /// u = [F_1, F_2, M_1, M_2], 10 entries.
  Eigen::Matrix<double, 10, 1> stacked() const;
  static ContactWrench from_stacked(const Eigen::Ref<const VecX>& u);
};

Mat3 rotz(double yaw);
Mat3 roty(double pitch);
Mat3 rotx(double roll);

/// Cross-product matrix: skew(v) * w == v.cross(w).
Mat3 skew(const Vec3& v);

/// Yaw-only approximation of the world-frame inertia, Rz I_b Rz^T.
Mat3 world_inertia(const Mat3& body_inertia, double yaw);

/// ZYX convention: R = Rz(yaw) Ry(pitch) Rx(roll).
Mat3 rotm_from_euler(const Vec3& rpy);
/// Inverse of rotm_from_euler; throws GimbalLockError when |cos(pitch)| < 1e-6.
Vec3 euler_from_rotm(const Mat3& rotation);

/// Rodrigues formula for exp([w]x).
Mat3 so3_exp(const Vec3& rotation_vector);

/// Nearest rotation matrix (polar decomposition through SVD).
Mat3 orthonormalize(const Mat3& m);

}  // namespace bipedmpc
