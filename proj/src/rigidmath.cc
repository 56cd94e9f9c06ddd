#include "bipedmpc/rigidmath.h"

#include <cmath>
#include <string>

namespace bipedmpc {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("RobotParams: ") + what);
}

}  // namespace

Vec3 RobotParams::hip_offset(Foot foot) const {
  const double side = foot == Foot::kLeft ? 1.0 : -1.0;
  return {0.0, side * 0.5 * body_width, -0.5 * body_height};
}

void RobotParams::validate() const {
  require(std::isfinite(mass) && mass > 0.0, "mass must be positive");
  require(inertia_diag.allFinite() && (inertia_diag.array() > 0.0).all(),
          "inertia must be positive definite");
  require(thigh_length > 0.0 && calf_length > 0.0,
          "link lengths must be positive");
  require(toe_length >= 0.0 && heel_length >= 0.0,
          "foot lengths must be non-negative");
  require(body_width > 0.0 && body_height > 0.0 && body_length > 0.0,
          "body dimensions must be positive");
  require(force_min > 0.0 && force_min < force_max,
          "force bounds must satisfy 0 < force_min < force_max");
  require(friction > 0.0, "friction coefficient must be positive");
  require(max_torque > 0.0, "max_torque must be positive");
  require(max_joint_speed > 0.0, "max_joint_speed must be positive");
  require(gravity > 0.0, "gravity magnitude must be positive");
}

Eigen::Matrix<double, kStateDim, 1> BodyState::to_vector() const {
  Eigen::Matrix<double, kStateDim, 1> x;
  x << euler, position, angular_velocity, velocity, gravity_state;
  return x;
}

BodyState BodyState::from_vector(const Eigen::Ref<const VecX>& x) {
  if (x.size() != kStateDim) {
    throw DimensionMismatch("BodyState expects a 13-entry vector");
  }
  BodyState s;
  s.euler = x.segment<3>(0);
  s.position = x.segment<3>(3);
  s.angular_velocity = x.segment<3>(6);
  s.velocity = x.segment<3>(9);
  s.gravity_state = x(12);
  s.rotation = rotm_from_euler(s.euler);
  return s;
}

Eigen::Matrix<double, 10, 1> ContactWrench::stacked() const {
  Eigen::Matrix<double, 10, 1> u;
  u << feet[0].force, feet[1].force, feet[0].moment, feet[1].moment;
  return u;
}

ContactWrench ContactWrench::from_stacked(const Eigen::Ref<const VecX>& u) {
  if (u.size() != 10) {
    throw DimensionMismatch("ContactWrench expects 10 stacked entries");
  }
  ContactWrench w;
  w.feet[0].force = u.segment<3>(0);
  w.feet[1].force = u.segment<3>(3);
  w.feet[0].moment = u.segment<2>(6);
  w.feet[1].moment = u.segment<2>(8);
  return w;
}

Mat3 rotz(double yaw) {
  const double c = std::cos(yaw), s = std::sin(yaw);
  Mat3 r;
  r << c, -s, 0, s, c, 0, 0, 0, 1;
  return r;
}

Mat3 roty(double pitch) {
  const double c = std::cos(pitch), s = std::sin(pitch);
  Mat3 r;
  r << c, 0, s, 0, 1, 0, -s, 0, c;
  return r;
}

Mat3 rotx(double roll) {
  const double c = std::cos(roll), s = std::sin(roll);
  Mat3 r;
  r << 1, 0, 0, 0, c, -s, 0, s, c;
  return r;
}

Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

Mat3 world_inertia(const Mat3& body_inertia, double yaw) {
  const Mat3 r = rotz(yaw);
  return r * body_inertia * r.transpose();
}

Mat3 rotm_from_euler(const Vec3& rpy) {
  return rotz(rpy.z()) * roty(rpy.y()) * rotx(rpy.x());
}

Vec3 euler_from_rotm(const Mat3& r) {
  const double cos_pitch = std::hypot(r(2, 1), r(2, 2));
  if (cos_pitch < 1e-6) {
    throw GimbalLockError("euler_from_rotm: pitch at +-pi/2");
  }
  return {std::atan2(r(2, 1), r(2, 2)), std::atan2(-r(2, 0), cos_pitch),
          std::atan2(r(1, 0), r(0, 0))};
}

Mat3 so3_exp(const Vec3& w) {
  const double angle = w.norm();
  const Mat3 k = skew(w);
  if (angle < 1e-8) {
    // Second-order Taylor expansion; exact to double precision here.
    return Mat3::Identity() + k + 0.5 * k * k;
  }
  const double a = std::sin(angle) / angle;
  const double b = (1.0 - std::cos(angle)) / (angle * angle);
  return Mat3::Identity() + a * k + b * k * k;
}

Mat3 orthonormalize(const Mat3& m) {
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 r = svd.matrixU() * svd.matrixV().transpose();
  if (r.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    r = u * svd.matrixV().transpose();
  }
  return r;
}

}  // namespace bipedmpc
