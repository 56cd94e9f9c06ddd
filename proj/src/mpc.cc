#include "bipedmpc/mpc.h"

#include <cmath>
#include <limits>

namespace bipedmpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Index ranges of the force points of one foot and the share of the
// vertical force bounds each point carries.
struct ForcePoints {
  std::vector<int> offsets;
  double share = 1.0;
};

ForcePoints force_points(ModelVariant variant, int foot) {
  if (variant == ModelVariant::kModel1) return {{6 * foot, 6 * foot + 3}, 0.5};
  return {{3 * foot}, 1.0};
}

}  // namespace

MpcConfig MpcConfig::from_params(const RobotParams& params) {
  MpcConfig cfg;
  cfg.friction = params.friction;
  cfg.force_min = params.force_min;
  cfg.force_max = params.force_max;
  cfg.max_torque = params.max_torque;
  return cfg;
}

void MpcConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("mpc.horizon must be >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("mpc.dt must be > 0");
  if ((q_weights.array() < 0.0).any()) {
    throw std::invalid_argument("mpc.q weights must be >= 0");
  }
  if (r_force < 0.0 || r_moment < 0.0) {
    throw std::invalid_argument("mpc.r weights must be >= 0");
  }
  if (!(friction > 0.0)) throw std::invalid_argument("mpc friction must be > 0");
  if (!(force_min > 0.0 && force_min < force_max)) {
    throw std::invalid_argument("mpc force bounds must satisfy 0 < min < max");
  }
  if (!(max_torque > 0.0)) throw std::invalid_argument("max torque must be > 0");
}

VecX MpcConfig::input_weights() const {
  const int n = input_dim(variant);
  VecX r = VecX::Constant(n, r_force);
  if (variant != ModelVariant::kModel1) r.tail(n - 6).setConstant(r_moment);
  return r;
}

ReferenceTrajectory build_reference(const Command& cmd, const BodyState& x0,
                                    const GaitSchedule& gait, double t,
                                    const FootInfo& feet,
                                    const RobotParams& params,
                                    const Terrain& terrain, int k, double dt) {
  ReferenceTrajectory ref;
  ref.x_ref.resize(kStateDim * k);
  ref.steps.resize(k);

  const double yaw0 = cmd.yaw.value_or(x0.euler.z());
  const double z = cmd.height + feet.ground_height;
  Vec3 p = x0.position;
  double yaw_sum = 0.0;
  for (int i = 0; i < k; ++i) {
    const double yaw = yaw0 + cmd.yaw_rate * (i + 1) * dt;
    const Vec3 v = rotz(yaw) * Vec3(cmd.vx, cmd.vy, 0.0);
    p += v * dt;
    StateVec x;
    x << cmd.roll, cmd.pitch, yaw, p.x(), p.y(), z, 0.0, 0.0, cmd.yaw_rate,
        v.x(), v.y(), 0.0, -params.gravity;
    ref.x_ref.segment<kStateDim>(kStateDim * i) = x;
    yaw_sum += yaw;
  }
  ref.average_yaw = yaw_sum / k;

  const auto stance = horizon_schedule(t, gait, k, dt);
  for (int f = 0; f < 2; ++f) {
    const Foot foot = kFeet[f];
    Vec3 planned = feet.position[f];
    for (int i = 0; i < k; ++i) {
      ref.steps[i].stance[f] = stance[i][f];
      if (stance[i][f] && i > 0 && !stance[i - 1][f]) {
        // Lands at the start of step i, when the CoM is at state i - 1.
        const StateVec xs = ref.state(i - 1);
        const double yaw = xs(2);
        const Vec3 hip = xs.segment<3>(3) + rotz(yaw) * params.hip_offset(foot);
        const Vec3 v = xs.segment<3>(9);
        planned = foot_placement(hip, v, gait.stance_duration(foot), terrain);
      }
      ref.steps[i].feet[f] = planned;
    }
  }
  return ref;
}

Prediction condense(const MatX& a_hat, const std::vector<MatX>& b_hats) {
  const int k = static_cast<int>(b_hats.size());
  if (k == 0) throw DimensionMismatch("condense: empty horizon");
  const int n = static_cast<int>(a_hat.rows());
  if (a_hat.cols() != n) throw DimensionMismatch("condense: A must be square");
  const int m = static_cast<int>(b_hats[0].cols());
  for (const MatX& b : b_hats) {
    if (b.rows() != n || b.cols() != m) {
      throw DimensionMismatch("condense: B blocks must all be n x m");
    }
  }
  Prediction p;
  p.a_qp.resize(n * k, n);
  p.b_qp = MatX::Zero(n * k, m * k);
  MatX power = a_hat;
  for (int i = 0; i < k; ++i) {
    p.a_qp.middleRows(n * i, n) = power;
    if (i + 1 < k) power = a_hat * power;
    if (i > 0) {
      p.b_qp.block(n * i, 0, n, m * i).noalias() =
          a_hat * p.b_qp.block(n * (i - 1), 0, n, m * i);
    }
    p.b_qp.block(n * i, m * i, n, m) = b_hats[i];
  }
  return p;
}

QuadraticCost build_cost(const Prediction& pred, const VecX& x0,
                         const VecX& x_ref, const VecX& q, const VecX& r) {
  const auto rows = pred.b_qp.rows();
  const auto cols = pred.b_qp.cols();
  const auto n = q.size();
  const auto m = r.size();
  if (x_ref.size() != rows || rows % n != 0 || cols % m != 0 ||
      rows / n != cols / m || x0.size() != n) {
    throw DimensionMismatch("build_cost: inconsistent dimensions");
  }
  const VecX q_stack = q.replicate(rows / n, 1);
  const VecX r_stack = r.replicate(cols / m, 1);
  const VecX sqrt_q = q_stack.cwiseSqrt();

  const MatX sb = sqrt_q.asDiagonal() * pred.b_qp;
  QuadraticCost cost;
  cost.h.noalias() = 2.0 * sb.transpose() * sb;
  cost.h.diagonal() += 2.0 * r_stack;
  const VecX err = pred.a_qp * x0 - x_ref;
  cost.f.noalias() = 2.0 * pred.b_qp.transpose() * q_stack.cwiseProduct(err);
  return cost;
}

ConstraintSet build_constraints(
    const std::vector<std::array<bool, 2>>& stance, const MpcConfig& cfg,
    const std::array<std::optional<LegJacobian>, 2>& jacobians) {
  const int k = static_cast<int>(stance.size());
  const int nu = input_dim(cfg.variant);
  const int n = k * nu;
  const double mu = cfg.friction;

  int rows = 0, eq_rows = 0;
  for (int i = 0; i < k; ++i) {
    for (int f = 0; f < 2; ++f) {
      const int foot_entries =
          static_cast<int>(foot_input_indices(cfg.variant, kFeet[f]).size());
      if (stance[i][f]) {
        rows += 5 * static_cast<int>(force_points(cfg.variant, f).offsets.size());
        if (i == 0 && cfg.torque_constraint_first_step && jacobians[f]) {
          rows += kLegJoints;
        }
      } else {
        eq_rows += foot_entries;
      }
    }
  }

  ConstraintSet cs;
  cs.c = MatX::Zero(rows, n);
  cs.lower = VecX::Constant(rows, -kInf);
  cs.upper = VecX::Constant(rows, kInf);
  cs.a_eq = MatX::Zero(eq_rows, n);
  cs.b_eq = VecX::Zero(eq_rows);

  int r = 0, e = 0;
  for (int i = 0; i < k; ++i) {
    const int base = i * nu;
    for (int f = 0; f < 2; ++f) {
      const std::vector<int> idx = foot_input_indices(cfg.variant, kFeet[f]);
      if (!stance[i][f]) {
        for (int j : idx) cs.a_eq(e++, base + j) = 1.0;
        continue;
      }
      const ForcePoints points = force_points(cfg.variant, f);
      for (int off : points.offsets) {
        const int fx = base + off, fy = fx + 1, fz = fx + 2;
        // F_x - mu F_z <= 0 and F_x + mu F_z >= 0, likewise for F_y.
        for (int tangential : {fx, fy}) {
          cs.c(r, tangential) = 1.0;
          cs.c(r, fz) = -mu;
          cs.upper(r++) = 0.0;
          cs.c(r, tangential) = 1.0;
          cs.c(r, fz) = mu;
          cs.lower(r++) = 0.0;
        }
        cs.c(r, fz) = 1.0;
        cs.lower(r) = points.share * cfg.force_min;
        cs.upper(r++) = points.share * cfg.force_max;
      }
      if (i == 0 && cfg.torque_constraint_first_step && jacobians[f]) {
        const int entries = static_cast<int>(idx.size());
        for (int j = 0; j < entries; ++j) {
          VecX unit = VecX::Zero(entries);
          unit(j) = 1.0;
          const JointVec col = stance_torques_raw(*jacobians[f], unit, cfg.variant);
          for (int t = 0; t < kLegJoints; ++t) cs.c(r + t, base + idx[j]) = col(t);
        }
        for (int t = 0; t < kLegJoints; ++t) {
          cs.lower(r + t) = -cfg.max_torque;
          cs.upper(r + t) = cfg.max_torque;
        }
        r += kLegJoints;
      }
    }
  }
  return cs;
}

CondensedProblem build_problem(
    const BodyState& x0, const ReferenceTrajectory& ref,
    const RobotParams& params, const MpcConfig& cfg,
    const std::array<std::optional<LegJacobian>, 2>& jacobians) {
  const int k = ref.horizon();
  CondensedProblem out;
  out.b_hats.reserve(k);
  for (int i = 0; i < k; ++i) {
    ContactGeometry geometry;
    geometry.feet = ref.steps[i].feet;
    double inertia_yaw = ref.average_yaw;
    if (i == 0) {
      geometry.com = x0.position;
      geometry.yaw = x0.euler.z();
      inertia_yaw = x0.euler.z();
    } else {
      const StateVec xs = ref.state(i - 1);
      geometry.com = xs.segment<3>(3);
      geometry.yaw = xs(2);
    }
    ContinuousModel model =
        build_continuous(params, inertia_yaw, geometry, cfg.variant);
    if (inertia_yaw != ref.average_yaw) {
      model.a = build_continuous(params, ref.average_yaw, geometry, cfg.variant).a;
    }
    const DiscreteModel d = discretize(model, cfg.dt);
    if (i == 0) out.a_hat = d.a;
    out.b_hats.push_back(d.b);
  }
  out.prediction = condense(out.a_hat, out.b_hats);

  const QuadraticCost cost = build_cost(out.prediction, x0.to_vector(),
                                        ref.x_ref, cfg.q_weights,
                                        cfg.input_weights());
  std::vector<std::array<bool, 2>> stance(k);
  for (int i = 0; i < k; ++i) stance[i] = ref.steps[i].stance;
  ConstraintSet cs = build_constraints(stance, cfg, jacobians);

  out.qp.h = cost.h;
  out.qp.f = cost.f;
  out.qp.c = std::move(cs.c);
  out.qp.c_lower = std::move(cs.lower);
  out.qp.c_upper = std::move(cs.upper);
  out.qp.a_eq = std::move(cs.a_eq);
  out.qp.b_eq = std::move(cs.b_eq);
  return out;
}

Mpc::Mpc(RobotParams params, MpcConfig cfg)
    : params_(std::move(params)), cfg_(cfg), solver_(cfg.qp) {
  params_.validate();
  cfg_.validate();
  last_input_ = VecX::Zero(input_dim(cfg_.variant));
}

MpcResult Mpc::solve(const BodyState& x0, const ReferenceTrajectory& ref,
                     const std::array<std::optional<LegJacobian>, 2>& jacobians) {
  if (ref.horizon() != cfg_.horizon) {
    throw DimensionMismatch("Mpc::solve: reference length differs from horizon");
  }
  const CondensedProblem problem = build_problem(x0, ref, params_, cfg_, jacobians);
  const QpSolution* warm =
      cfg_.warm_start && previous_ ? &previous_.value() : nullptr;

  MpcResult result;
  result.qp = solver_.solve(problem.qp, warm);
  const int nu = input_dim(cfg_.variant);
  if (result.qp.status == QpStatus::kOptimal) {
    result.u_all = result.qp.u;
    result.u_first = result.qp.u.head(nu);
    last_input_ = result.u_first;
    previous_ = result.qp;
    return result;
  }
  ++failures_;
  result.used_fallback = true;
  result.u_first = last_input_;
  for (int f = 0; f < 2; ++f) {
    if (ref.steps[0].stance[f]) continue;
    for (int j : foot_input_indices(cfg_.variant, kFeet[f])) result.u_first(j) = 0.0;
  }
  result.u_all = VecX::Zero(nu * cfg_.horizon);
  result.u_all.head(nu) = result.u_first;
  previous_.reset();
  return result;
}

FootWrench foot_wrench_from_input(const VecX& u, ModelVariant variant, Foot foot,
                                  const RobotParams& params, double yaw) {
  if (u.size() != input_dim(variant)) {
    throw DimensionMismatch("foot_wrench_from_input: wrong input size");
  }
  const int f = index(foot);
  FootWrench w;
  switch (variant) {
    case ModelVariant::kModel3:
      w.force = u.segment<3>(3 * f);
      w.moment = u.segment<2>(6 + 2 * f);
      break;
    case ModelVariant::kModel2:
      w.force = u.segment<3>(3 * f);
      w.moment = u.segment<2>(6 + 3 * f + 1);
      break;
    case ModelVariant::kModel1: {
      const Vec3 toe = u.segment<3>(6 * f);
      const Vec3 heel = u.segment<3>(6 * f + 3);
      const Vec3 heading = rotz(yaw).col(0);
      const Vec3 m = (params.toe_length * heading).cross(toe) +
                     (-params.heel_length * heading).cross(heel);
      w.force = toe + heel;
      w.moment = m.tail<2>();
      break;
    }
  }
  return w;
}

}  // namespace bipedmpc
