#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <vector>

#include "bipedmpc/dynamics.h"
#include "bipedmpc/gait.h"
#include "bipedmpc/leg.h"
#include "bipedmpc/qp_solver.h"
#include "bipedmpc/rigidmath.h"
#include "bipedmpc/terrain.h"

namespace bipedmpc {

using StateVec = Eigen::Matrix<double, kStateDim, 1>;

struct MpcConfig {
  int horizon = 10;
  double dt = 0.03;  // s
  /// Diagonal of Q over [roll, pitch, yaw, x, y, z, wx, wy, wz, vx, vy, vz, g].
  StateVec q_weights =
      (StateVec() << 100, 100, 20, 50, 50, 100, 1, 1, 1, 1, 1, 1, 1).finished();
  double r_force = 1e-6;   // per N^2
  double r_moment = 1e-5;  // per (N m)^2
  double friction = 0.6;
  double force_min = 5.0;
  double force_max = 500.0;
  double max_torque = 33.5;
  bool torque_constraint_first_step = true;
  ModelVariant variant = ModelVariant::kModel3;
  QpSettings qp;
  bool warm_start = true;

  /// Copies friction, force and torque limits from the robot.
  static MpcConfig from_params(const RobotParams& params);
  void validate() const;
  /// Diagonal of R for one step of the variant's input.
  VecX input_weights() const;
};

/// What the robot is asked to do at one instant.
struct Command {
  double vx = 0.0;        // m/s, heading frame
  double vy = 0.0;
  double yaw_rate = 0.0;  // rad/s
  double height = 0.5;    // m above the ground under the feet
  double roll = 0.0;      // rad
  double pitch = 0.0;
  /// Desired yaw at the current instant; the measured yaw when empty.
  std::optional<double> yaw;
};

/// Foot positions known to the controller when it builds a reference.
struct FootInfo {
  std::array<Vec3, 2> position{Vec3::Zero(), Vec3::Zero()};
  double ground_height = 0.0;  // height the commanded CoM height is measured from
};

struct HorizonStep {
  std::array<bool, 2> stance{true, true};
  std::array<Vec3, 2> feet{Vec3::Zero(), Vec3::Zero()};
};

struct ReferenceTrajectory {
  VecX x_ref;  // 13 k, stacked x_1 .. x_k
  std::vector<HorizonStep> steps;
  double average_yaw = 0.0;

  int horizon() const { return static_cast<int>(steps.size()); }
  StateVec state(int i) const { return x_ref.segment<kStateDim>(kStateDim * i); }
};

/// Integrates the command from x0 over k steps of dt and predicts where the
/// feet will be: stance feet stay put, a foot that lands inside the horizon
/// lands at foot_placement() of the predicted hip.
ReferenceTrajectory build_reference(const Command& command, const BodyState& x0,
                                    const GaitSchedule& gait, double t,
                                    const FootInfo& feet,
                                    const RobotParams& params,
                                    const Terrain& terrain, int k, double dt);

struct Prediction {
  MatX a_qp;  // 13k x 13
  MatX b_qp;  // 13k x k n_u
};

/// X = A_qp x0 + B_qp U for x_{i+1} = A x_i + B[i] u_i.
Prediction condense(const MatX& a_hat, const std::vector<MatX>& b_hats);

struct QuadraticCost {
  MatX h;
  VecX f;
};

/// h = 2 (B^T M B + K), f = 2 B^T M (A x0 - X_ref), M and K block-diagonal
/// stacks of diag(q) and diag(r).
QuadraticCost build_cost(const Prediction& pred, const VecX& x0,
                         const VecX& x_ref, const VecX& q, const VecX& r);

struct ConstraintSet {
  MatX c;
  VecX lower;
  VecX upper;
  MatX a_eq;
  VecX b_eq;
};

/// Friction pyramid, vertical force bounds and swing-foot pinning for every
/// step; joint torque limits on the first step for legs with a Jacobian.
ConstraintSet build_constraints(
    const std::vector<std::array<bool, 2>>& stance, const MpcConfig& cfg,
    const std::array<std::optional<LegJacobian>, 2>& jacobians);

/// The full condensed problem for one control tick.
struct CondensedProblem {
  Prediction prediction;
  QpProblem qp;
  std::vector<MatX> b_hats;
  MatX a_hat;
};

CondensedProblem build_problem(
    const BodyState& x0, const ReferenceTrajectory& ref,
    const RobotParams& params, const MpcConfig& cfg,
    const std::array<std::optional<LegJacobian>, 2>& jacobians);

struct MpcResult {
  VecX u_first;  // n_u, first step
  VecX u_all;    // k n_u
  QpSolution qp;
  bool used_fallback = false;
};

class SolverFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Receding-horizon controller. Keeps the previous solution for warm
/// starts and as the fallback when a solve fails.
class Mpc {
 public:
  Mpc(RobotParams params, MpcConfig cfg);

  /// On solver failure returns the previous first-step input with swing
  /// feet zeroed and increments failure_count().
  MpcResult solve(const BodyState& x0, const ReferenceTrajectory& ref,
                  const std::array<std::optional<LegJacobian>, 2>& jacobians);

  int failure_count() const { return failures_; }
  const MpcConfig& config() const { return cfg_; }

 private:
  RobotParams params_;
  MpcConfig cfg_;
  QpSolver solver_;
  std::optional<QpSolution> previous_;
  VecX last_input_;
  int failures_ = 0;
};

/// Converts one foot's entries of a variant input into the logged
/// force / [M_y, M_z] form. Model1 reports the summed force and the
/// toe/heel moment about the foot point.
FootWrench foot_wrench_from_input(const VecX& u_step, ModelVariant variant,
                                  Foot foot, const RobotParams& params,
                                  double yaw);

}  // namespace bipedmpc
