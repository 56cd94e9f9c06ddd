#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "bipedmpc/rigidmath.h"

namespace bipedmpc {

/// Contact descriptions for the simplified rigid-body model.
///  kModel1: toe and heel point per foot, 3-D force each         (n_u = 12)
///  kModel2: mid-foot point, 3-D force + 3-D moment               (n_u = 12)
///  kModel3: mid-foot point, 3-D force + moments about y and z    (n_u = 10)
enum class ModelVariant { kModel1 = 1, kModel2 = 2, kModel3 = 3 };

int input_dim(ModelVariant variant);
const char* to_string(ModelVariant variant);

/// Indices into a per-step input vector that belong to `foot`.
std::vector<int> foot_input_indices(ModelVariant variant, Foot foot);

/// The 3x2 selector mapping [M_y, M_z] into a 3-D moment.
Eigen::Matrix<double, 3, 2> moment_selector();

class SingularInertia : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Where the model's contacts are. `feet` holds mid-foot points; Model1
/// expands each into toe and heel along the heading given by `yaw`.
struct ContactGeometry {
  Vec3 com = Vec3::Zero();
  std::array<Vec3, 2> feet{Vec3::Zero(), Vec3::Zero()};
  double yaw = 0.0;
};

/// 6 x n_u map from the stacked input to [net force; net moment about CoM].
MatX wrench_map(const RobotParams& params, const ContactGeometry& geometry,
                ModelVariant variant);

struct ContinuousModel {
  MatX a;  // 13 x 13
  MatX b;  // 13 x n_u
  double yaw = 0.0;
  ContactGeometry geometry;
  ModelVariant variant = ModelVariant::kModel3;
};

struct DiscreteModel {
  MatX a;
  MatX b;
  double dt = 0.0;
};

/// Continuous-time linear model about `yaw`; the yaw used for the inertia and
/// the Euler-rate map is `yaw`, the moment arms come from `geometry`.
ContinuousModel build_continuous(const RobotParams& params, double yaw,
                                 const ContactGeometry& geometry,
                                 ModelVariant variant);

/// Net force and moment about the CoM produced by input `u`.
struct NetWrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
};
NetWrench net_wrench(const RobotParams& params, const VecX& u,
                     const ContactGeometry& geometry, ModelVariant variant);

/// Zero-order-hold discretization through the exponential of
/// [[A, B], [0, 0]] * dt.
DiscreteModel discretize(const ContinuousModel& model, double dt);
DiscreteModel discretize(const MatX& a, const MatX& b, double dt);

}  // namespace bipedmpc
