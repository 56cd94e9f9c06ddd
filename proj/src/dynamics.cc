#include "bipedmpc/dynamics.h"

#include <unsupported/Eigen/MatrixFunctions>

namespace bipedmpc {

int input_dim(ModelVariant variant) {
  return variant == ModelVariant::kModel3 ? 10 : 12;
}

const char* to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::kModel1: return "model1";
    case ModelVariant::kModel2: return "model2";
    case ModelVariant::kModel3: return "model3";
  }
  return "unknown";
}

std::vector<int> foot_input_indices(ModelVariant variant, Foot foot) {
  const int f = index(foot);
  std::vector<int> idx;
  switch (variant) {
    case ModelVariant::kModel1:
      for (int i = 0; i < 6; ++i) idx.push_back(6 * f + i);
      break;
    case ModelVariant::kModel2:
      for (int i = 0; i < 3; ++i) idx.push_back(3 * f + i);
      for (int i = 0; i < 3; ++i) idx.push_back(6 + 3 * f + i);
      break;
    case ModelVariant::kModel3:
      for (int i = 0; i < 3; ++i) idx.push_back(3 * f + i);
      for (int i = 0; i < 2; ++i) idx.push_back(6 + 2 * f + i);
      break;
  }
  return idx;
}

Eigen::Matrix<double, 3, 2> moment_selector() {
  Eigen::Matrix<double, 3, 2> l;
  l << 0, 0, 1, 0, 0, 1;
  return l;
}

MatX wrench_map(const RobotParams& params, const ContactGeometry& g,
                ModelVariant variant) {
  MatX w = MatX::Zero(6, input_dim(variant));
  switch (variant) {
    case ModelVariant::kModel1: {
      const Vec3 heading = rotz(g.yaw).col(0);
      for (int f = 0; f < 2; ++f) {
        const Vec3 toe = g.feet[f] + params.toe_length * heading;
        const Vec3 heel = g.feet[f] - params.heel_length * heading;
        w.block<3, 3>(0, 6 * f).setIdentity();
        w.block<3, 3>(0, 6 * f + 3).setIdentity();
        w.block<3, 3>(3, 6 * f) = skew(toe - g.com);
        w.block<3, 3>(3, 6 * f + 3) = skew(heel - g.com);
      }
      break;
    }
    case ModelVariant::kModel2:
      for (int f = 0; f < 2; ++f) {
        w.block<3, 3>(0, 3 * f).setIdentity();
        w.block<3, 3>(3, 3 * f) = skew(g.feet[f] - g.com);
        w.block<3, 3>(3, 6 + 3 * f).setIdentity();
      }
      break;
    case ModelVariant::kModel3:
      for (int f = 0; f < 2; ++f) {
        w.block<3, 3>(0, 3 * f).setIdentity();
        w.block<3, 3>(3, 3 * f) = skew(g.feet[f] - g.com);
        w.block<3, 2>(3, 6 + 2 * f) = moment_selector();
      }
      break;
  }
  return w;
}

ContinuousModel build_continuous(const RobotParams& params, double yaw,
                                 const ContactGeometry& geometry,
                                 ModelVariant variant) {
  const Mat3 inertia = world_inertia(params.body_inertia(), yaw);
  Eigen::LLT<Mat3> llt(inertia);
  if (llt.info() != Eigen::Success) {
    throw SingularInertia("world inertia is not positive definite");
  }
  const Mat3 inertia_inv = llt.solve(Mat3::Identity());

  ContinuousModel model;
  model.yaw = yaw;
  model.geometry = geometry;
  model.variant = variant;

  model.a = MatX::Zero(kStateDim, kStateDim);
  // Euler rates from world angular velocity under small roll/pitch:
  // [[c, s, 0], [-s, c, 0], [0, 0, 1]], i.e. Rz(yaw)^T.
  model.a.block<3, 3>(0, 6) = rotz(yaw).transpose();
  model.a.block<3, 3>(3, 9).setIdentity();
  model.a(11, 12) = 1.0;  // gravity state drives the vertical acceleration

  const MatX w = wrench_map(params, geometry, variant);
  model.b = MatX::Zero(kStateDim, w.cols());
  model.b.middleRows<3>(6) = inertia_inv * w.bottomRows<3>();
  model.b.middleRows<3>(9) = w.topRows<3>() / params.mass;
  return model;
}

NetWrench net_wrench(const RobotParams& params, const VecX& u,
                     const ContactGeometry& geometry, ModelVariant variant) {
  if (u.size() != input_dim(variant)) {
    throw DimensionMismatch("net_wrench: input size does not match variant");
  }
  const Eigen::Matrix<double, 6, 1> w =
      wrench_map(params, geometry, variant) * u;
  return {w.head<3>(), w.tail<3>()};
}

namespace {

// exp(m) by its power series when m is nilpotent of low order (the rigid-body
// models are: the augmented matrix cubes to exactly zero). Returns false when
// the series does not terminate within a few terms.
bool nilpotent_exp(const MatX& m, MatX* out) {
  constexpr int kMaxOrder = 6;
  MatX term = MatX::Identity(m.rows(), m.cols());
  MatX sum = term;
  for (int k = 1; k <= kMaxOrder; ++k) {
    term = (term * m) / static_cast<double>(k);
    if (term.isZero(0.0)) {
      *out = std::move(sum);
      return true;
    }
    sum += term;
  }
  return false;
}

}  // namespace

DiscreteModel discretize(const MatX& a, const MatX& b, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("discretize: dt must be > 0");
  if (a.rows() != a.cols() || b.rows() != a.rows()) {
    throw DimensionMismatch("discretize: A must be square and match B rows");
  }
  const int n = static_cast<int>(a.rows());
  const int m = static_cast<int>(b.cols());
  MatX aug = MatX::Zero(n + m, n + m);
  aug.topLeftCorner(n, n) = a * dt;
  aug.topRightCorner(n, m) = b * dt;

  MatX phi;
  if (!nilpotent_exp(aug, &phi)) phi = aug.exp();

  DiscreteModel d;
  d.a = phi.topLeftCorner(n, n);
  d.b = phi.topRightCorner(n, m);
  d.dt = dt;
  return d;
}

DiscreteModel discretize(const ContinuousModel& model, double dt) {
  return discretize(model.a, model.b, dt);
}

}  // namespace bipedmpc
