#include "bipedmpc/gait.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bipedmpc {
namespace {

// Cycle count t / period, snapped to a 1e-9 grid so that sample times such
// as 5 * 0.03 land on the phase boundary they are meant to hit.
double cycles(double t, double period) {
  return std::round(t / period * 1e9) * 1e-9;
}

double frac(double x) {
  const double f = x - std::floor(x);
  return f >= 1.0 ? 0.0 : f;
}

}  // namespace

const char* to_string(GaitType type) {
  switch (type) {
    case GaitType::kStand: return "stand";
    case GaitType::kWalk: return "walk";
    case GaitType::kHop: return "hop";
    case GaitType::kRun: return "run";
  }
  return "unknown";
}

GaitType parse_gait_type(const std::string& name) {
  if (name == "stand") return GaitType::kStand;
  if (name == "walk") return GaitType::kWalk;
  if (name == "hop") return GaitType::kHop;
  if (name == "run") return GaitType::kRun;
  throw std::invalid_argument("unknown gait type '" + name + "'");
}

GaitSchedule GaitSchedule::make(GaitType type, double period) {
  GaitSchedule g;
  g.type = type;
  g.period = period;
  switch (type) {
    case GaitType::kStand:
      g.offsets = {0.0, 0.0};
      g.stance_fraction = {1.0, 1.0};
      break;
    case GaitType::kWalk:
      g.offsets = {0.0, 0.5};
      g.stance_fraction = {0.5, 0.5};
      break;
    case GaitType::kHop:
      g.offsets = {0.0, 0.0};
      g.stance_fraction = {0.75, 0.75};
      break;
    case GaitType::kRun:
      g.offsets = {0.0, 0.5};
      g.stance_fraction = {0.4, 0.4};
      break;
  }
  return g;
}

void GaitSchedule::validate() const {
  if (!(period > 0.0)) throw std::invalid_argument("gait: period must be > 0");
  for (double s : stance_fraction) {
    if (!(s > 0.0 && s <= 1.0)) {
      throw std::invalid_argument("gait: stance fraction must be in (0, 1]");
    }
  }
}

ContactState contact_state(double t, const GaitSchedule& g) {
  ContactState c;
  const double x = cycles(t, g.period);
  for (int f = 0; f < 2; ++f) {
    const double sf = g.stance_fraction[f];
    if (sf >= 1.0) {
      c.stance[f] = true;
      c.progress[f] = frac(x);
      continue;
    }
    // Snap again after the offset subtraction.
    const double phase = frac(std::round((x - g.offsets[f]) * 1e9) * 1e-9);
    c.stance[f] = phase < sf;
    c.progress[f] = c.stance[f] ? phase / sf : (phase - sf) / (1.0 - sf);
  }
  return c;
}

std::vector<std::array<bool, 2>> horizon_schedule(double t,
                                                  const GaitSchedule& g,
                                                  int k, double dt) {
  std::vector<std::array<bool, 2>> rows;
  rows.reserve(k);
  for (int i = 0; i < k; ++i) rows.push_back(contact_state(t + i * dt, g).stance);
  return rows;
}

Vec3 foot_placement(const Vec3& hip, const Vec3& com_velocity,
                    double stance_duration, const Terrain& terrain) {
  Vec3 p = hip + 0.5 * stance_duration * com_velocity;
  p.z() = terrain.height(p.x(), p.y());
  return p;
}

SwingSample swing_reference(const SwingTrajectory& traj, double s) {
  s = std::clamp(s, 0.0, 1.0);
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  const double d = traj.duration;
  const Vec3 delta = traj.target - traj.lift_off;

  const double b = s * s * (3.0 - 2.0 * s);
  const double db = 6.0 * s * (1.0 - s);
  const double ddb = 6.0 - 12.0 * s;
  const double bump = 0.5 * (1.0 - std::cos(kTwoPi * s));
  const double dbump = 0.5 * kTwoPi * std::sin(kTwoPi * s);
  const double ddbump = 0.5 * kTwoPi * kTwoPi * std::cos(kTwoPi * s);

  SwingSample out;
  out.position = traj.lift_off + b * delta;
  out.position.z() += traj.apex_height * bump;
  out.velocity = (db / d) * delta;
  out.velocity.z() += traj.apex_height * dbump / d;
  out.acceleration = (ddb / (d * d)) * delta;
  out.acceleration.z() += traj.apex_height * ddbump / (d * d);
  return out;
}

}  // namespace bipedmpc
