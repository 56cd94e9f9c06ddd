// Acceptance run: one PASS/FAIL line per criterion, exit status 0 only when
// every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "bipedmpc/harness.h"
#include "bipedmpc/mpc.h"
#include "bipedmpc/sim.h"
#include "oracles.h"

namespace bipedmpc {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kModel3Band = 2.0 * kDeg;
constexpr double kModel1Response = 3.0 * kDeg;
constexpr double kModel2YawDrift = 1.0 * kDeg;
constexpr double kVxErrorMax = 0.15;        // m/s
constexpr double kCourseLength = 2.4;       // m
constexpr double kTiltMax = 0.3;            // rad
constexpr double kTorqueMax = 33.5;         // N m
constexpr int kHopCycles = 10;
constexpr double kFlightTarget = 0.25;
constexpr double kFlightBand = 0.10;
constexpr double kFootClearance = 1e-3;     // m above terrain counts as off
constexpr int kLatencySolves = 1000;
constexpr double kMedianUs = 1000.0;
constexpr double kP99Us = 3000.0;
constexpr double kOracleSeconds = 10.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), format, args...);
  return buf;
}

fs::path scenario_path(const std::string& name) {
  return fs::path(BIPEDMPC_SOURCE_DIR) / "scenarios" / (name + ".cfg");
}

fs::path work_dir() {
  static const fs::path dir =
      fs::temp_directory_path() / ("bipedmpc_acceptance_" + std::to_string(::getpid()));
  return dir;
}

double nearest_rank(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<size_t>(std::ceil(p * static_cast<double>(v.size())));
  return v[std::clamp<size_t>(rank, 1, v.size()) - 1];
}

Outcome model_variants() {
  const auto start = Clock::now();
  const std::vector<VariantResponse> r = compare_models(load_config(scenario_path("stand")));
  const double elapsed = seconds_since(start);
  const VariantResponse* m[4] = {nullptr, nullptr, nullptr, nullptr};
  for (const VariantResponse& v : r) m[static_cast<int>(v.variant)] = &v;
  const double target = CompareSettings().step_angle;

  const double m3_pitch_err = std::abs(m[3]->pitch_final - target);
  const double m3_roll_err = std::abs(m[3]->roll_final - target);
  const double m1_pitch = std::abs(m[1]->pitch_final);
  const double m2_roll_err = std::abs(m[2]->roll_final - target);
  const bool m3_ok = !m[3]->fell_pitch && !m[3]->fell_roll && m3_pitch_err < kModel3Band &&
                     m3_roll_err < kModel3Band;
  const bool m1_ok = m1_pitch < kModel1Response;
  const bool m2_ok = m2_roll_err > m3_roll_err && m[2]->yaw_drift_roll > kModel2YawDrift;
  Outcome o;
  o.pass = m3_ok && m1_ok && m2_ok && elapsed < 30.0;
  o.detail = fmt(
      "model3 pitch %.3f deg roll %.3f deg [%s]; model1 pitch %.3f deg%s [%s]; "
      "model2 roll err %.3f deg vs model3 %.3f deg, yaw drift %.4f deg [%s]; %.1f s",
      m[3]->pitch_final / kDeg, m[3]->roll_final / kDeg, m3_ok ? "ok" : "fail",
      m[1]->pitch_final / kDeg, m[1]->fell_pitch ? " (fell)" : "", m1_ok ? "ok" : "fail",
      m2_roll_err / kDeg, m3_roll_err / kDeg, m[2]->yaw_drift_roll / kDeg,
      m2_ok ? "ok" : "fail", elapsed);
  return o;
}

Outcome velocity_tracking() {
  const auto start = Clock::now();
  const RunOutput out = run_to_files(load_config(scenario_path("walk_ramp")), work_dir() / "a" / "walk_ramp");
  const double elapsed = seconds_since(start);
  Outcome o;
  o.pass = !out.summary.fall && out.summary.max_vx_error <= kVxErrorMax && elapsed < 60.0;
  o.detail = fmt("max |vx err| %.4f m/s (limit %.2f), fall %d; %.1f s",
                 out.summary.max_vx_error, kVxErrorMax, out.summary.fall, elapsed);
  return o;
}

Outcome rough_terrain() {
  const auto start = Clock::now();
  const ScenarioConfig config = load_config(scenario_path("rough_terrain_1p6"));
  const RunOutput out = run_to_files(config, work_dir() / "a" / "rough_terrain_1p6");
  const double elapsed = seconds_since(start);

  const auto& seg = config.terrain.segments();
  const double course_start = seg.front().x_start, course_end = seg.back().x_start;
  double h_min = 1e9, h_max = 0.0, max_diff = 0.0, prev = 0.0;
  for (size_t i = 0; i + 1 < seg.size(); ++i) {
    h_min = std::min(h_min, seg[i].height);
    h_max = std::max(h_max, seg[i].height);
    max_diff = std::max(max_diff, std::abs(seg[i].height - prev));
    prev = seg[i].height;
  }
  const bool course_ok = std::abs(course_end - course_start - kCourseLength) < 1e-9 &&
                         h_min >= 0.020 - 1e-12 && h_max <= 0.075 + 1e-12 &&
                         max_diff <= 0.055 + 1e-12;

  double tilt = 0.0, tau = 0.0;
  for (const LogRow& r : out.log.rows) {
    tilt = std::max({tilt, std::abs(r.body.euler.x()), std::abs(r.body.euler.y())});
    tau = std::max({tau, r.tau[0].cwiseAbs().maxCoeff(), r.tau[1].cwiseAbs().maxCoeff()});
  }
  const double final_x = out.log.rows.back().body.position.x();
  Outcome o;
  o.pass = course_ok && !out.summary.fall && final_x >= course_end &&
           out.summary.distance >= kCourseLength && tilt < kTiltMax && tau <= kTorqueMax &&
           elapsed < 60.0;
  o.detail = fmt(
      "course %.2f m, heights %.3f-%.3f m, max diff %.3f m; final x %.3f m, distance %.3f m, "
      "max tilt %.3f rad, max |tau| %.2f N m, fall %d; %.1f s",
      course_end - course_start, h_min, h_max, max_diff, final_x, out.summary.distance, tilt,
      tau, out.summary.fall, elapsed);
  return o;
}

Outcome hopping() {
  const auto start = Clock::now();
  const ScenarioConfig config = load_config(scenario_path("hop"));
  const RunOutput out = run_to_files(config, work_dir() / "a" / "hop");
  const double elapsed = seconds_since(start);

  const int ticks_per_cycle =
      static_cast<int>(std::lround(config.gait_period / config.sim.dt));
  const auto& rows = out.log.rows;
  const int cycles = static_cast<int>(rows.size() - 1) / ticks_per_cycle;
  int run = 0, best_run = 0;
  double min_frac = 1.0, max_frac = 0.0;
  for (int c = 0; c < cycles; ++c) {
    int flight = 0;
    for (int i = c * ticks_per_cycle; i < (c + 1) * ticks_per_cycle; ++i) {
      bool off = true;
      for (int f = 0; f < 2; ++f) {
        const Vec3& p = rows[i].foot_position[f];
        off = off && !rows[i].stance[f] &&
              p.z() > config.terrain.height(p.x(), p.y()) + kFootClearance;
      }
      flight += off;
    }
    const double frac = static_cast<double>(flight) / ticks_per_cycle;
    const bool ok = std::abs(frac - kFlightTarget) <= kFlightBand;
    run = ok ? run + 1 : 0;
    best_run = std::max(best_run, run);
    min_frac = std::min(min_frac, frac);
    max_frac = std::max(max_frac, frac);
  }
  Outcome o;
  o.pass = !out.summary.fall && best_run >= kHopCycles && elapsed < 60.0;
  o.detail = fmt("%d consecutive cycles with flight in 25%% +/- 10%% (of %d), flight fraction "
                 "%.1f%%-%.1f%%, fall %d; %.1f s",
                 best_run, cycles, 100.0 * min_frac, 100.0 * max_frac, out.summary.fall,
                 elapsed);
  return o;
}

Outcome solver_latency() {
  const RobotParams params;
  const MpcConfig cfg = MpcConfig::from_params(params);
  Mpc mpc(params, cfg);
  const PlantState stand = PlantState::standing(params, Terrain(), 0.5);
  std::array<std::optional<LegJacobian>, 2> jac;
  FootInfo feet;
  for (int f = 0; f < 2; ++f) {
    jac[f] = jacobian(params, stand.legs[f], stand.pose());
    feet.position[f] = stand.contacts[f].anchor;
  }
  const GaitSchedule gait = GaitSchedule::make(GaitType::kStand);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> times;
  int variables = 0, non_optimal = 0;
  BodyState x = stand.body;
  for (int i = 0; i < kLatencySolves; ++i) {
    // A slowly wandering state, as between consecutive control ticks.
    x.euler += 0.002 * Vec3(noise(rng), noise(rng), noise(rng));
    x.euler = x.euler.cwiseMax(-0.1).cwiseMin(0.1);
    x.position.z() = 0.5 + std::clamp(x.position.z() - 0.5 + 0.001 * noise(rng), -0.03, 0.03);
    x.velocity = 0.05 * Vec3(noise(rng), noise(rng), noise(rng));
    x.angular_velocity = 0.1 * Vec3(noise(rng), noise(rng), noise(rng));
    x.rotation = rotm_from_euler(x.euler);
    const ReferenceTrajectory ref =
        build_reference(Command(), x, gait, 0.0, feet, params, Terrain(), cfg.horizon, cfg.dt);
    const MpcResult r = mpc.solve(x, ref, jac);
    variables = static_cast<int>(r.qp.u.size());
    if (r.qp.status != QpStatus::kOptimal) ++non_optimal;
    times.push_back(r.qp.wall_time * 1e6);
  }
  const double p50 = nearest_rank(times, 0.5), p99 = nearest_rank(times, 0.99);
  Outcome o;
  o.pass = variables == 100 && p50 < kMedianUs && p99 < kP99Us && non_optimal == 0;
  o.detail = fmt("%zu solves, %d variables, median %.1f us, p99 %.1f us, max %.1f us, "
                 "non-optimal %d",
                 times.size(), variables, p50, p99, *std::max_element(times.begin(), times.end()),
                 non_optimal);
  return o;
}

struct OracleCheck {
  std::string name;
  double error = 0.0;
  double limit = 0.0;
  double seconds = 0.0;
};

OracleCheck discretize_oracle() {
  OracleCheck c{"discretize", 0.0, 1e-9};
  const auto start = Clock::now();
  std::mt19937_64 rng(601);
  std::uniform_real_distribution<double> yaw(-3.0, 3.0);
  const RobotParams p;
  for (int i = 0; i < 100; ++i) {
    ContactGeometry g;
    g.com = testing::random_vector(rng, 3, 1.0);
    for (Vec3& f : g.feet) f = g.com + testing::random_vector(rng, 3, 0.3);
    g.yaw = yaw(rng);
    const ModelVariant v = static_cast<ModelVariant>(1 + i % 3);
    const ContinuousModel m = build_continuous(p, yaw(rng), g, v);
    const DiscreteModel d = discretize(m, 0.03);
    const int n = static_cast<int>(m.a.rows()), nu = static_cast<int>(m.b.cols());
    MatX aug = MatX::Zero(n + nu, n + nu);
    aug.topLeftCorner(n, n) = m.a * 0.03;
    aug.topRightCorner(n, nu) = m.b * 0.03;
    const MatX e = testing::expm_taylor(aug);
    c.error = std::max(c.error, (d.a - e.topLeftCorner(n, n)).lpNorm<Eigen::Infinity>());
    c.error = std::max(c.error, (d.b - e.topRightCorner(n, nu)).lpNorm<Eigen::Infinity>());
  }
  c.seconds = seconds_since(start);
  return c;
}

OracleCheck jacobian_oracle() {
  OracleCheck c{"jacobian", 0.0, 1e-5};
  const auto start = Clock::now();
  std::mt19937_64 rng(602);
  std::uniform_real_distribution<double> small(-0.4, 0.4), knee(0.2, 1.8);
  const RobotParams p;
  for (int i = 0; i < 100; ++i) {
    LegConfig leg;
    leg.side = i % 2 == 0 ? Foot::kLeft : Foot::kRight;
    leg.q << small(rng), small(rng), small(rng), knee(rng), small(rng);
    BodyPose pose;
    pose.rotation = rotm_from_euler(Vec3(small(rng), small(rng), 3.0 * small(rng)));
    pose.position = testing::random_vector(rng, 3);
    const MatX fd = testing::numeric_jacobian(
        [&](const VecX& q) {
          LegConfig l = leg;
          l.q = q;
          return VecX(forward_kinematics(p, l, pose).foot);
        },
        leg.q);
    c.error = std::max(c.error, (jacobian(p, leg, pose).topRows<3>() - fd).cwiseAbs().maxCoeff());
  }
  c.seconds = seconds_since(start);
  return c;
}

OracleCheck qp_oracle() {
  OracleCheck c{"solve_qp", 0.0, 1e-6};
  const auto start = Clock::now();
  std::mt19937_64 rng(603);
  std::uniform_int_distribution<int> nd(2, 6), md(1, 6), kind(0, 2);
  std::uniform_real_distribution<double> slack(0.05, 1.0);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 50; ++trial) {
    const int n = nd(rng), m = md(rng);
    QpProblem q;
    q.h = testing::random_spd(rng, n);
    q.f = testing::random_vector(rng, n, 5.0);
    const VecX u0 = testing::random_vector(rng, n);
    q.c = testing::random_matrix(rng, m, n);
    q.c_lower = VecX::Constant(m, -kInf);
    q.c_upper = VecX::Constant(m, kInf);
    for (int i = 0; i < m; ++i) {
      const double ci = q.c.row(i).dot(u0);
      const int k = kind(rng);
      if (k != 1) q.c_upper(i) = ci + slack(rng);
      if (k != 0) q.c_lower(i) = ci - slack(rng);
    }
    q.a_eq = testing::random_matrix(rng, trial % 2, n);
    q.b_eq = q.a_eq * u0;
    const auto oracle = testing::enumerate_qp(q, 100);
    const QpSolution s = solve_qp(q);
    if (!oracle || s.status != QpStatus::kOptimal) {
      c.error = kInf;
      continue;
    }
    c.error = std::max(c.error, (s.u - *oracle).cwiseAbs().maxCoeff());
  }
  c.seconds = seconds_since(start);
  return c;
}

OracleCheck condense_oracle() {
  OracleCheck c{"condense", 0.0, 1e-9};
  const auto start = Clock::now();
  std::mt19937_64 rng(604);
  const RobotParams p;
  const PlantState stand = PlantState::standing(p, Terrain(), 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    BodyState x0 = stand.body;
    x0.euler.z() = testing::random_vector(rng, 1, 3.0)(0);
    x0.rotation = rotm_from_euler(x0.euler);
    Command cmd;
    cmd.vx = testing::random_vector(rng, 1, 1.5)(0);
    FootInfo feet;
    for (int f = 0; f < 2; ++f) feet.position[f] = stand.contacts[f].anchor;
    const ReferenceTrajectory ref = build_reference(
        cmd, x0, GaitSchedule::make(GaitType::kWalk), 0.01 * trial, feet, p, Terrain(), 10, 0.03);
    const CondensedProblem prob =
        build_problem(x0, ref, p, MpcConfig::from_params(p), {std::nullopt, std::nullopt});
    const VecX u = testing::random_vector(rng, static_cast<int>(prob.qp.f.size()), 100.0);
    const VecX stacked = prob.prediction.a_qp * x0.to_vector() + prob.prediction.b_qp * u;
    VecX x = x0.to_vector();
    for (int i = 0; i < 10; ++i) {
      x = prob.a_hat * x + prob.b_hats[i] * u.segment(10 * i, 10);
      c.error = std::max(c.error, (stacked.segment(13 * i, 13) - x).cwiseAbs().maxCoeff() /
                                      (1.0 + x.cwiseAbs().maxCoeff()));
    }
  }
  c.seconds = seconds_since(start);
  return c;
}

OracleCheck static_stand_oracle() {
  OracleCheck c{"static stand", 0.0, 1.0};
  const auto start = Clock::now();
  const RobotParams p;
  const PlantState stand = PlantState::standing(p, Terrain(), 0.5);
  FootInfo feet;
  for (int f = 0; f < 2; ++f) feet.position[f] = stand.contacts[f].anchor;
  const ReferenceTrajectory ref = build_reference(
      Command(), stand.body, GaitSchedule::make(GaitType::kStand), 0.0, feet, p, Terrain(), 10, 0.03);
  Mpc mpc(p, MpcConfig::from_params(p));
  const MpcResult r = mpc.solve(stand.body, ref, {std::nullopt, std::nullopt});
  const double half = 0.5 * p.mass * p.gravity;
  const double fz_err = std::max(std::abs(r.u_first(2) - half), std::abs(r.u_first(5) - half));
  const double moment = r.u_first.tail<4>().cwiseAbs().maxCoeff();
  // Both bounds folded into one ratio against its own limit.
  c.error = std::max(fz_err / 1.0, moment / 0.5);
  c.seconds = seconds_since(start);
  return c;
}

Outcome oracle_suites() {
  const std::vector<OracleCheck> checks = {discretize_oracle(), jacobian_oracle(), qp_oracle(),
                                           condense_oracle(), static_stand_oracle()};
  Outcome o;
  o.pass = true;
  for (const OracleCheck& c : checks) {
    const bool ok = c.error < c.limit && c.seconds < kOracleSeconds;
    o.pass = o.pass && ok;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += fmt("%s %.2e < %.0e [%s]", c.name.c_str(), c.error, c.limit, ok ? "ok" : "fail");
  }
  return o;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  Outcome o;
  o.pass = true;
  for (const char* name : {"stand", "walk_ramp", "rough_terrain_1p6", "hop"}) {
    const ScenarioConfig config = load_config(scenario_path(name));
    const fs::path a = work_dir() / "a" / name, b = work_dir() / "b" / name;
    if (!fs::exists(a / config.csv_name)) run_to_files(config, a);
    run_to_files(config, b);
    const std::string ca = file_bytes(a / config.csv_name), cb = file_bytes(b / config.csv_name);
    const bool same = !ca.empty() && ca == cb;
    o.pass = o.pass && same;
    if (!o.detail.empty()) o.detail += ", ";
    o.detail += fmt("%s %s (%zu bytes)", name, same ? "identical" : "DIFFERENT", ca.size());
  }
  return o;
}

}  // namespace
}  // namespace bipedmpc

int main() {
  using bipedmpc::Outcome;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"model variants", bipedmpc::model_variants},
      {"velocity tracking", bipedmpc::velocity_tracking},
      {"rough terrain", bipedmpc::rough_terrain},
      {"hopping", bipedmpc::hopping},
      {"solver latency", bipedmpc::solver_latency},
      {"oracle suites", bipedmpc::oracle_suites},
      {"determinism", bipedmpc::determinism},
  };
  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failures += !o.pass;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::filesystem::remove_all(bipedmpc::work_dir());
  return failures == 0 ? 0 : 1;
}
