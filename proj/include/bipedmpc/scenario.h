#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bipedmpc/gait.h"
#include "bipedmpc/leg.h"
#include "bipedmpc/mpc.h"
#include "bipedmpc/rigidmath.h"
#include "bipedmpc/sim.h"
#include "bipedmpc/terrain.h"

namespace bipedmpc {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// Piecewise-linear function of time, held constant outside its points.
class Profile {
 public:
  Profile() = default;
  explicit Profile(double constant) : points_{{0.0, constant}} {}
  /// Points must have strictly increasing times.
  explicit Profile(std::vector<std::pair<double, double>> points);

  /// "v" or "t0:v0, t1:v1, ...".
  static Profile parse(const std::string& text);

  double at(double t) const;
  const std::vector<std::pair<double, double>>& points() const { return points_; }

 private:
  std::vector<std::pair<double, double>> points_{{0.0, 0.0}};
};

struct ScenarioConfig {
  std::string name = "scenario";
  double duration = 0.0;  // s, required

  RobotParams robot;
  GaitType gait = GaitType::kStand;
  double gait_period = 0.3;
  double swing_height = 0.08;
  SwingGains swing_gains;

  Profile cmd_vx;
  Profile cmd_vy;
  Profile cmd_yaw_rate;
  Profile cmd_height{0.5};
  Profile cmd_roll;
  Profile cmd_pitch;

  double init_x = 0.0;
  double init_y = 0.0;
  double init_yaw = 0.0;
  /// Initial CoM height above the terrain; the commanded height at t = 0
  /// when unset.
  double init_height = -1.0;

  Terrain terrain;
  SimSettings sim;
  MpcConfig mpc;

  std::uint64_t seed = 1;
  double init_noise = 0.0;  // std of the initial position/attitude offset

  std::string csv_name = "log.csv";
  std::string summary_name = "summary.txt";
  bool record_timing = false;

  GaitSchedule schedule() const { return GaitSchedule::make(gait, gait_period); }
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

/// Flat `key = value` text, '#' starts a comment. Unknown keys, malformed
/// values and a missing `duration` raise ConfigError.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Applies one `key = value` assignment, as parse_config would.
void set_config_value(ScenarioConfig* config, const std::string& key,
                      const std::string& value);

}  // namespace bipedmpc
