#include "bipedmpc/scenario.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bipedmpc {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

double parse_double(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty() ||
      !std::isfinite(v)) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  return v;
}

long parse_int(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(field, "expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes") return true;
  if (t == "false" || t == "0" || t == "no") return false;
  throw ConfigError(field, "expected true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& field, const std::string& text,
                               size_t expected) {
  std::vector<double> out;
  for (const std::string& item : split(text, ',')) {
    out.push_back(parse_double(field, item));
  }
  if (out.size() != expected) {
    throw ConfigError(field, "expected " + std::to_string(expected) + " values");
  }
  return out;
}

Vec3 parse_vec3(const std::string& field, const std::string& text) {
  const auto v = parse_list(field, text, 3);
  return {v[0], v[1], v[2]};
}

Profile parse_profile(const std::string& field, const std::string& text) {
  try {
    return Profile::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(field, e.what());
  }
}

ModelVariant parse_variant(const std::string& field, const std::string& text) {
  const std::string t = trim(text);
  if (t == "model1" || t == "1") return ModelVariant::kModel1;
  if (t == "model2" || t == "2") return ModelVariant::kModel2;
  if (t == "model3" || t == "3") return ModelVariant::kModel3;
  throw ConfigError(field, "expected model1, model2 or model3, got '" + text + "'");
}

Terrain parse_stairs(const std::string& field, const std::string& text) {
  std::vector<StairSegment> segments;
  if (trim(text).empty()) return Terrain();
  for (const std::string& item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) {
      throw ConfigError(field, "expected x_start:height pairs, got '" + item + "'");
    }
    segments.push_back({parse_double(field, parts[0]), parse_double(field, parts[1])});
  }
  try {
    return Terrain(std::move(segments));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

using Setter = std::function<void(ScenarioConfig&, const std::string&,
                                  const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> m;
    auto number = [&m](const std::string& key, auto member) {
      m[key] = [member](ScenarioConfig& c, const std::string& k,
                        const std::string& v) { member(c) = parse_double(k, v); };
    };
    m["name"] = [](ScenarioConfig& c, const std::string&, const std::string& v) {
      c.name = trim(v);
    };
    number("duration", [](ScenarioConfig& c) -> double& { return c.duration; });

    number("robot.mass", [](ScenarioConfig& c) -> double& { return c.robot.mass; });
    m["robot.inertia"] = [](ScenarioConfig& c, const std::string& k,
                            const std::string& v) {
      c.robot.inertia_diag = parse_vec3(k, v);
    };
    number("robot.body_length",
           [](ScenarioConfig& c) -> double& { return c.robot.body_length; });
    number("robot.body_width",
           [](ScenarioConfig& c) -> double& { return c.robot.body_width; });
    number("robot.body_height",
           [](ScenarioConfig& c) -> double& { return c.robot.body_height; });
    number("robot.thigh_length",
           [](ScenarioConfig& c) -> double& { return c.robot.thigh_length; });
    number("robot.calf_length",
           [](ScenarioConfig& c) -> double& { return c.robot.calf_length; });
    number("robot.toe_length",
           [](ScenarioConfig& c) -> double& { return c.robot.toe_length; });
    number("robot.heel_length",
           [](ScenarioConfig& c) -> double& { return c.robot.heel_length; });
    number("robot.max_torque",
           [](ScenarioConfig& c) -> double& { return c.robot.max_torque; });
    number("robot.max_joint_speed",
           [](ScenarioConfig& c) -> double& { return c.robot.max_joint_speed; });
    number("robot.friction",
           [](ScenarioConfig& c) -> double& { return c.robot.friction; });
    number("robot.force_min",
           [](ScenarioConfig& c) -> double& { return c.robot.force_min; });
    number("robot.force_max",
           [](ScenarioConfig& c) -> double& { return c.robot.force_max; });
    number("robot.gravity",
           [](ScenarioConfig& c) -> double& { return c.robot.gravity; });

    m["gait.type"] = [](ScenarioConfig& c, const std::string& k,
                        const std::string& v) {
      try {
        c.gait = parse_gait_type(trim(v));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(k, e.what());
      }
    };
    number("gait.period", [](ScenarioConfig& c) -> double& { return c.gait_period; });
    number("gait.swing_height",
           [](ScenarioConfig& c) -> double& { return c.swing_height; });
    m["swing.kp"] = [](ScenarioConfig& c, const std::string& k,
                       const std::string& v) { c.swing_gains.kp = parse_vec3(k, v); };
    m["swing.kd"] = [](ScenarioConfig& c, const std::string& k,
                       const std::string& v) { c.swing_gains.kd = parse_vec3(k, v); };

    auto profile = [&m](const std::string& key, Profile ScenarioConfig::*member) {
      m[key] = [member](ScenarioConfig& c, const std::string& k,
                        const std::string& v) { c.*member = parse_profile(k, v); };
    };
    profile("cmd.vx", &ScenarioConfig::cmd_vx);
    profile("cmd.vy", &ScenarioConfig::cmd_vy);
    profile("cmd.yaw_rate", &ScenarioConfig::cmd_yaw_rate);
    profile("cmd.height", &ScenarioConfig::cmd_height);
    profile("cmd.roll", &ScenarioConfig::cmd_roll);
    profile("cmd.pitch", &ScenarioConfig::cmd_pitch);

    number("init.x", [](ScenarioConfig& c) -> double& { return c.init_x; });
    number("init.y", [](ScenarioConfig& c) -> double& { return c.init_y; });
    number("init.yaw", [](ScenarioConfig& c) -> double& { return c.init_yaw; });
    number("init.height", [](ScenarioConfig& c) -> double& { return c.init_height; });

    m["terrain.stairs"] = [](ScenarioConfig& c, const std::string& k,
                             const std::string& v) { c.terrain = parse_stairs(k, v); };

    number("sim.dt", [](ScenarioConfig& c) -> double& { return c.sim.dt; });
    number("sim.fall_angle",
           [](ScenarioConfig& c) -> double& { return c.sim.fall_angle; });
    number("sim.fall_margin",
           [](ScenarioConfig& c) -> double& { return c.sim.fall_margin; });
    number("sim.swing_bandwidth",
           [](ScenarioConfig& c) -> double& { return c.sim.swing_bandwidth; });
    number("sim.init_noise", [](ScenarioConfig& c) -> double& { return c.init_noise; });
    m["sim.seed"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      const long s = parse_int(k, v);
      if (s < 0) throw ConfigError(k, "must be non-negative");
      c.seed = static_cast<std::uint64_t>(s);
    };

    m["mpc.horizon"] = [](ScenarioConfig& c, const std::string& k,
                          const std::string& v) {
      c.mpc.horizon = static_cast<int>(parse_int(k, v));
    };
    number("mpc.dt", [](ScenarioConfig& c) -> double& { return c.mpc.dt; });
    m["mpc.q"] = [](ScenarioConfig& c, const std::string& k, const std::string& v) {
      const auto q = parse_list(k, v, kStateDim);
      for (int i = 0; i < kStateDim; ++i) c.mpc.q_weights(i) = q[i];
    };
    number("mpc.r_force", [](ScenarioConfig& c) -> double& { return c.mpc.r_force; });
    number("mpc.r_moment", [](ScenarioConfig& c) -> double& { return c.mpc.r_moment; });
    m["mpc.torque_constraint"] = [](ScenarioConfig& c, const std::string& k,
                                    const std::string& v) {
      c.mpc.torque_constraint_first_step = parse_bool(k, v);
    };
    m["mpc.variant"] = [](ScenarioConfig& c, const std::string& k,
                          const std::string& v) { c.mpc.variant = parse_variant(k, v); };
    m["mpc.warm_start"] = [](ScenarioConfig& c, const std::string& k,
                             const std::string& v) { c.mpc.warm_start = parse_bool(k, v); };
    number("qp.tolerance", [](ScenarioConfig& c) -> double& { return c.mpc.qp.tolerance; });
    m["qp.max_iterations"] = [](ScenarioConfig& c, const std::string& k,
                                const std::string& v) {
      c.mpc.qp.max_iterations = static_cast<int>(parse_int(k, v));
    };
    m["qp.polish"] = [](ScenarioConfig& c, const std::string& k,
                        const std::string& v) { c.mpc.qp.polish = parse_bool(k, v); };

    m["output.csv"] = [](ScenarioConfig& c, const std::string&, const std::string& v) {
      c.csv_name = trim(v);
    };
    m["output.summary"] = [](ScenarioConfig& c, const std::string&,
                             const std::string& v) { c.summary_name = trim(v); };
    m["output.record_timing"] = [](ScenarioConfig& c, const std::string& k,
                                   const std::string& v) {
      c.record_timing = parse_bool(k, v);
    };
    return m;
  }();
  return table;
}

}  // namespace

Profile::Profile(std::vector<std::pair<double, double>> points)
    : points_(std::move(points)) {
  if (points_.empty()) throw std::invalid_argument("profile needs at least one point");
  for (size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i].first > points_[i - 1].first)) {
      throw std::invalid_argument("profile times must be strictly increasing");
    }
  }
}

Profile Profile::parse(const std::string& text) {
  auto number = [](const std::string& s) {
    try {
      return parse_double("profile", s);
    } catch (const ConfigError& e) {
      throw std::invalid_argument(e.what());
    }
  };
  const std::string t = trim(text);
  if (t.find(':') == std::string::npos) return Profile(number(t));
  std::vector<std::pair<double, double>> points;
  for (const std::string& item : split(t, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) {
      throw std::invalid_argument("expected t:value pairs, got '" + item + "'");
    }
    points.emplace_back(number(parts[0]), number(parts[1]));
  }
  return Profile(std::move(points));
}

double Profile::at(double t) const {
  if (t <= points_.front().first) return points_.front().second;
  if (t >= points_.back().first) return points_.back().second;
  const auto it = std::upper_bound(
      points_.begin(), points_.end(), t,
      [](double value, const std::pair<double, double>& p) { return value < p.first; });
  const auto& [t1, v1] = *it;
  const auto& [t0, v0] = *std::prev(it);
  return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
}

void ScenarioConfig::validate() const {
  if (!(duration > 0.0)) throw ConfigError("duration", "must be > 0");
  try {
    robot.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("robot", e.what());
  }
  if (!(gait_period > 0.0)) throw ConfigError("gait.period", "must be > 0");
  if (swing_height < 0.0) throw ConfigError("gait.swing_height", "must be >= 0");
  try {
    swing_gains.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("swing", e.what());
  }
  try {
    sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("sim", e.what());
  }
  try {
    mpc.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("mpc", e.what());
  }
  if (mpc.qp.tolerance <= 0.0) throw ConfigError("qp.tolerance", "must be > 0");
  if (mpc.qp.max_iterations < 1) throw ConfigError("qp.max_iterations", "must be >= 1");
  const double ratio = mpc.dt / sim.dt;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || std::round(ratio) < 1) {
    throw ConfigError("mpc.dt", "must be a whole multiple of sim.dt");
  }
  if (init_noise < 0.0) throw ConfigError("sim.init_noise", "must be >= 0");
  if (csv_name.empty()) throw ConfigError("output.csv", "must not be empty");
  if (summary_name.empty()) throw ConfigError("output.summary", "must not be empty");
}

void set_config_value(ScenarioConfig* config, const std::string& key,
                      const std::string& value) {
  const auto& table = setters();
  const auto it = table.find(key);
  if (it == table.end()) throw ConfigError(key, "unknown key");
  it->second(*config, key, value);
}

ScenarioConfig parse_config(const std::string& text) {
  ScenarioConfig config;
  bool has_duration = false;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    set_config_value(&config, key, line.substr(eq + 1));
    if (key == "duration") has_duration = true;
  }
  if (!has_duration) throw ConfigError("duration", "required key is missing");
  config.validate();
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  ScenarioConfig config = parse_config(buffer.str());
  if (config.name == "scenario") config.name = path.stem().string();
  return config;
}

}  // namespace bipedmpc
