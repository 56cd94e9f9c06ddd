#include "bipedmpc/harness.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bipedmpc {
namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

double percentile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const auto rank = static_cast<size_t>(std::ceil(p * v.size()));
  return v[std::clamp<size_t>(rank, 1, v.size()) - 1];
}

double mean_over_tail(const SimLog& log, double window, int component) {
  const double t_end = log.rows.back().t;
  double sum = 0.0;
  int n = 0;
  for (const LogRow& r : log.rows) {
    if (r.t >= t_end - window - 1e-12) {
      sum += r.body.euler(component);
      ++n;
    }
  }
  return sum / n;
}

double max_yaw_drift(const SimLog& log) {
  const double yaw0 = log.rows.front().body.euler.z();
  double drift = 0.0;
  for (const LogRow& r : log.rows) {
    drift = std::max(drift, std::abs(r.body.euler.z() - yaw0));
  }
  return drift;
}

}  // namespace

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> columns = {
      "t",      "phi",    "theta",  "psi",    "px",     "py",     "pz",
      "wx",     "wy",     "wz",     "vx",     "vy",     "vz",     "F1x",
      "F1y",    "F1z",    "M1y",    "M1z",    "F2x",    "F2y",    "F2z",
      "M2y",    "M2z",    "tau1_1", "tau1_2", "tau1_3", "tau1_4", "tau1_5",
      "tau2_1", "tau2_2", "tau2_3", "tau2_4", "tau2_5", "stance1", "stance2",
      "qp_iters", "qp_time_us", "cmd_vx", "cmd_vy", "cmd_yawrate", "cmd_h"};
  return columns;
}

void write_csv(const SimLog& log, std::ostream& out) {
  const auto& cols = csv_columns();
  for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (const LogRow& r : log.rows) {
    std::vector<double> v;
    v.reserve(cols.size());
    v.push_back(r.t);
    for (int i = 0; i < 3; ++i) v.push_back(r.body.euler(i));
    for (int i = 0; i < 3; ++i) v.push_back(r.body.position(i));
    for (int i = 0; i < 3; ++i) v.push_back(r.body.angular_velocity(i));
    for (int i = 0; i < 3; ++i) v.push_back(r.body.velocity(i));
    for (int f = 0; f < 2; ++f) {
      for (int i = 0; i < 3; ++i) v.push_back(r.wrench[f].force(i));
      for (int i = 0; i < 2; ++i) v.push_back(r.wrench[f].moment(i));
    }
    for (int f = 0; f < 2; ++f) {
      for (int j = 0; j < kLegJoints; ++j) v.push_back(r.tau[f](j));
    }
    v.push_back(r.stance[0] ? 1.0 : 0.0);
    v.push_back(r.stance[1] ? 1.0 : 0.0);
    v.push_back(r.qp_iterations);
    v.push_back(r.qp_time_us);
    v.push_back(r.command.vx);
    v.push_back(r.command.vy);
    v.push_back(r.command.yaw_rate);
    v.push_back(r.command.height);
    for (size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << fmt(v[i]);
    out << '\n';
  }
}

void write_csv(const SimLog& log, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_csv(log, out);
  if (!out) throw IoError("write failed for " + path.string());
}

int CsvTable::column(const std::string& name) {
  const auto& cols = csv_columns();
  const auto it = std::find(cols.begin(), cols.end(), name);
  if (it == cols.end()) throw SchemaError("unknown column '" + name + "'");
  return static_cast<int>(it - cols.begin());
}

CsvTable parse_csv(std::istream& in) {
  const auto& cols = csv_columns();
  std::string line;
  if (!std::getline(in, line)) throw SchemaError("empty CSV");
  {
    std::vector<std::string> header;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) header.push_back(item);
    if (header != cols) throw SchemaError("CSV header does not match the log schema");
  }
  CsvTable table;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    row.reserve(cols.size());
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, ',')) {
      char* end = nullptr;
      const double v = std::strtod(item.c_str(), &end);
      if (item.empty() || end != item.c_str() + item.size()) {
        throw SchemaError("line " + std::to_string(line_no) + ": bad number '" +
                          item + "'");
      }
      row.push_back(v);
    }
    if (row.size() != cols.size()) {
      throw SchemaError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(cols.size()) + " fields, got " +
                        std::to_string(row.size()));
    }
    if (!table.rows.empty() && !(row[0] > table.rows.back()[0])) {
      throw SchemaError("line " + std::to_string(line_no) + ": time not increasing");
    }
    table.rows.push_back(std::move(row));
  }
  if (table.rows.empty()) throw SchemaError("CSV has no data rows");
  return table;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return parse_csv(in);
}

MetricsSummary compute_metrics(const CsvTable& table, const MetricsLimits& limits) {
  MetricsSummary m;
  const size_t n = table.rows.size();
  m.rows = static_cast<long>(n);
  const int c_t = CsvTable::column("t");
  const int c_phi = CsvTable::column("phi");
  const int c_theta = CsvTable::column("theta");
  const int c_psi = CsvTable::column("psi");
  const int c_px = CsvTable::column("px");
  const int c_py = CsvTable::column("py");
  const int c_pz = CsvTable::column("pz");
  const int c_vx = CsvTable::column("vx");
  const int c_cmd_vx = CsvTable::column("cmd_vx");
  const int c_yawrate = CsvTable::column("cmd_yawrate");
  const int c_iters = CsvTable::column("qp_iters");
  const int c_time = CsvTable::column("qp_time_us");
  const int c_tau = CsvTable::column("tau1_1");

  const auto& first = table.rows.front();
  const auto& last = table.rows.back();
  m.duration = last[c_t] - first[c_t];

  double err_sum = 0.0, orient_sq = 0.0;
  double yaw_desired = first[c_psi];
  std::vector<double> times;
  double iter_sum = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const auto& r = table.rows[i];
    if (i > 0) {
      const auto& prev = table.rows[i - 1];
      yaw_desired += prev[c_yawrate] * (r[c_t] - prev[c_t]);
    }
    const double err = std::abs(r[c_cmd_vx] - r[c_vx]);
    m.max_vx_error = std::max(m.max_vx_error, err);
    err_sum += err;
    const double yaw_err = r[c_psi] - yaw_desired;
    orient_sq += r[c_phi] * r[c_phi] + r[c_theta] * r[c_theta] + yaw_err * yaw_err;

    bool saturated = false;
    for (int j = 0; j < 10; ++j) {
      const double tau = std::abs(r[c_tau + j]);
      m.max_tau[j] = std::max(m.max_tau[j], tau);
      if (tau >= limits.max_torque - 1e-9) saturated = true;
    }
    if (saturated) ++m.torque_saturation_ticks;

    if (r[c_iters] >= 0.0) {
      ++m.qp_solves;
      iter_sum += r[c_iters];
      if (r[c_time] >= 0.0) times.push_back(r[c_time]);
    }
    if (std::abs(r[c_phi]) > limits.fall_angle ||
        std::abs(r[c_theta]) > limits.fall_angle || r[c_pz] < limits.fall_height) {
      m.fall = true;
    }
  }
  m.mean_vx_error = err_sum / n;
  m.orientation_rms = std::sqrt(orient_sq / n);
  if (m.qp_solves > 0) m.qp_iterations_mean = iter_sum / m.qp_solves;
  if (!times.empty()) {
    m.qp_p50_us = percentile(times, 0.5);
    m.qp_p99_us = percentile(times, 0.99);
    m.qp_max_us = *std::max_element(times.begin(), times.end());
  }
  m.distance = std::hypot(last[c_px] - first[c_px], last[c_py] - first[c_py]);
  return m;
}

std::string format_summary(const MetricsSummary& m) {
  std::ostringstream out;
  auto line = [&out](const std::string& key, const std::string& value) {
    out << key << " = " << value << '\n';
  };
  line("rows", std::to_string(m.rows));
  line("duration", fmt(m.duration));
  line("max_vx_error", fmt(m.max_vx_error));
  line("mean_vx_error", fmt(m.mean_vx_error));
  line("orientation_rms", fmt(m.orientation_rms));
  for (int j = 0; j < 10; ++j) {
    line("max_tau" + std::to_string(j / 5 + 1) + "_" + std::to_string(j % 5 + 1),
         fmt(m.max_tau[j]));
  }
  line("torque_saturation_ticks", std::to_string(m.torque_saturation_ticks));
  line("qp_solves", std::to_string(m.qp_solves));
  line("qp_iterations_mean", fmt(m.qp_iterations_mean));
  line("qp_p50_us", fmt(m.qp_p50_us));
  line("qp_p99_us", fmt(m.qp_p99_us));
  line("qp_max_us", fmt(m.qp_max_us));
  line("distance", fmt(m.distance));
  line("fall", m.fall ? "true" : "false");
  return out.str();
}

RunOutput run_to_files(const ScenarioConfig& config,
                       const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());
  RunOutput out;
  out.log = run_scenario(config);
  out.csv_path = out_dir / config.csv_name;
  out.summary_path = out_dir / config.summary_name;
  write_csv(out.log, out.csv_path);
  MetricsLimits limits;
  limits.max_torque = config.robot.max_torque;
  out.summary = compute_metrics(read_csv(out.csv_path), limits);
  std::ofstream summary(out.summary_path);
  if (!summary) throw IoError("cannot write " + out.summary_path.string());
  summary << format_summary(out.summary);
  return out;
}

ScenarioConfig step_test_config(const ScenarioConfig& base, ModelVariant variant,
                                bool pitch, const CompareSettings& s) {
  ScenarioConfig c = base;
  c.gait = GaitType::kStand;
  c.duration = s.duration;
  c.mpc.variant = variant;
  c.cmd_vx = Profile(0.0);
  c.cmd_vy = Profile(0.0);
  c.cmd_yaw_rate = Profile(0.0);
  const Profile step({{s.step_time, 0.0}, {s.step_time + 0.01, s.step_angle}});
  c.cmd_roll = pitch ? Profile(0.0) : step;
  c.cmd_pitch = pitch ? step : Profile(0.0);
  return c;
}

std::vector<VariantResponse> compare_models(const ScenarioConfig& base,
                                            const CompareSettings& s) {
  std::vector<VariantResponse> out;
  for (ModelVariant v : {ModelVariant::kModel1, ModelVariant::kModel2,
                         ModelVariant::kModel3}) {
    VariantResponse r;
    r.variant = v;
    const SimLog pitch_log = run_scenario(step_test_config(base, v, true, s));
    const SimLog roll_log = run_scenario(step_test_config(base, v, false, s));
    r.pitch_final = mean_over_tail(pitch_log, s.settle_window, 1);
    r.roll_final = mean_over_tail(roll_log, s.settle_window, 0);
    r.yaw_drift_pitch = max_yaw_drift(pitch_log);
    r.yaw_drift_roll = max_yaw_drift(roll_log);
    r.fell_pitch = pitch_log.fell;
    r.fell_roll = roll_log.fell;
    out.push_back(r);
  }
  return out;
}

std::string format_comparison(const std::vector<VariantResponse>& responses) {
  std::ostringstream out;
  constexpr double kDeg = 180.0 / 3.14159265358979323846;
  for (const VariantResponse& r : responses) {
    const std::string p = to_string(r.variant);
    out << p << ".pitch_final_deg = " << fmt(r.pitch_final * kDeg) << '\n'
        << p << ".roll_final_deg = " << fmt(r.roll_final * kDeg) << '\n'
        << p << ".yaw_drift_pitch_deg = " << fmt(r.yaw_drift_pitch * kDeg) << '\n'
        << p << ".yaw_drift_roll_deg = " << fmt(r.yaw_drift_roll * kDeg) << '\n'
        << p << ".fell_pitch = " << (r.fell_pitch ? "true" : "false") << '\n'
        << p << ".fell_roll = " << (r.fell_roll ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace bipedmpc
