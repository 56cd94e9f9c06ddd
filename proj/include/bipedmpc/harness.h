#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "bipedmpc/closed_loop.h"
#include "bipedmpc/dynamics.h"
#include "bipedmpc/scenario.h"

namespace bipedmpc {

class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Column names of the log CSV, in order.
const std::vector<std::string>& csv_columns();

void write_csv(const SimLog& log, std::ostream& out);
void write_csv(const SimLog& log, const std::filesystem::path& path);

struct CsvTable {
  std::vector<std::vector<double>> rows;

  /// Index of a schema column; throws SchemaError for unknown names.
  static int column(const std::string& name);
  double at(size_t row, const std::string& name) const {
    return rows[row][column(name)];
  }
};

/// Parses a log CSV; throws SchemaError on a wrong header, a short or
/// malformed row, or non-increasing time.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

struct MetricsSummary {
  long rows = 0;
  double duration = 0.0;           // s
  double max_vx_error = 0.0;       // m/s
  double mean_vx_error = 0.0;
  double orientation_rms = 0.0;    // rad, vs level and integrated yaw command
  std::array<double, 10> max_tau{};  // N m, leg 1 joints 1..5 then leg 2
  long torque_saturation_ticks = 0;
  long qp_solves = 0;
  double qp_iterations_mean = -1.0;
  double qp_p50_us = -1.0;         // -1 when timing was not recorded
  double qp_p99_us = -1.0;
  double qp_max_us = -1.0;
  double distance = 0.0;           // m, horizontal displacement
  bool fall = false;
};

struct MetricsLimits {
  double max_torque = 33.5;   // saturation threshold, N m
  double fall_angle = 0.6;    // rad
  double fall_height = 0.1;   // m
};

/// Everything here is recomputable from the CSV columns alone.
MetricsSummary compute_metrics(const CsvTable& table, const MetricsLimits& limits = {});

/// `key = value` lines.
std::string format_summary(const MetricsSummary& summary);

struct RunOutput {
  SimLog log;
  MetricsSummary summary;
  std::filesystem::path csv_path;
  std::filesystem::path summary_path;
};

/// Runs a scenario, writes its CSV and summary into `out_dir`; the summary
/// is computed by reading the written CSV back.
RunOutput run_to_files(const ScenarioConfig& config,
                       const std::filesystem::path& out_dir);

struct VariantResponse {
  ModelVariant variant = ModelVariant::kModel3;
  double pitch_final = 0.0;       // rad, mean over the settle window
  double roll_final = 0.0;        // rad
  double yaw_drift_pitch = 0.0;   // rad, max |psi - psi_0| in the pitch test
  double yaw_drift_roll = 0.0;    // rad, max |psi - psi_0| in the roll test
  bool fell_pitch = false;
  bool fell_roll = false;
};

struct CompareSettings {
  double step_angle = 10.0 * 3.14159265358979323846 / 180.0;  // rad
  double step_time = 0.5;       // s
  double duration = 3.0;        // s
  double settle_window = 0.5;   // s, averaged at the end of the run
};

/// Pitch and roll step tests in double-support standing for each variant.
std::vector<VariantResponse> compare_models(const ScenarioConfig& base,
                                            const CompareSettings& settings = {});
std::string format_comparison(const std::vector<VariantResponse>& responses);

/// Scenario config for one step test of compare_models.
ScenarioConfig step_test_config(const ScenarioConfig& base, ModelVariant variant,
                                bool pitch, const CompareSettings& settings);

}  // namespace bipedmpc
