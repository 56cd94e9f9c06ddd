#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bipedmpc/harness.h"
#include "bipedmpc/scenario.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFall = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

struct Options {
  std::string path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration;
};

bipedmpc::ScenarioConfig load(const Options& opt) {
  bipedmpc::ScenarioConfig config = bipedmpc::load_config(opt.path);
  if (opt.seed) config.seed = *opt.seed;
  if (opt.duration) {
    config.duration = *opt.duration;
    config.validate();
  }
  return config;
}

std::filesystem::path out_dir(const Options& opt, const std::string& name) {
  if (!opt.out_dir.empty()) return opt.out_dir;
  return std::filesystem::path("out") / name;
}

int run(const Options& opt) {
  const bipedmpc::ScenarioConfig config = load(opt);
  const bipedmpc::RunOutput out = bipedmpc::run_to_files(config, out_dir(opt, config.name));
  std::cout << bipedmpc::format_summary(out.summary);
  std::cout << "csv = " << out.csv_path.string() << '\n';
  if (out.log.fell) {
    std::cerr << "fall: " << out.log.fall_reason << " at t = " << out.log.rows.back().t
              << '\n';
    return kExitFall;
  }
  return kExitOk;
}

int compare(const Options& opt) {
  const bipedmpc::ScenarioConfig config = load(opt);
  bipedmpc::CompareSettings settings;
  if (opt.duration) settings.duration = *opt.duration;
  const auto responses = bipedmpc::compare_models(config, settings);
  const std::string text = bipedmpc::format_comparison(responses);
  std::cout << text;
  if (!opt.out_dir.empty()) {
    std::filesystem::create_directories(opt.out_dir);
    std::ofstream file(std::filesystem::path(opt.out_dir) / "compare_models.txt");
    if (!file) throw bipedmpc::IoError("cannot write comparison to " + opt.out_dir);
    file << text;
  }
  return kExitOk;
}

int report(const Options& opt) {
  const bipedmpc::MetricsSummary summary =
      bipedmpc::compute_metrics(bipedmpc::read_csv(opt.path));
  std::cout << bipedmpc::format_summary(summary);
  return summary.fall ? kExitFall : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Convex MPC for a 10-DoF biped: closed-loop runs and log analysis"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;
  double duration = 0.0;

  auto add_common = [&](CLI::App* sub, const std::string& what) {
    sub->add_option(what == "csv" ? "csv" : "config", opt.path,
                    what == "csv" ? "Log CSV to analyse" : "Scenario config file")
        ->required();
    sub->add_option("--out-dir", opt.out_dir, "Output directory");
    sub->add_option("--seed", seed, "Override the scenario seed");
    sub->add_option("--duration-override", duration, "Override the run duration (s)")
        ->check(CLI::PositiveNumber);
  };
  CLI::App* run_cmd = app.add_subcommand("run", "Run a scenario and write CSV + summary");
  add_common(run_cmd, "config");
  CLI::App* compare_cmd =
      app.add_subcommand("compare-models", "Pitch/roll step tests for each model variant");
  add_common(compare_cmd, "config");
  CLI::App* report_cmd = app.add_subcommand("report", "Recompute the summary of a CSV log");
  add_common(report_cmd, "csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }
  for (CLI::App* sub : {run_cmd, compare_cmd, report_cmd}) {
    if (sub->count("--seed") > 0) opt.seed = seed;
    if (sub->count("--duration-override") > 0) opt.duration = duration;
  }

  try {
    if (*run_cmd) return run(opt);
    if (*compare_cmd) return compare(opt);
    return report(opt);
  } catch (const bipedmpc::ConfigError& e) {
    std::cerr << "config error [" << e.field() << "]: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}
