// relnav: truth simulation, single filter runs and Monte Carlo studies for
// relative pose estimation of a tumbling box-shaped target.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "relnav/config.hpp"
#include "relnav/errors.hpp"
#include "relnav/harness.hpp"
#include "relnav/output.hpp"
#include "relnav/statistics.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

std::optional<int> parse_marker_limit(const std::string& value) {
  if (value == "all") {
    return std::nullopt;
  }
  std::size_t used = 0;
  int k = -1;
  try {
    k = std::stoi(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || k < 0) {
    throw relnav::ConfigError("--marker-limit: expected a non-negative integer or 'all'");
  }
  return k;
}

void print_summary(const relnav::MonteCarloSummary& s) {
  std::cout << "runs " << s.runs << ", diverged " << s.diverged << "\n";
  std::cout << "component  containment  sampled/cov  rmse\n";
  for (int c = 0; c < relnav::kStateDim; ++c) {
    std::cout << "  " << relnav::kComponentNames[c] << "\t" << s.containment_mean(c) << "\t"
              << s.sigma_ratio_mean(c) << "\t" << s.rmse_mean(c) << "\n";
  }
  std::cout << "median position RMSE " << s.position_rmse_median << " m, median attitude RMSE "
            << s.attitude_rmse_median << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relative pose estimation of an uncooperative tumbling target"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string in_dir;

  auto* simulate = app.add_subcommand("simulate", "Propagate the truth trajectory and true markers");
  simulate->add_option("--config", config_path, "Scenario file")->required();
  simulate->add_option("--out", out_dir, "Output directory")->required();

  std::uint64_t run_seed = 0;
  auto* run = app.add_subcommand("run", "Single filter run");
  run->add_option("--config", config_path, "Scenario file")->required();
  run->add_option("--seed", run_seed, "Run seed")->required();
  run->add_option("--out", out_dir, "Output directory")->required();

  std::optional<int> mc_runs;
  std::optional<std::uint64_t> mc_seed;
  std::optional<double> mc_sigma;
  std::optional<std::string> mc_limit;
  std::optional<double> mc_hz;
  auto* mc = app.add_subcommand("montecarlo", "Monte Carlo filter study");
  mc->add_option("--config", config_path, "Scenario file")->required();
  mc->add_option("--out", out_dir, "Output directory")->required();
  mc->add_option("--runs", mc_runs, "Number of runs");
  mc->add_option("--seed", mc_seed, "Base seed");
  mc->add_option("--sigma", mc_sigma, "Measurement noise std (m)");
  mc->add_option("--marker-limit", mc_limit, "Markers per frame, or 'all'");
  mc->add_option("--hz", mc_hz, "Filter frequency (Hz)");

  auto* report = app.add_subcommand("report", "Regenerate summary and plots from stored run CSVs");
  report->add_option("--in", in_dir, "Directory written by montecarlo")->required();
  report->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  relnav::ScenarioConfig cfg;
  try {
    if (!report->parsed()) {
      cfg = relnav::load_config(config_path);
    }
    if (mc->parsed()) {
      if (mc_runs) cfg.runs = *mc_runs;
      if (mc_seed) cfg.seed = *mc_seed;
      if (mc_sigma) cfg.noise.sigma = *mc_sigma;
      if (mc_limit) cfg.marker_limit = parse_marker_limit(*mc_limit);
      if (mc_hz) cfg.filter_hz = *mc_hz;
      relnav::validate(cfg);
    }
  } catch (const relnav::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (simulate->parsed()) {
      const relnav::TruthTrajectory truth = relnav::simulate_truth(cfg);
      relnav::write_truth(truth, out_dir);
      std::cout << "wrote " << truth.size() << " epochs to " << out_dir << "\n";
    } else if (run->parsed()) {
      const relnav::TruthTrajectory truth = relnav::simulate_truth(cfg);
      const relnav::RunRecord rec = relnav::run_single(cfg, truth, run_seed);
      relnav::write_run_csv(rec, fs::path(out_dir) / "run.csv");
      relnav::write_component_csv(rec, fs::path(out_dir) / "run_components.csv");
      const relnav::MonteCarloSummary s = relnav::summarize(std::span(&rec, 1));
      std::cout << (rec.diverged ? "diverged" : "completed") << ", position RMSE "
                << (s.position_rmse.empty() ? 0.0 : s.position_rmse.front()) << " m\n";
    } else if (mc->parsed()) {
      const relnav::TruthTrajectory truth = relnav::simulate_truth(cfg);
      const auto records = relnav::run_monte_carlo_records(cfg, truth);
      const relnav::MonteCarloSummary s = relnav::summarize(records);
      relnav::emit_outputs(s, records, out_dir);
      fs::create_directories(out_dir);
      std::ofstream(fs::path(out_dir) / "scenario.cfg") << relnav::serialize_config(cfg);
      print_summary(s);
    } else if (report->parsed()) {
      const relnav::MonteCarloSummary s = relnav::regenerate_report(in_dir, out_dir);
      print_summary(s);
    }
  } catch (const relnav::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
