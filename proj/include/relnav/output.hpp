#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "relnav/harness.hpp"
#include "relnav/statistics.hpp"

namespace relnav {

/// Significant digits used for CSV values: $OUT_PRECISION, default 17.
int output_precision();

/// truth.csv (t, chaser orbit, 12 states) and markers.csv (t, per-marker
/// position and visibility flag).
void write_truth(const TruthTrajectory& truth, const std::filesystem::path& dir);

/// t, 12 error components, 12 3-sigma bounds.
void write_run_csv(const RunRecord& rec, const std::filesystem::path& file);
/// Componentwise errors and raw covariance bounds with the same layout.
void write_component_csv(const RunRecord& rec, const std::filesystem::path& file);
/// Reads a file written by write_run_csv; a row with non-finite errors marks
/// the run diverged.
RunRecord read_run_csv(const std::filesystem::path& file);

void write_summary_csv(const MonteCarloSummary& summary, const std::filesystem::path& file);
std::string summary_json(const MonteCarloSummary& summary);

/// 4x3 grid of error panels: gray run traces, red dashed covariance 3-sigma,
/// green sampled 3-sigma.
std::string render_svg(const MonteCarloSummary& summary, std::span<const RunRecord> records,
                       const std::string& title);

/// Writes runs/run_NNNN.csv, runs/components_NNNN.csv, summary.csv,
/// summary.json and errors.svg under `out_dir`.
void emit_outputs(const MonteCarloSummary& summary, std::span<const RunRecord> records,
                  const std::filesystem::path& out_dir, const std::string& title = "UKF Monte Carlo");

/// Re-reads in_dir/runs/run_*.csv and writes summary.csv, summary.json and
/// errors.svg to `out_dir`.
MonteCarloSummary regenerate_report(const std::filesystem::path& in_dir,
                                    const std::filesystem::path& out_dir,
                                    const std::string& title = "UKF Monte Carlo");

}  // namespace relnav
