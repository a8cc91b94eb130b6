#include "relnav/output.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "relnav/errors.hpp"

namespace relnav {

namespace fs = std::filesystem;

int output_precision() {
  if (const char* env = std::getenv("OUT_PRECISION")) {
    const int p = std::atoi(env);
    if (p >= 1 && p <= 17) {
      return p;
    }
  }
  return 17;
}

namespace {

std::ofstream open_output(const fs::path& file) {
  if (file.has_parent_path()) {
    fs::create_directories(file.parent_path());
  }
  std::ofstream out(file, std::ios::binary);
  if (!out) {
    throw Error("cannot write " + file.string());
  }
  out << std::setprecision(output_precision());
  return out;
}

void write_header(std::ostream& out, const char* a, const char* b) {
  out << "t";
  for (const char* name : kComponentNames) out << ',' << a << name;
  for (const char* name : kComponentNames) out << ',' << b << name;
  out << '\n';
}

void write_rows(std::ostream& out, const std::vector<double>& times,
                const std::vector<FullState12>& first, const std::vector<FullState12>& second) {
  for (std::size_t e = 0; e < times.size(); ++e) {
    out << times[e];
    for (int c = 0; c < kStateDim; ++c) out << ',' << first[e](c);
    for (int c = 0; c < kStateDim; ++c) out << ',' << second[e](c);
    out << '\n';
  }
}

double parse_number(const std::string& token, const fs::path& file) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    // from_chars does not accept a leading '-' for nan.
    if (token == "-nan") return -std::numeric_limits<double>::quiet_NaN();
    throw Error("bad number '" + token + "' in " + file.string());
  }
  return v;
}

nlohmann::json number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fmt_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

void write_truth(const TruthTrajectory& truth, const fs::path& dir) {
  std::ofstream states = open_output(dir / "truth.csv");
  states << "t,r_m,r_dot_m_s,theta_rad,theta_dot_rad_s";
  for (const char* name : kComponentNames) states << ',' << name;
  states << '\n';
  for (std::size_t k = 0; k < truth.size(); ++k) {
    const ChaserOrbitState& c = truth.chaser[k];
    states << truth.times[k] << ',' << c.r << ',' << c.r_dot << ',' << c.theta << ',' << c.theta_dot;
    for (int i = 0; i < kStateDim; ++i) states << ',' << truth.states[k](i);
    states << '\n';
  }

  std::ofstream markers = open_output(dir / "markers.csv");
  markers << "t";
  for (int m = 0; m < kMarkerCount; ++m) {
    const char l = MarkerSet::label(m);
    markers << ',' << l << "_x," << l << "_y," << l << "_z," << l << "_visible";
  }
  markers << '\n';
  for (std::size_t k = 0; k < truth.size(); ++k) {
    markers << truth.times[k];
    for (int m = 0; m < kMarkerCount; ++m) {
      const Eigen::Vector3d& p = truth.markers[k][m];
      markers << ',' << p.x() << ',' << p.y() << ',' << p.z() << ',' << (truth.visibility[k][m] ? 1 : 0);
    }
    markers << '\n';
  }
}

void write_run_csv(const RunRecord& rec, const fs::path& file) {
  std::ofstream out = open_output(file);
  write_header(out, "err_", "sig3_");
  write_rows(out, rec.times, rec.error, rec.sigma3);
}

void write_component_csv(const RunRecord& rec, const fs::path& file) {
  std::ofstream out = open_output(file);
  write_header(out, "err_", "sig3_");
  write_rows(out, rec.times, rec.component_error, rec.component_sigma3);
}

RunRecord read_run_csv(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error("cannot read " + file.string());
  }
  std::string line;
  std::getline(in, line);
  RunRecord rec;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) {
      values.push_back(parse_number(token, file));
    }
    if (values.size() != 1 + 2 * kStateDim) {
      throw Error("expected 25 columns in " + file.string());
    }
    FullState12 err, sig;
    for (int c = 0; c < kStateDim; ++c) {
      err(c) = values[1 + c];
      sig(c) = values[1 + kStateDim + c];
    }
    if (!err.allFinite() && !rec.diverged) {
      rec.diverged = true;
      rec.diverged_epoch = static_cast<int>(rec.times.size());
    }
    rec.times.push_back(values[0]);
    rec.error.push_back(err);
    rec.sigma3.push_back(sig);
  }
  return rec;
}

void write_summary_csv(const MonteCarloSummary& s, const fs::path& file) {
  std::ofstream out = open_output(file);
  out << "t";
  for (const char* prefix : {"sampled3s_", "cov3s_", "rmse_", "containment_"}) {
    for (const char* name : kComponentNames) out << ',' << prefix << name;
  }
  out << '\n';
  for (std::size_t e = 0; e < s.times.size(); ++e) {
    out << s.times[e];
    for (const auto* block : {&s.sampled_sigma3, &s.mean_cov_sigma3, &s.rmse, &s.containment}) {
      for (int c = 0; c < kStateDim; ++c) out << ',' << (*block)[e](c);
    }
    out << '\n';
  }
}

std::string summary_json(const MonteCarloSummary& s) {
  nlohmann::json j;
  j["runs"] = s.runs;
  j["diverged"] = s.diverged;
  j["epochs"] = s.times.size();
  nlohmann::json comps = nlohmann::json::array();
  for (int c = 0; c < kStateDim; ++c) {
    comps.push_back({{"name", kComponentNames[c]},
                     {"containment", number(s.containment_mean(c))},
                     {"sigma_ratio", number(s.sigma_ratio_mean(c))},
                     {"rmse", number(s.rmse_mean(c))}});
  }
  j["components"] = comps;
  j["position_rmse_median_m"] = number(s.position_rmse_median);
  j["attitude_rmse_median"] = number(s.attitude_rmse_median);
  nlohmann::json pos = nlohmann::json::array();
  for (const double v : s.position_rmse) pos.push_back(number(v));
  nlohmann::json att = nlohmann::json::array();
  for (const double v : s.attitude_rmse) att.push_back(number(v));
  j["position_rmse_m"] = pos;
  j["attitude_rmse"] = att;
  return j.dump(2) + "\n";
}

std::string render_svg(const MonteCarloSummary& s, std::span<const RunRecord> records,
                       const std::string& title) {
  constexpr double kPanelW = 380.0, kPanelH = 210.0;
  constexpr double kLeft = 60.0, kTop = 70.0, kGapX = 70.0, kGapY = 50.0;
  constexpr std::array<const char*, 4> kUnits = {"m", "m/s", "-", "rad/s"};
  constexpr int kCols = 3, kRows = 4;
  const double width = kLeft + kCols * kPanelW + (kCols - 1) * kGapX + 20.0;
  const double height = kTop + kRows * (kPanelH + kGapY);
  const std::size_t epochs = s.times.size();
  const double t0 = epochs > 0 ? s.times.front() : 0.0;
  const double t1 = epochs > 1 ? s.times.back() : t0 + 1.0;

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width) << "\" height=\""
      << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << ' ' << fmt(height) << "\">\n";
  out << "<!-- relnav monte carlo plot: runs=" << s.runs << " diverged=" << s.diverged
      << " epochs=" << epochs << " -->\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(width / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
      << "font-size=\"16\">" << title << "</text>\n";
  out << "<g font-family=\"sans-serif\" font-size=\"12\">"
      << "<line x1=\"70\" y1=\"44\" x2=\"100\" y2=\"44\" stroke=\"#9e9e9e\" stroke-width=\"1\"/>"
      << "<text x=\"106\" y=\"48\">Monte Carlo runs</text>"
      << "<line x1=\"240\" y1=\"44\" x2=\"270\" y2=\"44\" stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>"
      << "<text x=\"276\" y=\"48\">covariance 3&#963;</text>"
      << "<line x1=\"420\" y1=\"44\" x2=\"450\" y2=\"44\" stroke=\"#2ca02c\" stroke-width=\"1.5\"/>"
      << "<text x=\"456\" y=\"48\">sampled 3&#963;</text></g>\n";

  for (int c = 0; c < kStateDim; ++c) {
    const double x0 = kLeft + (c % kCols) * (kPanelW + kGapX);
    const double y0 = kTop + (c / kCols) * (kPanelH + kGapY);

    // Scale from the envelopes after the initial transient.
    double ymax = 0.0;
    for (std::size_t e = epochs / 10; e < epochs; ++e) {
      for (const double v : {s.sampled_sigma3[e](c), s.mean_cov_sigma3[e](c)}) {
        if (std::isfinite(v)) ymax = std::max(ymax, v);
      }
    }
    ymax = ymax > 0.0 ? 1.25 * ymax : 1.0;

    const auto px = [&](double t) { return x0 + (t - t0) / (t1 - t0) * kPanelW; };
    const auto py = [&](double v) { return y0 + kPanelH / 2 - v / ymax * (kPanelH / 2); };

    out << "<!-- panel " << kComponentNames[c] << " ymax=" << fmt_label(ymax)
        << " containment=" << fmt_label(s.containment_mean(c))
        << " sigma_ratio=" << fmt_label(s.sigma_ratio_mean(c)) << " -->\n";
    out << "<clipPath id=\"clip" << c << "\"><rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0)
        << "\" width=\"" << fmt(kPanelW) << "\" height=\"" << fmt(kPanelH) << "\"/></clipPath>\n";
    out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(kPanelW)
        << "\" height=\"" << fmt(kPanelH) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"0.8\"/>\n";
    out << "<text x=\"" << fmt(x0 + kPanelW / 2) << "\" y=\"" << fmt(y0 - 6)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">error "
        << kComponentNames[c] << " [" << kUnits[c / 3] << "]</text>\n";
    out << "<text x=\"" << fmt(x0 - 4) << "\" y=\"" << fmt(y0 + 10)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" << fmt_label(ymax)
        << "</text>\n";
    out << "<text x=\"" << fmt(x0 - 4) << "\" y=\"" << fmt(y0 + kPanelH)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"9\">" << fmt_label(-ymax)
        << "</text>\n";
    out << "<g font-family=\"sans-serif\" font-size=\"9\">"
        << "<text x=\"" << fmt(x0) << "\" y=\"" << fmt(y0 + kPanelH + 12) << "\">" << fmt_label(t0) << "</text>"
        << "<text x=\"" << fmt(x0 + kPanelW / 2) << "\" y=\"" << fmt(y0 + kPanelH + 12)
        << "\" text-anchor=\"middle\">t [s]</text>"
        << "<text x=\"" << fmt(x0 + kPanelW) << "\" y=\"" << fmt(y0 + kPanelH + 12)
        << "\" text-anchor=\"end\">" << fmt_label(t1) << "</text></g>\n";
    out << "<line x1=\"" << fmt(x0) << "\" y1=\"" << fmt(py(0.0)) << "\" x2=\"" << fmt(x0 + kPanelW)
        << "\" y2=\"" << fmt(py(0.0)) << "\" stroke=\"#dddddd\" stroke-width=\"0.6\"/>\n";
    out << "<g clip-path=\"url(#clip" << c << ")\">\n";

    const auto polyline = [&](const auto& value, const char* style) {
      std::string pts;
      const auto flush = [&] {
        if (!pts.empty()) {
          out << "<polyline fill=\"none\" " << style << " points=\"" << pts << "\"/>\n";
          pts.clear();
        }
      };
      for (std::size_t e = 0; e < epochs; ++e) {
        const double v = value(e);
        if (!std::isfinite(v)) {
          flush();
          continue;
        }
        if (!pts.empty()) pts += ' ';
        pts += fmt(px(s.times[e])) + ',' + fmt(py(v));
      }
      flush();
    };

    constexpr const char* kRunStyle = "stroke=\"#9e9e9e\" stroke-width=\"0.6\"";
    constexpr const char* kCovStyle = "stroke=\"#d62728\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"";
    constexpr const char* kSampledStyle = "stroke=\"#2ca02c\" stroke-width=\"1.5\"";
    for (const RunRecord& r : records) {
      if (r.size() != epochs) continue;
      polyline([&](std::size_t e) { return r.error[e](c); }, kRunStyle);
    }
    for (const double sign : {1.0, -1.0}) {
      polyline([&](std::size_t e) { return sign * s.mean_cov_sigma3[e](c); }, kCovStyle);
    }
    for (const double sign : {1.0, -1.0}) {
      polyline([&](std::size_t e) { return sign * s.sampled_sigma3[e](c); }, kSampledStyle);
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void emit_outputs(const MonteCarloSummary& summary, std::span<const RunRecord> records,
                  const fs::path& out_dir, const std::string& title) {
  fs::create_directories(out_dir / "runs");
  for (std::size_t i = 0; i < records.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "%04zu.csv", i);
    write_run_csv(records[i], out_dir / "runs" / (std::string("run_") + name));
    write_component_csv(records[i], out_dir / "runs" / (std::string("components_") + name));
  }
  write_summary_csv(summary, out_dir / "summary.csv");
  {
    std::ofstream json = open_output(out_dir / "summary.json");
    json << summary_json(summary);
  }
  {
    std::ofstream svg = open_output(out_dir / "errors.svg");
    svg << render_svg(summary, records, title);
  }
}

MonteCarloSummary regenerate_report(const fs::path& in_dir, const fs::path& out_dir,
                                    const std::string& title) {
  std::vector<fs::path> files;
  const fs::path runs_dir = in_dir / "runs";
  if (!fs::is_directory(runs_dir)) {
    throw Error("no runs/ directory under " + in_dir.string());
  }
  for (const auto& entry : fs::directory_iterator(runs_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("run_", 0) == 0 && entry.path().extension() == ".csv") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) {
    throw Error("no run CSV files under " + runs_dir.string());
  }
  std::vector<RunRecord> records;
  records.reserve(files.size());
  for (const fs::path& f : files) {
    records.push_back(read_run_csv(f));
  }
  const MonteCarloSummary summary = summarize(records);
  fs::create_directories(out_dir);
  write_summary_csv(summary, out_dir / "summary.csv");
  {
    std::ofstream json = open_output(out_dir / "summary.json");
    json << summary_json(summary);
  }
  {
    std::ofstream svg = open_output(out_dir / "errors.svg");
    svg << render_svg(summary, records, title);
  }
  return summary;
}

}  // namespace relnav
