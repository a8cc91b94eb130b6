#include "relnav/config.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "relnav/errors.hpp"

namespace relnav {

FullState12 ScenarioConfig::default_initial_truth() {
  FullState12 x;
  x << 10.0, -60.0, 5.0,        // m
      0.01, -0.0209, 0.0,       // m/s
      0.1, -0.2, 0.3,           // MRP
      0.01, -0.02, 0.04;        // rad/s
  return x;
}

FullState12 ScenarioConfig::default_initial_sigma() {
  FullState12 s;
  s << 0.5, 0.5, 0.5,           // m
      0.01, 0.01, 0.01,         // m/s
      0.02, 0.02, 0.02,         // MRP
      0.002, 0.002, 0.002;      // rad/s
  return s;
}

Eigen::MatrixXd ScenarioConfig::initial_covariance() const {
  return initial_sigma.cwiseAbs2().asDiagonal().toDenseMatrix();
}

int ScenarioConfig::epoch_count() const {
  return static_cast<int>(std::floor(duration * filter_hz + 1e-9)) + 1;
}

ChaserOrbitState ScenarioConfig::initial_chaser() const {
  return ChaserOrbitState::from_elements(chaser_semi_major_axis, chaser_eccentricity,
                                         chaser_true_anomaly, mu);
}

DynamicsModel ScenarioConfig::dynamics_model() const {
  DynamicsModel m;
  m.mu = mu;
  m.inertia = InertiaMatrix::diagonal(inertia_diagonal);
  m.profile = ChaserAttitudeProfile::nadir_pointing();
  return m;
}

FilterModel ScenarioConfig::filter_model() const {
  FilterModel m;
  m.dynamics = dynamics_model();
  m.markers = MarkerSet(geometry);
  m.noise = noise;
  m.noise.sigma = filter_sigma.value_or(noise.sigma);
  m.params = ukf;
  if (!process_noise_diagonal.isZero(0.0)) {
    m.process_noise = process_noise_diagonal.asDiagonal().toDenseMatrix();
  }
  return m;
}

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError(field + ": " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    out.push_back(trim(item));
  }
  return out;
}

double to_double(const std::string& token, const std::string& field) {
  double v = 0.0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || token.empty()) {
    fail(field, "expected a number, got '" + token + "'");
  }
  return v;
}

std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

template <int N>
Eigen::Matrix<double, N, 1> to_vector(const std::string& value, const std::string& field) {
  const auto items = split_list(value);
  if (static_cast<int>(items.size()) != N) {
    fail(field, "expected " + std::to_string(N) + " comma-separated values");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) {
    v(i) = to_double(items[i], field);
  }
  return v;
}

template <typename Derived>
std::string format_vector(const Eigen::MatrixBase<Derived>& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) {
      out += ", ";
    }
    out += format_double(v(i));
  }
  return out;
}

bool to_bool(const std::string& token, const std::string& field) {
  if (token == "true") return true;
  if (token == "false") return false;
  fail(field, "expected true or false, got '" + token + "'");
}

long long to_integer(const std::string& token, const std::string& field) {
  long long v = 0;
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, v);
  if (ec != std::errc() || ptr != end || token.empty()) {
    fail(field, "expected an integer, got '" + token + "'");
  }
  return v;
}

struct Field {
  std::string_view key;
  std::function<void(ScenarioConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

Field scalar(std::string_view key, double ScenarioConfig::*member) {
  return {key,
          [member](ScenarioConfig& c, const std::string& v, const std::string& f) {
            c.*member = to_double(v, f);
          },
          [member](const ScenarioConfig& c) { return format_double(c.*member); }};
}

// With `broadcast`, a single value fills all three entries.
Field block3(std::string_view key, FullState12 ScenarioConfig::*member, int offset,
             bool broadcast = false) {
  return {key,
          [member, offset, broadcast](ScenarioConfig& c, const std::string& v, const std::string& f) {
            if (broadcast && split_list(v).size() == 1) {
              (c.*member).segment<3>(offset).setConstant(to_double(v, f));
            } else {
              (c.*member).segment<3>(offset) = to_vector<3>(v, f);
            }
          },
          [member, offset](const ScenarioConfig& c) {
            return format_vector((c.*member).segment<3>(offset));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      scalar("mu_m3_s2", &ScenarioConfig::mu),
      scalar("chaser.semi_major_axis_m", &ScenarioConfig::chaser_semi_major_axis),
      scalar("chaser.eccentricity", &ScenarioConfig::chaser_eccentricity),
      scalar("chaser.true_anomaly_rad", &ScenarioConfig::chaser_true_anomaly),
      block3("truth.position_m", &ScenarioConfig::initial_truth, 0),
      block3("truth.velocity_m_s", &ScenarioConfig::initial_truth, 3),
      block3("truth.mrp", &ScenarioConfig::initial_truth, 6),
      block3("truth.omega_rad_s", &ScenarioConfig::initial_truth, 9),
      block3("estimate.sigma_position_m", &ScenarioConfig::initial_sigma, 0, true),
      block3("estimate.sigma_velocity_m_s", &ScenarioConfig::initial_sigma, 3, true),
      block3("estimate.sigma_mrp", &ScenarioConfig::initial_sigma, 6, true),
      block3("estimate.sigma_omega_rad_s", &ScenarioConfig::initial_sigma, 9, true),
      {"estimate.perturb",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         c.perturb_initial_estimate = to_bool(v, f);
       },
       [](const ScenarioConfig& c) { return std::string(c.perturb_initial_estimate ? "true" : "false"); }},
      {"target.inertia_kg_m2",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         c.inertia_diagonal = to_vector<3>(v, f);
       },
       [](const ScenarioConfig& c) { return format_vector(c.inertia_diagonal); }},
      {"target.half_extents_m",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         c.geometry.half_extents = to_vector<3>(v, f);
       },
       [](const ScenarioConfig& c) { return format_vector(c.geometry.half_extents); }},
      {"target.com_offset_m",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         c.geometry.com_offset = to_vector<3>(v, f);
       },
       [](const ScenarioConfig& c) { return format_vector(c.geometry.com_offset); }},
      {"noise.sigma_m",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) { c.noise.sigma = to_double(v, f); },
       [](const ScenarioConfig& c) { return format_double(c.noise.sigma); }},
      {"noise.dropout_prob",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         c.noise.dropout_prob = to_double(v, f);
       },
       [](const ScenarioConfig& c) { return format_double(c.noise.dropout_prob); }},
      {"filter.marker_limit",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         if (v == "all") {
           c.marker_limit.reset();
         } else {
           c.marker_limit = static_cast<int>(to_integer(v, f));
         }
       },
       [](const ScenarioConfig& c) {
         return c.marker_limit ? std::to_string(*c.marker_limit) : std::string("all");
       }},
      {"filter.measurement_sigma_m",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         if (v == "same") {
           c.filter_sigma.reset();
         } else {
           c.filter_sigma = to_double(v, f);
         }
       },
       [](const ScenarioConfig& c) {
         return c.filter_sigma ? format_double(*c.filter_sigma) : std::string("same");
       }},
      scalar("filter.hz", &ScenarioConfig::filter_hz),
      {"filter.alpha",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) { c.ukf.alpha = to_double(v, f); },
       [](const ScenarioConfig& c) { return format_double(c.ukf.alpha); }},
      {"filter.beta",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) { c.ukf.beta = to_double(v, f); },
       [](const ScenarioConfig& c) { return format_double(c.ukf.beta); }},
      {"filter.kappa",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) { c.ukf.kappa = to_double(v, f); },
       [](const ScenarioConfig& c) { return format_double(c.ukf.kappa); }},
      {"filter.regenerate_sigma_points",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         c.ukf.regenerate_sigma_points = to_bool(v, f);
       },
       [](const ScenarioConfig& c) {
         return std::string(c.ukf.regenerate_sigma_points ? "true" : "false");
       }},
      {"filter.process_noise_diag",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         const auto items = split_list(v);
         if (items.size() == 1) {
           c.process_noise_diagonal.setConstant(to_double(items[0], f));
         } else {
           c.process_noise_diagonal = to_vector<12>(v, f);
         }
       },
       [](const ScenarioConfig& c) { return format_vector(c.process_noise_diagonal); }},
      scalar("sim.duration_s", &ScenarioConfig::duration),
      {"sim.runs",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         c.runs = static_cast<int>(to_integer(v, f));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.runs); }},
      {"sim.seed",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         std::uint64_t s = 0;
         const char* end = v.data() + v.size();
         const auto [ptr, ec] = std::from_chars(v.data(), end, s);
         if (ec != std::errc() || ptr != end || v.empty()) {
           fail(f, "expected an unsigned 64-bit integer, got '" + v + "'");
         }
         c.seed = s;
       },
       [](const ScenarioConfig& c) { return std::to_string(c.seed); }},
      {"sim.threads",
       [](ScenarioConfig& c, const std::string& v, const std::string& f) {
         c.threads = static_cast<int>(to_integer(v, f));
       },
       [](const ScenarioConfig& c) { return std::to_string(c.threads); }},
      scalar("sim.truth_rel_tol", &ScenarioConfig::truth_rel_tol),
      scalar("sim.truth_abs_tol", &ScenarioConfig::truth_abs_tol),
  };
  return table;
}

const Field* find_field(std::string_view key) {
  for (const Field& f : fields()) {
    if (f.key == key) {
      return &f;
    }
  }
  return nullptr;
}

}  // namespace

void validate(const ScenarioConfig& c) {
  if (!(c.mu > 0.0)) fail("mu_m3_s2", "must be positive");
  if (!(c.chaser_semi_major_axis > 0.0)) fail("chaser.semi_major_axis_m", "must be positive");
  if (!(c.chaser_eccentricity >= 0.0 && c.chaser_eccentricity < 1.0)) {
    fail("chaser.eccentricity", "must lie in [0, 1)");
  }
  if (!(c.chaser_semi_major_axis * (1.0 - c.chaser_eccentricity) > kEarthRadius)) {
    fail("chaser.semi_major_axis_m", "periapsis radius must exceed the Earth radius");
  }
  if (!c.initial_truth.allFinite()) fail("truth", "initial state must be finite");
  for (int i = 0; i < 12; ++i) {
    if (!(c.initial_sigma(i) > 0.0) || !std::isfinite(c.initial_sigma(i))) {
      static constexpr std::array<const char*, 4> blocks = {
          "estimate.sigma_position_m", "estimate.sigma_velocity_m_s", "estimate.sigma_mrp",
          "estimate.sigma_omega_rad_s"};
      fail(blocks[i / 3], "covariance diagonal entries must be positive");
    }
  }
  try {
    InertiaMatrix::diagonal(c.inertia_diagonal);
  } catch (const DomainError& e) {
    fail("target.inertia_kg_m2", e.what());
  }
  if (!(c.geometry.half_extents.minCoeff() > 0.0)) fail("target.half_extents_m", "must be positive");
  if (!(c.noise.sigma >= 0.0) || !std::isfinite(c.noise.sigma)) fail("noise.sigma_m", "must be >= 0");
  if (!(c.noise.dropout_prob >= 0.0 && c.noise.dropout_prob <= 1.0)) {
    fail("noise.dropout_prob", "must lie in [0, 1]");
  }
  if (c.filter_sigma && !(*c.filter_sigma > 0.0 && std::isfinite(*c.filter_sigma))) {
    fail("filter.measurement_sigma_m", "must be > 0 or 'same'");
  }
  if (!c.filter_sigma && c.noise.sigma == 0.0) {
    fail("filter.measurement_sigma_m", "must be set when noise.sigma_m is 0");
  }
  if (c.marker_limit && *c.marker_limit < 0) fail("filter.marker_limit", "must be >= 0 or 'all'");
  if (!(c.filter_hz > 0.0) || !std::isfinite(c.filter_hz)) fail("filter.hz", "must be positive");
  if (!(c.ukf.alpha > 0.0)) fail("filter.alpha", "must be positive");
  if (!(c.ukf.dimension + c.ukf.lambda() > 0.0)) fail("filter.kappa", "L + lambda must be positive");
  if (!(c.process_noise_diagonal.minCoeff() >= 0.0)) fail("filter.process_noise_diag", "must be >= 0");
  if (!(c.duration > 0.0) || !std::isfinite(c.duration)) fail("sim.duration_s", "must be positive");
  if (c.runs < 1) fail("sim.runs", "must be at least 1");
  if (c.threads < 0) fail("sim.threads", "must be >= 0");
  if (!(c.truth_rel_tol > 0.0)) fail("sim.truth_rel_tol", "must be positive");
  if (!(c.truth_abs_tol > 0.0)) fail("sim.truth_abs_tol", "must be positive");
  try {
    marker_visibility(c.initial_truth, MarkerSet(c.geometry));
  } catch (const DegeneratePoseError&) {
    fail("truth.position_m", "chaser lies inside the target body");
  }
}

ScenarioConfig parse_config(std::string_view text, const std::string& source) {
  ScenarioConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) {
      continue;
    }
    const std::string where = source + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(where + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* field = find_field(key);
    if (field == nullptr) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
    if (const auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(where + ": duplicate key '" + key + "' (first set on line " +
                        std::to_string(it->second) + ")");
    }
    seen.emplace(key, line_no);
    try {
      field->set(cfg, value, key);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) {
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  }
  return out;
}

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  for (const Field& f : fields()) {
    if (f.get(a) != f.get(b)) {
      return false;
    }
  }
  return true;
}

}  // namespace relnav
