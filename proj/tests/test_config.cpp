#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "relnav/config.hpp"
#include "relnav/errors.hpp"

using namespace relnav;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text, "test.cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

}  // namespace

TEST_CASE("defaults") {
  const ScenarioConfig c = parse_config("# only a comment\n\n");
  CHECK(c == ScenarioConfig{});
  CHECK(c.filter_hz == 1.0);
  CHECK(c.duration == 300.0);
  CHECK(c.runs == 100);
  CHECK(c.noise.sigma == 0.02);
  CHECK_FALSE(c.marker_limit.has_value());
  CHECK(c.epoch_count() == 301);
  CHECK(c.initial_truth(1) == -60.0);
  CHECK(c.initial_covariance()(0, 0) == doctest::Approx(0.25));
  CHECK(c.initial_covariance()(11, 11) == doctest::Approx(4e-6));
  CHECK(parse_config("noise.sigma_m = 0.02\n") == ScenarioConfig{});
}

TEST_CASE("parsing values") {
  const ScenarioConfig c = parse_config(
      "noise.sigma_m = 0.2   # metres\n"
      "filter.marker_limit = 3\n"
      "filter.hz = 0.2\n"
      "truth.position_m = 1, 2, 30\n"
      "filter.regenerate_sigma_points = false\n"
      "filter.process_noise_diag = 1e-9\n"
      "sim.seed = 42\n");
  CHECK(c.noise.sigma == 0.2);
  CHECK(c.marker_limit == 3);
  CHECK(c.filter_hz == 0.2);
  CHECK(c.epoch_count() == 61);
  CHECK(c.initial_truth.head<3>() == Eigen::Vector3d(1, 2, 30));
  CHECK_FALSE(c.ukf.regenerate_sigma_points);
  CHECK(c.process_noise_diagonal.minCoeff() == 1e-9);
  CHECK(c.seed == 42);
  CHECK_FALSE(parse_config("filter.marker_limit = all\n").marker_limit.has_value());
}

TEST_CASE("validation errors name the field") {
  CHECK(contains(error_of("filter.hz = 0\n"), "filter.hz"));
  CHECK(contains(error_of("noise.sigma_m = -1\n"), "noise.sigma_m"));
  CHECK(contains(error_of("noise.dropout_prob = 1.5\n"), "noise.dropout_prob"));
  CHECK(contains(error_of("sim.runs = 0\n"), "sim.runs"));
  CHECK(contains(error_of("target.inertia_kg_m2 = 1, 1, 3\n"), "target.inertia_kg_m2"));
  CHECK(contains(error_of("truth.position_m = 0, 0, 0\n"), "truth.position_m"));
  CHECK(contains(error_of("noise.sigma_m = 0\n"), "filter.measurement_sigma_m"));
  CHECK(error_of("noise.sigma_m = 0\nfilter.measurement_sigma_m = 0.02\n").empty());
  CHECK(contains(error_of("filter.kappa = -12\n"), "filter.kappa"));
}

TEST_CASE("syntax errors carry the line number") {
  const std::string unknown = error_of("filter.hz = 1\n\nfilter.bogus = 3\n");
  CHECK(contains(unknown, "test.cfg:3"));
  CHECK(contains(unknown, "filter.bogus"));
  CHECK(contains(error_of("sim.runs 5\n"), "test.cfg:1"));
  CHECK(contains(error_of("sim.runs = five\n"), "test.cfg:1"));
  CHECK(contains(error_of("sim.runs = 5\nsim.runs = 6\n"), "duplicate"));
  CHECK(contains(error_of("truth.position_m = 1, 2\n"), "truth.position_m"));
  CHECK(contains(error_of("filter.regenerate_sigma_points = maybe\n"), "test.cfg:1"));
}

TEST_CASE("serialize and parse round trip") {
  ScenarioConfig c;
  c.noise.sigma = 0.1234567890123;
  c.marker_limit = 4;
  c.filter_hz = 0.2;
  c.initial_truth(8) = 1.0 / 3.0;
  c.process_noise_diagonal(11) = 1e-15;
  c.seed = 123456789012345ULL;
  c.filter_sigma = 0.05;
  const std::string text = serialize_config(c);
  const ScenarioConfig back = parse_config(text);
  CHECK(back == c);
  CHECK(back.initial_truth(8) == c.initial_truth(8));
  CHECK(back.noise.sigma == c.noise.sigma);
  CHECK(serialize_config(back) == text);
}

TEST_CASE("shipped scenarios") {
  CHECK(load_config(std::filesystem::path(RELNAV_SCENARIO_DIR) / "default.cfg") == ScenarioConfig{});
  const ScenarioConfig degraded = load_config(std::filesystem::path(RELNAV_SCENARIO_DIR) / "noisy_three_markers.cfg");
  CHECK(degraded.noise.sigma == 0.2);
  CHECK(degraded.marker_limit == 3);
  CHECK_NOTHROW(load_config(std::filesystem::path(RELNAV_SCENARIO_DIR) / "smoke.cfg"));
}

TEST_CASE("a single value broadcasts over the estimate sigmas") {
  const ScenarioConfig c = parse_config("estimate.sigma_mrp = 0.05\nestimate.sigma_position_m = 1, 2, 3\n");
  CHECK(c.initial_sigma.segment<3>(6) == Eigen::Vector3d::Constant(0.05));
  CHECK(c.initial_sigma.head<3>() == Eigen::Vector3d(1, 2, 3));
  CHECK_FALSE(error_of("truth.position_m = 5\n").empty());
}

TEST_CASE("load_config") {
  const auto path = std::filesystem::temp_directory_path() / "relnav_test_config.cfg";
  {
    std::ofstream out(path);
    out << "sim.runs = 7\nbad line\n";
  }
  try {
    load_config(path);
    FAIL("expected a ConfigError");
  } catch (const ConfigError& e) {
    CHECK(contains(e.what(), path.string() + ":2"));
  }
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_config("/nonexistent/relnav.cfg"), ConfigError);
}
