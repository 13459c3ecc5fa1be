#include <cstdio>
#include <fstream>
#include <string>

#include "ahsps/config.hpp"
#include "doctest.h"

using namespace ahsps;

namespace {

const char* kFullConfig =
    "# bench description\n"
    "pump_power = 0.025\n"
    "pair_efficiency = 1.858e8\n"
    "herald_coupling = 0.29\n"
    "herald_detector_eff = 0.32\n"
    "herald_dark_rate = 150\n"
    "coupling_p1 = 0.61\n"
    "gate_width = 2.5e-9\n"
    "dead_time = 1.0e-5\n"
    "attenuation = 0.78\n"
    "gate_acceptance = 0.97\n"
    "det_a.efficiency = 0.084\n"
    "det_a.dark_count_prob = 35.1e-6\n"
    "det_b.efficiency = 0.096\n"
    "det_b.dark_count_prob = 7.4e-6\n";

const char* kMinimalConfig =
    "pump_power = 0.0016\n"
    "pair_efficiency = 1.858e8\n"
    "herald_coupling = 0.29\n"
    "herald_detector_eff = 0.32\n"
    "coupling_p1 = 0.61\n"
    "det_a.efficiency = 0.084\n"
    "det_a.dark_count_prob = 35.1e-6\n"
    "det_b.efficiency = 0.096\n"
    "det_b.dark_count_prob = 7.4e-6\n";

}  // namespace

TEST_SUITE("config") {

TEST_CASE("full config parses every field") {
  auto cfg = parse_config_text(kFullConfig);
  CHECK(cfg.source.pump_power == doctest::Approx(0.025));
  CHECK(cfg.source.pair_efficiency == doctest::Approx(1.858e8));
  CHECK(cfg.source.herald_coupling == doctest::Approx(0.29));
  CHECK(cfg.source.herald_detector_eff == doctest::Approx(0.32));
  CHECK(cfg.source.herald_dark_rate == doctest::Approx(150.0));
  CHECK(cfg.source.coupling_p1 == doctest::Approx(0.61));
  CHECK(cfg.source.gate_width == doctest::Approx(2.5e-9));
  CHECK(cfg.source.dead_time == doctest::Approx(1e-5));
  CHECK(cfg.source.attenuation == doctest::Approx(0.78));
  CHECK(cfg.source.gate_acceptance == doctest::Approx(0.97));
  CHECK(cfg.det_a.efficiency == doctest::Approx(0.084));
  CHECK(cfg.det_a.dark_count_prob == doctest::Approx(35.1e-6));
  CHECK(cfg.det_b.efficiency == doctest::Approx(0.096));
  CHECK(cfg.det_b.dark_count_prob == doctest::Approx(7.4e-6));
}

TEST_CASE("optional keys fall back to defaults") {
  auto cfg = parse_config_text(kMinimalConfig);
  CHECK(cfg.source.gate_width == doctest::Approx(2.5e-9));
  CHECK(cfg.source.dead_time == doctest::Approx(1e-5));
  CHECK(cfg.source.herald_dark_rate == doctest::Approx(100.0));
  CHECK(cfg.source.attenuation == doctest::Approx(1.0));
  CHECK(cfg.source.gate_acceptance == doctest::Approx(1.0));
}

TEST_CASE("comments, blank lines, and spacing are tolerated") {
  std::string text = std::string("\n  # leading comment\n\n") + kMinimalConfig +
                     "   # trailing comment line\n\n";
  CHECK_NOTHROW(parse_config_text(text));

  auto cfg = parse_config_text("pump_power=0.001 # inline comment\n" +
                               std::string(kMinimalConfig).substr(20));
  CHECK(cfg.source.pump_power == doctest::Approx(0.001));
}

TEST_CASE("missing required key names the key") {
  std::string text(kMinimalConfig);
  auto pos = text.find("coupling_p1 = 0.61\n");
  text.erase(pos, 19);
  try {
    parse_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("coupling_p1") != std::string::npos);
  }
}

TEST_CASE("unknown key is rejected with its line number") {
  std::string text = std::string(kMinimalConfig) + "mystery_knob = 3\n";
  try {
    parse_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("mystery_knob") != std::string::npos);
    CHECK(e.line() == 10);
  }
}

TEST_CASE("duplicate key is rejected") {
  std::string text = std::string(kMinimalConfig) + "pump_power = 0.002\n";
  CHECK_THROWS_AS(parse_config_text(text), ConfigError);
}

TEST_CASE("malformed number is rejected with its line number") {
  std::string text(kMinimalConfig);
  auto pos = text.find("0.0016");
  text.replace(pos, 6, "banana");
  try {
    parse_config_text(text);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("line without separator is rejected") {
  CHECK_THROWS_AS(parse_config_text("pump_power 0.001\n"), ConfigError);
}

TEST_CASE("out-of-range values fail validation at parse time") {
  std::string text(kMinimalConfig);
  auto pos = text.find("det_a.dark_count_prob = 35.1e-6");
  text.replace(pos, 31, "det_a.dark_count_prob = 0.75  ");
  CHECK_THROWS_AS(parse_config_text(text), ConfigError);
}

TEST_CASE("canonical text round-trips") {
  auto cfg = parse_config_text(kFullConfig);
  auto text = config_to_text(cfg);
  auto again = parse_config_text(text);
  CHECK(again.source.pump_power == doctest::Approx(cfg.source.pump_power).epsilon(1e-15));
  CHECK(again.source.attenuation == doctest::Approx(cfg.source.attenuation).epsilon(1e-15));
  CHECK(again.source.herald_dark_rate ==
        doctest::Approx(cfg.source.herald_dark_rate).epsilon(1e-15));
  CHECK(again.det_b.dark_count_prob ==
        doctest::Approx(cfg.det_b.dark_count_prob).epsilon(1e-15));
  CHECK(again.source.gate_acceptance ==
        doctest::Approx(cfg.source.gate_acceptance).epsilon(1e-15));
}

TEST_CASE("file loading works and missing files are reported") {
  const char* path = "ahsps_test_config.tmp";
  {
    std::ofstream out(path);
    out << kFullConfig;
  }
  auto cfg = load_config_file(path);
  CHECK(cfg.source.pump_power == doctest::Approx(0.025));
  std::remove(path);

  CHECK_THROWS_AS(load_config_file("no_such_file_here.cfg"), ConfigError);
}

}  // TEST_SUITE
