#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "ahsps/model.hpp"

namespace ahsps {

/// Full bench description: source plus the two detectors behind the
/// splitter.
struct BenchConfig {
  SourceConfig source;
  DetectorConfig det_a;
  DetectorConfig det_b;
};

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string msg, int line = 0)
      : std::runtime_error(std::move(msg)), line_(line) {}

  /// 1-based line number, 0 when the error is not tied to a line.
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

/// Parses flat key=value text. One pair per line, `#` starts a comment,
/// blank lines ignored. Keys are the SourceConfig field names plus
/// `det_a.`/`det_b.`-prefixed DetectorConfig field names.
///
/// Required keys: pump_power, pair_efficiency, herald_coupling,
/// herald_detector_eff, coupling_p1, det_{a,b}.efficiency,
/// det_{a,b}.dark_count_prob. Everything else defaults (gate_width 2.5e-9,
/// dead_time 1e-5, herald_dark_rate 100, attenuation 1, gate_acceptance 1).
BenchConfig parse_config_text(std::string_view text);

BenchConfig load_config_file(const std::string& path);

/// Canonical key=value snapshot (round-trips through parse_config_text).
std::string config_to_text(const BenchConfig& cfg);

}  // namespace ahsps
