#pragma once

#include <string>

namespace ahsps {

/// Photon-number statistics of the heralded output port, per heralding
/// trigger and within one gate. The model is truncated at two photons:
/// p2 stands for "more than one" but is treated as exactly two everywhere
/// (the bench cannot discriminate two from more, and regimes where three
/// photons matter are far outside the operating range).
struct PhotonStatistics {
  double p0 = 1.0;
  double p1 = 0.0;
  double p2 = 0.0;

  /// Builds normalized statistics with p0 = 1 - p1 - p2.
  static PhotonStatistics from_p1_p2(double p1, double p2);

  /// Components in [0,1] and summing to 1 within tol.
  [[nodiscard]] bool valid(double tol = 1e-12) const;
};

/// One detector of the 50/50-splitter bench.
/// efficiency includes splitter and fiber losses downstream of the split;
/// dark_count_prob is per gate.
struct DetectorConfig {
  double efficiency = 0.0;
  double dark_count_prob = 0.0;
};

/// Source and heralding-chain parameters.
///
/// pair_efficiency and pump_power enter every formula only as the product
/// pair_rate(); calibration of the two factors separately is never needed.
struct SourceConfig {
  double pump_power = 0.0;          // W
  double pair_efficiency = 0.0;     // pairs / s / W
  double herald_coupling = 0.0;     // collection ratio into the herald arm
  double herald_detector_eff = 0.0; // herald detector efficiency
  double herald_dark_rate = 100.0;  // Hz, herald detector dark counts
  double coupling_p1 = 0.0;         // ground-truth P(1) of the output port
  double gate_width = 2.5e-9;       // s
  double dead_time = 1.0e-5;        // s, per bench detector
  double attenuation = 1.0;         // thinning factor on the heralding rate
  double gate_acceptance = 1.0;     // extra multiplier on bench efficiencies

  [[nodiscard]] double pair_rate() const {
    return pair_efficiency * pump_power;
  }
};

struct FigureOfMerit {
  double f_value = 0.0;  // Hz; +infinity when p2 = 0 (unbounded)
};

/// Physical plausibility of a source configuration. Neither flag is a hard
/// failure: sweeps may traverse edge regimes on purpose.
struct RegimeCheck {
  bool physical = true;               // multi-photon prob < 1 - coupling_p1
  bool single_photon_dominant = true; // multi-photon prob < coupling_p1
};

/// Throws std::invalid_argument naming the offending field.
void validate(const DetectorConfig& det, const std::string& label);
void validate(const SourceConfig& src);

/// Heralding-trigger rate: attenuation * q_H * eta_H * pair_rate.
[[nodiscard]] double heralding_rate(const SourceConfig& src);

/// Multi-photon probability per trigger:
/// 0.5 * coupling_p1^2 * gate_width * pair_rate.
[[nodiscard]] double multi_photon_prob(const SourceConfig& src);

[[nodiscard]] RegimeCheck check_regime(const SourceConfig& src);

/// Ground-truth statistics implied by a source configuration:
/// (p1, p2) = (coupling_p1, multi_photon_prob).
[[nodiscard]] PhotonStatistics statistics_of(const SourceConfig& src);

/// F = p1^3 * herald_rate / (2 p2), the heralded single-photon rate over
/// g2. Returns +infinity when p2 = 0.
[[nodiscard]] FigureOfMerit figure_of_merit(const PhotonStatistics& stats,
                                            double herald_rate_hz);

/// Pair-rate-free form F = coupling_p1 * q_H * eta_H / gate_width.
/// Identical to figure_of_merit over model-generated inputs when
/// attenuation = 1.
[[nodiscard]] FigureOfMerit figure_of_merit_physical(const SourceConfig& src);

/// g2 of Poissonian light with the same p1: always 1, the comparison
/// baseline.
[[nodiscard]] double poissonian_reference(double p1);

/// Advantage over the Poissonian reference: 1 / g2.
[[nodiscard]] double suppression_factor(double g2);

}  // namespace ahsps
