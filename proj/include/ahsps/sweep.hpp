#pragma once

#include <cstdint>
#include <vector>

#include "ahsps/config.hpp"
#include "ahsps/estimator.hpp"
#include "ahsps/simulator.hpp"

namespace ahsps {

enum class SweepKind { pump_power, attenuation };

struct SweepPoint {
  double value = 0.0;          // the swept parameter at this point
  double herald_rate = 0.0;    // Hz, heralding rate at this point
  SimulationSummary summary;
  AnalysisReport report;
};

/// Weighted linear fit of solved P(2) against measured heralding rate,
/// plus the constancy check on P(1).
struct LinearitySummary {
  double slope = 0.0;
  double slope_sigma = 0.0;
  double intercept = 0.0;
  double intercept_sigma = 0.0;
  double r2 = 0.0;
  double expected_slope = 0.0;  // 0.5 p1^2 gate_width / (q_H eta_H att); 0 for attenuation sweeps
  double p1_mean = 0.0;
  double p1_spread_rel = 0.0;   // (max - min) / mean over points
  bool degenerate = false;      // no spread in the swept rate
  bool nonlinear = false;       // fitted slope inconsistent with the line
};

struct SweepResult {
  SweepKind kind = SweepKind::pump_power;
  std::vector<SweepPoint> points;
  LinearitySummary fit;
};

/// Simulates and analyzes one run per value. Point k uses seed + k, so
/// the whole sweep is reproducible from one seed. Requires >= 3 points.
[[nodiscard]] SweepResult run_sweep(const BenchConfig& base, SweepKind kind,
                                    const std::vector<double>& values,
                                    std::uint64_t n_per_point,
                                    std::uint64_t seed);

}  // namespace ahsps
