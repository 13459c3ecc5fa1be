#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "ahsps/model.hpp"
#include "ahsps/simulator.hpp"

namespace ahsps {

// Click-probability model used throughout this module. With i photons in
// the gate, each routed to a detector with probability 1/2, detector X
// sees a photon-driven click with probability 1 - (1 - eta_X/2)^i, and a
// dark count combines exclusively:
//     p_count = p_phot (1 - 2 dc) + dc.
// Summing over i in {0,1,2} makes both p_X and the joint p_AB affine in
// (P(1), P(2)), which is what makes the closed-form inversion possible.

struct CountTotals {
  std::uint64_t n_t = 0;   // accepted triggers
  std::uint64_t n_a = 0;   // detector A clicks
  std::uint64_t n_b = 0;   // detector B clicks
  std::uint64_t n_ab = 0;  // simultaneous clicks

  /// Associative merge; accumulating partitions in any order gives the
  /// same totals.
  CountTotals& merge(const CountTotals& other);
};

/// Single exact pass over a record stream.
[[nodiscard]] CountTotals accumulate_counts(std::span<const TriggerRecord> records);

struct MeasuredRates {
  double p_a = 0.0;
  double p_b = 0.0;
  double p_ab = 0.0;
};

/// Per-trigger rates; throws std::invalid_argument when n_t = 0.
[[nodiscard]] MeasuredRates measured_rates(const CountTotals& c);

/// Forward model: expected click rates for given statistics and
/// detectors. Affine in (p1, p2).
[[nodiscard]] MeasuredRates forward_probabilities(const PhotonStatistics& stats,
                                                  const DetectorConfig& det_a,
                                                  const DetectorConfig& det_b);

/// Affine coefficients of the forward model, exposed for error
/// propagation:  p_x  = fx0 + fx1*p1 + fx2*p2  (x = a, b)
///               p_ab = g0  + g1*p1  + g2*p2
struct ForwardCoefficients {
  double fa0, fa1, fa2;
  double fb0, fb1, fb2;
  double g0, g1, g2;
};
[[nodiscard]] ForwardCoefficients forward_coefficients(const DetectorConfig& det_a,
                                                       const DetectorConfig& det_b);

struct SolveResult {
  PhotonStatistics stats;  // headline values, clamped to [0,1]
  // Raw per-arm solutions, before clamping and averaging.
  double p1_from_a = 0.0, p2_from_a = 0.0;
  double p1_from_b = 0.0, p2_from_b = 0.0;
  bool used_b = true;      // false: A-only reconstruction
  bool clamped = false;    // some raw component fell outside [0,1]
  bool degenerate = false; // singular system (defective efficiencies)
};

/// Inverts the forward model for (P(1), P(2)) in closed form, once per
/// arm, and averages the two solutions with a plain arithmetic mean.
/// P(0) = 1 - P(1) - P(2).
[[nodiscard]] SolveResult solve_statistics(const MeasuredRates& m,
                                           const DetectorConfig& det_a,
                                           const DetectorConfig& det_b);

/// A-arm-only variant for data sets that lack the B click total.
[[nodiscard]] SolveResult solve_statistics_a_only(double p_a, double p_ab,
                                                  const DetectorConfig& det_a,
                                                  const DetectorConfig& det_b);

/// Dark-count-free rates at the solved statistics: the forward model
/// evaluated with dc_A = dc_B = 0.
[[nodiscard]] MeasuredRates net_rates(const PhotonStatistics& stats,
                                      const DetectorConfig& det_a,
                                      const DetectorConfig& det_b);

/// g2 = p_ab / (p_a p_b). Throws std::invalid_argument on zero denominator.
[[nodiscard]] double g2(const MeasuredRates& m);

/// g2 = 2 p2 / p1^2. Throws std::invalid_argument when p1 = 0.
[[nodiscard]] double g2_from_stats(const PhotonStatistics& stats);

/// Per-quantity 1-sigma error bars.
///
/// Headline model: pure Poisson counting on the totals --
///   sigma(P2)/P2 = 1/sqrt(n_ab), sigma(P1)/P1 = 1/sqrt(n_a),
///   relative g2 error = sqrt(1/n_ab + 1/n_a + 1/n_b (+1/n_t)).
/// When n_ab = 0 the P2/g2 entries hold 90% CL upper bounds from the
/// zero-count Poisson limit (2.3 expected counts) instead of symmetric
/// bars, and upper_bound_only is set.
///
/// sigma_p1_propagated / sigma_p2_propagated carry the exact covariance
/// propagation of the per-trigger indicator statistics through the linear
/// solve (including the A/B average). They exceed the headline bars
/// whenever dark-cross terms are a sizable fraction of p_ab; coverage
/// tests should use these.
struct ErrorBars {
  double sigma_p0 = 0.0;
  double sigma_p1 = 0.0;
  double sigma_p2 = 0.0;
  double sigma_g2_raw = 0.0;
  double sigma_g2_net = 0.0;
  bool upper_bound_only = false;
  double sigma_p1_propagated = 0.0;
  double sigma_p2_propagated = 0.0;
};

struct Provenance {
  std::string input_path;   // raw file, or "counts" for counts-only mode
  std::string config_hash;  // content hash of the config actually used
  bool counts_only = false;
};

struct AnalysisReport {
  CountTotals counts;
  bool have_n_b = true;
  MeasuredRates rates;      // measured, per accepted trigger
  SolveResult solve;
  PhotonStatistics stats;   // = solve.stats
  ErrorBars err;
  double g2_raw = 0.0;      // from measured rates (A rate reused when n_b absent)
  double g2_net = 0.0;      // from net rates
  MeasuredRates rates_net;
  Provenance source_row;
};

/// Needs the detectors: the propagated bars and the zero-count upper
/// bound both run through the forward coefficients.
[[nodiscard]] ErrorBars error_bars(const CountTotals& c,
                                   const AnalysisReport& report,
                                   const DetectorConfig& det_a,
                                   const DetectorConfig& det_b);

/// Full pipeline from counts. Pass have_n_b = false when only the A-arm
/// total exists; the report is then an A-only reconstruction and g2_raw
/// uses the A rate for both arms.
[[nodiscard]] AnalysisReport analyze_counts(const CountTotals& c, bool have_n_b,
                                            const DetectorConfig& det_a,
                                            const DetectorConfig& det_b,
                                            Provenance provenance = {});

[[nodiscard]] AnalysisReport analyze_records(std::span<const TriggerRecord> records,
                                             const DetectorConfig& det_a,
                                             const DetectorConfig& det_b,
                                             Provenance provenance = {});

}  // namespace ahsps
