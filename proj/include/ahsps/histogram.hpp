#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ahsps/simulator.hpp"

namespace ahsps {

// Start/stop trigger-separation histogram. One state machine walks the
// record stream: a click at one detector arms a start, a later click at
// the other detector within n_max triggers is the stop, and the signed
// separation (positive when A started) fills a bin.
//
// Edge rules, declared here because they are not forced by the physics:
//  - A second click at the start's own detector while armed is an invalid
//    start: counted, otherwise ignored; the original start stays armed.
//  - Simultaneous clicks at an idle trigger fill bin 0 (the coincidence
//    both starts and stops there). Bin 0 is filled only this way.
//  - A stop trigger that also shows a click at the start's detector is a
//    valid stop, not a coincidence.
//  - A stop never arms a new start at its own trigger; arming resumes
//    with the next record.
//  - If no stop appears within n_max triggers of the start, the search is
//    cancelled and the cancelling trigger is processed as fresh input.
//  - A search still armed at end of stream counts as cancelled, so that
//    starts_consumed = sum of bins + cancelled_searches always holds.

struct FitResult {
  double c = 0.0;        // fitted normalization constant
  double c_sigma = 0.0;  // 1-sigma on c
  double chi2 = 0.0;
  std::uint64_t dof = 0;
  std::uint64_t bins_used = 0;
  bool shape_flag = false;  // chi2/dof > 5: data do not follow the model
};

struct Histogram {
  int n_max = 100;
  std::vector<std::uint64_t> counts;  // index n + n_max, n in [-n_max, n_max]
  std::uint64_t starts_consumed = 0;
  std::uint64_t invalid_starts = 0;
  std::uint64_t cancelled_searches = 0;
  std::optional<FitResult> fit;

  [[nodiscard]] std::uint64_t at(int n) const {
    return counts[static_cast<std::size_t>(n + n_max)];
  }
  [[nodiscard]] std::uint64_t total_binned() const;
};

/// Single sequential pass; the state machine carries cross-record state,
/// so the stream must not be partitioned.
[[nodiscard]] Histogram build_histogram(std::span<const TriggerRecord> records,
                                        int n_max);

/// Expected off-center bin content:
///   n > 0: c * p_a * (1 - p_b)^n * p_b     (start A, stop B)
///   n < 0: c * p_b * (1 - p_a)^|n| * p_a   (start B, stop A)
/// Throws std::invalid_argument for n = 0: the theory covers off-center
/// bins only.
[[nodiscard]] double theoretical_m(int n, double p_a, double p_b, double c);

/// Fits the single constant c over all off-center bins by shape-fixed
/// Poisson maximum likelihood, c = sum M(n) / sum s(n) with s the unit-c
/// shape; identical to weighted least squares with variance taken
/// proportional to the model value. p_a, p_b come from measured_rates
/// over the same stream; only c is fitted.
/// Throws std::runtime_error when fewer than 10 off-center bins are
/// non-empty.
[[nodiscard]] FitResult fit_c(const Histogram& h, double p_a, double p_b);

struct NormalizedHistogram {
  int n_max = 0;
  std::vector<double> values;  // index n + n_max

  [[nodiscard]] double at(int n) const {
    return values[static_cast<std::size_t>(n + n_max)];
  }
  /// Bin 0: the raw g2 estimate.
  [[nodiscard]] double central() const { return at(0); }
};

/// Divides every bin by c * p_a * p_b. Throws std::invalid_argument on a
/// zero normalizer.
[[nodiscard]] NormalizedHistogram normalize(const Histogram& h, double p_a,
                                            double p_b, double c);

/// Closed form of sum_{n != 0} theoretical_m(n)/c over |n| <= n_max:
///   p_a (1-p_b)(1 - (1-p_b)^n_max) + p_b (1-p_a)(1 - (1-p_a)^n_max).
/// Always <= p_a + p_b; the gap is the truncated geometric tail plus one
/// factor per side for the start trigger itself.
[[nodiscard]] double theoretical_offcenter_mass(double p_a, double p_b,
                                                int n_max);

}  // namespace ahsps
