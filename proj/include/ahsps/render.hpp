#pragma once

#include <string>

#include "ahsps/estimator.hpp"
#include "ahsps/histogram.hpp"
#include "ahsps/simulator.hpp"
#include "ahsps/sweep.hpp"

namespace ahsps {

// Every renderer reads the same report structs the library computed;
// numbers are never re-derived at print time.

/// One aligned row (plus header) with the run/report columns:
/// N_t, N_A, N_B, N_AB, P(1), P(2), g2 raw, g2 net.
[[nodiscard]] std::string render_analysis_table(const AnalysisReport& r);

[[nodiscard]] std::string analysis_to_json(const AnalysisReport& r);

/// Parses a JSON document produced by analysis_to_json back into a
/// report (used by the `report` command). Throws std::runtime_error on
/// malformed input.
[[nodiscard]] AnalysisReport analysis_from_json(const std::string& text);

[[nodiscard]] std::string render_simulation_summary(const SimulationSummary& s);

/// TSV: header + one row per bin, columns n, count, model, normalized.
/// model at n = 0 is c * p_ab (the state machine's own expectation for
/// the coincidence bin; the geometric law covers off-center bins only).
[[nodiscard]] std::string histogram_to_tsv(const Histogram& h,
                                           const NormalizedHistogram& norm,
                                           double p_a, double p_b,
                                           double p_ab);

/// ASCII bar preview of the raw bins.
[[nodiscard]] std::string render_histogram_ascii(const Histogram& h,
                                                 int max_width = 60);

[[nodiscard]] std::string render_sweep_table(const SweepResult& s);

[[nodiscard]] std::string sweep_to_json(const SweepResult& s);

}  // namespace ahsps
