#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ahsps/model.hpp"
#include "ahsps/rng.hpp"

namespace ahsps {

/// Detection state of both bench detectors for one accepted heralding
/// trigger. Values are 0 or 1.
struct TriggerRecord {
  std::uint8_t det_a = 0;
  std::uint8_t det_b = 0;

  friend bool operator==(const TriggerRecord&, const TriggerRecord&) = default;
};

/// A run's records plus, optionally, per-record timestamps (ns since run
/// start, strictly increasing).
struct RecordSet {
  std::vector<TriggerRecord> records;
  std::vector<std::uint64_t> timestamps_ns;  // empty or records.size()

  [[nodiscard]] bool has_timestamps() const {
    return !timestamps_ns.empty();
  }
};

struct SimulationSummary {
  std::uint64_t n_triggers_offered = 0;
  std::uint64_t n_triggers_accepted = 0;  // N_t
  double wall_duration = 0.0;             // s, at the last accepted trigger
  double herald_rate = 0.0;  // Hz, configured offered-trigger rate
  std::uint64_t rng_seed = 0;
};

struct SimulationResult {
  RecordSet records;
  SimulationSummary summary;
};

struct SimOptions {
  /// Keep per-record timestamps in the result.
  bool keep_timestamps = false;
  /// true: triggers arriving while either detector is inside its dead
  /// window are offered but discarded (the experiment's gate-out AND).
  /// false: every offered trigger is recorded and a detector inside its
  /// dead window simply cannot click. This deliberately reproduces the
  /// biased accounting the gate-out protocol exists to prevent.
  bool enforce_gate_out = true;
  /// Inject herald-detector dark counts as extra triggers carrying vacuum
  /// statistics. Off by default; the effect is negligible at realistic
  /// rates and this switch exists to let a user confirm that.
  bool herald_darks = false;
  /// Worker threads for record generation. Output is identical for any
  /// value; the RNG is keyed by trigger index, not by thread.
  unsigned n_threads = 1;
};

/// Draws one trigger's detection state:
///  1. photon number i in {0,1,2} from stats,
///  2. each photon routed to A or B with probability 1/2,
///  3. each photon detected with its arm's efficiency,
///  4. one dark-count coin per detector; a click is
///     photon-detection XOR dark (p = p_phot(1-2 dc) + dc).
/// Draw order is fixed; it is part of the reproducibility contract.
TriggerRecord sample_trigger(const PhotonStatistics& stats,
                             const DetectorConfig& det_a,
                             const DetectorConfig& det_b, TriggerRng& rng);

/// Simulates a run: heralding triggers arrive as a Poisson process at
/// heralding_rate(src) (plus herald_dark_rate if enabled), each offered
/// trigger is sampled, and the dead-time protocol selects which are
/// accepted, until exactly n_target records are accepted.
/// Throws std::domain_error on non-physical statistics (p2 >= 1 - p1).
SimulationResult simulate_run(const SourceConfig& src,
                              const DetectorConfig& det_a,
                              const DetectorConfig& det_b,
                              std::uint64_t n_target, std::uint64_t seed,
                              const SimOptions& opt = {});

/// Dead-time protocol over an already-generated stream: a trigger is
/// accepted iff both detectors are outside their dead windows; a
/// detector's window [t, t + dead_time) opens only on its own click at an
/// accepted trigger. Rejected triggers never open windows.
/// Returns one 0/1 flag per trigger. Throws std::invalid_argument if
/// timestamps are not sorted ascending or sizes differ.
std::vector<std::uint8_t> apply_deadtime(
    std::span<const std::uint64_t> timestamps_ns, double dead_time_s,
    std::span<const TriggerRecord> clicks);

}  // namespace ahsps
