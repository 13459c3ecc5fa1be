#include "ahsps/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace ahsps {

TriggerRecord sample_trigger(const PhotonStatistics& stats,
                             const DetectorConfig& det_a,
                             const DetectorConfig& det_b, TriggerRng& rng) {
  const double u = rng.next_unit();
  const int i = u < stats.p2 ? 2 : (u < stats.p2 + stats.p1 ? 1 : 0);

  bool phot_a = false;
  bool phot_b = false;
  for (int k = 0; k < i; ++k) {
    const bool to_a = rng.next_bernoulli(0.5);
    const bool detected =
        rng.next_bernoulli(to_a ? det_a.efficiency : det_b.efficiency);
    if (detected) {
      (to_a ? phot_a : phot_b) = true;
    }
  }
  const bool dark_a = rng.next_bernoulli(det_a.dark_count_prob);
  const bool dark_b = rng.next_bernoulli(det_b.dark_count_prob);

  TriggerRecord rec;
  rec.det_a = static_cast<std::uint8_t>(phot_a != dark_a);
  rec.det_b = static_cast<std::uint8_t>(phot_b != dark_b);
  return rec;
}

namespace {

// Per-candidate output of the index-keyed generation phase. dt is the
// exponential inter-arrival draw, 0 when times are not needed.
struct Candidate {
  double dt = 0.0;
  TriggerRecord rec;
};

struct GenParams {
  PhotonStatistics stats;
  PhotonStatistics vacuum;
  DetectorConfig det_a;
  DetectorConfig det_b;
  double rate_hz = 0.0;
  double p_real = 1.0;
  bool need_time = false;
  bool herald_darks = false;
  std::uint64_t seed = 0;
};

// Fills cand[0..m) from trigger indices [base, base+m). Safe to call from
// several threads on disjoint ranges; each index owns its RNG stream.
void generate_range(const GenParams& gp, std::uint64_t base, std::size_t lo,
                    std::size_t hi, Candidate* cand) {
  for (std::size_t j = lo; j < hi; ++j) {
    TriggerRng rng(gp.seed, base + j);
    Candidate& c = cand[j];
    if (gp.need_time) {
      c.dt = rng.next_exponential(gp.rate_hz);
    }
    if (gp.herald_darks) {
      const bool is_real = rng.next_bernoulli(gp.p_real);
      c.rec = sample_trigger(is_real ? gp.stats : gp.vacuum, gp.det_a,
                             gp.det_b, rng);
    } else {
      c.rec = sample_trigger(gp.stats, gp.det_a, gp.det_b, rng);
    }
  }
}

void generate_chunk(const GenParams& gp, std::uint64_t base, std::size_t m,
                    std::vector<Candidate>& cand, unsigned n_threads) {
  if (n_threads <= 1 || m < 4096) {
    generate_range(gp, base, 0, m, cand.data());
    return;
  }
  const std::size_t per = (m + n_threads - 1) / n_threads;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (unsigned w = 0; w < n_threads; ++w) {
    const std::size_t lo = std::min(m, w * per);
    const std::size_t hi = std::min(m, lo + per);
    if (lo >= hi) break;
    pool.emplace_back(generate_range, std::cref(gp), base, lo, hi,
                      cand.data());
  }
  for (auto& th : pool) th.join();
}

}  // namespace

SimulationResult simulate_run(const SourceConfig& src,
                              const DetectorConfig& det_a,
                              const DetectorConfig& det_b,
                              std::uint64_t n_target, std::uint64_t seed,
                              const SimOptions& opt) {
  const PhotonStatistics stats = statistics_of(src);
  if (stats.p2 >= 1.0 - stats.p1) {
    throw std::domain_error(
        "multi-photon probability " + std::to_string(stats.p2) +
        " leaves no room below 1 - P(1) = " + std::to_string(1.0 - stats.p1));
  }

  const double rate_real = heralding_rate(src);
  const double rate_dark = opt.herald_darks ? src.herald_dark_rate : 0.0;
  const double rate = rate_real + rate_dark;
  if (n_target > 0 && !(rate > 0.0)) {
    throw std::domain_error("offered trigger rate is zero");
  }

  GenParams gp;
  gp.stats = stats;
  gp.det_a = det_a;
  gp.det_b = det_b;
  gp.det_a.efficiency *= src.gate_acceptance;
  gp.det_b.efficiency *= src.gate_acceptance;
  gp.rate_hz = rate;
  gp.p_real = opt.herald_darks ? rate_real / rate : 1.0;
  gp.need_time = opt.keep_timestamps || src.dead_time > 0.0;
  gp.herald_darks = opt.herald_darks;
  gp.seed = seed;

  const std::uint64_t dead_ns =
      static_cast<std::uint64_t>(std::llround(src.dead_time * 1e9));
  const bool dead_active = dead_ns > 0;
  // Only gate-out with live dead time makes the offered count unknown in
  // advance; every other mode accepts each candidate.
  const bool one_to_one = !(dead_active && opt.enforce_gate_out);

  SimulationResult out;
  out.records.records.reserve(n_target);
  if (opt.keep_timestamps) out.records.timestamps_ns.reserve(n_target);
  out.summary.rng_seed = seed;
  out.summary.herald_rate = rate;

  constexpr std::size_t kChunk = 1 << 16;
  std::vector<Candidate> cand(kChunk);

  double t_sec = 0.0;
  std::uint64_t prev_ts = 0;
  bool have_prev = false;
  std::uint64_t free_a = 0;
  std::uint64_t free_b = 0;
  std::uint64_t offered = 0;
  std::uint64_t accepted = 0;
  double wall = 0.0;

  while (accepted < n_target) {
    const std::uint64_t remaining = n_target - accepted;
    std::size_t m = kChunk;
    if (one_to_one) {
      m = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, remaining));
    } else {
      // Oversize mildly for the expected discard fraction; unused
      // candidates cost RNG work only, never correctness.
      const std::uint64_t guess = remaining + remaining / 4 + 64;
      m = static_cast<std::size_t>(std::min<std::uint64_t>(kChunk, guess));
    }

    generate_chunk(gp, offered, m, cand, opt.n_threads);

    for (std::size_t j = 0; j < m && accepted < n_target; ++j) {
      ++offered;
      std::uint64_t ts = 0;
      if (gp.need_time) {
        t_sec += cand[j].dt;
        ts = static_cast<std::uint64_t>(std::llround(t_sec * 1e9));
        if (have_prev && ts <= prev_ts) ts = prev_ts + 1;
        prev_ts = ts;
        have_prev = true;
      }
      TriggerRecord rec = cand[j].rec;
      if (dead_active) {
        if (opt.enforce_gate_out) {
          if (ts < free_a || ts < free_b) continue;
        } else {
          if (ts < free_a) rec.det_a = 0;
          if (ts < free_b) rec.det_b = 0;
        }
        if (rec.det_a) free_a = ts + dead_ns;
        if (rec.det_b) free_b = ts + dead_ns;
      }
      out.records.records.push_back(rec);
      if (opt.keep_timestamps) out.records.timestamps_ns.push_back(ts);
      ++accepted;
      wall = t_sec;
    }
  }

  out.summary.n_triggers_offered = offered;
  out.summary.n_triggers_accepted = accepted;
  out.summary.wall_duration =
      gp.need_time ? wall
                   : (rate > 0.0 ? static_cast<double>(offered) / rate : 0.0);
  return out;
}

std::vector<std::uint8_t> apply_deadtime(
    std::span<const std::uint64_t> timestamps_ns, double dead_time_s,
    std::span<const TriggerRecord> clicks) {
  if (timestamps_ns.size() != clicks.size()) {
    throw std::invalid_argument("timestamp and click streams differ in size");
  }
  const std::uint64_t dead_ns =
      static_cast<std::uint64_t>(std::llround(dead_time_s * 1e9));

  std::vector<std::uint8_t> accepted(timestamps_ns.size(), 0);
  std::uint64_t free_a = 0;
  std::uint64_t free_b = 0;
  for (std::size_t k = 0; k < timestamps_ns.size(); ++k) {
    const std::uint64_t t = timestamps_ns[k];
    if (k > 0 && t < timestamps_ns[k - 1]) {
      throw std::invalid_argument("timestamps must be sorted ascending");
    }
    if (t < free_a || t < free_b) continue;
    accepted[k] = 1;
    if (clicks[k].det_a) free_a = t + dead_ns;
    if (clicks[k].det_b) free_b = t + dead_ns;
  }
  return accepted;
}

}  // namespace ahsps
