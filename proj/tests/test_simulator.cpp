#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ahsps/model.hpp"
#include "ahsps/rng.hpp"
#include "ahsps/simulator.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace ahsps;

namespace {

DetectorConfig det(double eff, double dc) {
  DetectorConfig d;
  d.efficiency = eff;
  d.dark_count_prob = dc;
  return d;
}

PhotonStatistics stats_of(double p1, double p2) {
  return PhotonStatistics::from_p1_p2(p1, p2);
}

// Bench tuned so that P(1)=0.6 and P(2) follows pump power.
SourceConfig bench(double pair_rate_hz) {
  SourceConfig src;
  src.pump_power = 1.0;
  src.pair_efficiency = pair_rate_hz;
  src.herald_coupling = 0.29;
  src.herald_detector_eff = 0.32;
  src.coupling_p1 = 0.6;
  src.gate_width = 2.5e-9;
  src.dead_time = 1e-5;
  src.attenuation = 1.0;
  return src;
}

struct Tally {
  std::uint64_t n_a = 0, n_b = 0, n_ab = 0;
};

Tally tally(const std::vector<TriggerRecord>& recs) {
  Tally t;
  for (const auto& r : recs) {
    t.n_a += r.det_a;
    t.n_b += r.det_b;
    t.n_ab += static_cast<std::uint64_t>(r.det_a & r.det_b);
  }
  return t;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("vacuum with quiet detectors never clicks") {
  auto s = stats_of(0.0, 0.0);
  auto da = det(0.5, 0.0);
  auto db = det(0.5, 0.0);
  for (std::uint64_t k = 0; k < 10000; ++k) {
    TriggerRng rng(1, k);
    auto r = sample_trigger(s, da, db, rng);
    CHECK(r.det_a == 0);
    CHECK(r.det_b == 0);
  }
}

TEST_CASE("one perfect photon lands on exactly one arm, half the time each") {
  auto s = stats_of(1.0, 0.0);
  auto da = det(1.0, 0.0);
  auto db = det(1.0, 0.0);
  const std::uint64_t n = 1000000;
  std::uint64_t hits_a = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    TriggerRng rng(2, k);
    auto r = sample_trigger(s, da, db, rng);
    CHECK(int(r.det_a) + int(r.det_b) == 1);
    hits_a += r.det_a;
  }
  double sigma = std::sqrt(0.25 * double(n));
  CHECK(std::abs(double(hits_a) - 0.5 * double(n)) < 3.0 * sigma);
}

TEST_CASE("two perfect photons coincide half the time") {
  PhotonStatistics s;
  s.p0 = 0.0;
  s.p1 = 0.0;
  s.p2 = 1.0;
  auto da = det(1.0, 0.0);
  auto db = det(1.0, 0.0);
  const std::uint64_t n = 1000000;
  std::uint64_t coinc = 0, singles_a = 0, singles_b = 0;
  for (std::uint64_t k = 0; k < n; ++k) {
    TriggerRng rng(3, k);
    auto r = sample_trigger(s, da, db, rng);
    coinc += static_cast<std::uint64_t>(r.det_a & r.det_b);
    singles_a += r.det_a;
    singles_b += r.det_b;
  }
  double sigma = std::sqrt(0.25 * double(n));
  CHECK(std::abs(double(coinc) - 0.5 * double(n)) < 3.0 * sigma);
  // Each arm clicks on 3 of the 4 equally likely splits.
  double sigma_s = std::sqrt(0.75 * 0.25 * double(n));
  CHECK(std::abs(double(singles_a) - 0.75 * double(n)) < 4.0 * sigma_s);
  CHECK(std::abs(double(singles_b) - 0.75 * double(n)) < 4.0 * sigma_s);
}

TEST_CASE("sampled frequencies match the exhaustive outcome enumeration") {
  auto s = stats_of(0.6, 0.05);
  auto da = det(0.5, 1e-3);
  auto db = det(0.4, 2e-3);
  auto expect = oracle::enumerate_rates(s, da, db);
  const std::uint64_t n = 1000000;
  Tally t;
  for (std::uint64_t k = 0; k < n; ++k) {
    TriggerRng rng(4, k);
    auto r = sample_trigger(s, da, db, rng);
    t.n_a += r.det_a;
    t.n_b += r.det_b;
    t.n_ab += static_cast<std::uint64_t>(r.det_a & r.det_b);
  }
  auto band = [n](double p) { return 4.0 * std::sqrt(p * (1 - p) * double(n)); };
  CHECK(std::abs(double(t.n_a) - expect.p_a * double(n)) < band(expect.p_a));
  CHECK(std::abs(double(t.n_b) - expect.p_b * double(n)) < band(expect.p_b));
  CHECK(std::abs(double(t.n_ab) - expect.p_ab * double(n)) < band(expect.p_ab));
}

TEST_CASE("zero dead time accepts every offered trigger") {
  auto src = bench(1e6);
  src.dead_time = 0.0;
  auto res = simulate_run(src, det(0.084, 35.1e-6), det(0.096, 7.4e-6), 20000, 7);
  CHECK(res.summary.n_triggers_accepted == 20000);
  CHECK(res.summary.n_triggers_offered == 20000);
  CHECK(res.records.records.size() == 20000);
}

TEST_CASE("same seed reproduces the identical record stream") {
  auto src = bench(5.375e5);
  SimOptions opt;
  opt.keep_timestamps = true;
  auto r1 = simulate_run(src, det(0.084, 35.1e-6), det(0.096, 7.4e-6), 30000, 99, opt);
  auto r2 = simulate_run(src, det(0.084, 35.1e-6), det(0.096, 7.4e-6), 30000, 99, opt);
  CHECK(r1.records.records == r2.records.records);
  CHECK(r1.records.timestamps_ns == r2.records.timestamps_ns);
  CHECK(r1.summary.n_triggers_offered == r2.summary.n_triggers_offered);

  auto r3 = simulate_run(src, det(0.084, 35.1e-6), det(0.096, 7.4e-6), 30000, 100, opt);
  CHECK(r1.records.records != r3.records.records);
}

TEST_CASE("threaded generation equals serial generation bit for bit") {
  auto src = bench(5.375e5);
  SimOptions serial;
  serial.keep_timestamps = true;
  serial.n_threads = 1;
  SimOptions threaded = serial;
  threaded.n_threads = 4;
  auto r1 = simulate_run(src, det(0.084, 35.1e-6), det(0.096, 7.4e-6), 50000, 5, serial);
  auto r2 = simulate_run(src, det(0.084, 35.1e-6), det(0.096, 7.4e-6), 50000, 5, threaded);
  CHECK(r1.records.records == r2.records.records);
  CHECK(r1.records.timestamps_ns == r2.records.timestamps_ns);
  CHECK(r1.summary.n_triggers_offered == r2.summary.n_triggers_offered);
}

TEST_CASE("discard fraction matches the renewal-process prediction") {
  // Accepted-trigger windows never overlap, so the dead fraction solves
  // f = R (1-f) p_or tau exactly: f = x/(1+x) with x = R p_or tau.
  auto src = bench(5.375e5);  // herald rate 0.29*0.32*5.375e5 = 49.88 kHz
  auto da = det(0.084, 35.1e-6);
  auto db = det(0.096, 7.4e-6);
  auto s = statistics_of(src);
  auto rates = oracle::enumerate_rates(s, da, db);
  double p_or = rates.p_a + rates.p_b - rates.p_ab;
  double x = heralding_rate(src) * src.dead_time * p_or;
  double f = x / (1.0 + x);

  auto res = simulate_run(src, da, db, 2000000, 11);
  double offered = double(res.summary.n_triggers_offered);
  double discarded = offered - double(res.summary.n_triggers_accepted);
  double observed = discarded / offered;
  double sigma = std::sqrt(f * (1.0 - f) / offered);
  CHECK(std::abs(observed - f) < 3.0 * sigma);
}

TEST_CASE("wall duration is consistent with the offered-trigger rate") {
  auto src = bench(5.375e5);
  auto res = simulate_run(src, det(0.084, 35.1e-6), det(0.096, 7.4e-6), 500000, 13);
  double offered = double(res.summary.n_triggers_offered);
  double rate_est = offered / res.summary.wall_duration;
  double rel_sigma = 1.0 / std::sqrt(offered);
  CHECK(std::abs(rate_est / res.summary.herald_rate - 1.0) < 4.0 * rel_sigma);
  CHECK(res.summary.herald_rate == doctest::Approx(heralding_rate(src)));
}

TEST_CASE("timestamps are strictly increasing when kept") {
  auto src = bench(5.375e5);
  SimOptions opt;
  opt.keep_timestamps = true;
  auto res = simulate_run(src, det(0.5, 1e-4), det(0.5, 1e-4), 50000, 17, opt);
  REQUIRE(res.records.has_timestamps());
  for (std::size_t k = 1; k < res.records.timestamps_ns.size(); ++k)
    CHECK(res.records.timestamps_ns[k] > res.records.timestamps_ns[k - 1]);
}

TEST_CASE("unphysical statistics abort the run") {
  auto src = bench(1e12);  // P(2) would exceed 1 - P(1)
  CHECK_THROWS_AS(
      simulate_run(src, det(0.5, 0.0), det(0.5, 0.0), 100, 1),
      std::domain_error);
}

TEST_CASE("herald dark triggers dilute clicks and ignore the attenuator") {
  // Perfect source and detectors: every real herald yields exactly one
  // click; dark heralds are vacuum. Equal rates make half the triggers
  // silent.
  auto src = bench(1e3 / (0.29 * 0.32));  // herald rate 1 kHz
  src.coupling_p1 = 0.999;                // leave headroom for P(2) > 0
  src.herald_dark_rate = 1e3;
  SimOptions opt;
  opt.herald_darks = true;
  auto da = det(1.0, 0.0);
  auto db = det(1.0, 0.0);
  const std::uint64_t n = 100000;
  auto res = simulate_run(src, da, db, n, 23, opt);
  auto t = tally(res.records.records);
  double clicks = double(t.n_a + t.n_b);
  double sigma = std::sqrt(0.25 * double(n));
  CHECK(std::abs(clicks - 0.5 * double(n)) < 4.0 * sigma);

  // Attenuation thins real heralds only: 0.5 kHz real vs 1 kHz dark.
  src.attenuation = 0.5;
  auto res2 = simulate_run(src, da, db, n, 29, opt);
  auto t2 = tally(res2.records.records);
  double clicks2 = double(t2.n_a + t2.n_b);
  double frac = 1.0 / 3.0;
  double sigma2 = std::sqrt(frac * (1 - frac) * double(n));
  CHECK(std::abs(clicks2 - frac * double(n)) < 4.0 * sigma2);
}

TEST_CASE("gate acceptance multiplies both bench efficiencies") {
  auto src = bench(1e5);
  src.coupling_p1 = 0.999;  // leave headroom for P(2) > 0
  src.gate_acceptance = 0.09;
  auto res = simulate_run(src, det(1.0, 0.0), det(1.0, 0.0), 200000, 31);
  auto t = tally(res.records.records);
  // One photon per trigger, effective efficiency 0.09 on either arm.
  double p = 0.09;
  double clicks = double(t.n_a + t.n_b);
  double sigma = std::sqrt(p * (1 - p) * 200000.0);
  CHECK(std::abs(clicks - p * 200000.0) < 4.0 * sigma);
}

TEST_CASE("dead-time window arithmetic on hand-built streams") {
  const double dead = 1e-5;
  // A clicks at t=0; 4 us trigger falls inside the window, 12 us is out.
  std::vector<std::uint64_t> t1 = {0, 4000, 12000};
  std::vector<TriggerRecord> c1 = {{1, 0}, {0, 1}, {0, 0}};
  auto m1 = apply_deadtime(t1, dead, c1);
  CHECK(m1 == std::vector<std::uint8_t>{1, 0, 1});

  // The rejected 6 us trigger must not open a window of its own, so
  // 11 us is clear of the only live window (from t=0).
  std::vector<std::uint64_t> t2 = {0, 6000, 11000};
  std::vector<TriggerRecord> c2 = {{1, 0}, {0, 1}, {0, 0}};
  auto m2 = apply_deadtime(t2, dead, c2);
  CHECK(m2 == std::vector<std::uint8_t>{1, 0, 1});

  // No clicks: everything accepted.
  std::vector<std::uint64_t> t3 = {0, 100, 200, 300};
  std::vector<TriggerRecord> c3(4, TriggerRecord{0, 0});
  auto m3 = apply_deadtime(t3, dead, c3);
  CHECK(m3 == std::vector<std::uint8_t>{1, 1, 1, 1});

  // Window boundary is half-open: a trigger at exactly t+dead is live.
  std::vector<std::uint64_t> t4 = {0, 10000};
  std::vector<TriggerRecord> c4 = {{0, 1}, {1, 0}};
  auto m4 = apply_deadtime(t4, dead, c4);
  CHECK(m4 == std::vector<std::uint8_t>{1, 1});
}

TEST_CASE("dead-time filter rejects unsorted timestamps") {
  std::vector<std::uint64_t> t = {100, 50};
  std::vector<TriggerRecord> c = {{0, 0}, {0, 0}};
  CHECK_THROWS_AS(apply_deadtime(t, 1e-5, c), std::invalid_argument);
}

TEST_CASE("dead-time filter agrees with the event-by-event reference") {
  // Randomized stream: 5 percent click rate per arm, 3 us mean gaps,
  // 10 us windows, so windows interleave in every pattern.
  std::vector<std::uint64_t> ts;
  std::vector<TriggerRecord> clicks;
  TriggerRng rng(123, 0);
  double t = 0.0;
  for (int k = 0; k < 100000; ++k) {
    t += rng.next_exponential(1.0 / 3e-6);
    ts.push_back(static_cast<std::uint64_t>(std::llround(t * 1e9)));
    TriggerRecord r;
    r.det_a = rng.next_bernoulli(0.05);
    r.det_b = rng.next_bernoulli(0.05);
    clicks.push_back(r);
  }
  auto lib = apply_deadtime(ts, 1e-5, clicks);
  auto ref = oracle::deadtime_reference(ts, 1e-5, clicks);
  CHECK(lib == ref);
}

TEST_CASE("naive mode records dead-window triggers with muted detectors") {
  // Hot bench: big click probabilities and high rate force heavy
  // dead-window traffic, so naive bookkeeping visibly starves
  // coincidences.
  SourceConfig src = bench(5e-3 / (0.5 * 0.6 * 0.6 * 2.5e-9));  // P(2) = 5e-3
  src.attenuation = 1e5 / heralding_rate(src);  // herald rate 1e5
  auto da = det(0.5, 1e-5);
  auto db = det(0.5, 1e-5);

  const std::uint64_t n = 2000000;
  SimOptions clean;
  auto r_clean = simulate_run(src, da, db, n, 41, clean);
  SimOptions naive;
  naive.enforce_gate_out = false;
  auto r_naive = simulate_run(src, da, db, n, 41, naive);

  // Naive mode accepts every offered trigger.
  CHECK(r_naive.summary.n_triggers_offered ==
        r_naive.summary.n_triggers_accepted);

  auto tc = tally(r_clean.records.records);
  auto tn = tally(r_naive.records.records);
  double p_clean = double(tc.n_ab) / double(n);
  double p_naive = double(tn.n_ab) / double(n);
  double sigma = std::sqrt((p_clean + p_naive) / double(n));
  CHECK(p_naive < p_clean - 3.5 * sigma);
}

}  // TEST_SUITE
