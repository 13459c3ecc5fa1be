#include "ahsps/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace ahsps {

CountTotals& CountTotals::merge(const CountTotals& other) {
  n_t += other.n_t;
  n_a += other.n_a;
  n_b += other.n_b;
  n_ab += other.n_ab;
  return *this;
}

CountTotals accumulate_counts(std::span<const TriggerRecord> records) {
  CountTotals c;
  c.n_t = records.size();
  for (const auto& r : records) {
    c.n_a += r.det_a;
    c.n_b += r.det_b;
    c.n_ab += static_cast<std::uint64_t>(r.det_a & r.det_b);
  }
  return c;
}

MeasuredRates measured_rates(const CountTotals& c) {
  if (c.n_t == 0) {
    throw std::invalid_argument("no accepted triggers; rates are undefined");
  }
  MeasuredRates m;
  const double n = static_cast<double>(c.n_t);
  m.p_a = static_cast<double>(c.n_a) / n;
  m.p_b = static_cast<double>(c.n_b) / n;
  m.p_ab = static_cast<double>(c.n_ab) / n;
  return m;
}

ForwardCoefficients forward_coefficients(const DetectorConfig& det_a,
                                         const DetectorConfig& det_b) {
  const double ea = det_a.efficiency;
  const double eb = det_b.efficiency;
  const double da = det_a.dark_count_prob;
  const double db = det_b.dark_count_prob;

  ForwardCoefficients f{};
  // Singles: p_x = dc + (1 - 2 dc) * [p1 * eta/2 + p2 * (1 - (1 - eta/2)^2)].
  f.fa0 = da;
  f.fa1 = (1.0 - 2.0 * da) * ea / 2.0;
  f.fa2 = (1.0 - 2.0 * da) * (1.0 - (1.0 - ea / 2.0) * (1.0 - ea / 2.0));
  f.fb0 = db;
  f.fb1 = (1.0 - 2.0 * db) * eb / 2.0;
  f.fb2 = (1.0 - 2.0 * db) * (1.0 - (1.0 - eb / 2.0) * (1.0 - eb / 2.0));

  // Joint: coincidence probability per photon number, averaged over the
  // equally likely routings. One photon routed to arm X clicks with
  // eta + dc - 2 eta dc (photon and dark combine exclusively).
  const double ca = ea + da - 2.0 * ea * da;
  const double cb = eb + db - 2.0 * eb * db;
  const double pa2 = 1.0 - (1.0 - ea) * (1.0 - ea);  // both photons to A
  const double pb2 = 1.0 - (1.0 - eb) * (1.0 - eb);
  const double pab_0 = da * db;
  const double pab_1 = 0.5 * (ca * db + da * cb);
  const double pab_2 = 0.25 * (pa2 * (1.0 - 2.0 * da) + da) * db +
                       0.5 * ca * cb +
                       0.25 * da * (pb2 * (1.0 - 2.0 * db) + db);
  f.g0 = pab_0;
  f.g1 = pab_1 - pab_0;
  f.g2 = pab_2 - pab_0;
  return f;
}

MeasuredRates forward_probabilities(const PhotonStatistics& stats,
                                    const DetectorConfig& det_a,
                                    const DetectorConfig& det_b) {
  const ForwardCoefficients f = forward_coefficients(det_a, det_b);
  MeasuredRates m;
  m.p_a = f.fa0 + f.fa1 * stats.p1 + f.fa2 * stats.p2;
  m.p_b = f.fb0 + f.fb1 * stats.p1 + f.fb2 * stats.p2;
  m.p_ab = f.g0 + f.g1 * stats.p1 + f.g2 * stats.p2;
  return m;
}

namespace {

constexpr double kDetEps = 1e-30;  // singular 2x2 threshold

struct ArmSolution {
  double p1 = 0.0;
  double p2 = 0.0;
  bool degenerate = false;
};

// Cramer solve of one arm's 2x2 system
//   p_x  - fx0 = fx1 p1 + fx2 p2
//   p_ab - g0  = g1  p1 + g2  p2
ArmSolution solve_arm(double p_x, double p_ab, double fx0, double fx1,
                      double fx2, double g0, double g1, double g2) {
  ArmSolution s;
  const double det = fx1 * g2 - fx2 * g1;
  if (std::abs(det) < kDetEps) {
    s.degenerate = true;
    return s;
  }
  const double rx = p_x - fx0;
  const double rab = p_ab - g0;
  s.p1 = (rx * g2 - fx2 * rab) / det;
  s.p2 = (fx1 * rab - g1 * rx) / det;
  return s;
}

// Clamp into the simplex, p1 first; p0 = 1 - p1 - p2 follows.
PhotonStatistics clamp_stats(double p1, double p2, bool* clamped) {
  const double q1 = std::clamp(p1, 0.0, 1.0);
  const double q2 = std::clamp(p2, 0.0, 1.0 - q1);
  *clamped = (q1 != p1) || (q2 != p2);
  return PhotonStatistics::from_p1_p2(q1, q2);
}

}  // namespace

SolveResult solve_statistics(const MeasuredRates& m,
                             const DetectorConfig& det_a,
                             const DetectorConfig& det_b) {
  const ForwardCoefficients f = forward_coefficients(det_a, det_b);
  const ArmSolution a =
      solve_arm(m.p_a, m.p_ab, f.fa0, f.fa1, f.fa2, f.g0, f.g1, f.g2);
  const ArmSolution b =
      solve_arm(m.p_b, m.p_ab, f.fb0, f.fb1, f.fb2, f.g0, f.g1, f.g2);

  SolveResult out;
  out.used_b = true;
  out.p1_from_a = a.p1;
  out.p2_from_a = a.p2;
  out.p1_from_b = b.p1;
  out.p2_from_b = b.p2;
  out.degenerate = a.degenerate || b.degenerate;
  if (out.degenerate) {
    out.stats = PhotonStatistics{};
    return out;
  }
  out.stats =
      clamp_stats(0.5 * (a.p1 + b.p1), 0.5 * (a.p2 + b.p2), &out.clamped);
  return out;
}

SolveResult solve_statistics_a_only(double p_a, double p_ab,
                                    const DetectorConfig& det_a,
                                    const DetectorConfig& det_b) {
  const ForwardCoefficients f = forward_coefficients(det_a, det_b);
  const ArmSolution a =
      solve_arm(p_a, p_ab, f.fa0, f.fa1, f.fa2, f.g0, f.g1, f.g2);

  SolveResult out;
  out.used_b = false;
  out.p1_from_a = a.p1;
  out.p2_from_a = a.p2;
  out.degenerate = a.degenerate;
  if (out.degenerate) {
    out.stats = PhotonStatistics{};
    return out;
  }
  out.stats = clamp_stats(a.p1, a.p2, &out.clamped);
  return out;
}

MeasuredRates net_rates(const PhotonStatistics& stats,
                        const DetectorConfig& det_a,
                        const DetectorConfig& det_b) {
  DetectorConfig da = det_a;
  DetectorConfig db = det_b;
  da.dark_count_prob = 0.0;
  db.dark_count_prob = 0.0;
  return forward_probabilities(stats, da, db);
}

double g2(const MeasuredRates& m) {
  const double denom = m.p_a * m.p_b;
  if (denom == 0.0) {
    throw std::invalid_argument("g2 undefined: a singles rate is zero");
  }
  return m.p_ab / denom;
}

double g2_from_stats(const PhotonStatistics& stats) {
  if (stats.p1 == 0.0) {
    throw std::invalid_argument("g2 undefined: P(1) is zero");
  }
  return 2.0 * stats.p2 / (stats.p1 * stats.p1);
}

ErrorBars error_bars(const CountTotals& c, const AnalysisReport& report,
                     const DetectorConfig& det_a,
                     const DetectorConfig& det_b) {
  ErrorBars e;
  if (c.n_t == 0) return e;
  const double n_t = static_cast<double>(c.n_t);
  const double n_a = static_cast<double>(c.n_a);
  const double n_b = static_cast<double>(c.n_b);
  const double n_ab = static_cast<double>(c.n_ab);
  const PhotonStatistics& st = report.stats;

  // Headline counting floors.
  if (c.n_a > 0) e.sigma_p1 = st.p1 / std::sqrt(n_a);
  if (c.n_ab > 0) {
    e.sigma_p2 = st.p2 / std::sqrt(n_ab);
    double rel2 = 1.0 / n_ab + 1.0 / n_t;
    if (report.have_n_b) {
      if (c.n_a > 0) rel2 += 1.0 / n_a;
      if (c.n_b > 0) rel2 += 1.0 / n_b;
    } else {
      // The A rate enters squared, doubling its relative contribution.
      if (c.n_a > 0) rel2 += 4.0 / n_a;
    }
    e.sigma_g2_raw = report.g2_raw * std::sqrt(rel2);
    e.sigma_g2_net = report.g2_net * std::sqrt(rel2);
  } else {
    // Zero coincidences: 90% CL upper bounds from the Poisson zero-count
    // limit (2.3 expected counts), pushed through the same solve that
    // produced the headline statistics.
    e.upper_bound_only = true;
    const double p_ab_up = 2.3 / n_t;
    const MeasuredRates& m = report.rates;
    const SolveResult up =
        report.have_n_b
            ? solve_statistics(MeasuredRates{m.p_a, m.p_b, p_ab_up}, det_a,
                               det_b)
            : solve_statistics_a_only(m.p_a, p_ab_up, det_a, det_b);
    if (!up.degenerate) e.sigma_p2 = up.stats.p2;
    const double denom_raw =
        report.have_n_b ? m.p_a * m.p_b : m.p_a * m.p_a;
    if (denom_raw > 0.0) e.sigma_g2_raw = p_ab_up / denom_raw;
    if (!up.degenerate && up.stats.p1 > 0.0) {
      e.sigma_g2_net = 2.0 * up.stats.p2 / (up.stats.p1 * up.stats.p1);
    }
  }
  e.sigma_p0 = std::sqrt(e.sigma_p1 * e.sigma_p1 + e.sigma_p2 * e.sigma_p2);

  // Exact covariance propagation of the per-trigger click indicators
  // (a, b, ab) through the linear solve, including the A/B average.
  const ForwardCoefficients f = forward_coefficients(det_a, det_b);
  double jac[2][3] = {{0, 0, 0}, {0, 0, 0}};  // rows P1, P2; cols a, b, ab
  const double det_arm_a = f.fa1 * f.g2 - f.fa2 * f.g1;
  const double det_arm_b = f.fb1 * f.g2 - f.fb2 * f.g1;
  const bool two_arms = report.have_n_b && std::abs(det_arm_b) >= kDetEps;
  if (std::abs(det_arm_a) >= kDetEps) {
    const double w = two_arms ? 0.5 : 1.0;
    jac[0][0] = w * f.g2 / det_arm_a;
    jac[0][2] = w * -f.fa2 / det_arm_a;
    jac[1][0] = w * -f.g1 / det_arm_a;
    jac[1][2] = w * f.fa1 / det_arm_a;
  }
  if (two_arms) {
    jac[0][1] = 0.5 * f.g2 / det_arm_b;
    jac[0][2] += 0.5 * -f.fb2 / det_arm_b;
    jac[1][1] = 0.5 * -f.g1 / det_arm_b;
    jac[1][2] += 0.5 * f.fb1 / det_arm_b;
  }

  const MeasuredRates& m = report.rates;
  double cov[3][3];
  cov[0][0] = m.p_a * (1.0 - m.p_a);
  cov[1][1] = m.p_b * (1.0 - m.p_b);
  cov[2][2] = m.p_ab * (1.0 - m.p_ab);
  cov[0][1] = cov[1][0] = m.p_ab - m.p_a * m.p_b;
  cov[0][2] = cov[2][0] = m.p_ab * (1.0 - m.p_a);
  cov[1][2] = cov[2][1] = m.p_ab * (1.0 - m.p_b);

  for (int row = 0; row < 2; ++row) {
    double var = 0.0;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        var += jac[row][i] * cov[i][j] * jac[row][j];
      }
    }
    var = std::max(var, 0.0) / n_t;
    (row == 0 ? e.sigma_p1_propagated : e.sigma_p2_propagated) =
        std::sqrt(var);
  }
  return e;
}

namespace {

AnalysisReport analyze_impl(const CountTotals& c, bool have_n_b,
                            const DetectorConfig& det_a,
                            const DetectorConfig& det_b,
                            Provenance provenance) {
  AnalysisReport rep;
  rep.counts = c;
  rep.have_n_b = have_n_b;
  rep.source_row = std::move(provenance);
  rep.rates = measured_rates(c);

  if (have_n_b) {
    rep.solve = solve_statistics(rep.rates, det_a, det_b);
  } else {
    rep.solve =
        solve_statistics_a_only(rep.rates.p_a, rep.rates.p_ab, det_a, det_b);
  }
  rep.stats = rep.solve.stats;

  const double denom_raw = have_n_b ? rep.rates.p_a * rep.rates.p_b
                                    : rep.rates.p_a * rep.rates.p_a;
  if (denom_raw == 0.0) {
    throw std::invalid_argument("g2 undefined: a singles rate is zero");
  }
  rep.g2_raw = rep.rates.p_ab / denom_raw;

  rep.rates_net = net_rates(rep.stats, det_a, det_b);
  const double denom_net = rep.rates_net.p_a * rep.rates_net.p_b;
  rep.g2_net = denom_net > 0.0 ? rep.rates_net.p_ab / denom_net : 0.0;

  rep.err = error_bars(c, rep, det_a, det_b);
  return rep;
}

}  // namespace

AnalysisReport analyze_counts(const CountTotals& c, bool have_n_b,
                              const DetectorConfig& det_a,
                              const DetectorConfig& det_b,
                              Provenance provenance) {
  return analyze_impl(c, have_n_b, det_a, det_b, std::move(provenance));
}

AnalysisReport analyze_records(std::span<const TriggerRecord> records,
                               const DetectorConfig& det_a,
                               const DetectorConfig& det_b,
                               Provenance provenance) {
  return analyze_impl(accumulate_counts(records), true, det_a, det_b,
                      std::move(provenance));
}

}  // namespace ahsps
