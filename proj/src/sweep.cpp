#include "ahsps/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ahsps {

namespace {

// Weighted least squares of y on x; weights 1/sigma^2.
void fit_line(const std::vector<double>& x, const std::vector<double>& y,
              const std::vector<double>& sigma, LinearitySummary* fit) {
  const auto [x_lo, x_hi] = std::minmax_element(x.begin(), x.end());
  // No spread in the abscissa makes the line meaningless.
  if (*x_hi - *x_lo <= 1e-12 * std::abs(*x_hi)) {
    fit->degenerate = true;
    return;
  }
  double s = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(sigma[k] > 0.0)) continue;
    const double w = 1.0 / (sigma[k] * sigma[k]);
    s += w;
    sx += w * x[k];
    sy += w * y[k];
    sxx += w * x[k] * x[k];
    sxy += w * x[k] * y[k];
  }
  const double delta = s * sxx - sx * sx;
  if (!(s > 0.0) || !(delta > 0.0)) {
    fit->degenerate = true;
    return;
  }
  fit->slope = (s * sxy - sx * sy) / delta;
  fit->intercept = (sxx * sy - sx * sxy) / delta;
  fit->slope_sigma = std::sqrt(s / delta);
  fit->intercept_sigma = std::sqrt(sxx / delta);

  const double y_mean = sy / s;
  double ss_res = 0.0;
  double ss_tot = 0.0;
  double chi2 = 0.0;
  std::size_t n_used = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!(sigma[k] > 0.0)) continue;
    const double w = 1.0 / (sigma[k] * sigma[k]);
    const double pred = fit->intercept + fit->slope * x[k];
    ss_res += w * (y[k] - pred) * (y[k] - pred);
    ss_tot += w * (y[k] - y_mean) * (y[k] - y_mean);
    chi2 += w * (y[k] - pred) * (y[k] - pred);
    ++n_used;
  }
  fit->r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 0.0;
  if (n_used > 2) {
    fit->nonlinear = chi2 / static_cast<double>(n_used - 2) > 5.0;
  }
}

}  // namespace

SweepResult run_sweep(const BenchConfig& base, SweepKind kind,
                      const std::vector<double>& values,
                      std::uint64_t n_per_point, std::uint64_t seed) {
  if (values.size() < 3) {
    throw std::invalid_argument("a sweep needs at least 3 points");
  }

  SweepResult out;
  out.kind = kind;
  out.points.reserve(values.size());

  for (std::size_t k = 0; k < values.size(); ++k) {
    SourceConfig src = base.source;
    if (kind == SweepKind::pump_power) {
      src.pump_power = values[k];
    } else {
      src.attenuation = values[k];
    }
    SweepPoint pt;
    pt.value = values[k];
    pt.herald_rate = heralding_rate(src);
    auto sim = simulate_run(src, base.det_a, base.det_b, n_per_point,
                            seed + k);
    pt.summary = sim.summary;
    Provenance prov;
    prov.input_path = "sweep";
    pt.report = analyze_records(sim.records.records, base.det_a, base.det_b,
                                prov);
    out.points.push_back(std::move(pt));
  }

  std::vector<double> x, y, sig;
  for (const auto& pt : out.points) {
    x.push_back(pt.herald_rate);
    y.push_back(pt.report.stats.p2);
    sig.push_back(pt.report.err.sigma_p2_propagated);
  }
  fit_line(x, y, sig, &out.fit);

  if (kind == SweepKind::pump_power) {
    const SourceConfig& s = base.source;
    out.fit.expected_slope =
        0.5 * s.coupling_p1 * s.coupling_p1 * s.gate_width /
        (s.herald_coupling * s.herald_detector_eff * s.attenuation);
  } else {
    out.fit.expected_slope = 0.0;
  }

  double p1_sum = 0.0;
  double p1_min = out.points.front().report.stats.p1;
  double p1_max = p1_min;
  for (const auto& pt : out.points) {
    const double p1 = pt.report.stats.p1;
    p1_sum += p1;
    p1_min = std::min(p1_min, p1);
    p1_max = std::max(p1_max, p1);
  }
  out.fit.p1_mean = p1_sum / static_cast<double>(out.points.size());
  if (out.fit.p1_mean != 0.0) {
    out.fit.p1_spread_rel = (p1_max - p1_min) / out.fit.p1_mean;
  }
  return out;
}

}  // namespace ahsps
