#include "ahsps/render.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "ahsps/version.hpp"
#include "json.hpp"

namespace ahsps {

namespace {

using nlohmann::json;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

const char* yn(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::string render_analysis_table(const AnalysisReport& r) {
  std::string s;
  s += fmt("%12s %12s %12s %12s %13s %13s %13s %13s\n", "N_t", "N_A", "N_B",
           "N_AB", "P(1)", "P(2)", "g2 raw", "g2 net");
  const std::string n_b =
      r.have_n_b ? fmt("%" PRIu64, r.counts.n_b) : std::string("-");
  s += fmt("%12" PRIu64 " %12" PRIu64 " %12s %12" PRIu64
           " %13.6g %13.4e %13.4e %13.4e\n",
           r.counts.n_t, r.counts.n_a, n_b.c_str(), r.counts.n_ab, r.stats.p1,
           r.stats.p2, r.g2_raw, r.g2_net);
  s += fmt("%12s %12s %12s %12s %13.3e %13.3e %13.4e %13.4e\n", "1 sigma", "",
           "", "", r.err.sigma_p1, r.err.sigma_p2, r.err.sigma_g2_raw,
           r.err.sigma_g2_net);
  s += fmt("%12s %12s %12s %12s %13.3e %13.3e %13s %13s\n", "propagated", "",
           "", "", r.err.sigma_p1_propagated, r.err.sigma_p2_propagated, "-",
           "-");
  if (!r.have_n_b) {
    s += "note: no N_B supplied; A-only reconstruction, g2 raw reuses the A "
         "rate for both arms\n";
  }
  if (r.err.upper_bound_only) {
    s += "note: N_AB = 0; the P(2) and g2 sigma entries are 90% CL upper "
         "bounds\n";
  }
  if (r.solve.degenerate) {
    s += "warning: degenerate solve: the detector system is singular\n";
  }
  if (r.solve.clamped) {
    s += "warning: clamped solve: a raw per-arm value fell outside [0,1] "
         "(A arm: P1 ";
    s += fmt("%.6g, P2 %.6g", r.solve.p1_from_a, r.solve.p2_from_a);
    if (r.solve.used_b) {
      s += fmt("; B arm: P1 %.6g, P2 %.6g", r.solve.p1_from_b,
               r.solve.p2_from_b);
    }
    s += ")\n";
  }
  return s;
}

std::string analysis_to_json(const AnalysisReport& r) {
  json j;
  j["tool_version"] = kVersion;
  j["counts"] = {{"n_t", r.counts.n_t},
                 {"n_a", r.counts.n_a},
                 {"n_b", r.counts.n_b},
                 {"n_ab", r.counts.n_ab},
                 {"n_b_present", r.have_n_b}};
  j["rates"] = {{"p_a", r.rates.p_a},
                {"p_b", r.rates.p_b},
                {"p_ab", r.rates.p_ab}};
  j["rates_net"] = {{"p_a", r.rates_net.p_a},
                    {"p_b", r.rates_net.p_b},
                    {"p_ab", r.rates_net.p_ab}};
  j["statistics"] = {
      {"p0", {{"value", r.stats.p0}, {"sigma", r.err.sigma_p0}}},
      {"p1",
       {{"value", r.stats.p1},
        {"sigma", r.err.sigma_p1},
        {"sigma_propagated", r.err.sigma_p1_propagated}}},
      {"p2",
       {{"value", r.stats.p2},
        {"sigma", r.err.sigma_p2},
        {"sigma_propagated", r.err.sigma_p2_propagated}}}};
  j["g2"] = {
      {"raw", {{"value", r.g2_raw}, {"sigma", r.err.sigma_g2_raw}}},
      {"net", {{"value", r.g2_net}, {"sigma", r.err.sigma_g2_net}}}};
  j["upper_bound_only"] = r.err.upper_bound_only;
  j["solve"] = {{"p1_from_a", r.solve.p1_from_a},
                {"p2_from_a", r.solve.p2_from_a},
                {"p1_from_b", r.solve.p1_from_b},
                {"p2_from_b", r.solve.p2_from_b},
                {"used_b", r.solve.used_b},
                {"clamped", r.solve.clamped},
                {"degenerate", r.solve.degenerate}};
  j["provenance"] = {{"input", r.source_row.input_path},
                     {"config_hash", r.source_row.config_hash},
                     {"counts_only", r.source_row.counts_only}};
  return j.dump(2) + "\n";
}

AnalysisReport analysis_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    AnalysisReport r;
    const auto& jc = j.at("counts");
    r.counts.n_t = jc.at("n_t").get<std::uint64_t>();
    r.counts.n_a = jc.at("n_a").get<std::uint64_t>();
    r.counts.n_b = jc.at("n_b").get<std::uint64_t>();
    r.counts.n_ab = jc.at("n_ab").get<std::uint64_t>();
    r.have_n_b = jc.at("n_b_present").get<bool>();

    const auto& jr = j.at("rates");
    r.rates.p_a = jr.at("p_a").get<double>();
    r.rates.p_b = jr.at("p_b").get<double>();
    r.rates.p_ab = jr.at("p_ab").get<double>();
    const auto& jn = j.at("rates_net");
    r.rates_net.p_a = jn.at("p_a").get<double>();
    r.rates_net.p_b = jn.at("p_b").get<double>();
    r.rates_net.p_ab = jn.at("p_ab").get<double>();

    const auto& js = j.at("statistics");
    r.stats.p0 = js.at("p0").at("value").get<double>();
    r.err.sigma_p0 = js.at("p0").at("sigma").get<double>();
    r.stats.p1 = js.at("p1").at("value").get<double>();
    r.err.sigma_p1 = js.at("p1").at("sigma").get<double>();
    r.err.sigma_p1_propagated =
        js.at("p1").at("sigma_propagated").get<double>();
    r.stats.p2 = js.at("p2").at("value").get<double>();
    r.err.sigma_p2 = js.at("p2").at("sigma").get<double>();
    r.err.sigma_p2_propagated =
        js.at("p2").at("sigma_propagated").get<double>();

    r.g2_raw = j.at("g2").at("raw").at("value").get<double>();
    r.err.sigma_g2_raw = j.at("g2").at("raw").at("sigma").get<double>();
    r.g2_net = j.at("g2").at("net").at("value").get<double>();
    r.err.sigma_g2_net = j.at("g2").at("net").at("sigma").get<double>();
    r.err.upper_bound_only = j.at("upper_bound_only").get<bool>();

    const auto& jv = j.at("solve");
    r.solve.p1_from_a = jv.at("p1_from_a").get<double>();
    r.solve.p2_from_a = jv.at("p2_from_a").get<double>();
    r.solve.p1_from_b = jv.at("p1_from_b").get<double>();
    r.solve.p2_from_b = jv.at("p2_from_b").get<double>();
    r.solve.used_b = jv.at("used_b").get<bool>();
    r.solve.clamped = jv.at("clamped").get<bool>();
    r.solve.degenerate = jv.at("degenerate").get<bool>();
    r.solve.stats = r.stats;

    const auto& jp = j.at("provenance");
    r.source_row.input_path = jp.at("input").get<std::string>();
    r.source_row.config_hash = jp.at("config_hash").get<std::string>();
    r.source_row.counts_only = jp.at("counts_only").get<bool>();
    return r;
  } catch (const json::exception& e) {
    throw std::runtime_error(std::string("malformed analysis JSON: ") +
                             e.what());
  }
}

std::string render_simulation_summary(const SimulationSummary& s) {
  return fmt("N_t %" PRIu64 "   offered %" PRIu64
             "   T %.6g s   R_H %.6g Hz   seed %" PRIu64 "\n",
             s.n_triggers_accepted, s.n_triggers_offered, s.wall_duration,
             s.herald_rate, s.rng_seed);
}

std::string histogram_to_tsv(const Histogram& h, const NormalizedHistogram& norm,
                             double p_a, double p_b, double p_ab) {
  std::string s;
  s += "# start/stop trigger-separation histogram\n";
  s += fmt("# n_max = %d   starts_consumed = %" PRIu64
           "   invalid_starts = %" PRIu64 "   cancelled_searches = %" PRIu64
           "\n",
           h.n_max, h.starts_consumed, h.invalid_starts, h.cancelled_searches);
  s += fmt("# p_a = %.8g   p_b = %.8g   p_ab = %.8g\n", p_a, p_b, p_ab);
  double c = 0.0;
  if (h.fit) {
    c = h.fit->c;
    s += fmt("# C = %.8g   sigma = %.3g   chi2 = %.6g   dof = %" PRIu64
             "   bins_used = %" PRIu64 "\n",
             h.fit->c, h.fit->c_sigma, h.fit->chi2, h.fit->dof,
             h.fit->bins_used);
  } else {
    s += "# C not fitted\n";
  }
  s += "# columns: n\tcount\tmodel\tnormalized\n";
  for (int n = -h.n_max; n <= h.n_max; ++n) {
    const double model = n == 0 ? c * p_ab : theoretical_m(n, p_a, p_b, c);
    s += fmt("%d\t%" PRIu64 "\t%.8g\t%.8g\n", n, h.at(n), model, norm.at(n));
  }
  return s;
}

std::string render_histogram_ascii(const Histogram& h, int max_width) {
  std::uint64_t peak = 0;
  for (auto v : h.counts) peak = std::max(peak, v);
  std::string s;
  s += fmt("%6s %12s\n", "n", "count");
  for (int n = -h.n_max; n <= h.n_max; ++n) {
    const std::uint64_t v = h.at(n);
    const int bar =
        peak == 0 ? 0
                  : static_cast<int>(static_cast<double>(v) * max_width /
                                     static_cast<double>(peak));
    s += fmt("%6d %12" PRIu64 " |%s\n", n, v, std::string(bar, '#').c_str());
  }
  return s;
}

std::string render_sweep_table(const SweepResult& s) {
  std::string out;
  out += fmt("sweep over %s: %zu points\n",
             s.kind == SweepKind::pump_power ? "pump_power" : "attenuation",
             s.points.size());
  out += fmt("%12s %13s %11s %11s %13s %11s %13s\n", "value", "R_H", "N_t",
             "P(1)", "P(2)", "sigma(P2)", "g2 raw");
  for (const auto& pt : s.points) {
    out += fmt("%12.6g %13.6g %11" PRIu64 " %11.6g %13.4e %11.3e %13.4e\n",
               pt.value, pt.herald_rate, pt.summary.n_triggers_accepted,
               pt.report.stats.p1, pt.report.stats.p2,
               pt.report.err.sigma_p2_propagated, pt.report.g2_raw);
  }
  out += fmt("slope = %.6g +- %.3g   expected = %.6g\n", s.fit.slope,
             s.fit.slope_sigma, s.fit.expected_slope);
  out += fmt("intercept = %.6g +- %.3g   R2 = %.6g\n", s.fit.intercept,
             s.fit.intercept_sigma, s.fit.r2);
  out += fmt("P(1) mean = %.6g   relative spread = %.4g\n", s.fit.p1_mean,
             s.fit.p1_spread_rel);
  out += fmt("flags: degenerate = %s, nonlinear = %s\n", yn(s.fit.degenerate),
             yn(s.fit.nonlinear));
  return out;
}

std::string sweep_to_json(const SweepResult& s) {
  json j;
  j["tool_version"] = kVersion;
  j["kind"] =
      s.kind == SweepKind::pump_power ? "pump_power" : "attenuation";
  j["points"] = json::array();
  for (const auto& pt : s.points) {
    j["points"].push_back(
        {{"value", pt.value},
         {"herald_rate", pt.herald_rate},
         {"n_t", pt.summary.n_triggers_accepted},
         {"n_offered", pt.summary.n_triggers_offered},
         {"p1", pt.report.stats.p1},
         {"p2", pt.report.stats.p2},
         {"sigma_p2_propagated", pt.report.err.sigma_p2_propagated},
         {"g2_raw", pt.report.g2_raw},
         {"g2_net", pt.report.g2_net}});
  }
  j["fit"] = {{"slope", s.fit.slope},
              {"slope_sigma", s.fit.slope_sigma},
              {"intercept", s.fit.intercept},
              {"intercept_sigma", s.fit.intercept_sigma},
              {"r2", s.fit.r2},
              {"expected_slope", s.fit.expected_slope},
              {"p1_mean", s.fit.p1_mean},
              {"p1_spread_rel", s.fit.p1_spread_rel},
              {"degenerate", s.fit.degenerate},
              {"nonlinear", s.fit.nonlinear}};
  return j.dump(2) + "\n";
}

}  // namespace ahsps
