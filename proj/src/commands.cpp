#include "ahsps/commands.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ahsps/config.hpp"
#include "ahsps/estimator.hpp"
#include "ahsps/histogram.hpp"
#include "ahsps/manifest.hpp"
#include "ahsps/raw_io.hpp"
#include "ahsps/render.hpp"
#include "ahsps/simulator.hpp"
#include "ahsps/sweep.hpp"
#include "ahsps/version.hpp"

namespace ahsps {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

std::string now_utc_iso() {
  std::time_t t = std::time(nullptr);
  std::tm g{};
  gmtime_r(&t, &g);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &g);
  return buf;
}

bool write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.flush();
  return out.good();
}

bool load_config(const std::string& path, BenchConfig* cfg,
                 std::ostream& err) {
  try {
    *cfg = load_config_file(path);
    return true;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return false;
  }
}

RunManifest base_manifest(const std::string& command_line,
                          std::uint64_t seed) {
  RunManifest m;
  m.command_line = command_line;
  m.tool_version = kVersion;
  m.created_utc = now_utc_iso();
  m.seed = seed;
  return m;
}

// Success paths must keep stderr silent: callers capture stdout for
// machine parsing and any stray diagnostic would corrupt it when the two
// streams are merged. Notes ride inside the rendered output instead.

bool parse_counts(const std::string& text, CountTotals* c, bool* have_n_b,
                  std::string* msg) {
  std::vector<std::string> fields;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    fields.push_back(text.substr(
        pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (fields.size() != 3 && fields.size() != 4) {
    *msg = "--counts expects n_t,n_a[,n_b],n_ab";
    return false;
  }
  std::vector<std::uint64_t> vals;
  for (const auto& f : fields) {
    double v = 0.0;
    std::size_t used = 0;
    try {
      v = std::stod(f, &used);
    } catch (const std::exception&) {
      *msg = "--counts field is not a number: '" + f + "'";
      return false;
    }
    if (used != f.size() || !std::isfinite(v) || v < 0.0 || v > 9.0e18) {
      *msg = "--counts field is not a count: '" + f + "'";
      return false;
    }
    vals.push_back(static_cast<std::uint64_t>(std::llround(v)));
  }
  if (vals.size() == 3) {
    *have_n_b = false;
    c->n_t = vals[0];
    c->n_a = vals[1];
    c->n_b = 0;
    c->n_ab = vals[2];
  } else {
    *have_n_b = true;
    c->n_t = vals[0];
    c->n_a = vals[1];
    c->n_b = vals[2];
    c->n_ab = vals[3];
  }
  return true;
}

}  // namespace

int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  BenchConfig cfg;
  if (!load_config(a.config_path, &cfg, err)) return kExitData;
  SimOptions opt;
  opt.keep_timestamps = a.timestamps;
  opt.enforce_gate_out = !a.no_gate_out;
  opt.n_threads = a.threads;
  SimulationResult res;
  try {
    res = simulate_run(cfg.source, cfg.det_a, cfg.det_b, a.n, a.seed, opt);
  } catch (const std::exception& e) {
    err << "simulation error: " << e.what() << "\n";
    return kExitData;
  }
  try {
    write_raw(res.records, a.out_path);
    RunManifest m = base_manifest(a.command_line, a.seed);
    m.config_path = a.config_path;
    m.config_snapshot = config_to_text(cfg);
    m.config_hash = hash_text(m.config_snapshot);
    m.inputs.emplace_back(a.config_path, hash_file(a.config_path));
    m.outputs.emplace_back(a.out_path, hash_file(a.out_path));
    write_manifest(m, a.out_path);
  } catch (const std::exception& e) {
    err << "output error: " << e.what() << "\n";
    return kExitData;
  }
  out << render_simulation_summary(res.summary);
  return kExitOk;
}

int run_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "table" && a.format != "json") {
    err << "unknown format '" << a.format << "' (expected table or json)\n";
    return kExitUsage;
  }
  const bool counts_mode = a.counts.has_value();
  if (counts_mode == !a.raw_path.empty()) {
    err << "analyze needs exactly one input: a raw file or --counts\n";
    return kExitUsage;
  }
  BenchConfig cfg;
  if (!load_config(a.config_path, &cfg, err)) return kExitData;
  Provenance prov;
  prov.config_hash = hash_text(config_to_text(cfg));
  AnalysisReport report;
  try {
    if (counts_mode) {
      CountTotals c;
      bool have_n_b = false;
      std::string msg;
      if (!parse_counts(*a.counts, &c, &have_n_b, &msg)) {
        err << msg << "\n";
        return kExitUsage;
      }
      prov.input_path = "counts";
      prov.counts_only = true;
      report = analyze_counts(c, have_n_b, cfg.det_a, cfg.det_b, prov);
    } else {
      RecordSet rec = read_raw(a.raw_path);
      prov.input_path = a.raw_path;
      report = analyze_records(rec.records, cfg.det_a, cfg.det_b, prov);
    }
  } catch (const RawFileError& e) {
    err << "raw file error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "analysis error: " << e.what() << "\n";
    return kExitData;
  }
  const std::string rendered = a.format == "json"
                                   ? analysis_to_json(report)
                                   : render_analysis_table(report);
  if (!a.out_path.empty()) {
    if (!write_text_file(a.out_path, rendered)) {
      err << "cannot write '" << a.out_path << "'\n";
      return kExitData;
    }
    try {
      RunManifest m = base_manifest(a.command_line, 0);
      m.config_path = a.config_path;
      m.config_snapshot = config_to_text(cfg);
      m.config_hash = prov.config_hash;
      m.inputs.emplace_back(a.config_path, hash_file(a.config_path));
      if (!counts_mode) {
        m.inputs.emplace_back(a.raw_path, hash_file(a.raw_path));
      }
      m.outputs.emplace_back(a.out_path, hash_file(a.out_path));
      write_manifest(m, a.out_path);
    } catch (const std::exception& e) {
      err << "output error: " << e.what() << "\n";
      return kExitData;
    }
  }
  out << rendered;
  return report.solve.degenerate || report.solve.clamped ? kExitDegenerate
                                                         : kExitOk;
}

int run_histogram(const HistogramArgs& a, std::ostream& out,
                  std::ostream& err) {
  if (a.format != "table" && a.format != "tsv") {
    err << "unknown format '" << a.format << "' (expected table or tsv)\n";
    return kExitUsage;
  }
  if (a.n_max < 1) {
    err << "--n-max must be at least 1\n";
    return kExitUsage;
  }
  RecordSet rec;
  try {
    rec = read_raw(a.raw_path);
  } catch (const RawFileError& e) {
    err << "raw file error: " << e.what() << "\n";
    return kExitData;
  }
  Histogram h = build_histogram(rec.records, a.n_max);
  MeasuredRates rates;
  try {
    rates = measured_rates(accumulate_counts(rec.records));
  } catch (const std::invalid_argument& e) {
    err << "analysis error: " << e.what() << "\n";
    return kExitData;
  }
  std::string fallback_note;
  try {
    h.fit = fit_c(h, rates.p_a, rates.p_b);
  } catch (const std::runtime_error& e) {
    if (a.format != "tsv") {
      err << "histogram fit error: " << e.what() << "\n";
      return kExitData;
    }
    // The TSV still needs a normalizer; when the per-bin fit lacks data,
    // match the total off-center mass instead (same estimator, no bin
    // count requirement).
    double sum_m = 0.0;
    double sum_s = 0.0;
    std::uint64_t used = 0;
    for (int n = -a.n_max; n <= a.n_max; ++n) {
      if (n == 0) continue;
      const double s = theoretical_m(n, rates.p_a, rates.p_b, 1.0);
      if (s <= 0.0) continue;
      sum_m += static_cast<double>(h.at(n));
      sum_s += s;
      ++used;
    }
    if (!(sum_s > 0.0)) {
      err << "histogram fit error: " << e.what() << "\n";
      return kExitData;
    }
    FitResult fb;
    fb.c = sum_m / sum_s;
    fb.c_sigma = std::sqrt(sum_m) / sum_s;
    fb.bins_used = used;
    h.fit = fb;
    fallback_note =
        "# note: too few non-empty bins for the per-bin fit; C matches the "
        "total off-center mass\n";
  }
  NormalizedHistogram norm;
  try {
    norm = normalize(h, rates.p_a, rates.p_b, h.fit->c);
  } catch (const std::invalid_argument& e) {
    err << "histogram error: " << e.what() << "\n";
    return kExitData;
  }
  std::string rendered;
  if (a.format == "tsv") {
    rendered = fallback_note +
               histogram_to_tsv(h, norm, rates.p_a, rates.p_b, rates.p_ab);
  } else {
    const FitResult& fit = *h.fit;
    rendered += fmt("start/stop histogram: n_max %d\n", h.n_max);
    rendered += fmt("starts_consumed %" PRIu64 "   invalid_starts %" PRIu64
                    "   cancelled_searches %" PRIu64 "\n",
                    h.starts_consumed, h.invalid_starts, h.cancelled_searches);
    rendered += fmt("C = %.8g +- %.3g   chi2/dof = %.4g (dof %" PRIu64
                    ", bins_used %" PRIu64 ")%s\n",
                    fit.c, fit.c_sigma,
                    fit.dof > 0 ? fit.chi2 / static_cast<double>(fit.dof)
                                : 0.0,
                    fit.dof, fit.bins_used,
                    fit.shape_flag ? "   [shape flag: data do not follow "
                                     "the geometric law]"
                                   : "");
    rendered += fmt("central bin M(0) = %" PRIu64
                    "   normalized g2 = %.4e\n",
                    h.at(0), norm.central());
    rendered += render_histogram_ascii(h);
  }
  if (!a.out_path.empty()) {
    if (!write_text_file(a.out_path, rendered)) {
      err << "cannot write '" << a.out_path << "'\n";
      return kExitData;
    }
    try {
      RunManifest m = base_manifest(a.command_line, 0);
      m.inputs.emplace_back(a.raw_path, hash_file(a.raw_path));
      m.outputs.emplace_back(a.out_path, hash_file(a.out_path));
      write_manifest(m, a.out_path);
    } catch (const std::exception& e) {
      err << "output error: " << e.what() << "\n";
      return kExitData;
    }
  }
  out << rendered;
  return kExitOk;
}

int run_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  if (a.format != "table" && a.format != "json") {
    err << "unknown format '" << a.format << "' (expected table or json)\n";
    return kExitUsage;
  }
  const bool has_pump = !a.pump_list.empty();
  const bool has_att = !a.attenuation_list.empty();
  if (has_pump == has_att) {
    err << "sweep needs exactly one of --pump or --attenuation\n";
    return kExitUsage;
  }
  const auto& values = has_pump ? a.pump_list : a.attenuation_list;
  if (values.size() < 3) {
    err << "a sweep needs at least 3 points\n";
    return kExitUsage;
  }
  BenchConfig cfg;
  if (!load_config(a.config_path, &cfg, err)) return kExitData;
  SweepResult res;
  try {
    res = run_sweep(cfg,
                    has_pump ? SweepKind::pump_power : SweepKind::attenuation,
                    values, a.n_per_point, a.seed);
  } catch (const std::exception& e) {
    err << "sweep error: " << e.what() << "\n";
    return kExitData;
  }
  const std::string rendered =
      a.format == "json" ? sweep_to_json(res) : render_sweep_table(res);
  if (!a.out_path.empty()) {
    if (!write_text_file(a.out_path, rendered)) {
      err << "cannot write '" << a.out_path << "'\n";
      return kExitData;
    }
    try {
      RunManifest m = base_manifest(a.command_line, a.seed);
      m.config_path = a.config_path;
      m.config_snapshot = config_to_text(cfg);
      m.config_hash = hash_text(m.config_snapshot);
      m.inputs.emplace_back(a.config_path, hash_file(a.config_path));
      m.outputs.emplace_back(a.out_path, hash_file(a.out_path));
      write_manifest(m, a.out_path);
    } catch (const std::exception& e) {
      err << "output error: " << e.what() << "\n";
      return kExitData;
    }
  }
  out << rendered;
  return res.fit.degenerate ? kExitDegenerate : kExitOk;
}

int run_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
  std::ifstream in(a.json_path, std::ios::binary);
  if (!in) {
    err << "cannot read '" << a.json_path << "'\n";
    return kExitData;
  }
  std::ostringstream body;
  body << in.rdbuf();
  AnalysisReport r;
  try {
    r = analysis_from_json(body.str());
  } catch (const std::runtime_error& e) {
    err << e.what() << "\n";
    return kExitData;
  }
  out << render_analysis_table(r);
  return r.solve.degenerate || r.solve.clamped ? kExitDegenerate : kExitOk;
}

}  // namespace ahsps
