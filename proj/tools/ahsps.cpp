#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "ahsps/commands.hpp"
#include "ahsps/version.hpp"

namespace {

std::string join_args(int argc, char** argv) {
  std::string s;
  for (int i = 0; i < argc; ++i) {
    if (i) s += ' ';
    s += argv[i];
  }
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"heralded single-photon bench toolkit"};
  app.set_version_flag("--version", ahsps::kVersion);
  app.require_subcommand(1);
  const std::string command_line = join_args(argc, argv);

  ahsps::SimulateArgs sim;
  sim.command_line = command_line;
  auto* s_sim = app.add_subcommand(
      "simulate", "generate a raw record file from a bench config");
  s_sim->add_option("--config", sim.config_path, "bench config file")
      ->required();
  s_sim->add_option("--n", sim.n, "accepted triggers to record")->required();
  s_sim->add_option("--seed", sim.seed, "RNG seed");
  s_sim->add_option("--out", sim.out_path, "output raw file")->required();
  s_sim->add_flag("--timestamps", sim.timestamps,
                  "store per-record timestamps");
  s_sim->add_flag("--no-gate-out", sim.no_gate_out,
                  "record triggers inside dead windows (biased bookkeeping)");
  s_sim->add_option("--threads", sim.threads,
                    "worker threads (output independent of the value)");

  ahsps::AnalyzeArgs an;
  an.command_line = command_line;
  std::string counts_text;
  auto* s_an = app.add_subcommand(
      "analyze", "reconstruct P(1), P(2), g2 from records or totals");
  s_an->add_option("--config", an.config_path, "bench config file")
      ->required();
  s_an->add_option("raw", an.raw_path, "raw record file");
  auto* counts_opt = s_an->add_option(
      "--counts", counts_text, "totals n_t,n_a[,n_b],n_ab instead of a file");
  s_an->add_option("--out", an.out_path, "write the report to this file");
  s_an->add_option("--format", an.format, "table | json");

  ahsps::HistogramArgs hi;
  hi.command_line = command_line;
  auto* s_hi = app.add_subcommand(
      "histogram", "start/stop trigger-separation histogram");
  s_hi->add_option("raw", hi.raw_path, "raw record file")->required();
  s_hi->add_option("--n-max", hi.n_max, "search range in triggers");
  s_hi->add_option("--out", hi.out_path, "write the histogram to this file");
  s_hi->add_option("--format", hi.format, "table | tsv");

  ahsps::SweepArgs sw;
  sw.command_line = command_line;
  auto* s_sw = app.add_subcommand(
      "sweep", "per-point analysis over pump power or attenuation");
  s_sw->add_option("--config", sw.config_path, "bench config file")
      ->required();
  s_sw->add_option("--pump", sw.pump_list, "comma-separated pump powers (W)")
      ->delimiter(',');
  s_sw->add_option("--attenuation", sw.attenuation_list,
                   "comma-separated attenuation factors")
      ->delimiter(',');
  s_sw->add_option("--n", sw.n_per_point, "accepted triggers per point")
      ->required();
  s_sw->add_option("--seed", sw.seed, "RNG seed (point k uses seed + k)");
  s_sw->add_option("--out", sw.out_path, "write the summary to this file");
  s_sw->add_option("--format", sw.format, "table | json");

  ahsps::ReportArgs re;
  auto* s_re =
      app.add_subcommand("report", "re-render a saved analysis JSON");
  s_re->add_option("json", re.json_path, "analysis JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ahsps::kExitOk : ahsps::kExitUsage;
  }

  if (*s_sim) return ahsps::run_simulate(sim, std::cout, std::cerr);
  if (*s_an) {
    if (counts_opt->count() > 0) an.counts = counts_text;
    return ahsps::run_analyze(an, std::cout, std::cerr);
  }
  if (*s_hi) return ahsps::run_histogram(hi, std::cout, std::cerr);
  if (*s_sw) return ahsps::run_sweep(sw, std::cout, std::cerr);
  if (*s_re) return ahsps::run_report(re, std::cout, std::cerr);
  return ahsps::kExitUsage;
}
