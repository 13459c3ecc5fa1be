#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ahsps {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitDegenerate = 3;

struct SimulateArgs {
  std::string config_path;
  std::string out_path;
  std::uint64_t n = 0;
  std::uint64_t seed = 1;
  bool timestamps = false;
  bool no_gate_out = false;
  unsigned threads = 1;
  std::string command_line;  // for the manifest
};

struct AnalyzeArgs {
  std::string config_path;
  std::string raw_path;              // empty in counts-only mode
  std::optional<std::string> counts; // "n_t,n_a[,n_b],n_ab"
  std::string out_path;              // optional JSON output
  std::string format = "table";      // table | json
  std::string command_line;
};

struct HistogramArgs {
  std::string raw_path;
  int n_max = 100;
  std::string out_path;          // optional TSV output
  std::string format = "table";  // table | tsv
  std::string command_line;
};

struct SweepArgs {
  std::string config_path;
  std::vector<double> pump_list;
  std::vector<double> attenuation_list;
  std::uint64_t n_per_point = 0;
  std::uint64_t seed = 1;
  std::string out_path;          // optional JSON output
  std::string format = "table";  // table | json
  std::string command_line;
};

struct ReportArgs {
  std::string json_path;  // analysis JSON produced by `analyze`
};

int run_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err);
int run_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err);
int run_histogram(const HistogramArgs& a, std::ostream& out, std::ostream& err);
int run_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err);
int run_report(const ReportArgs& a, std::ostream& out, std::ostream& err);

}  // namespace ahsps
