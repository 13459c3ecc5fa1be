#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "ahsps/manifest.hpp"
#include "ahsps/raw_io.hpp"
#include "ahsps/version.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(AHSPS_CLI_PATH) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, pipe))
    r.out.append(buf, n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

// Scratch directory shared by the suite; removed at the end of each case
// that creates it.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::path("cli_scratch") / std::to_string(std::rand());
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir.parent_path(), ec);
  }
  std::string file(const std::string& name) const {
    return (dir / name).string();
  }
};

// Hot bench: strong detectors keep coincidence counts high at small n.
const char* kHotConfig =
    "pump_power = 1.0\n"
    "pair_efficiency = 2e6\n"
    "herald_coupling = 0.29\n"
    "herald_detector_eff = 0.32\n"
    "coupling_p1 = 0.6\n"
    "det_a.efficiency = 0.5\n"
    "det_a.dark_count_prob = 1e-5\n"
    "det_b.efficiency = 0.5\n"
    "det_b.dark_count_prob = 1e-5\n";

// Reference-experiment detector parameters for counts-only analyses.
const char* kBenchConfig =
    "pump_power = 0.025\n"
    "pair_efficiency = 1.858e8\n"
    "herald_coupling = 0.29\n"
    "herald_detector_eff = 0.32\n"
    "coupling_p1 = 0.61\n"
    "det_a.efficiency = 0.084\n"
    "det_a.dark_count_prob = 35.1e-6\n"
    "det_b.efficiency = 0.096\n"
    "det_b.dark_count_prob = 7.4e-6\n";

std::string write_config(const Scratch& s, const char* text,
                         const std::string& name = "bench.cfg") {
  auto path = s.file(name);
  std::ofstream out(path);
  out << text;
  return path;
}

std::vector<char> slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<char>(std::istreambuf_iterator<char>(in),
                           std::istreambuf_iterator<char>());
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("bad invocations exit with the usage code") {
  CHECK(run_cli("").code == 1);
  CHECK(run_cli("frobnicate").code == 1);
  CHECK(run_cli("simulate").code == 1);  // missing required flags
  CHECK(run_cli("analyze --counts 1,2").code == 1);
}

TEST_CASE("simulate writes a deterministic raw file plus manifest") {
  Scratch s;
  auto cfg = write_config(s, kHotConfig);
  auto raw1 = s.file("run1.raw");
  auto raw2 = s.file("run2.raw");

  auto r1 = run_cli("simulate --config " + cfg + " --n 1000 --seed 5 --out " +
                    raw1);
  CHECK(r1.code == 0);
  CHECK(r1.out.find("N_t") != std::string::npos);
  CHECK(fs::file_size(raw1) == 266);  // 16-byte header + 250 payload bytes

  auto r2 = run_cli("simulate --config " + cfg + " --n 1000 --seed 5 --out " +
                    raw2);
  CHECK(r2.code == 0);
  CHECK(slurp(raw1) == slurp(raw2));

  // Manifest: content hash of the output verifies.
  auto mpath = raw1 + ".manifest.json";
  REQUIRE(fs::exists(mpath));
  auto m = json::parse(std::ifstream(mpath));
  CHECK(m["tool_version"] == ahsps::kVersion);
  CHECK(m["seed"] == 5);
  REQUIRE(m["outputs"].size() >= 1);
  CHECK(m["outputs"][0]["hash"] == ahsps::hash_file(raw1));
}

TEST_CASE("config errors surface with the data exit code") {
  Scratch s;
  std::string broken(kHotConfig);
  broken.erase(broken.find("coupling_p1 = 0.6\n"), 18);
  auto cfg = write_config(s, broken.c_str(), "broken.cfg");
  auto r = run_cli("simulate --config " + cfg + " --n 10 --out " +
                   s.file("x.raw"));
  CHECK(r.code == 2);
  CHECK(r.out.find("coupling_p1") != std::string::npos);
}

TEST_CASE("counts-only analysis reproduces the 49 mW reference row") {
  Scratch s;
  auto cfg = write_config(s, kBenchConfig);
  auto r = run_cli("analyze --config " + cfg +
                   " --counts 6.0e7,1.6e6,1062 --format json");
  CHECK(r.code == 0);
  auto j = json::parse(r.out);
  double g2_net = j["g2"]["net"]["value"];
  CHECK(std::abs(g2_net - 22.6e-3) / 22.6e-3 < 0.20);
  CHECK(j["counts"]["n_b_present"] == false);
  double p2 = j["statistics"]["p2"]["value"];
  CHECK(std::abs(p2 - 41e-4) / 41e-4 < 0.15);

  // Four-value form carries an explicit n_b.
  auto r4 = run_cli("analyze --config " + cfg +
                    " --counts 2.8e7,7.7e5,8.1e5,255 --format json");
  CHECK(r4.code == 0);
  auto j4 = json::parse(r4.out);
  CHECK(j4["counts"]["n_b_present"] == true);
}

TEST_CASE("table and json carry identical numbers") {
  Scratch s;
  auto cfg = write_config(s, kBenchConfig);
  std::string counts = " --counts 2.8e7,7.7e5,255";
  auto table = run_cli("analyze --config " + cfg + counts);
  auto as_json = run_cli("analyze --config " + cfg + counts + " --format json");
  REQUIRE(table.code == 0);
  REQUIRE(as_json.code == 0);
  auto j = json::parse(as_json.out);
  double g2_raw = j["g2"]["raw"]["value"];
  char expect[64];
  std::snprintf(expect, sizeof expect, "%.4e", g2_raw);
  CHECK(table.out.find(expect) != std::string::npos);
}

TEST_CASE("analysis data errors use the data exit code") {
  Scratch s;
  auto cfg = write_config(s, kBenchConfig);
  CHECK(run_cli("analyze --config " + cfg + " no_such.raw").code == 2);

  auto garbage = s.file("garbage.raw");
  {
    std::ofstream out(garbage);
    out << "this is not a raw file";
  }
  auto r = run_cli("analyze --config " + cfg + " " + garbage);
  CHECK(r.code == 2);
  CHECK(r.out.find("magic") != std::string::npos);

  auto empty = s.file("empty.raw");
  ahsps::write_raw(ahsps::RecordSet{}, empty);
  CHECK(run_cli("analyze --config " + cfg + " " + empty).code == 2);
}

TEST_CASE("degenerate solves exit with the diagnostic code") {
  Scratch s;
  auto cfg = write_config(s, kBenchConfig);
  auto r = run_cli("analyze --config " + cfg + " --counts 100,99,99");
  CHECK(r.code == 3);
  CHECK(r.out.find("clamp") != std::string::npos);
}

TEST_CASE("histogram command emits the TSV contract") {
  Scratch s;
  auto cfg = write_config(s, kHotConfig);
  auto raw = s.file("hist.raw");
  REQUIRE(run_cli("simulate --config " + cfg + " --n 200000 --seed 9 --out " +
                  raw)
              .code == 0);

  auto tsv = run_cli("histogram " + raw + " --n-max 1 --format tsv");
  CHECK(tsv.code == 0);
  int data_rows = 0;
  std::size_t pos = 0;
  while ((pos = tsv.out.find('\n', pos)) != std::string::npos) {
    ++pos;
    if (pos < tsv.out.size() && tsv.out[pos] != '#' && tsv.out[pos] != '\0')
      ++data_rows;
  }
  // header comments plus exactly 3 bins (-1, 0, +1); the final newline
  // terminates the last row rather than starting a new one.
  CHECK(data_rows == 3);
  CHECK(tsv.out.find("-1\t") != std::string::npos);
  CHECK(tsv.out.find("0\t") != std::string::npos);

  auto full = run_cli("histogram " + raw + " --format table");
  CHECK(full.code == 0);
  CHECK(full.out.find("C") != std::string::npos);
  CHECK(full.out.find("chi2/dof") != std::string::npos);

  // A clickless file cannot support the fit.
  std::string quiet(kHotConfig);
  quiet.replace(quiet.find("coupling_p1 = 0.6"), 17, "coupling_p1 = 0.0");
  quiet.replace(quiet.find("pair_efficiency = 2e6"), 21,
                "pair_efficiency = 2e4");
  auto qcfg = write_config(s, quiet.c_str(), "quiet.cfg");
  auto qraw = s.file("quiet.raw");
  REQUIRE(run_cli("simulate --config " + qcfg + " --n 5000 --seed 2 --out " +
                  qraw)
              .code == 0);
  CHECK(run_cli("histogram " + qraw).code == 2);
}

TEST_CASE("sweep command reports linearity and flags degeneracy") {
  Scratch s;
  auto cfg = write_config(s, kHotConfig);
  auto r = run_cli("sweep --config " + cfg +
                   " --pump 2.0,1.5,1.0 --n 100000 --seed 3");
  CHECK(r.code == 0);
  CHECK(r.out.find("slope") != std::string::npos);

  CHECK(run_cli("sweep --config " + cfg + " --pump 1.0,2.0 --n 1000").code ==
        1);

  auto d = run_cli("sweep --config " + cfg +
                   " --pump 2,2,2,2,2,2 --n 50000 --seed 3");
  CHECK(d.code == 3);

  auto a = run_cli("sweep --config " + cfg +
                   " --attenuation 1.0,0.5,0.25 --n 100000 --seed 4");
  CHECK(a.code == 0);
}

TEST_CASE("report command re-renders a saved analysis") {
  Scratch s;
  auto cfg = write_config(s, kBenchConfig);
  auto saved = s.file("analysis.json");
  auto r = run_cli("analyze --config " + cfg +
                   " --counts 2.8e7,7.7e5,255 --format json --out " + saved);
  REQUIRE(r.code == 0);
  REQUIRE(fs::exists(saved));

  auto rep = run_cli("report " + saved);
  CHECK(rep.code == 0);
  auto j = json::parse(std::ifstream(saved));
  double g2_raw = j["g2"]["raw"]["value"];
  char expect[64];
  std::snprintf(expect, sizeof expect, "%.4e", g2_raw);
  CHECK(rep.out.find(expect) != std::string::npos);

  CHECK(run_cli("report no_such.json").code == 2);
}

}  // TEST_SUITE
