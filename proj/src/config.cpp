#include "ahsps/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace ahsps {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) {
    s.remove_prefix(1);
  }
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_number(std::string_view value, int line_no) {
  const std::string v(value);
  std::size_t consumed = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &consumed);
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) +
                          ": not a number: '" + v + "'",
                      line_no);
  }
  if (consumed != v.size()) {
    throw ConfigError("line " + std::to_string(line_no) +
                          ": trailing characters after number: '" + v + "'",
                      line_no);
  }
  return out;
}

struct KeySlot {
  double* target;
  bool required;
  bool seen = false;
};

std::string fmt_value(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

BenchConfig parse_config_text(std::string_view text) {
  BenchConfig cfg;
  std::map<std::string, KeySlot, std::less<>> slots = {
      {"pump_power", {&cfg.source.pump_power, true}},
      {"pair_efficiency", {&cfg.source.pair_efficiency, true}},
      {"herald_coupling", {&cfg.source.herald_coupling, true}},
      {"herald_detector_eff", {&cfg.source.herald_detector_eff, true}},
      {"herald_dark_rate", {&cfg.source.herald_dark_rate, false}},
      {"coupling_p1", {&cfg.source.coupling_p1, true}},
      {"gate_width", {&cfg.source.gate_width, false}},
      {"dead_time", {&cfg.source.dead_time, false}},
      {"attenuation", {&cfg.source.attenuation, false}},
      {"gate_acceptance", {&cfg.source.gate_acceptance, false}},
      {"det_a.efficiency", {&cfg.det_a.efficiency, true}},
      {"det_a.dark_count_prob", {&cfg.det_a.dark_count_prob, true}},
      {"det_b.efficiency", {&cfg.det_b.efficiency, true}},
      {"det_b.dark_count_prob", {&cfg.det_b.dark_count_prob, true}},
  };

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(
        pos, eol == std::string_view::npos ? std::string_view::npos
                                           : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                            ": expected key = value",
                        line_no);
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));

    const auto it = slots.find(key);
    if (it == slots.end()) {
      throw ConfigError("line " + std::to_string(line_no) +
                            ": unknown key '" + key + "'",
                        line_no);
    }
    if (it->second.seen) {
      throw ConfigError("line " + std::to_string(line_no) +
                            ": duplicate key '" + key + "'",
                        line_no);
    }
    it->second.seen = true;
    *it->second.target = parse_number(value, line_no);
  }

  for (const auto& [key, slot] : slots) {
    if (slot.required && !slot.seen) {
      throw ConfigError("missing required key '" + key + "'");
    }
  }

  try {
    validate(cfg.source);
    validate(cfg.det_a, "det_a");
    validate(cfg.det_b, "det_b");
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

BenchConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file '" + path + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_to_text(const BenchConfig& cfg) {
  std::string out;
  const auto emit = [&out](const char* key, double v) {
    out += key;
    out += " = ";
    out += fmt_value(v);
    out += '\n';
  };
  emit("pump_power", cfg.source.pump_power);
  emit("pair_efficiency", cfg.source.pair_efficiency);
  emit("herald_coupling", cfg.source.herald_coupling);
  emit("herald_detector_eff", cfg.source.herald_detector_eff);
  emit("herald_dark_rate", cfg.source.herald_dark_rate);
  emit("coupling_p1", cfg.source.coupling_p1);
  emit("gate_width", cfg.source.gate_width);
  emit("dead_time", cfg.source.dead_time);
  emit("attenuation", cfg.source.attenuation);
  emit("gate_acceptance", cfg.source.gate_acceptance);
  emit("det_a.efficiency", cfg.det_a.efficiency);
  emit("det_a.dark_count_prob", cfg.det_a.dark_count_prob);
  emit("det_b.efficiency", cfg.det_b.efficiency);
  emit("det_b.dark_count_prob", cfg.det_b.dark_count_prob);
  return out;
}

}  // namespace ahsps
