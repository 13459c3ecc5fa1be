#include "ahsps/manifest.hpp"

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace ahsps {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

namespace {

std::string render_hash(std::uint64_t h) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot read file '" + path + "'");
  }
  std::ostringstream body;
  body << in.rdbuf();
  if (in.bad()) {
    throw std::runtime_error("cannot read file '" + path + "'");
  }
  return render_hash(fnv1a64(body.str()));
}

std::string hash_text(std::string_view text) {
  return render_hash(fnv1a64(text));
}

std::string RunManifest::to_json() const {
  nlohmann::json j;
  j["command_line"] = command_line;
  j["tool_version"] = tool_version;
  j["created_utc"] = created_utc;
  j["seed"] = seed;
  j["config_path"] = config_path;
  j["config_hash"] = config_hash;
  j["config_snapshot"] = config_snapshot;
  j["inputs"] = nlohmann::json::array();
  for (const auto& [path, hash] : inputs) {
    j["inputs"].push_back({{"path", path}, {"hash", hash}});
  }
  j["outputs"] = nlohmann::json::array();
  for (const auto& [path, hash] : outputs) {
    j["outputs"].push_back({{"path", path}, {"hash", hash}});
  }
  return j.dump(2) + "\n";
}

std::string write_manifest(const RunManifest& m, const std::string& out_path) {
  const std::string path = out_path + ".manifest.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write manifest '" + path + "'");
  }
  out << m.to_json();
  if (!out) {
    throw std::runtime_error("cannot write manifest '" + path + "'");
  }
  return path;
}

}  // namespace ahsps
