#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ahsps/config.hpp"

namespace ahsps {

/// FNV-1a 64-bit over a byte string; adequate for manifest bookkeeping.
[[nodiscard]] std::uint64_t fnv1a64(std::string_view bytes);

/// Hash of a file's content, rendered as "fnv1a64:<16 hex digits>".
/// Throws std::runtime_error if the file cannot be read.
[[nodiscard]] std::string hash_file(const std::string& path);

[[nodiscard]] std::string hash_text(std::string_view text);

/// Record of one command execution: enough to re-run it and verify its
/// outputs byte for byte.
struct RunManifest {
  std::string command_line;
  std::string tool_version;
  std::string created_utc;      // ISO-8601
  std::uint64_t seed = 0;
  std::string config_path;
  std::string config_hash;
  std::string config_snapshot;  // canonical key=value text
  std::vector<std::pair<std::string, std::string>> inputs;   // path, hash
  std::vector<std::pair<std::string, std::string>> outputs;  // path, hash

  [[nodiscard]] std::string to_json() const;
};

/// Writes the manifest JSON next to the primary output as
/// "<out_path>.manifest.json" and returns that path.
std::string write_manifest(const RunManifest& m, const std::string& out_path);

}  // namespace ahsps
