#pragma once

#include <stdexcept>
#include <string>

#include "ahsps/simulator.hpp"

namespace ahsps {

// Raw record file, format version 1 (all integers little-endian):
//   offset 0: magic "AHSP" (4 bytes)
//   offset 4: u16 format version = 1
//   offset 6: u16 flags, bit 0 = timestamps present
//   offset 8: u64 record count
//   offset 16: payload, 2 bits per record packed 4 records per byte;
//              record k sits in byte floor(k/4), det_a at bit 2*(k mod 4),
//              det_b at bit 2*(k mod 4)+1; final byte zero-padded
//   then, if flag bit 0: count u64 nanosecond timestamps.

inline constexpr std::size_t kRawHeaderSize = 16;
inline constexpr std::uint16_t kRawVersion = 1;

class RawFileError : public std::runtime_error {
 public:
  enum class Kind {
    io,           // cannot open / read / write
    bad_magic,    // leading bytes are not "AHSP"
    bad_version,  // format version unsupported
    bad_flags,    // unknown flag bits set
    truncated,    // file shorter than the header + payload demand
  };

  RawFileError(Kind kind, std::string msg)
      : std::runtime_error(std::move(msg)), kind_(kind) {}

  [[nodiscard]] Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Writes a record set; lossless, bit-exact per the format above.
void write_raw(const RecordSet& records, const std::string& path);

/// Reads a record file written by write_raw. Round-trips exactly.
RecordSet read_raw(const std::string& path);

}  // namespace ahsps
