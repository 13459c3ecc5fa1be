#include "ahsps/raw_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace ahsps {

namespace {

constexpr char kMagic[4] = {'A', 'H', 'S', 'P'};
constexpr std::uint16_t kFlagTimestamps = 0x0001;

void put_u16(std::uint8_t* p, std::uint16_t v) {
  p[0] = static_cast<std::uint8_t>(v & 0xff);
  p[1] = static_cast<std::uint8_t>(v >> 8);
}

void put_u64(std::uint8_t* p, std::uint64_t v) {
  for (int k = 0; k < 8; ++k) {
    p[k] = static_cast<std::uint8_t>(v >> (8 * k));
  }
}

std::uint16_t get_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int k = 0; k < 8; ++k) {
    v |= static_cast<std::uint64_t>(p[k]) << (8 * k);
  }
  return v;
}

std::size_t payload_bytes(std::uint64_t count) {
  return static_cast<std::size_t>((count + 3) / 4);
}

}  // namespace

void write_raw(const RecordSet& records, const std::string& path) {
  if (!records.timestamps_ns.empty() &&
      records.timestamps_ns.size() != records.records.size()) {
    throw RawFileError(RawFileError::Kind::io,
                       "timestamp count does not match record count");
  }

  const std::uint64_t count = records.records.size();
  const bool ts = records.has_timestamps();
  std::vector<std::uint8_t> buf(kRawHeaderSize + payload_bytes(count) +
                                (ts ? 8 * count : 0));

  std::memcpy(buf.data(), kMagic, 4);
  put_u16(buf.data() + 4, kRawVersion);
  put_u16(buf.data() + 6, ts ? kFlagTimestamps : 0);
  put_u64(buf.data() + 8, count);

  for (std::uint64_t k = 0; k < count; ++k) {
    const int shift = 2 * static_cast<int>(k % 4);
    std::uint8_t& byte = buf[kRawHeaderSize + k / 4];
    byte = static_cast<std::uint8_t>(
        byte | (records.records[k].det_a << shift) |
        (records.records[k].det_b << (shift + 1)));
  }
  if (ts) {
    std::uint8_t* p = buf.data() + kRawHeaderSize + payload_bytes(count);
    for (std::uint64_t k = 0; k < count; ++k) {
      put_u64(p + 8 * k, records.timestamps_ns[k]);
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw RawFileError(RawFileError::Kind::io,
                       "cannot open '" + path + "' for writing");
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw RawFileError(RawFileError::Kind::io, "write to '" + path + "' failed");
  }
}

RecordSet read_raw(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw RawFileError(RawFileError::Kind::io,
                       "cannot open '" + path + "' for reading");
  }
  std::vector<std::uint8_t> buf{std::istreambuf_iterator<char>(in),
                                std::istreambuf_iterator<char>()};

  if (buf.size() < kRawHeaderSize) {
    throw RawFileError(RawFileError::Kind::truncated,
                       "'" + path + "': header needs " +
                           std::to_string(kRawHeaderSize) + " bytes, file has " +
                           std::to_string(buf.size()));
  }
  if (std::memcmp(buf.data(), kMagic, 4) != 0) {
    throw RawFileError(RawFileError::Kind::bad_magic,
                       "'" + path + "': magic bytes are not AHSP");
  }
  const std::uint16_t version = get_u16(buf.data() + 4);
  if (version != kRawVersion) {
    throw RawFileError(RawFileError::Kind::bad_version,
                       "'" + path + "': unsupported format version " +
                           std::to_string(version));
  }
  const std::uint16_t flags = get_u16(buf.data() + 6);
  if ((flags & ~kFlagTimestamps) != 0) {
    throw RawFileError(RawFileError::Kind::bad_flags,
                       "'" + path + "': unknown flag bits set");
  }
  const std::uint64_t count = get_u64(buf.data() + 8);
  const bool ts = (flags & kFlagTimestamps) != 0;
  const std::size_t expected = kRawHeaderSize + payload_bytes(count) +
                               (ts ? 8 * static_cast<std::size_t>(count) : 0);
  if (buf.size() < expected) {
    throw RawFileError(RawFileError::Kind::truncated,
                       "'" + path + "': expected " + std::to_string(expected) +
                           " bytes, file has " + std::to_string(buf.size()));
  }

  RecordSet rs;
  rs.records.resize(count);
  for (std::uint64_t k = 0; k < count; ++k) {
    const int shift = 2 * static_cast<int>(k % 4);
    const std::uint8_t byte = buf[kRawHeaderSize + k / 4];
    rs.records[k].det_a = (byte >> shift) & 1;
    rs.records[k].det_b = (byte >> (shift + 1)) & 1;
  }
  if (ts) {
    rs.timestamps_ns.resize(count);
    const std::uint8_t* p = buf.data() + kRawHeaderSize + payload_bytes(count);
    for (std::uint64_t k = 0; k < count; ++k) {
      rs.timestamps_ns[k] = get_u64(p + 8 * k);
    }
  }
  return rs;
}

}  // namespace ahsps
