#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sxai {

/// Little-endian binary encoder for checkpoints. Accumulates into memory so
/// the caller can append a checksum over the whole payload.
class BinaryWriter {
 public:
  void put_u8(std::uint8_t v);
  void put_u32(std::uint32_t v);
  void put_u64(std::uint64_t v);
  void put_i64(std::int64_t v);
  void put_f64(double v);
  void put_bool(bool v) { put_u8(v ? 1 : 0); }
  void put_string(std::string_view s);
  void put_bytes(std::span<const std::uint8_t> bytes);
  void put_f64s(std::span<const double> values);

  const std::vector<std::uint8_t>& bytes() const noexcept { return buf_; }

 private:
  std::vector<std::uint8_t> buf_;
};

/// Counterpart of BinaryWriter; every read is bounds-checked and throws
/// Errc::CorruptInput on truncation.
class BinaryReader {
 public:
  explicit BinaryReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t get_u8();
  std::uint32_t get_u32();
  std::uint64_t get_u64();
  std::int64_t get_i64();
  double get_f64();
  bool get_bool();
  std::string get_string();
  std::vector<double> get_f64s();
  /// Reads a length prefix and checks it against a sanity bound.
  std::uint64_t get_count(std::uint64_t max = (1ull << 32));

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }
  bool at_end() const noexcept { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const;

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept;

/// Writes `magic` (4 bytes), `version`, the payload, and an FNV-1a trailer.
void write_framed_file(const std::string& path, std::string_view magic, std::uint32_t version,
                       const BinaryWriter& payload);

/// Reads a file written by write_framed_file, validating magic, version and
/// checksum. Returns the payload bytes.
std::vector<std::uint8_t> read_framed_file(const std::string& path, std::string_view magic,
                                           std::uint32_t version);

}  // namespace sxai
