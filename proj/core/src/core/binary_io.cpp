#include "sxai/core/binary_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "sxai/core/error.hpp"

namespace sxai {

void BinaryWriter::put_u8(std::uint8_t v) { buf_.push_back(v); }

void BinaryWriter::put_u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::put_u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void BinaryWriter::put_i64(std::int64_t v) { put_u64(static_cast<std::uint64_t>(v)); }

void BinaryWriter::put_f64(double v) { put_u64(std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::put_string(std::string_view s) {
  put_u64(s.size());
  buf_.insert(buf_.end(), s.begin(), s.end());
}

void BinaryWriter::put_bytes(std::span<const std::uint8_t> bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

void BinaryWriter::put_f64s(std::span<const double> values) {
  put_u64(values.size());
  for (double v : values) put_f64(v);
}

void BinaryReader::need(std::size_t n) const {
  if (bytes_.size() - pos_ < n) fail(Errc::CorruptInput, "truncated binary payload");
}

std::uint8_t BinaryReader::get_u8() {
  need(1);
  return bytes_[pos_++];
}

std::uint32_t BinaryReader::get_u32() {
  need(4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

std::uint64_t BinaryReader::get_u64() {
  need(8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
  return v;
}

std::int64_t BinaryReader::get_i64() { return static_cast<std::int64_t>(get_u64()); }

double BinaryReader::get_f64() { return std::bit_cast<double>(get_u64()); }

bool BinaryReader::get_bool() {
  const auto v = get_u8();
  if (v > 1) fail(Errc::CorruptInput, "invalid boolean byte");
  return v == 1;
}

std::string BinaryReader::get_string() {
  const auto n = get_count();
  need(n);
  std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
  pos_ += n;
  return s;
}

std::vector<double> BinaryReader::get_f64s() {
  const auto n = get_count();
  need(n * 8);
  std::vector<double> v(n);
  for (auto& x : v) x = get_f64();
  return v;
}

std::uint64_t BinaryReader::get_count(std::uint64_t max) {
  const auto n = get_u64();
  if (n > max) fail(Errc::CorruptInput, "implausible element count");
  return n;
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

void write_framed_file(const std::string& path, std::string_view magic, std::uint32_t version,
                       const BinaryWriter& payload) {
  BinaryWriter frame;
  frame.put_bytes({reinterpret_cast<const std::uint8_t*>(magic.data()), magic.size()});
  frame.put_u32(version);
  frame.put_u64(payload.bytes().size());
  frame.put_bytes(payload.bytes());
  frame.put_u64(fnv1a64(frame.bytes()));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(Errc::IoError, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(frame.bytes().data()),
            static_cast<std::streamsize>(frame.bytes().size()));
  if (!out) fail(Errc::IoError, "write failed for " + path);
}

std::vector<std::uint8_t> read_framed_file(const std::string& path, std::string_view magic,
                                           std::uint32_t version) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  const std::size_t header = magic.size() + 4 + 8;
  if (raw.size() < header + 8) fail(Errc::CorruptInput, path + " is too short");
  if (std::memcmp(raw.data(), magic.data(), magic.size()) != 0) {
    fail(Errc::ChecksumError, path + " has a bad magic header");
  }
  const std::span<const std::uint8_t> body(raw.data(), raw.size() - 8);
  BinaryReader trailer(std::span<const std::uint8_t>(raw.data() + raw.size() - 8, 8));
  if (trailer.get_u64() != fnv1a64(body)) fail(Errc::ChecksumError, path + " failed checksum");

  BinaryReader head(std::span<const std::uint8_t>(raw.data() + magic.size(), 12));
  const auto file_version = head.get_u32();
  if (file_version != version) {
    fail(Errc::VersionError, path + " has format version " + std::to_string(file_version) +
                                 ", expected " + std::to_string(version));
  }
  const auto len = head.get_u64();
  if (len != raw.size() - header - 8) fail(Errc::CorruptInput, path + " length mismatch");
  return {raw.begin() + static_cast<std::ptrdiff_t>(header),
          raw.end() - 8};
}

}  // namespace sxai
