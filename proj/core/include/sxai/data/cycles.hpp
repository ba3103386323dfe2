#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sxai/data/record.hpp"

namespace sxai {

class BinaryWriter;
class BinaryReader;

/// One compressor cycle: charging (COMP = 0) followed by idle (COMP = 1).
struct Cycle {
  std::uint64_t index = 0;
  std::vector<RawRecord> records;
  /// Records beyond the length cap were dropped.
  bool truncated = false;

  std::size_t t_run() const;
  std::size_t t_idle() const { return records.size() - t_run(); }
  std::int64_t start_ts() const { return records.empty() ? 0 : records.front().ts; }
  std::int64_t end_ts() const { return records.empty() ? 0 : records.back().ts; }
};

/// Splits a record stream at COMP 1 -> 0 transitions. Records before the
/// first transition and the trailing open cycle are not emitted.
class CycleSegmenter {
 public:
  explicit CycleSegmenter(std::size_t max_length = 4096);

  std::optional<Cycle> push(const RawRecord& record);
  /// Discards the open cycle; returns the number of records dropped.
  std::size_t finish();

  std::uint64_t cycles_emitted() const noexcept { return next_index_; }
  std::size_t partial_dropped() const noexcept { return partial_dropped_; }
  std::size_t truncated_cycles() const noexcept { return truncated_; }
  std::size_t max_length() const noexcept { return max_length_; }

  void save(BinaryWriter& out) const;
  static CycleSegmenter load(BinaryReader& in);

  friend bool operator==(const CycleSegmenter&, const CycleSegmenter&) = default;

 private:
  std::size_t max_length_;
  std::optional<bool> previous_comp_;
  bool started_ = false;
  bool overflow_ = false;
  std::vector<RawRecord> buffer_;
  std::uint64_t next_index_ = 0;
  std::size_t partial_dropped_ = 0;
  std::size_t truncated_ = 0;
};

std::vector<Cycle> segment_cycles(std::span<const RawRecord> records, std::size_t max_length = 4096);

void save_record(BinaryWriter& out, const RawRecord& r);
RawRecord load_record(BinaryReader& in);

}  // namespace sxai
