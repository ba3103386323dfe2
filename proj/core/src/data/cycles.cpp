#include "sxai/data/cycles.hpp"

#include <algorithm>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"

namespace sxai {

std::size_t Cycle::t_run() const {
  return static_cast<std::size_t>(
      std::count_if(records.begin(), records.end(), [](const RawRecord& r) { return !r[Digital::COMP]; }));
}

CycleSegmenter::CycleSegmenter(std::size_t max_length) : max_length_(max_length) {
  if (max_length == 0) fail(Errc::ConfigError, "cycle length cap must be positive");
}

std::optional<Cycle> CycleSegmenter::push(const RawRecord& record) {
  const bool on = record[Digital::COMP];
  const bool boundary = previous_comp_.has_value() && *previous_comp_ && !on;
  previous_comp_ = on;
  std::optional<Cycle> out;
  if (boundary) {
    if (started_) {
      out.emplace();
      out->index = next_index_++;
      out->records = std::move(buffer_);
      out->truncated = overflow_;
      if (overflow_) ++truncated_;
    }
    buffer_.clear();
    overflow_ = false;
    started_ = true;
  }
  if (started_) {
    if (buffer_.size() < max_length_)
      buffer_.push_back(record);
    else
      overflow_ = true;
  }
  return out;
}

std::size_t CycleSegmenter::finish() {
  const std::size_t n = buffer_.size();
  partial_dropped_ += n;
  buffer_.clear();
  started_ = false;
  overflow_ = false;
  previous_comp_.reset();
  return n;
}

void save_record(BinaryWriter& out, const RawRecord& r) {
  out.put_i64(r.ts);
  for (double v : r.analog) out.put_f64(v);
  for (auto d : r.digital) out.put_u8(d);
}

RawRecord load_record(BinaryReader& in) {
  RawRecord r;
  r.ts = in.get_i64();
  for (double& v : r.analog) v = in.get_f64();
  for (auto& d : r.digital) {
    d = in.get_u8();
    if (d > 1) fail(Errc::CorruptInput, "digital value out of range");
  }
  return r;
}

void CycleSegmenter::save(BinaryWriter& out) const {
  out.put_u64(max_length_);
  out.put_u8(previous_comp_ ? (*previous_comp_ ? 2 : 1) : 0);
  out.put_bool(started_);
  out.put_bool(overflow_);
  out.put_u64(buffer_.size());
  for (const auto& r : buffer_) save_record(out, r);
  out.put_u64(next_index_);
  out.put_u64(partial_dropped_);
  out.put_u64(truncated_);
}

CycleSegmenter CycleSegmenter::load(BinaryReader& in) {
  CycleSegmenter s(in.get_u64());
  const auto prev = in.get_u8();
  if (prev > 2) fail(Errc::CorruptInput, "bad segmenter state");
  if (prev != 0) s.previous_comp_ = prev == 2;
  s.started_ = in.get_bool();
  s.overflow_ = in.get_bool();
  const auto n = in.get_count();
  s.buffer_.reserve(n);
  for (std::size_t i = 0; i < n; ++i) s.buffer_.push_back(load_record(in));
  s.next_index_ = in.get_u64();
  s.partial_dropped_ = in.get_u64();
  s.truncated_ = in.get_u64();
  return s;
}

std::vector<Cycle> segment_cycles(std::span<const RawRecord> records, std::size_t max_length) {
  CycleSegmenter seg(max_length);
  std::vector<Cycle> out;
  for (const auto& r : records)
    if (auto c = seg.push(r)) out.push_back(std::move(*c));
  seg.finish();
  return out;
}

}  // namespace sxai
