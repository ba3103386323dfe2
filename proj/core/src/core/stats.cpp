#include "sxai/core/stats.hpp"

#include <cmath>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"

namespace sxai {

void StreamStats::update(double y) {
  if (!std::isfinite(y)) fail(Errc::InvalidValue, "non-finite value in StreamStats::update");
  ++count_;
  const double delta = y - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (y - mean_);
}

double StreamStats::variance() const noexcept {
  if (count_ < 2) return 0.0;
  return m2_ / static_cast<double>(count_);
}

double StreamStats::stddev() const noexcept { return std::sqrt(variance()); }

void StreamStats::save(BinaryWriter& out) const {
  out.put_u64(count_);
  out.put_f64(mean_);
  out.put_f64(m2_);
}

StreamStats StreamStats::load(BinaryReader& in) {
  StreamStats s;
  s.count_ = in.get_u64();
  s.mean_ = in.get_f64();
  s.m2_ = in.get_f64();
  return s;
}

}  // namespace sxai
