#include "sxai/rules/ddm.hpp"

#include <cmath>

#include "sxai/core/binary_io.hpp"

namespace sxai {

DriftStatus Ddm::update(bool error) {
  ++t_;
  p_ += ((error ? 1.0 : 0.0) - p_) / static_cast<double>(t_);
  s_ = std::sqrt(p_ * (1.0 - p_) / static_cast<double>(t_));

  status_ = DriftStatus::Normal;
  if (t_ < config_.warmup) return status_;

  if (p_ + s_ < p_min_ + s_min_) {
    p_min_ = p_;
    s_min_ = s_;
  }
  if (p_ + s_ > p_min_ + config_.drift_level * s_min_) {
    reset();
    status_ = DriftStatus::Drift;
  } else if (p_ + s_ > p_min_ + config_.warning_level * s_min_) {
    status_ = DriftStatus::Warning;
  }
  return status_;
}

void Ddm::reset() { *this = Ddm(config_); }

void Ddm::save(BinaryWriter& out) const {
  out.put_u64(config_.warmup);
  out.put_f64(config_.warning_level);
  out.put_f64(config_.drift_level);
  out.put_u64(t_);
  out.put_f64(p_);
  out.put_f64(s_);
  out.put_f64(p_min_);
  out.put_f64(s_min_);
  out.put_u8(static_cast<std::uint8_t>(status_));
}

Ddm Ddm::load(BinaryReader& in) {
  DdmConfig c;
  c.warmup = in.get_u64();
  c.warning_level = in.get_f64();
  c.drift_level = in.get_f64();
  Ddm d(c);
  d.t_ = in.get_u64();
  d.p_ = in.get_f64();
  d.s_ = in.get_f64();
  d.p_min_ = in.get_f64();
  d.s_min_ = in.get_f64();
  d.status_ = static_cast<DriftStatus>(in.get_u8());
  return d;
}

}  // namespace sxai
