#include "sxai/detector/detector.hpp"

#include <cmath>
#include <vector>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/boxplot.hpp"
#include "sxai/core/error.hpp"

namespace sxai {

double threshold_init(std::span<const double> train_re, double iqr_factor) {
  if (train_re.size() < 4) fail(Errc::InsufficientData, "threshold needs at least 4 training errors");
  return upper_fence(train_re, iqr_factor);
}

AlarmThreshold::AlarmThreshold(std::span<const double> train_re, std::size_t capacity,
                               double iqr_factor)
    : capacity_(capacity), iqr_factor_(iqr_factor) {
  if (capacity == 0) fail(Errc::ConfigError, "threshold history capacity must be positive");
  thr_ = threshold_init(train_re, iqr_factor);
  const std::size_t skip = train_re.size() > capacity ? train_re.size() - capacity : 0;
  history_.assign(train_re.begin() + static_cast<std::ptrdiff_t>(skip), train_re.end());
  if (skip > 0) recompute();
}

void AlarmThreshold::recompute() {
  const std::vector<double> values(history_.begin(), history_.end());
  thr_ = upper_fence(values, iqr_factor_);
}

void AlarmThreshold::update(double re, bool is_normal) {
  if (!is_normal) return;
  if (history_.size() == capacity_) history_.pop_front();
  history_.push_back(re);
  recompute();
}

void AlarmThreshold::save(BinaryWriter& out) const {
  out.put_u64(capacity_);
  out.put_f64(iqr_factor_);
  out.put_f64(thr_);
  const std::vector<double> values(history_.begin(), history_.end());
  out.put_f64s(values);
}

AlarmThreshold AlarmThreshold::load(BinaryReader& in) {
  AlarmThreshold t;
  t.capacity_ = in.get_count();
  t.iqr_factor_ = in.get_f64();
  t.thr_ = in.get_f64();
  const auto values = in.get_f64s();
  if (values.size() > t.capacity_) fail(Errc::CorruptInput, "threshold history over capacity");
  t.history_.assign(values.begin(), values.end());
  return t;
}

LowPassFilter::LowPassFilter(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(Errc::InvalidValue, "filter alpha must lie in (0, 1]");
}

double LowPassFilter::apply(double re) {
  state_ = state_ ? alpha_ * re + (1.0 - alpha_) * *state_ : re;
  return *state_;
}

void LowPassFilter::save(BinaryWriter& out) const {
  out.put_f64(alpha_);
  out.put_bool(state_.has_value());
  out.put_f64(state_.value_or(0.0));
}

LowPassFilter LowPassFilter::load(BinaryReader& in) {
  LowPassFilter f(in.get_f64());
  const bool has = in.get_bool();
  const double v = in.get_f64();
  if (has) f.state_ = v;
  return f;
}

PersistenceGate::PersistenceGate(std::uint32_t k) : k_(k) {
  if (k == 0) fail(Errc::InvalidValue, "persistence must be at least 1");
}

bool PersistenceGate::decide(double filtered_re, double thr_re, bool& alarm) {
  const bool abnormal = filtered_re > thr_re;
  consecutive_ = abnormal ? consecutive_ + 1 : 0;
  alarm = consecutive_ >= k_;
  return abnormal;
}

void PersistenceGate::save(BinaryWriter& out) const {
  out.put_u32(k_);
  out.put_u32(consecutive_);
}

PersistenceGate PersistenceGate::load(BinaryReader& in) {
  PersistenceGate g(in.get_u32());
  g.consecutive_ = in.get_u32();
  return g;
}

Detector::Detector(AEModel model, AlarmThreshold threshold, const DetectorConfig& config)
    : model_(std::move(model)),
      threshold_(std::move(threshold)),
      filter_(config.filter_alpha),
      gate_(config.persistence),
      config_(config),
      adam_(config.fine_tune ? AdamOptimizer(model_.param_count()) : AdamOptimizer()) {}

Detection Detector::process(const WindowBatch& window) {
  const Reconstruction rec = model_.reconstruct(window);

  Detection d;
  d.window_id = window.window_id;
  d.start_ts = window.start_ts;
  d.end_ts = window.end_ts;
  d.re = rec.re;
  d.rms_re = rec.rms_re;
  d.score = config_.target == ErrorTarget::RmsRe ? rec.rms_re : rec.re;
  d.filtered = filter_.apply(d.score);
  d.thr_re = threshold_.value();

  bool fire = false;
  d.abnormal = gate_.decide(d.filtered, d.thr_re, fire);
  if (fire) {
    d.alarm = Alarm{d.window_id, d.start_ts, d.end_ts, d.score, d.filtered, d.thr_re, gate_.consecutive()};
  }
  threshold_.update(d.score, !d.abnormal);

  if (config_.fine_tune && !d.abnormal) {
    std::vector<double> grad(model_.param_count(), 0.0);
    model_.loss_and_gradient(model_.normalize(window.data), grad);
    adam_.step(model_.params(), grad, config_.train.learning_rate * config_.fine_tune_scale);
  }
  return d;
}

void Detector::save(BinaryWriter& out) const {
  model_.save(out);
  threshold_.save(out);
  filter_.save(out);
  gate_.save(out);
  out.put_bool(config_.fine_tune);
  if (config_.fine_tune) adam_.save(out);
}

Detector Detector::load(BinaryReader& in, const DetectorConfig& config) {
  AEModel model = AEModel::load(in);
  AlarmThreshold threshold = AlarmThreshold::load(in);
  Detector d(std::move(model), std::move(threshold), config);
  d.filter_ = LowPassFilter::load(in);
  d.gate_ = PersistenceGate::load(in);
  if (in.get_bool()) d.adam_ = AdamOptimizer::load(in);
  return d;
}

void save_model(const std::string& path, const ModelBundle& bundle) {
  BinaryWriter out;
  bundle.model.save(out);
  bundle.threshold.save(out);
  out.put_u64(bundle.features.names.size());
  for (const auto& n : bundle.features.names) out.put_string(n);
  out.put_f64s(bundle.features.mean);
  out.put_f64s(bundle.features.stddev);
  out.put_string(bundle.config_echo);
  write_framed_file(path, "SXAE", kModelFormatVersion, out);
}

ModelBundle load_model(const std::string& path) {
  const auto payload = read_framed_file(path, "SXAE", kModelFormatVersion);
  BinaryReader in(payload);
  ModelBundle b;
  b.model = AEModel::load(in);
  b.threshold = AlarmThreshold::load(in);
  b.features.names.resize(in.get_count(1 << 20));
  for (auto& n : b.features.names) n = in.get_string();
  b.features.mean = in.get_f64s();
  b.features.stddev = in.get_f64s();
  b.config_echo = in.get_string();
  if (!in.at_end()) fail(Errc::CorruptInput, "trailing bytes in model file");
  return b;
}

}  // namespace sxai
