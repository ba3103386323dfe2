#include "sxai/pipeline/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <sstream>
#include <thread>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"
#include "sxai/core/timestamp.hpp"
#include "sxai/detector/training.hpp"
#include "sxai/pipeline/channel.hpp"

namespace sxai {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

FeatureScaler scaler_for(const PipelineConfig& config, const FeatureSchema& schema, const ModelBundle& bundle) {
  const auto& aux = bundle.features;
  if (aux.names.empty()) return FeatureScaler(schema.size(), config.train_windows);
  if (aux.names != schema.names())
    fail(Errc::ConfigError, "model feature normalization does not match the configured feature layout");
  return FeatureScaler::frozen(aux.mean, aux.stddev);
}

bool sampling_variant(const std::string& name) {
  if (name == "amrules") return false;
  if (name == "chebyos" || name == "chebyos+amrules") return true;
  fail(Errc::ConfigError, "unknown variant '" + name + "' (expected amrules or chebyos)");
}

}  // namespace

WindowBatch make_window(std::span<const RawRecord> records, std::size_t steps, std::uint64_t id) {
  if (records.empty()) fail(Errc::EmptyInput, "window has no records");
  std::vector<std::vector<double>> rows;
  rows.reserve(records.size());
  for (const auto& r : records) {
    std::vector<double> row(r.analog.begin(), r.analog.end());
    for (auto d : r.digital) row.push_back(d);
    rows.push_back(std::move(row));
  }
  WindowBatch w;
  w.window_id = id;
  w.start_ts = records.front().ts;
  w.end_ts = records.back().ts;
  w.data = resample_rows(rows, steps);
  return w;
}

Segmenter::Segmenter(const WindowingConfig& config) : config_(config), cycles_(config.max_cycle_length) {}

std::optional<Cycle> Segmenter::push(const RawRecord& record) {
  if (config_.mode == WindowMode::Cycle) return cycles_.push(record);
  buffer_.push_back(record);
  if (buffer_.size() > config_.length) buffer_.pop_front();
  ++since_emit_;
  const std::size_t due = next_index_ == 0 ? config_.length : config_.stride;
  if (buffer_.size() < config_.length || since_emit_ < due) return std::nullopt;
  since_emit_ = 0;
  Cycle c;
  c.index = next_index_++;
  c.records.assign(buffer_.begin(), buffer_.end());
  return c;
}

void Segmenter::finish() {
  if (config_.mode == WindowMode::Cycle) {
    cycles_.finish();
    return;
  }
  fixed_dropped_ += std::min(since_emit_, buffer_.size());
  buffer_.clear();
  since_emit_ = 0;
}

std::size_t Segmenter::partial_dropped() const noexcept {
  return config_.mode == WindowMode::Cycle ? cycles_.partial_dropped() : fixed_dropped_;
}

void Segmenter::save(BinaryWriter& out) const {
  cycles_.save(out);
  out.put_u64(buffer_.size());
  for (const auto& r : buffer_) save_record(out, r);
  out.put_u64(since_emit_);
  out.put_u64(next_index_);
  out.put_u64(fixed_dropped_);
}

Segmenter Segmenter::load(BinaryReader& in, const WindowingConfig& config) {
  Segmenter s(config);
  s.cycles_ = CycleSegmenter::load(in);
  const auto n = in.get_count();
  for (std::size_t i = 0; i < n; ++i) s.buffer_.push_back(load_record(in));
  s.since_emit_ = in.get_u64();
  s.next_index_ = in.get_u64();
  s.fixed_dropped_ = in.get_u64();
  return s;
}

TrainingOutcome train_detector(std::span<const RawRecord> records, const PipelineConfig& config) {
  Segmenter seg(config.windowing);
  std::vector<Cycle> spans;
  std::size_t start = records.size();
  for (std::size_t i = 0; i < records.size() && spans.size() < config.train_windows; ++i) {
    if (auto c = seg.push(records[i])) {
      spans.push_back(std::move(*c));
      // Cycle mode resumes on the last record of the final training cycle
      // so the next COMP transition is seen; fixed mode resumes after it.
      start = config.windowing.mode == WindowMode::Cycle ? i - 1 : i + 1;
    }
  }
  if (spans.size() < config.train_windows)
    fail(Errc::InsufficientData, "need " + std::to_string(config.train_windows) + " training windows, found " +
                                     std::to_string(spans.size()));

  const auto& shape = config.detector.shape;
  std::vector<WindowBatch> windows;
  for (const auto& c : spans) windows.push_back(make_window(c.records, shape.steps, c.index));
  TrainResult trained = ae_train(windows, shape, config.detector.train);

  std::vector<double> scores;
  for (const auto& w : windows) {
    const Reconstruction rec = trained.model.reconstruct(w);
    scores.push_back(config.detector.target == ErrorTarget::RmsRe ? rec.rms_re : rec.re);
  }

  const FeatureSchema schema(config.features);
  FeatureScaler scaler(schema.size(), spans.size());
  for (const auto& c : spans) scaler.observe(extract_features(c, config.features).values);

  TrainingOutcome out{ModelBundle{std::move(trained.model),
                                  AlarmThreshold(scores, config.detector.history_capacity,
                                                 config.detector.iqr_factor),
                                  AuxNormalization{schema.names(), scaler.mean(), scaler.stddev()},
                                  to_json(config).dump()},
                      start, std::move(trained.epoch_loss)};
  return out;
}

DetectionStage::DetectionStage(const PipelineConfig& config, const ModelBundle& bundle)
    : DetectionStage(config, Detector(bundle.model, bundle.threshold, config.detector),
                     scaler_for(config, FeatureSchema(config.features), bundle), Segmenter(config.windowing)) {}

DetectionStage::DetectionStage(const PipelineConfig& config, Detector detector, FeatureScaler scaler,
                               Segmenter segmenter)
    : config_(config),
      schema_(config.features),
      detector_(std::move(detector)),
      scaler_(std::move(scaler)),
      segmenter_(std::move(segmenter)) {
  if (detector_.model().shape().features != kChannelCount)
    fail(Errc::ShapeError, "detector expects " + std::to_string(detector_.model().shape().features) +
                               " channels, records carry " + std::to_string(kChannelCount));
}

std::optional<WindowResult> DetectionStage::push(const RawRecord& record) {
  auto span = segmenter_.push(record);
  if (!span) return std::nullopt;
  WindowBatch window = make_window(span->records, detector_.model().shape().steps, windows_);
  window.truncated = span->truncated;

  WindowResult out;
  out.window_id = windows_++;
  out.start_ts = window.start_ts;
  out.end_ts = window.end_ts;
  out.detection = detector_.process(window);
  const auto raw = extract_features(*span, config_.features).values;
  scaler_.observe(raw);
  out.features = scaler_.transform(raw);
  return out;
}

void DetectionStage::save(BinaryWriter& out) const {
  detector_.save(out);
  scaler_.save(out);
  segmenter_.save(out);
  out.put_u64(windows_);
}

DetectionStage DetectionStage::load(BinaryReader& in, const PipelineConfig& config) {
  Detector detector = Detector::load(in, config.detector);
  FeatureScaler scaler = FeatureScaler::load(in);
  Segmenter segmenter = Segmenter::load(in, config.windowing);
  DetectionStage s(config, std::move(detector), std::move(scaler), std::move(segmenter));
  s.windows_ = in.get_u64();
  return s;
}

ExplanationStage::ExplanationStage(const PipelineConfig& config, std::vector<std::string> feature_names,
                                   std::string name)
    : config_(config),
      name_(std::move(name)),
      learner_(std::move(feature_names), config.rules),
      sampler_(config.sampling.k_max),
      window_(config.evaluation.window) {}

ExplanationStage::Output ExplanationStage::consume(const WindowResult& w) {
  const auto& det = w.detection;
  const double y = det.score;
  thr_re_ = det.thr_re;

  // Test, then train.
  window_.push(y, learner_.predict(w.features).value);
  ++examples_;
  if (examples_ % config_.evaluation.stride == 0) {
    series_.push_back({examples_, rmse(window_),
                       rmse_phi(window_, window_.relevance(), config_.evaluation.t_phi,
                                config_.evaluation.weighting)});
  }
  if (config_.sampling.enabled)
    sampler_.learn(learner_, w.features, y);
  else
    learner_.learn_one(w.features, y);
  peak_memory_ = std::max(peak_memory_, learner_.memory_bytes());

  Output out;
  if (det.alarm) {
    ++alarms_;
    if (!in_episode_) ++episodes_;
    in_episode_ = true;
    const auto& a = *det.alarm;
    out.alarm_line = nlohmann::json{{"window", a.window_id},
                                    {"start", format_timestamp(a.start_ts)},
                                    {"end", format_timestamp(a.end_ts)},
                                    {"re", a.raw_re},
                                    {"filtered", a.filtered_re},
                                    {"thr_re", a.thr_re},
                                    {"run_length", a.run_length}}
                         .dump();
  } else {
    in_episode_ = false;
  }
  if (det.alarm || config_.explain_all) {
    const auto snapshot = learner_.snapshot();
    const LocalExplanation local = explain_local(*snapshot, w.features, w.window_id, w.start_ts, y);
    auto j = to_json(local, snapshot->feature_names);
    j["alarm"] = det.alarm.has_value();
    out.explanation_line = j.dump();
  }
  return out;
}

VariantReport ExplanationStage::report() const {
  VariantReport r;
  r.name = name_;
  r.sampling = config_.sampling.enabled;
  r.examples = examples_;
  r.presentations = config_.sampling.enabled ? sampler_.total_replications() : examples_;
  r.capped = sampler_.capped_count();
  r.series = series_;
  if (!series_.empty()) {
    double sum = 0.0, sum_phi = 0.0;
    std::size_t n_phi = 0;
    for (const auto& p : series_) {
      sum += p.rmse;
      if (p.rmse_phi) {
        sum_phi += *p.rmse_phi;
        ++n_phi;
      }
    }
    r.rmse = sum / static_cast<double>(series_.size());
    if (n_phi > 0) r.rmse_phi = sum_phi / static_cast<double>(n_phi);
  }
  r.peak_memory_bytes = peak_memory_;
  const auto snapshot = learner_.snapshot();
  const GlobalExplanation g = explain_global(*snapshot, thr_re_);
  r.rules = g.rules.size();
  r.rules_above = g.above;
  r.fraction_above = g.fraction_above;
  r.thr_re = thr_re_;
  r.rule_set = export_rules(*snapshot);
  return r;
}

void ExplanationStage::save(BinaryWriter& out) const {
  out.put_string(name_);
  learner_.save(out);
  sampler_.save(out);
  window_.save(out);
  out.put_u64(series_.size());
  for (const auto& p : series_) {
    out.put_u64(p.step);
    out.put_f64(p.rmse);
    out.put_bool(p.rmse_phi.has_value());
    out.put_f64(p.rmse_phi.value_or(0.0));
  }
  out.put_u64(examples_);
  out.put_f64(thr_re_);
  out.put_u64(peak_memory_);
  out.put_bool(in_episode_);
  out.put_u64(alarms_);
  out.put_u64(episodes_);
}

ExplanationStage ExplanationStage::load(BinaryReader& in, const PipelineConfig& config) {
  std::string name = in.get_string();
  AMRules learner = AMRules::load(in);
  ExplanationStage s(config, learner.feature_names(), std::move(name));
  s.learner_ = std::move(learner);
  s.sampler_ = ChebyshevOversampler::load(in);
  s.window_ = MetricWindow::load(in);
  const auto n = in.get_count();
  for (std::size_t i = 0; i < n; ++i) {
    MetricPoint p;
    p.step = in.get_u64();
    p.rmse = in.get_f64();
    const bool has = in.get_bool();
    const double v = in.get_f64();
    if (has) p.rmse_phi = v;
    s.series_.push_back(p);
  }
  s.examples_ = in.get_u64();
  s.thr_re_ = in.get_f64();
  s.peak_memory_ = in.get_u64();
  s.in_episode_ = in.get_bool();
  s.alarms_ = in.get_u64();
  s.episodes_ = in.get_u64();
  return s;
}

nlohmann::json to_json(const MetricPoint& p) {
  return {{"step", p.step},
          {"rmse", p.rmse},
          {"rmse_phi", p.rmse_phi ? nlohmann::json(*p.rmse_phi) : nlohmann::json(nullptr)}};
}

nlohmann::json to_json(const VariantReport& v) {
  auto series = nlohmann::json::array();
  for (const auto& p : v.series) series.push_back(to_json(p));
  return {{"name", v.name},
          {"sampling", v.sampling},
          {"examples", v.examples},
          {"presentations", v.presentations},
          {"capped", v.capped},
          {"rmse", v.rmse},
          {"rmse_phi", v.rmse_phi ? nlohmann::json(*v.rmse_phi) : nlohmann::json(nullptr)},
          {"seconds", v.seconds},
          {"peak_memory_bytes", v.peak_memory_bytes},
          {"relative_time", v.relative_time},
          {"relative_memory", v.relative_memory},
          {"rules", v.rules},
          {"rules_above", v.rules_above},
          {"fraction_above", v.fraction_above},
          {"thr_re", v.thr_re},
          {"rule_set", v.rule_set},
          {"series", series}};
}

nlohmann::json to_json(const EvalReport& r) {
  auto variants = nlohmann::json::array();
  for (const auto& v : r.variants) variants.push_back(to_json(v));
  return {{"records", r.records},   {"windows", r.windows}, {"alarms", r.alarms},
          {"alarm_episodes", r.alarm_episodes}, {"dropped", r.dropped}, {"variants", variants}};
}

Pipeline::Pipeline(PipelineConfig config, const ModelBundle& bundle)
    : Pipeline(config, DetectionStage(config, bundle),
               ExplanationStage(config, FeatureSchema(config.features).names(),
                                config.sampling.enabled ? "chebyos" : "amrules")) {}

Pipeline::Pipeline(PipelineConfig config, DetectionStage detection, ExplanationStage explanation)
    : config_(std::move(config)), detection_(std::move(detection)), explanation_(std::move(explanation)) {}

void Pipeline::set_output(std::ostream* alarms, std::ostream* explanations) {
  alarms_out_ = alarms;
  explanations_out_ = explanations;
}

void Pipeline::emit(const ExplanationStage::Output& out) {
  if (out.alarm_line && alarms_out_) *alarms_out_ << *out.alarm_line << '\n';
  if (out.explanation_line && explanations_out_) *explanations_out_ << *out.explanation_line << '\n';
}

void Pipeline::push(const RawRecord& record) {
  ++records_;
  if (auto w = detection_.push(record)) emit(explanation_.consume(*w));
}

void Pipeline::finish() { detection_.finish(); }

EvalReport Pipeline::report() const {
  EvalReport r;
  r.records = records_;
  r.windows = detection_.windows();
  r.alarms = explanation_.alarms();
  r.alarm_episodes = explanation_.episodes();
  r.variants.push_back(explanation_.report());
  return r;
}

void Pipeline::save_checkpoint(const std::string& path) const {
  BinaryWriter out;
  out.put_string(to_json(config_).dump());
  detection_.save(out);
  explanation_.save(out);
  out.put_u64(records_);
  write_framed_file(path, "SXPL", kCheckpointFormatVersion, out);
}

Pipeline Pipeline::load_checkpoint(const std::string& path) {
  const auto payload = read_framed_file(path, "SXPL", kCheckpointFormatVersion);
  BinaryReader in(payload);
  PipelineConfig config;
  try {
    config = config_from_json(nlohmann::json::parse(in.get_string()));
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::CorruptInput, std::string("checkpoint config: ") + e.what());
  }
  DetectionStage detection = DetectionStage::load(in, config);
  ExplanationStage explanation = ExplanationStage::load(in, config);
  Pipeline p(config, std::move(detection), std::move(explanation));
  p.records_ = in.get_u64();
  if (!in.at_end()) fail(Errc::CorruptInput, "trailing bytes in checkpoint");
  return p;
}

RunResult run_online(std::span<const RawRecord> records, const PipelineConfig& config,
                     const std::optional<ModelBundle>& bundle) {
  RunResult result;
  if (records.empty()) return result;
  std::size_t start = 0;
  ModelBundle model;
  if (bundle) {
    model = *bundle;
  } else {
    result.training = train_detector(records, config);
    model = result.training->bundle;
    start = result.training->consumed;
  }
  const auto online = records.subspan(start);
  std::ostringstream alarms, explanations;
  const auto t0 = Clock::now();

  if (config.mode == ExecutionMode::Sequential) {
    Pipeline p(config, model);
    p.set_output(&alarms, &explanations);
    for (const auto& r : online) p.push(r);
    p.finish();
    result.report = p.report();
  } else {
    DetectionStage detection(config, model);
    ExplanationStage explanation(config, detection.schema().names(),
                                 config.sampling.enabled ? "chebyos" : "amrules");
    BoundedChannel<WindowResult> channel(config.queue_capacity);
    std::uint64_t dropped = 0;
    std::exception_ptr producer_error;
    std::thread producer([&] {
      try {
        for (const auto& r : online) {
          auto w = detection.push(r);
          if (!w) continue;
          if (config.backpressure == BackpressurePolicy::Block) {
            if (!channel.push(std::move(*w))) break;
          } else if (!channel.try_push(std::move(*w))) {
            ++dropped;
          }
        }
        detection.finish();
      } catch (...) {
        producer_error = std::current_exception();
      }
      channel.close();
    });
    try {
      while (auto w = channel.pop()) {
        const auto out = explanation.consume(*w);
        if (out.alarm_line) alarms << *out.alarm_line << '\n';
        if (out.explanation_line) explanations << *out.explanation_line << '\n';
      }
    } catch (...) {
      channel.close();
      producer.join();
      throw;
    }
    producer.join();
    if (producer_error) std::rethrow_exception(producer_error);
    result.report.records = online.size();
    result.report.windows = detection.windows();
    result.report.alarms = explanation.alarms();
    result.report.alarm_episodes = explanation.episodes();
    result.report.dropped = dropped;
    result.report.variants.push_back(explanation.report());
  }
  result.report.variants.front().seconds = seconds_since(t0);
  result.alarms_log = alarms.str();
  result.explanations_log = explanations.str();
  return result;
}

EvalReport evaluate_prequential(std::span<const RawRecord> records, const PipelineConfig& config,
                                const std::vector<std::string>& variants,
                                const std::optional<ModelBundle>& bundle) {
  EvalReport report;
  for (const auto& v : variants) sampling_variant(v);
  if (records.empty()) return report;
  std::size_t start = 0;
  ModelBundle model;
  if (bundle) {
    model = *bundle;
  } else {
    TrainingOutcome t = train_detector(records, config);
    model = std::move(t.bundle);
    start = t.consumed;
  }
  const auto online = records.subspan(start);

  DetectionStage detection(config, model);
  std::vector<WindowResult> windows;
  for (const auto& r : online)
    if (auto w = detection.push(r)) windows.push_back(std::move(*w));
  detection.finish();
  report.records = online.size();
  report.windows = windows.size();

  for (const auto& name : variants) {
    PipelineConfig vc = config;
    vc.sampling.enabled = sampling_variant(name);
    ExplanationStage stage(vc, detection.schema().names(), name);
    const auto t0 = Clock::now();
    for (const auto& w : windows) stage.consume(w);
    VariantReport v = stage.report();
    v.seconds = seconds_since(t0);
    if (report.variants.empty()) {
      report.alarms = stage.alarms();
      report.alarm_episodes = stage.episodes();
    }
    report.variants.push_back(std::move(v));
  }
  if (!report.variants.empty()) {
    const auto& base = report.variants.front();
    for (auto& v : report.variants) {
      v.relative_time = base.seconds > 0.0 ? v.seconds / base.seconds : 1.0;
      v.relative_memory = base.peak_memory_bytes > 0
                              ? static_cast<double>(v.peak_memory_bytes) / static_cast<double>(base.peak_memory_bytes)
                              : 1.0;
    }
  }
  return report;
}

}  // namespace sxai
