#include "sxai/pipeline/config.hpp"

#include <fstream>
#include <set>

#include "sxai/core/error.hpp"

namespace sxai {
namespace {

using nlohmann::json;

/// Reads one JSON object, remembering which keys were consumed so that
/// leftovers can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail(Errc::ConfigError, path_ + " must be an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    const auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      fail(Errc::ConfigError, path_ + "." + key + ": " + e.what());
    }
  }

  template <class T, class Parse>
  void read_enum(const char* key, T& out, Parse parse) {
    std::string s;
    const auto it = j_.find(key);
    if (it == j_.end()) {
      seen_.insert(key);
      return;
    }
    read(key, s);
    out = parse(s);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.contains(item.key())) fail(Errc::ConfigError, "unknown key " + path_ + "." + item.key());
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& what) {
  if (!ok) fail(Errc::ConfigError, what);
}

WindowMode window_mode_from_string(const std::string& s) {
  if (s == "cycle") return WindowMode::Cycle;
  if (s == "fixed") return WindowMode::Fixed;
  fail(Errc::ConfigError, "window mode must be cycle or fixed, got '" + s + "'");
}

ErrorTarget target_from_string(const std::string& s) {
  if (s == "rms_re") return ErrorTarget::RmsRe;
  if (s == "mean_square") return ErrorTarget::MeanSquare;
  fail(Errc::ConfigError, "detector target must be rms_re or mean_square, got '" + s + "'");
}

PhiWeighting weighting_from_string(const std::string& s) {
  if (s == "thresholded") return PhiWeighting::Thresholded;
  if (s == "all") return PhiWeighting::All;
  fail(Errc::ConfigError, "weighting must be thresholded or all, got '" + s + "'");
}

ExecutionMode mode_from_string(const std::string& s) {
  if (s == "sequential") return ExecutionMode::Sequential;
  if (s == "parallel") return ExecutionMode::Parallel;
  fail(Errc::ConfigError, "execution mode must be sequential or parallel, got '" + s + "'");
}

BackpressurePolicy policy_from_string(const std::string& s) {
  if (s == "block") return BackpressurePolicy::Block;
  if (s == "shed") return BackpressurePolicy::Shed;
  fail(Errc::ConfigError, "backpressure must be block or shed, got '" + s + "'");
}

Architecture arch_from_string(const std::string& s) {
  try {
    return architecture_from_string(s);
  } catch (const Error& e) {
    fail(Errc::ConfigError, e.what());
  }
}

void read_detector(const json& j, PipelineConfig& c) {
  Section s(j, "detector");
  auto& d = c.detector;
  s.read_enum("architecture", d.shape.arch, arch_from_string);
  s.read("steps", d.shape.steps);
  s.read("encoder", d.shape.encoder);
  s.read("epochs", d.train.epochs);
  s.read("batch_size", d.train.batch_size);
  s.read("learning_rate", d.train.learning_rate);
  s.read("seed", d.train.seed);
  s.read("min_train_windows", d.train.min_train_windows);
  s.read("iqr_factor", d.iqr_factor);
  s.read("history", d.history_capacity);
  s.read("alpha", d.filter_alpha);
  s.read("persistence", d.persistence);
  s.read_enum("target", d.target, target_from_string);
  s.read("fine_tune", d.fine_tune);
  s.read("fine_tune_scale", d.fine_tune_scale);
  s.read("train_windows", c.train_windows);
  s.finish();
}

void read_windowing(const json& j, WindowingConfig& w) {
  Section s(j, "windowing");
  s.read_enum("mode", w.mode, window_mode_from_string);
  s.read("length", w.length);
  s.read("stride", w.stride);
  s.read("max_cycle_length", w.max_cycle_length);
  s.finish();
}

void read_features(const json& j, FeatureConfig& f) {
  Section s(j, "features");
  s.read("charge_bins", f.charge_bins);
  s.read("empty_bins", f.empty_bins);
  s.read("ma_short", f.ma_short);
  s.read("ma_long", f.ma_long);
  s.finish();
}

void read_rules(const json& j, AMRulesConfig& r) {
  Section s(j, "rules");
  s.read("n_min", r.n_min);
  s.read("delta", r.delta);
  s.read("tau", r.tau);
  s.read_enum("strategy", r.strategy, [](const std::string& v) { return strategy_from_string(v); });
  s.read("ordered", r.ordered);
  s.read("significant_digits", r.splitter.significant_digits);
  s.read("max_nodes", r.splitter.max_nodes);
  s.read("ddm_warmup", r.ddm.warmup);
  s.read("ddm_warning", r.ddm.warning_level);
  s.read("ddm_drift", r.ddm.drift_level);
  s.read("drift_detection", r.drift_detection);
  s.read("drift_multiplier", r.drift_multiplier);
  s.read("learning_rate", r.learning_rate);
  s.read("fading", r.fading);
  s.finish();
}

void read_execution(const json& j, PipelineConfig& c) {
  Section s(j, "execution");
  s.read_enum("mode", c.mode, mode_from_string);
  s.read("queue_capacity", c.queue_capacity);
  s.read_enum("backpressure", c.backpressure, policy_from_string);
  s.read("explain_all", c.explain_all);
  s.finish();
}

void validate(const PipelineConfig& c) {
  const auto& d = c.detector;
  require(d.shape.steps > 0 && !d.shape.encoder.empty(), "detector shape needs steps and encoder widths");
  for (auto w : d.shape.encoder) require(w > 0, "encoder widths must be positive");
  require(d.train.epochs > 0 && d.train.batch_size > 0, "epochs and batch_size must be positive");
  require(d.train.learning_rate > 0.0, "learning_rate must be positive");
  require(d.filter_alpha > 0.0 && d.filter_alpha <= 1.0, "alpha must lie in (0, 1]");
  require(d.persistence >= 1, "persistence must be at least 1");
  require(d.history_capacity > 0 && d.iqr_factor >= 0.0, "threshold history and factor out of range");
  require(c.train_windows >= 4, "train_windows must be at least 4");
  require(c.windowing.length > 0 && c.windowing.stride > 0 && c.windowing.max_cycle_length > 0,
          "window sizes must be positive");
  require(c.rules.n_min > 0, "n_min must be positive");
  require(c.rules.delta > 0.0 && c.rules.delta < 1.0, "delta must lie in (0, 1)");
  require(c.rules.tau >= 0.0, "tau must be non-negative");
  require(c.rules.fading > 0.0 && c.rules.fading < 1.0, "fading must lie in (0, 1)");
  require(c.sampling.k_max >= 1, "k_max must be at least 1");
  require(c.evaluation.window > 0 && c.evaluation.stride > 0, "evaluation window and stride must be positive");
  require(c.evaluation.t_phi >= 0.0 && c.evaluation.t_phi <= 1.0, "t_phi must lie in [0, 1]");
  require(c.queue_capacity > 0, "queue_capacity must be positive");
}

std::string_view to_string(WindowMode m) { return m == WindowMode::Cycle ? "cycle" : "fixed"; }

}  // namespace

GeneratorConfig generator_from_json(const json& j) {
  GeneratorConfig g;
  Section s(j, "generator");
  s.read("seed", g.seed);
  s.read("duration", g.duration);
  s.read("start_ts", g.start_ts);
  if (const json* w = s.child("waveforms")) {
    Section ws(*w, "generator.waveforms");
    auto& v = g.waveforms;
    ws.read("pressure_low", v.pressure_low);
    ws.read("pressure_high", v.pressure_high);
    ws.read("charge_rate", v.charge_rate);
    ws.read("consumption", v.consumption);
    ws.read("consumption_spread", v.consumption_spread);
    ws.read("interrupt_probability", v.interrupt_probability);
    ws.read("pressure_noise", v.pressure_noise);
    ws.read("h1_idle", v.h1_idle);
    ws.read("h1_charge", v.h1_charge);
    ws.read("motor_current_on", v.motor_current_on);
    ws.read("motor_current_off", v.motor_current_off);
    ws.read("oil_mean", v.oil_mean);
    ws.read("oil_swing", v.oil_swing);
    ws.read("oil_period", v.oil_period);
    ws.read("oil_noise", v.oil_noise);
    ws.read("flow", v.flow);
    ws.read("purge_seconds", v.purge_seconds);
    ws.finish();
  }
  if (const json* faults = s.child("faults")) {
    if (faults->is_string()) {
      g.faults = parse_fault_spec(faults->get<std::string>());
    } else {
      require(faults->is_array(), "generator.faults must be a spec string or an array");
      for (const auto& item : *faults) {
        Section fs(item, "generator.faults[]");
        FaultSpec f;
        fs.read_enum("type", f.type, [](const std::string& v) { return fault_type_from_string(v); });
        fs.read("start", f.start);
        fs.read("end", f.end);
        fs.read("severity", f.severity);
        fs.read("ramp", f.ramp);
        fs.finish();
        g.faults.push_back(f);
      }
    }
  }
  s.finish();
  return g;
}

json to_json(const GeneratorConfig& g) {
  const auto& v = g.waveforms;
  json faults = json::array();
  for (const auto& f : g.faults)
    faults.push_back(
        {{"type", std::string(to_string(f.type))}, {"start", f.start}, {"end", f.end}, {"severity", f.severity}, {"ramp", f.ramp}});
  return {{"seed", g.seed},
          {"duration", g.duration},
          {"start_ts", g.start_ts},
          {"faults", faults},
          {"waveforms",
           {{"pressure_low", v.pressure_low},
            {"pressure_high", v.pressure_high},
            {"charge_rate", v.charge_rate},
            {"consumption", v.consumption},
            {"consumption_spread", v.consumption_spread},
            {"interrupt_probability", v.interrupt_probability},
            {"pressure_noise", v.pressure_noise},
            {"h1_idle", v.h1_idle},
            {"h1_charge", v.h1_charge},
            {"motor_current_on", v.motor_current_on},
            {"motor_current_off", v.motor_current_off},
            {"oil_mean", v.oil_mean},
            {"oil_swing", v.oil_swing},
            {"oil_period", v.oil_period},
            {"oil_noise", v.oil_noise},
            {"flow", v.flow},
            {"purge_seconds", v.purge_seconds}}}};
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  Section s(j, "config");
  if (const json* d = s.child("detector")) read_detector(*d, c);
  if (const json* w = s.child("windowing")) read_windowing(*w, c.windowing);
  if (const json* f = s.child("features")) read_features(*f, c.features);
  if (const json* r = s.child("rules")) read_rules(*r, c.rules);
  if (const json* sm = s.child("sampling")) {
    Section ss(*sm, "sampling");
    ss.read("enabled", c.sampling.enabled);
    ss.read("k_max", c.sampling.k_max);
    ss.finish();
  }
  if (const json* e = s.child("evaluation")) {
    Section es(*e, "evaluation");
    es.read("window", c.evaluation.window);
    es.read("t_phi", c.evaluation.t_phi);
    es.read_enum("weighting", c.evaluation.weighting, weighting_from_string);
    es.read("stride", c.evaluation.stride);
    es.finish();
  }
  if (const json* x = s.child("execution")) read_execution(*x, c);
  if (const json* d = s.child("data")) {
    Section ds(*d, "data");
    ds.read("path", c.data);
    ds.finish();
  }
  if (const json* o = s.child("output")) {
    Section os(*o, "output");
    os.read("alarms_log", c.output.alarms_log);
    os.read("explanations_log", c.output.explanations_log);
    os.read("report", c.output.report);
    os.finish();
  }
  if (const json* g = s.child("generator")) c.generator = generator_from_json(*g);
  s.finish();
  validate(c);
  return c;
}

json to_json(const PipelineConfig& c) {
  const auto& d = c.detector;
  json j = {
      {"detector",
       {{"architecture", std::string(to_string(d.shape.arch))},
        {"steps", d.shape.steps},
        {"encoder", d.shape.encoder},
        {"epochs", d.train.epochs},
        {"batch_size", d.train.batch_size},
        {"learning_rate", d.train.learning_rate},
        {"seed", d.train.seed},
        {"min_train_windows", d.train.min_train_windows},
        {"iqr_factor", d.iqr_factor},
        {"history", d.history_capacity},
        {"alpha", d.filter_alpha},
        {"persistence", d.persistence},
        {"target", d.target == ErrorTarget::RmsRe ? "rms_re" : "mean_square"},
        {"fine_tune", d.fine_tune},
        {"fine_tune_scale", d.fine_tune_scale},
        {"train_windows", c.train_windows}}},
      {"windowing",
       {{"mode", std::string(to_string(c.windowing.mode))},
        {"length", c.windowing.length},
        {"stride", c.windowing.stride},
        {"max_cycle_length", c.windowing.max_cycle_length}}},
      {"features",
       {{"charge_bins", c.features.charge_bins},
        {"empty_bins", c.features.empty_bins},
        {"ma_short", c.features.ma_short},
        {"ma_long", c.features.ma_long}}},
      {"rules",
       {{"n_min", c.rules.n_min},
        {"delta", c.rules.delta},
        {"tau", c.rules.tau},
        {"strategy", std::string(to_string(c.rules.strategy))},
        {"ordered", c.rules.ordered},
        {"significant_digits", c.rules.splitter.significant_digits},
        {"max_nodes", c.rules.splitter.max_nodes},
        {"ddm_warmup", c.rules.ddm.warmup},
        {"ddm_warning", c.rules.ddm.warning_level},
        {"ddm_drift", c.rules.ddm.drift_level},
        {"drift_detection", c.rules.drift_detection},
        {"drift_multiplier", c.rules.drift_multiplier},
        {"learning_rate", c.rules.learning_rate},
        {"fading", c.rules.fading}}},
      {"sampling", {{"enabled", c.sampling.enabled}, {"k_max", c.sampling.k_max}}},
      {"evaluation",
       {{"window", c.evaluation.window},
        {"t_phi", c.evaluation.t_phi},
        {"weighting", c.evaluation.weighting == PhiWeighting::All ? "all" : "thresholded"},
        {"stride", c.evaluation.stride}}},
      {"execution",
       {{"mode", c.mode == ExecutionMode::Parallel ? "parallel" : "sequential"},
        {"queue_capacity", c.queue_capacity},
        {"backpressure", c.backpressure == BackpressurePolicy::Shed ? "shed" : "block"},
        {"explain_all", c.explain_all}}},
      {"data", {{"path", c.data}}},
      {"output",
       {{"alarms_log", c.output.alarms_log},
        {"explanations_log", c.output.explanations_log},
        {"report", c.output.report}}}};
  if (c.generator) j["generator"] = to_json(*c.generator);
  return j;
}

PipelineConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    fail(Errc::ConfigError, path + ": " + e.what());
  }
  return config_from_json(j);
}

}  // namespace sxai
