// Command-line front end: synthetic data, detector training, online runs,
// prequential evaluation and rule-set inspection.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sxai/core/error.hpp"
#include "sxai/data/csv.hpp"
#include "sxai/data/features.hpp"
#include "sxai/data/synth.hpp"
#include "sxai/detector/detector.hpp"
#include "sxai/explain/explain.hpp"
#include "sxai/pipeline/config.hpp"
#include "sxai/pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace sxai;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

int exit_code(Errc code) {
  switch (code) {
    case Errc::SchemaError:
    case Errc::ConfigError:
    case Errc::MissingFeature:
    case Errc::VersionError:
      return kExitConfig;
    default:
      return kExitRuntime;
  }
}

PipelineConfig config_or_default(const std::string& path) {
  return path.empty() ? PipelineConfig{} : load_config(path);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) fail(Errc::IoError, "write failed for " + path.string());
}

void print_variant_table(const EvalReport& r) {
  std::printf("%-10s %10s %10s %8s %8s %6s %8s\n", "variant", "RMSE", "RMSE_phi", "rel.time", "rel.mem",
              "rules", "above");
  for (const auto& v : r.variants) {
    std::printf("%-10s %10.4f %10s %8.2f %8.2f %6zu %7.1f%%\n", v.name.c_str(), v.rmse,
                v.rmse_phi ? std::to_string(*v.rmse_phi).substr(0, 6).c_str() : "n/a", v.relative_time,
                v.relative_memory, v.rules, 100.0 * v.fraction_above);
  }
}

struct Options {
  std::string data;
  std::string config;
  std::string model;
  std::string out;
  std::string out_dir = ".";
  std::string checkpoint;
  std::string resume;
  std::string variants = "amrules,chebyos";
  std::string faults;
  std::string truth;
  std::uint64_t seed = 1;
  std::size_t duration = 50000;
  bool json = false;
};

int cmd_synth(const Options& o) {
  GeneratorConfig g;
  if (!o.config.empty()) {
    const auto c = load_config(o.config);
    if (c.generator) g = *c.generator;
  }
  g.seed = o.seed;
  g.duration = o.duration;
  if (!o.faults.empty()) g.faults = parse_fault_spec(o.faults);
  const SynthStream s = synth_generate(g);
  write_metropt_csv(o.out, s.records);
  if (!o.truth.empty()) {
    std::ofstream t(o.truth);
    if (!t) fail(Errc::IoError, "cannot open " + o.truth);
    t << "index,regime\n";
    for (std::size_t i = 0; i < s.truth.size(); ++i) t << i << ',' << static_cast<int>(s.truth[i]) << '\n';
  }
  std::cerr << "wrote " << s.records.size() << " records to " << o.out << '\n';
  return 0;
}

int cmd_train(const Options& o) {
  const auto config = config_or_default(o.config);
  const auto records = read_metropt_csv(o.data);
  const TrainingOutcome t = train_detector(records, config);
  save_model(o.out, t.bundle);
  std::cerr << "trained on " << config.train_windows << " windows, final loss "
            << (t.epoch_loss.empty() ? 0.0 : t.epoch_loss.back()) << ", thr_re " << t.bundle.threshold.value()
            << "\nwrote " << o.out << '\n';
  return 0;
}

int cmd_run(const Options& o) {
  auto config = config_or_default(o.config);
  const auto records = read_metropt_csv(o.data.empty() ? config.data : o.data);
  const fs::path dir(o.out_dir);
  fs::create_directories(dir);

  const bool stateful = !o.checkpoint.empty() || !o.resume.empty();
  if (!stateful) {
    std::optional<ModelBundle> bundle;
    if (!o.model.empty()) bundle = load_model(o.model);
    const RunResult r = run_online(records, config, bundle);
    write_text(dir / config.output.alarms_log, r.alarms_log);
    write_text(dir / config.output.explanations_log, r.explanations_log);
    write_text(dir / config.output.report, to_json(r.report).dump(2) + "\n");
    if (r.report.dropped > 0) {
      std::cerr << "warning: shed " << r.report.dropped
                << " windows under backpressure; output is not deterministic\n";
      return kExitRuntime;
    }
    std::cerr << r.report.windows << " windows, " << r.report.alarms << " alarms in " << r.report.alarm_episodes
              << " episodes\n";
    return 0;
  }

  // Checkpointing runs are sequential and append to existing logs on resume.
  std::optional<Pipeline> pipeline;
  std::size_t start = 0;
  if (!o.resume.empty()) {
    pipeline.emplace(Pipeline::load_checkpoint(o.resume));
    config = pipeline->config();
    start = pipeline->report().records;
    if (start > records.size()) fail(Errc::ConfigError, "checkpoint is ahead of the input data");
  } else {
    ModelBundle bundle;
    if (!o.model.empty()) {
      bundle = load_model(o.model);
    } else {
      TrainingOutcome t = train_detector(records, config);
      bundle = std::move(t.bundle);
      start = t.consumed;
    }
    pipeline.emplace(config, bundle);
  }
  const auto mode = o.resume.empty() ? std::ios::trunc : std::ios::app;
  std::ofstream alarms(dir / config.output.alarms_log, mode);
  std::ofstream explanations(dir / config.output.explanations_log, mode);
  pipeline->set_output(&alarms, &explanations);
  for (std::size_t i = start; i < records.size(); ++i) pipeline->push(records[i]);
  if (!o.checkpoint.empty()) pipeline->save_checkpoint(o.checkpoint);
  pipeline->finish();
  write_text(dir / config.output.report, to_json(pipeline->report()).dump(2) + "\n");
  return 0;
}

int cmd_evaluate(const Options& o) {
  const auto config = config_or_default(o.config);
  const auto records = read_metropt_csv(o.data.empty() ? config.data : o.data);
  std::vector<std::string> variants;
  std::string item;
  std::istringstream in(o.variants);
  while (std::getline(in, item, ','))
    if (!item.empty()) variants.push_back(item);
  std::optional<ModelBundle> bundle;
  if (!o.model.empty()) bundle = load_model(o.model);
  const EvalReport r = evaluate_prequential(records, config, variants, bundle);
  if (!o.out.empty()) write_text(o.out, to_json(r).dump(2) + "\n");
  print_variant_table(r);
  return 0;
}

int cmd_explain_global(const Options& o) {
  const Pipeline p = Pipeline::load_checkpoint(o.model);
  const auto snapshot = p.explanation().learner().snapshot();
  const GlobalExplanation g = explain_global(*snapshot, p.detection().detector().threshold().value());
  if (o.json)
    std::cout << to_json(g, snapshot->feature_names).dump(2) << '\n';
  else
    std::cout << render_text(g);
  return 0;
}

int cmd_features(const Options& o) {
  const auto config = config_or_default(o.config);
  const auto records = read_metropt_csv(o.data);
  const auto cycles = segment_cycles(records, config.windowing.max_cycle_length);
  std::ofstream out(o.out);
  if (!out) fail(Errc::IoError, "cannot open " + o.out);
  write_features_csv(out, FeatureSchema(config.features), cycles, config.features);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Streaming anomaly detection with online rule explanations"};
  app.require_subcommand(1);
  Options o;

  auto* synth = app.add_subcommand("synth", "Generate a synthetic sensor stream with injected faults");
  synth->add_option("--seed", o.seed, "Random seed");
  synth->add_option("--duration", o.duration, "Number of 1 Hz records");
  synth->add_option("--faults", o.faults, "e.g. air_leak:20000-23000:1.0,oil_leak:40000-43000:0.8");
  synth->add_option("--config", o.config, "Config file with a generator section");
  synth->add_option("--truth", o.truth, "Also write per-record ground truth to this CSV");
  synth->add_option("--out", o.out, "Output CSV")->required();

  auto* train = app.add_subcommand("train-detector", "Train the autoencoder and alarm threshold");
  train->add_option("data", o.data, "Sensor CSV")->required();
  train->add_option("--config", o.config, "Pipeline config (JSON)");
  train->add_option("--out", o.out, "Model file")->required();

  auto* run = app.add_subcommand("run", "Run detection and explanation online");
  run->add_option("data", o.data, "Sensor CSV (defaults to data.path in the config)");
  run->add_option("--model", o.model, "Trained model; trains inline when omitted");
  run->add_option("--config", o.config, "Pipeline config (JSON)");
  run->add_option("--out-dir", o.out_dir, "Directory for logs and report");
  run->add_option("--checkpoint", o.checkpoint, "Save pipeline state here at end of input");
  run->add_option("--resume", o.resume, "Resume from a checkpoint, skipping records it already saw");

  auto* eval = app.add_subcommand("evaluate", "Prequential comparison of explainer variants");
  eval->add_option("data", o.data, "Sensor CSV (defaults to data.path in the config)");
  eval->add_option("--variants", o.variants, "Comma-separated: amrules, chebyos");
  eval->add_option("--model", o.model, "Trained model; trains inline when omitted");
  eval->add_option("--config", o.config, "Pipeline config (JSON)");
  eval->add_option("--out", o.out, "Write the JSON report here");

  auto* global = app.add_subcommand("explain-global", "Print the rule set of a pipeline checkpoint");
  global->add_option("--model", o.model, "Pipeline checkpoint written by run --checkpoint")->required();
  global->add_flag("--json", o.json, "Emit JSON instead of text");

  auto* feats = app.add_subcommand("features", "Write per-cycle features as CSV");
  feats->add_option("data", o.data, "Sensor CSV")->required();
  feats->add_option("--config", o.config, "Pipeline config (JSON)");
  feats->add_option("--out", o.out, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*synth) return cmd_synth(o);
    if (*train) return cmd_train(o);
    if (*run) return cmd_run(o);
    if (*eval) return cmd_evaluate(o);
    if (*global) return cmd_explain_global(o);
    if (*feats) return cmd_features(o);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitRuntime;
}
