#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/boxplot.hpp"
#include "sxai/core/error.hpp"
#include "sxai/detector/autoencoder.hpp"
#include "sxai/detector/detector.hpp"
#include "sxai/detector/training.hpp"
#include "sxai/detector/window.hpp"
#include "support/oracles.hpp"

namespace sxai {
namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no sxai::Error thrown";
  return Errc::IoError;
}

// Straightforward forward pass written independently of the library: plain
// loops over the flat parameter vector (column-major weight blocks).
struct OracleNet {
  const std::vector<double>& p;

  double w(std::size_t off, std::size_t rows, std::size_t r, std::size_t c) const {
    return p[off + c * rows + r];
  }

  static double sig(double x) { return 1.0 / (1.0 + std::exp(-x)); }

  // Returns the hidden sequence (T x hidden) and the layer's parameter count.
  std::vector<std::vector<double>> lstm(std::size_t off, std::size_t in, std::size_t hid,
                                        const std::vector<std::vector<double>>& x) const {
    const std::size_t wh = off + 4 * hid * in, b = wh + 4 * hid * hid;
    std::vector<double> h(hid, 0.0), c(hid, 0.0);
    std::vector<std::vector<double>> out;
    for (const auto& xt : x) {
      std::vector<double> a(4 * hid);
      for (std::size_t g = 0; g < 4 * hid; ++g) {
        double s = p[b + g];
        for (std::size_t k = 0; k < in; ++k) s += w(off, 4 * hid, g, k) * xt[k];
        for (std::size_t k = 0; k < hid; ++k) s += w(wh, 4 * hid, g, k) * h[k];
        a[g] = s;
      }
      for (std::size_t k = 0; k < hid; ++k) {
        const double i = sig(a[k]), f = sig(a[hid + k]), gg = std::tanh(a[2 * hid + k]),
                     o = sig(a[3 * hid + k]);
        c[k] = f * c[k] + i * gg;
        h[k] = o * std::tanh(c[k]);
      }
      out.push_back(h);
    }
    return out;
  }

  Matrix run_lstm(const AeShape& s, const Matrix& z) const {
    std::vector<std::vector<double>> x(s.steps, std::vector<double>(s.features));
    for (std::size_t t = 0; t < s.steps; ++t)
      for (std::size_t j = 0; j < s.features; ++j) x[t][j] = z(t, j);
    std::size_t off = 0, in = s.features;
    std::vector<std::size_t> sizes = s.encoder;
    sizes.insert(sizes.end(), s.encoder.rbegin(), s.encoder.rend());
    for (std::size_t l = 0; l < sizes.size(); ++l) {
      auto h = lstm(off, in, sizes[l], x);
      off += 4 * sizes[l] * (in + sizes[l] + 1);
      in = sizes[l];
      if (l + 1 == s.encoder.size()) {
        x.assign(s.steps, h.back());
      } else {
        x = h;
      }
    }
    Matrix out(s.steps, s.features);
    for (std::size_t t = 0; t < s.steps; ++t)
      for (std::size_t j = 0; j < s.features; ++j) {
        double v = p[off + s.features * in + j];
        for (std::size_t k = 0; k < in; ++k) v += w(off, s.features, j, k) * x[t][k];
        out(t, j) = v;
      }
    return out;
  }

  Matrix run_dense(const AeShape& s, const Matrix& z) const {
    std::vector<double> h;
    for (std::size_t t = 0; t < s.steps; ++t)
      for (std::size_t j = 0; j < s.features; ++j) h.push_back(z(t, j));
    std::vector<std::size_t> dims{s.steps * s.features};
    dims.insert(dims.end(), s.encoder.begin(), s.encoder.end());
    dims.insert(dims.end(), s.encoder.rbegin() + 1, s.encoder.rend());
    dims.push_back(s.steps * s.features);
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      std::vector<double> a(dims[l + 1]);
      for (std::size_t r = 0; r < dims[l + 1]; ++r) {
        double v = p[off + dims[l] * dims[l + 1] + r];
        for (std::size_t c = 0; c < dims[l]; ++c) v += w(off, dims[l + 1], r, c) * h[c];
        a[r] = l + 2 < dims.size() ? std::tanh(v) : v;
      }
      off += dims[l + 1] * (dims[l] + 1);
      h = a;
    }
    Matrix out(s.steps, s.features);
    for (std::size_t t = 0; t < s.steps; ++t)
      for (std::size_t j = 0; j < s.features; ++j) out(t, j) = h[t * s.features + j];
    return out;
  }
};

TEST(Autoencoder, GradientDenseMatchesFiniteDifferences) {
  const AeShape s{Architecture::Dense, 4, 2, {3, 2}};
  const auto m = AEModel::create(s, 1);
  EXPECT_LT(oracle::max_relative_gradient_error(m, oracle::random_matrix(4, 2, 2)), 1e-4);
}

TEST(Autoencoder, GradientLstmMatchesFiniteDifferences) {
  const AeShape s{Architecture::Lstm, 4, 2, {3, 2}};
  auto m = AEModel::create(s, 3);
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (auto& p : m.params()) p += u(gen);
  EXPECT_LT(oracle::max_relative_gradient_error(m, oracle::random_matrix(4, 2, 5)), 1e-4);
}

TEST(Autoencoder, ForwardMatchesOracle) {
  for (auto arch : {Architecture::Dense, Architecture::Lstm}) {
    const AeShape s{arch, 6, 3, {5, 2}};
    auto m = AEModel::create(s, 9);
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    for (auto& p : m.params()) p += u(gen);
    const std::vector<double> params(m.params().begin(), m.params().end());
    const Matrix z = oracle::random_matrix(6, 3, 11);
    const OracleNet oracle{params};
    const Matrix expected = arch == Architecture::Dense ? oracle.run_dense(s, z) : oracle.run_lstm(s, z);
    EXPECT_LT((m.forward(z) - expected).cwiseAbs().maxCoeff(), 1e-9) << to_string(arch);
  }
}

TEST(Autoencoder, ZeroWeightsReconstructZero) {
  for (auto arch : {Architecture::Dense, Architecture::Lstm}) {
    AEModel m = AEModel::create({arch, 5, 2, {4, 2}}, 1);
    std::fill(m.params().begin(), m.params().end(), 0.0);
    WindowBatch w;
    w.data = oracle::random_matrix(5, 2, 3);
    const auto r = m.reconstruct(w);
    EXPECT_EQ(r.output.cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(r.re, w.data.squaredNorm() / 10.0, 1e-12);
  }
}

TEST(Autoencoder, ReconstructionErrorBasics) {
  const Matrix x = Matrix::Constant(3, 2, 1.0);
  EXPECT_EQ(reconstruction_error(x, x), 0.0);
  EXPECT_EQ(reconstruction_error(x, Matrix::Zero(3, 2)), 1.0);
  EXPECT_EQ(rms_re(std::vector<double>{4, 4, 4}), 2.0);
  EXPECT_EQ(rms_re(std::vector<double>{9}), 3.0);
  EXPECT_EQ(code_of([] { rms_re(std::vector<double>{}); }), Errc::EmptyInput);
  std::vector<double> v{0.5, 1.5, 2.25, 0.0};
  EXPECT_NEAR(rms_re(v), std::sqrt((0.5 + 1.5 + 2.25) / 4.0), 1e-15);
}

TEST(Autoencoder, ShapeMismatch) {
  const AEModel m = AEModel::create({Architecture::Dense, 4, 2, {3}}, 1);
  WindowBatch w;
  w.data = Matrix::Zero(4, 3);
  EXPECT_EQ(code_of([&] { m.reconstruct(w); }), Errc::ShapeError);
}

TEST(Training, ConstantWindowsAreLearned) {
  for (auto arch : {Architecture::Dense, Architecture::Lstm}) {
    const AeShape s{arch, 6, 2, {4, 2}};
    std::vector<WindowBatch> windows(16);
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (auto& w : windows) {
      w.data.resize(6, 2);
      w.data.col(0).setConstant(3.0 + nd(gen));
      w.data.col(1).setConstant(-1.0 + nd(gen));
    }
    TrainConfig tc;
    tc.epochs = 300;
    tc.learning_rate = 1e-2;
    const auto result = ae_train(windows, s, tc);
    EXPECT_LT(result.epoch_loss.back(), result.epoch_loss.front());

    std::vector<WindowBatch> constant(8);
    for (auto& w : constant) {
      w.data = Matrix::Constant(6, 2, 2.0);
      w.data.col(1).setConstant(5.0);
    }
    const auto flat = ae_train(constant, s, tc);
    EXPECT_LT(flat.model.reconstruct(constant[0]).re, 1e-3) << to_string(arch);
  }
}

TEST(Training, Deterministic) {
  const AeShape s{Architecture::Dense, 4, 2, {3}};
  std::vector<WindowBatch> windows(10);
  for (std::size_t i = 0; i < windows.size(); ++i) windows[i].data = oracle::random_matrix(4, 2, i);
  TrainConfig tc;
  tc.epochs = 5;
  EXPECT_EQ(ae_train(windows, s, tc).model, ae_train(windows, s, tc).model);
  tc.min_train_windows = 20;
  EXPECT_EQ(code_of([&] { ae_train(windows, s, tc); }), Errc::InsufficientData);
}

TEST(Window, ResampleIndices) {
  const auto idx = resample_indices(120, 60);
  ASSERT_EQ(idx.size(), 60u);
  for (std::size_t j = 0; j < idx.size(); ++j) EXPECT_EQ(idx[j], 2 * j);
  const auto up = resample_indices(3, 6);
  EXPECT_EQ(up, (std::vector<std::size_t>{0, 0, 1, 1, 2, 2}));
}

std::vector<Observation> comp_trace(std::initializer_list<int> comp) {
  std::vector<Observation> obs;
  std::int64_t t = 0;
  for (int c : comp) obs.push_back({t++, {static_cast<double>(c), static_cast<double>(t)}});
  return obs;
}

TEST(Window, CycleBoundaries) {
  WindowerConfig cfg;
  cfg.steps = 4;
  Windower win(cfg);
  std::vector<WindowBatch> out;
  for (const auto& o : comp_trace({1, 1, 0, 0, 1, 1, 0})) {
    if (auto w = win.push(o)) out.push_back(*w);
  }
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].start_ts, 2);
  EXPECT_EQ(out[0].end_ts, 5);
}

TEST(Window, FixedCount) {
  WindowerConfig cfg;
  cfg.mode = WindowMode::Fixed;
  cfg.steps = 3;
  cfg.stride = 3;
  Windower win(cfg);
  int n = 0;
  for (std::int64_t t = 0; t < 9; ++t) n += win.push({t, {0.0}}).has_value();
  EXPECT_EQ(n, 3);
}

TEST(Window, OutOfOrder) {
  Windower win({});
  win.push({5, {1.0}});
  EXPECT_EQ(code_of([&] { win.push({5, {1.0}}); }), Errc::OutOfOrder);
}

TEST(Threshold, InitFromQuantiles) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  EXPECT_DOUBLE_EQ(threshold_init(v), 223.75);
  EXPECT_EQ(threshold_init(std::vector<double>(10, 0.7)), 0.7);
  EXPECT_EQ(code_of([] { threshold_init(std::vector<double>{1, 2, 3}); }), Errc::InsufficientData);
}

TEST(Threshold, Update) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  AlarmThreshold thr(v, 1000);
  const double before = thr.value();
  thr.update(1e6, false);
  EXPECT_EQ(thr.value(), before);
  thr.update(50.0, true);
  auto all = v;
  all.push_back(50.0);
  EXPECT_DOUBLE_EQ(thr.value(), upper_fence(all, 3.0));

  AlarmThreshold flat(std::vector<double>(8, 2.5), 8);
  flat.update(2.5, true);
  EXPECT_EQ(flat.value(), 2.5);
  EXPECT_EQ(flat.history().size(), 8u);
}

TEST(LowPass, ClosedForms) {
  LowPassFilter id(1.0);
  EXPECT_EQ(id.apply(3.0), 3.0);
  EXPECT_EQ(id.apply(-1.0), -1.0);
  LowPassFilter c(0.3);
  for (int i = 0; i < 5; ++i) EXPECT_EQ(c.apply(4.0), 4.0);
  LowPassFilter step(0.3);
  step.apply(0.0);
  double f = 0.0;
  for (int i = 0; i < 3; ++i) f = step.apply(1.0);
  EXPECT_NEAR(f, 1.0 - std::pow(0.7, 3), 1e-15);
  EXPECT_NEAR(f, 0.657, 1e-12);
}

std::vector<bool> alarms_for(std::uint32_t k, const std::vector<double>& seq) {
  PersistenceGate gate(k);
  std::vector<bool> out;
  for (double x : seq) {
    bool alarm = false;
    gate.decide(x, 1.0, alarm);
    out.push_back(alarm);
  }
  return out;
}

TEST(Persistence, Gate) {
  EXPECT_EQ(alarms_for(2, {0, 2, 2}), (std::vector<bool>{false, false, true}));
  EXPECT_EQ(alarms_for(2, {2, 0, 2, 0, 2, 0}), std::vector<bool>(6, false));
  EXPECT_EQ(alarms_for(1, {2, 0, 2}), (std::vector<bool>{true, false, true}));
}

TEST(Detector, ModelFileRoundTripAndDamage) {
  ModelBundle b;
  b.model = AEModel::create({Architecture::Lstm, 5, 3, {4, 2}}, 2);
  b.threshold = AlarmThreshold(std::vector<double>{1, 2, 3, 4, 5}, 10);
  b.features = {{"a", "b"}, {0.5, 1.5}, {1.0, 2.0}};
  b.config_echo = "{}";
  const auto path = (std::filesystem::temp_directory_path() / "sxai_detector_model.sxae").string();
  save_model(path, b);
  EXPECT_EQ(load_model(path), b);

  std::vector<std::uint8_t> raw;
  {
    std::ifstream in(path, std::ios::binary);
    raw.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  auto write_raw = [&](const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  };

  auto damaged = raw;
  damaged[0] = 'X';
  write_raw(damaged);
  EXPECT_EQ(code_of([&] { load_model(path); }), Errc::ChecksumError);

  damaged = raw;
  damaged[raw.size() / 2] ^= 0x5a;
  write_raw(damaged);
  EXPECT_EQ(code_of([&] { load_model(path); }), Errc::ChecksumError);

  // A well-formed file from a different format version.
  damaged = raw;
  damaged[4] = 9;
  BinaryWriter trailer;
  trailer.put_u64(fnv1a64(std::span<const std::uint8_t>(damaged.data(), damaged.size() - 8)));
  std::copy(trailer.bytes().begin(), trailer.bytes().end(), damaged.end() - 8);
  write_raw(damaged);
  EXPECT_EQ(code_of([&] { load_model(path); }), Errc::VersionError);
  std::filesystem::remove(path);
}

TEST(Detector, ThresholdIgnoresAbnormalWindows) {
  AEModel m = AEModel::create({Architecture::Dense, 2, 1, {1}}, 1);
  std::fill(m.params().begin(), m.params().end(), 0.0);
  DetectorConfig cfg;
  cfg.persistence = 1;
  cfg.filter_alpha = 1.0;
  Detector det(m, AlarmThreshold(std::vector<double>{1, 1, 1, 1}, 100), cfg);
  WindowBatch w;
  w.data = Matrix::Constant(2, 1, 5.0);
  const auto d = det.process(w);
  EXPECT_TRUE(d.abnormal);
  ASSERT_TRUE(d.alarm.has_value());
  EXPECT_EQ(d.score, 5.0);
  EXPECT_EQ(det.threshold().value(), 1.0);
  w.data.setConstant(1.0);
  const auto n = det.process(w);
  EXPECT_FALSE(n.abnormal);
  EXPECT_EQ(det.threshold().history().size(), 5u);
}

}  // namespace
}  // namespace sxai
