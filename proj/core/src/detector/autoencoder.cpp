#include "sxai/detector/autoencoder.hpp"

#include <algorithm>
#include <cmath>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"
#include "sxai/core/random.hpp"

namespace sxai {
namespace {

using Vector = Eigen::VectorXd;
using MapM = Eigen::Map<Matrix>;
using CMapM = Eigen::Map<const Matrix>;
using MapV = Eigen::Map<Vector>;
using CMapV = Eigen::Map<const Vector>;
using Idx = Eigen::Index;

Idx ix(std::size_t v) { return static_cast<Idx>(v); }

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<std::size_t> decoder_sizes(const std::vector<std::size_t>& encoder) {
  return {encoder.rbegin(), encoder.rend()};
}

struct LstmView {
  std::size_t in, hidden, offset;
  std::size_t wx() const { return offset; }
  std::size_t wh() const { return offset + 4 * hidden * in; }
  std::size_t b() const { return wh() + 4 * hidden * hidden; }
  std::size_t size() const { return 4 * hidden * (in + hidden + 1); }
};

struct LstmCache {
  Matrix x;   // in x T
  Matrix h;   // hidden x (T + 1), column 0 is the initial state
  Matrix c;   // hidden x (T + 1)
  Matrix gi, gf, gg, go, tc;  // hidden x T
};

void lstm_forward(const double* p, const LstmView& L, const Matrix& x, LstmCache& cache) {
  const Idx h = ix(L.hidden);
  const Idx T = x.cols();
  CMapM wx(p + L.wx(), 4 * h, ix(L.in));
  CMapM wh(p + L.wh(), 4 * h, h);
  CMapV b(p + L.b(), 4 * h);

  cache.x = x;
  cache.h = Matrix::Zero(h, T + 1);
  cache.c = Matrix::Zero(h, T + 1);
  cache.gi.resize(h, T);
  cache.gf.resize(h, T);
  cache.gg.resize(h, T);
  cache.go.resize(h, T);
  cache.tc.resize(h, T);

  const Matrix pre_x = wx * x;  // 4h x T
  Vector a(4 * h);
  for (Idx t = 0; t < T; ++t) {
    a.noalias() = pre_x.col(t) + b;
    a.noalias() += wh * cache.h.col(t);
    for (Idx k = 0; k < h; ++k) {
      const double i = sigmoid(a(k));
      const double f = sigmoid(a(h + k));
      const double g = std::tanh(a(2 * h + k));
      const double o = sigmoid(a(3 * h + k));
      const double c = f * cache.c(k, t) + i * g;
      const double tc = std::tanh(c);
      cache.gi(k, t) = i;
      cache.gf(k, t) = f;
      cache.gg(k, t) = g;
      cache.go(k, t) = o;
      cache.tc(k, t) = tc;
      cache.c(k, t + 1) = c;
      cache.h(k, t + 1) = o * tc;
    }
  }
}

// Returns d(loss)/d(x) given d(loss)/d(h_t) for every step; accumulates
// parameter gradients into `grad`.
Matrix lstm_backward(const double* p, double* grad, const LstmView& L, const LstmCache& cache,
                     const Matrix& dh_out) {
  const Idx h = ix(L.hidden);
  const Idx T = cache.x.cols();
  CMapM wx(p + L.wx(), 4 * h, ix(L.in));
  CMapM wh(p + L.wh(), 4 * h, h);
  MapM dwx(grad + L.wx(), 4 * h, ix(L.in));
  MapM dwh(grad + L.wh(), 4 * h, h);
  MapV db(grad + L.b(), 4 * h);

  Matrix da(4 * h, T);
  Vector dh_next = Vector::Zero(h);
  Vector dc_next = Vector::Zero(h);
  for (Idx t = T - 1; t >= 0; --t) {
    for (Idx k = 0; k < h; ++k) {
      const double dh = dh_out(k, t) + dh_next(k);
      const double i = cache.gi(k, t), f = cache.gf(k, t), g = cache.gg(k, t), o = cache.go(k, t);
      const double tc = cache.tc(k, t);
      const double dout = dh * tc;
      const double dc = dc_next(k) + dh * o * (1.0 - tc * tc);
      da(k, t) = dc * g * i * (1.0 - i);
      da(h + k, t) = dc * cache.c(k, t) * f * (1.0 - f);
      da(2 * h + k, t) = dc * i * (1.0 - g * g);
      da(3 * h + k, t) = dout * o * (1.0 - o);
      dc_next(k) = dc * f;
    }
    dh_next.noalias() = wh.transpose() * da.col(t);
  }
  dwx.noalias() += da * cache.x.transpose();
  dwh.noalias() += da * cache.h.leftCols(T).transpose();
  db.noalias() += da.rowwise().sum();
  return wx.transpose() * da;
}

}  // namespace

std::string_view to_string(Architecture a) noexcept {
  return a == Architecture::Lstm ? "lstm" : "dense";
}

Architecture architecture_from_string(std::string_view s) {
  if (s == "lstm") return Architecture::Lstm;
  if (s == "dense") return Architecture::Dense;
  fail(Errc::ConfigError, "unknown architecture '" + std::string(s) + "'");
}

void AEModel::layout() {
  if (shape_.steps == 0 || shape_.features == 0 || shape_.encoder.empty()) {
    fail(Errc::ConfigError, "autoencoder shape has an empty dimension");
  }
  for (auto s : shape_.encoder) {
    if (s == 0) fail(Errc::ConfigError, "autoencoder layer of width 0");
  }
  dense_.clear();
  lstm_.clear();
  std::size_t offset = 0;
  if (shape_.arch == Architecture::Dense) {
    std::vector<std::size_t> dims{shape_.steps * shape_.features};
    dims.insert(dims.end(), shape_.encoder.begin(), shape_.encoder.end());
    for (auto it = shape_.encoder.rbegin() + 1; it != shape_.encoder.rend(); ++it) dims.push_back(*it);
    dims.push_back(shape_.steps * shape_.features);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
      dense_.push_back({dims[l], dims[l + 1], offset});
      offset += dims[l + 1] * (dims[l] + 1);
    }
  } else {
    std::size_t in = shape_.features;
    for (auto hidden : shape_.encoder) {
      lstm_.push_back({in, hidden, offset});
      offset += LstmView{in, hidden, offset}.size();
      in = hidden;
    }
    for (auto hidden : decoder_sizes(shape_.encoder)) {
      lstm_.push_back({in, hidden, offset});
      offset += LstmView{in, hidden, offset}.size();
      in = hidden;
    }
    projection_ = {in, shape_.features, offset};
    offset += shape_.features * (in + 1);
  }
  params_.assign(offset, 0.0);
}

AEModel AEModel::create(const AeShape& shape, std::uint64_t seed) {
  AEModel m;
  m.shape_ = shape;
  m.layout();
  m.norm_mean_.assign(shape.features, 0.0);
  m.norm_std_.assign(shape.features, 1.0);

  Rng rng(seed);
  auto glorot = [&](std::size_t offset, std::size_t count, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (std::size_t k = 0; k < count; ++k) m.params_[offset + k] = rng.uniform(-limit, limit);
  };
  if (shape.arch == Architecture::Dense) {
    for (const auto& l : m.dense_) glorot(l.offset, l.in * l.out, l.in, l.out);
  } else {
    for (const auto& l : m.lstm_) {
      const LstmView v{l.in, l.hidden, l.offset};
      glorot(v.wx(), 4 * l.hidden * l.in, l.in, 4 * l.hidden);
      glorot(v.wh(), 4 * l.hidden * l.hidden, l.hidden, 4 * l.hidden);
      for (std::size_t k = 0; k < l.hidden; ++k) m.params_[v.b() + l.hidden + k] = 1.0;
    }
    glorot(m.projection_.offset, m.projection_.in * m.projection_.out, m.projection_.in,
           m.projection_.out);
  }
  return m;
}

void AEModel::set_normalization(std::vector<double> mean, std::vector<double> stddev) {
  if (mean.size() != shape_.features || stddev.size() != shape_.features) {
    fail(Errc::ShapeError, "normalization vectors do not match feature count");
  }
  for (double s : stddev) {
    if (!(s > 0.0) || !std::isfinite(s)) fail(Errc::InvalidValue, "normalization std must be positive");
  }
  norm_mean_ = std::move(mean);
  norm_std_ = std::move(stddev);
}

Matrix AEModel::normalize(const Matrix& raw) const {
  if (raw.cols() != ix(shape_.features)) fail(Errc::ShapeError, "window has wrong channel count");
  Matrix z = raw;
  for (Idx j = 0; j < z.cols(); ++j) {
    z.col(j).array() = (z.col(j).array() - norm_mean_[j]) / norm_std_[j];
  }
  return z;
}

Matrix AEModel::forward(const Matrix& z) const {
  if (z.rows() != ix(shape_.steps) || z.cols() != ix(shape_.features)) {
    fail(Errc::ShapeError, "window shape does not match the model");
  }
  return shape_.arch == Architecture::Dense ? forward_dense(z) : forward_lstm(z);
}

double AEModel::loss_and_gradient(const Matrix& z, std::span<double> grad) const {
  if (z.rows() != ix(shape_.steps) || z.cols() != ix(shape_.features)) {
    fail(Errc::ShapeError, "window shape does not match the model");
  }
  if (grad.size() != params_.size()) fail(Errc::ShapeError, "gradient buffer has wrong size");
  return shape_.arch == Architecture::Dense ? grad_dense(z, grad) : grad_lstm(z, grad);
}

namespace {

// Time-major flattening: element (t, j) lands at t * features + j.
Vector flatten(const Matrix& z) {
  Vector v(z.size());
  for (Idx t = 0; t < z.rows(); ++t)
    for (Idx j = 0; j < z.cols(); ++j) v(t * z.cols() + j) = z(t, j);
  return v;
}

Matrix unflatten(const Vector& v, Idx rows, Idx cols) {
  Matrix z(rows, cols);
  for (Idx t = 0; t < rows; ++t)
    for (Idx j = 0; j < cols; ++j) z(t, j) = v(t * cols + j);
  return z;
}

}  // namespace

Matrix AEModel::forward_dense(const Matrix& z) const {
  Vector h = flatten(z);
  for (std::size_t l = 0; l < dense_.size(); ++l) {
    const auto& L = dense_[l];
    CMapM w(params_.data() + L.offset, ix(L.out), ix(L.in));
    CMapV b(params_.data() + L.offset + L.in * L.out, ix(L.out));
    Vector a = w * h + b;
    if (l + 1 < dense_.size()) a = a.array().tanh();
    h = std::move(a);
  }
  return unflatten(h, z.rows(), z.cols());
}

double AEModel::grad_dense(const Matrix& z, std::span<double> grad) const {
  const Vector target = flatten(z);
  std::vector<Vector> acts{target};
  for (std::size_t l = 0; l < dense_.size(); ++l) {
    const auto& L = dense_[l];
    CMapM w(params_.data() + L.offset, ix(L.out), ix(L.in));
    CMapV b(params_.data() + L.offset + L.in * L.out, ix(L.out));
    Vector a = w * acts.back() + b;
    if (l + 1 < dense_.size()) a = a.array().tanh();
    acts.push_back(std::move(a));
  }
  const double n = static_cast<double>(target.size());
  const Vector diff = acts.back() - target;
  const double loss = diff.squaredNorm() / n;

  Vector delta = (2.0 / n) * diff;
  for (std::size_t l = dense_.size(); l-- > 0;) {
    const auto& L = dense_[l];
    CMapM w(params_.data() + L.offset, ix(L.out), ix(L.in));
    MapM dw(grad.data() + L.offset, ix(L.out), ix(L.in));
    MapV db(grad.data() + L.offset + L.in * L.out, ix(L.out));
    dw.noalias() += delta * acts[l].transpose();
    db += delta;
    if (l == 0) break;
    Vector back = w.transpose() * delta;
    delta = back.array() * (1.0 - acts[l].array().square());
  }
  return loss;
}

Matrix AEModel::forward_lstm(const Matrix& z) const {
  const Idx T = ix(shape_.steps);
  const std::size_t n_enc = shape_.encoder.size();
  Matrix x = z.transpose();
  LstmCache cache;
  for (std::size_t l = 0; l < lstm_.size(); ++l) {
    const auto& L = lstm_[l];
    lstm_forward(params_.data(), {L.in, L.hidden, L.offset}, x, cache);
    if (l + 1 == n_enc) {
      const Vector latent = cache.h.col(T);
      x = latent.replicate(1, T);
    } else {
      x = cache.h.rightCols(T);
    }
  }
  CMapM pw(params_.data() + projection_.offset, ix(projection_.out), ix(projection_.in));
  CMapV pb(params_.data() + projection_.offset + projection_.in * projection_.out, ix(projection_.out));
  Matrix out = pw * x;
  out.colwise() += pb;
  return out.transpose();
}

double AEModel::grad_lstm(const Matrix& z, std::span<double> grad) const {
  const Idx T = ix(shape_.steps);
  const std::size_t n_enc = shape_.encoder.size();
  const Matrix target = z.transpose();  // features x T

  std::vector<LstmCache> caches(lstm_.size());
  Matrix x = target;
  for (std::size_t l = 0; l < lstm_.size(); ++l) {
    const auto& L = lstm_[l];
    lstm_forward(params_.data(), {L.in, L.hidden, L.offset}, x, caches[l]);
    if (l + 1 == n_enc) {
      const Vector latent = caches[l].h.col(T);
      x = latent.replicate(1, T);
    } else {
      x = caches[l].h.rightCols(T);
    }
  }
  CMapM pw(params_.data() + projection_.offset, ix(projection_.out), ix(projection_.in));
  CMapV pb(params_.data() + projection_.offset + projection_.in * projection_.out, ix(projection_.out));
  Matrix out = pw * x;
  out.colwise() += pb;

  const double n = static_cast<double>(target.size());
  const Matrix diff = out - target;
  const double loss = diff.squaredNorm() / n;
  const Matrix dout = (2.0 / n) * diff;

  MapM dpw(grad.data() + projection_.offset, ix(projection_.out), ix(projection_.in));
  MapV dpb(grad.data() + projection_.offset + projection_.in * projection_.out, ix(projection_.out));
  dpw.noalias() += dout * x.transpose();
  dpb += dout.rowwise().sum();

  Matrix dh = pw.transpose() * dout;
  for (std::size_t l = lstm_.size(); l-- > 0;) {
    const auto& L = lstm_[l];
    if (l + 1 == n_enc) {
      // The repeated latent vector fans out to every step; its gradient is
      // the sum, and only the last encoder step receives it.
      const Vector dlatent = dh.rowwise().sum();
      dh = Matrix::Zero(ix(L.hidden), T);
      dh.col(T - 1) = dlatent;
    }
    dh = lstm_backward(params_.data(), grad.data(), {L.in, L.hidden, L.offset}, caches[l], dh);
  }
  return loss;
}

Reconstruction AEModel::reconstruct(const WindowBatch& w) const {
  if (w.data.rows() != ix(shape_.steps) || w.data.cols() != ix(shape_.features)) {
    fail(Errc::ShapeError, "window shape does not match the model");
  }
  Reconstruction r;
  const Matrix z = normalize(w.data);
  r.output = forward(z);
  r.re = reconstruction_error(z, r.output);
  r.rms_re = std::sqrt(r.re);
  return r;
}

void AEModel::save(BinaryWriter& out) const {
  out.put_u8(static_cast<std::uint8_t>(shape_.arch));
  out.put_u64(shape_.steps);
  out.put_u64(shape_.features);
  out.put_u64(shape_.encoder.size());
  for (auto s : shape_.encoder) out.put_u64(s);
  out.put_f64s(params_);
  out.put_f64s(norm_mean_);
  out.put_f64s(norm_std_);
}

AEModel AEModel::load(BinaryReader& in) {
  AEModel m;
  const auto tag = in.get_u8();
  if (tag > 1) fail(Errc::CorruptInput, "unknown architecture tag");
  m.shape_.arch = static_cast<Architecture>(tag);
  m.shape_.steps = in.get_count(1 << 20);
  m.shape_.features = in.get_count(1 << 20);
  const auto layers = in.get_count(64);
  m.shape_.encoder.resize(layers);
  for (auto& s : m.shape_.encoder) s = in.get_count(1 << 20);
  m.layout();
  auto params = in.get_f64s();
  if (params.size() != m.params_.size()) fail(Errc::CorruptInput, "parameter count mismatch");
  m.params_ = std::move(params);
  m.norm_mean_ = in.get_f64s();
  m.norm_std_ = in.get_f64s();
  if (m.norm_mean_.size() != m.shape_.features || m.norm_std_.size() != m.shape_.features) {
    fail(Errc::CorruptInput, "normalization vector size mismatch");
  }
  return m;
}

double reconstruction_error(const Matrix& z, const Matrix& z_hat) {
  if (z.rows() != z_hat.rows() || z.cols() != z_hat.cols()) fail(Errc::ShapeError, "shape mismatch");
  if (z.size() == 0) fail(Errc::EmptyInput, "empty window");
  return (z - z_hat).squaredNorm() / static_cast<double>(z.size());
}

double rms_re(std::span<const double> squared_errors) {
  if (squared_errors.empty()) fail(Errc::EmptyInput, "rms of empty error vector");
  double sum = 0.0;
  for (double e : squared_errors) sum += e;
  return std::sqrt(sum / static_cast<double>(squared_errors.size()));
}

}  // namespace sxai
