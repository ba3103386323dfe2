#include "sxai/core/metrics.hpp"

#include <cmath>
#include <vector>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/boxplot.hpp"
#include "sxai/core/error.hpp"

namespace sxai {

MetricWindow::MetricWindow(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) fail(Errc::InvalidValue, "metric window capacity must be positive");
}

void MetricWindow::push(double y, double y_hat) {
  if (entries_.size() == capacity_) entries_.pop_front();
  entries_.push_back({y, y_hat});
}

RelevanceFunction MetricWindow::relevance() const {
  if (entries_.empty()) fail(Errc::EmptyInput, "relevance of empty window");
  std::vector<double> ys;
  ys.reserve(entries_.size());
  for (const auto& e : entries_) ys.push_back(e.y);
  return RelevanceFunction::from_boxplot_or_step(boxplot_summary(ys));
}

void MetricWindow::save(BinaryWriter& out) const {
  out.put_u64(capacity_);
  out.put_u64(entries_.size());
  for (const auto& e : entries_) {
    out.put_f64(e.y);
    out.put_f64(e.y_hat);
  }
}

MetricWindow MetricWindow::load(BinaryReader& in) {
  MetricWindow w(in.get_count());
  const auto n = in.get_count(w.capacity_);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double y = in.get_f64();
    const double y_hat = in.get_f64();
    w.entries_.push_back({y, y_hat});
  }
  return w;
}

double rmse(const MetricWindow& window) {
  if (window.empty()) fail(Errc::EmptyInput, "rmse of empty window");
  double sum = 0.0;
  for (const auto& e : window.entries()) {
    const double d = e.y - e.y_hat;
    sum += d * d;
  }
  return std::sqrt(sum / static_cast<double>(window.size()));
}

std::optional<double> rmse_phi(const MetricWindow& window, const RelevanceFunction& phi,
                               double t_phi, PhiWeighting weighting) {
  if (window.empty()) fail(Errc::EmptyInput, "rmse_phi of empty window");
  if (!(t_phi >= 0.0 && t_phi <= 1.0)) fail(Errc::InvalidValue, "t_phi outside [0,1]");

  double sum = 0.0;
  std::size_t selected = 0;
  for (const auto& e : window.entries()) {
    const double rel = phi(e.y);
    if (weighting == PhiWeighting::Thresholded && rel < t_phi) continue;
    const double d = e.y - e.y_hat;
    sum += rel * (d * d);
    ++selected;
  }
  if (weighting == PhiWeighting::Thresholded && selected == 0) return std::nullopt;
  return std::sqrt(sum / static_cast<double>(selected));
}

}  // namespace sxai
