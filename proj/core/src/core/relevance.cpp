#include "sxai/core/relevance.hpp"

#include <algorithm>
#include <cmath>

#include "sxai/core/error.hpp"

namespace sxai {

RelevanceFunction RelevanceFunction::from_boxplot(const BoxplotSummary& box) {
  if (!(box.min <= box.median && box.median <= box.upper_adjacent)) {
    fail(Errc::InvalidValue, "boxplot summary is not ordered");
  }
  if (box.median == box.upper_adjacent) {
    fail(Errc::DegenerateDistribution, "median equals upper adjacent value");
  }
  return interpolate({{box.min, 0.0, 0.0}, {box.median, 0.0, 0.0}, {box.upper_adjacent, 1.0, 0.0}});
}

RelevanceFunction RelevanceFunction::from_boxplot_or_step(const BoxplotSummary& box) {
  if (box.median == box.upper_adjacent) return step(box.median);
  return from_boxplot(box);
}

RelevanceFunction RelevanceFunction::interpolate(std::vector<ControlPoint> knots) {
  if (knots.empty()) fail(Errc::EmptyInput, "relevance function needs at least one knot");

  // Collapse knots sharing a y value, keeping the highest relevance.
  std::vector<ControlPoint> pts;
  pts.reserve(knots.size());
  for (const auto& k : knots) {
    if (!std::isfinite(k.y) || !(k.relevance >= 0.0 && k.relevance <= 1.0)) {
      fail(Errc::InvalidValue, "relevance knot out of domain");
    }
    if (!pts.empty() && k.y < pts.back().y) fail(Errc::InvalidValue, "relevance knots not sorted");
    if (!pts.empty() && k.relevance < pts.back().relevance) {
      fail(Errc::InvalidValue, "relevance knots not monotone");
    }
    if (!pts.empty() && k.y == pts.back().y) {
      pts.back().relevance = std::max(pts.back().relevance, k.relevance);
    } else {
      pts.push_back(k);
    }
  }

  RelevanceFunction f;
  if (pts.size() == 1) {
    f.kind_ = Kind::Constant;
    f.constant_ = pts.front().relevance;
    pts.front().slope = 0.0;
    f.knots_ = std::move(pts);
    return f;
  }

  const std::size_t n = pts.size();
  std::vector<double> secant(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    secant[k] = (pts[k + 1].relevance - pts[k].relevance) / (pts[k + 1].y - pts[k].y);
  }

  pts[0].slope = secant[0];
  pts[n - 1].slope = secant[n - 2];
  for (std::size_t k = 1; k + 1 < n; ++k) {
    pts[k].slope = (secant[k - 1] * secant[k] <= 0.0) ? 0.0 : 0.5 * (secant[k - 1] + secant[k]);
  }

  // Fritsch-Carlson limiter: keep (alpha, beta) inside the radius-3 circle.
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (secant[k] == 0.0) {
      pts[k].slope = 0.0;
      pts[k + 1].slope = 0.0;
      continue;
    }
    const double a = pts[k].slope / secant[k];
    const double b = pts[k + 1].slope / secant[k];
    const double r2 = a * a + b * b;
    if (r2 > 9.0) {
      const double tau = 3.0 / std::sqrt(r2);
      pts[k].slope = tau * a * secant[k];
      pts[k + 1].slope = tau * b * secant[k];
    }
  }

  f.kind_ = Kind::Hermite;
  f.knots_ = std::move(pts);
  return f;
}

RelevanceFunction RelevanceFunction::step(double at) {
  RelevanceFunction f;
  f.kind_ = Kind::Step;
  f.step_at_ = at;
  f.knots_ = {{at, 1.0, 0.0}};
  return f;
}

RelevanceFunction RelevanceFunction::constant(double value) {
  if (!(value >= 0.0 && value <= 1.0)) fail(Errc::InvalidValue, "constant relevance outside [0,1]");
  RelevanceFunction f;
  f.kind_ = Kind::Constant;
  f.constant_ = value;
  return f;
}

double RelevanceFunction::operator()(double y) const {
  switch (kind_) {
    case Kind::Constant:
      return constant_;
    case Kind::Step:
      return y >= step_at_ ? 1.0 : 0.0;
    case Kind::Hermite:
      break;
  }
  if (y <= knots_.front().y) return knots_.front().relevance;
  if (y >= knots_.back().y) return knots_.back().relevance;

  const auto it = std::upper_bound(knots_.begin(), knots_.end(), y,
                                   [](double v, const ControlPoint& p) { return v < p.y; });
  const ControlPoint& hi = *it;
  const ControlPoint& lo = *(it - 1);
  const double h = hi.y - lo.y;
  const double t = (y - lo.y) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double v = h00 * lo.relevance + h10 * h * lo.slope + h01 * hi.relevance + h11 * h * hi.slope;
  return std::clamp(v, lo.relevance, hi.relevance);
}

}  // namespace sxai
