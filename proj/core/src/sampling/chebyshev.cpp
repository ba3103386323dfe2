#include "sxai/sampling/chebyshev.hpp"

#include <cmath>
#include <limits>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"

namespace sxai {

double frequency_score(double y, const StreamStats& stats) {
  const double sigma = stats.stddev();
  if (stats.count() < 2 || sigma <= 0.0) return 1.0;
  const double t = std::fabs(y - stats.mean()) / sigma;
  if (t <= 1.0) return 1.0;
  return 1.0 / (t * t);
}

std::uint64_t cheby_k(double y, const StreamStats& stats) {
  const double sigma = stats.stddev();
  if (stats.count() < 2 || sigma <= 0.0) return 1;
  const double k = std::ceil(std::fabs(y - stats.mean()) / sigma);
  if (!(k < 1e18)) return std::numeric_limits<std::uint64_t>::max();
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(k));
}

ChebyshevOversampler::ChebyshevOversampler(std::uint64_t k_max) : k_max_(k_max) {
  if (k_max == 0) fail(Errc::ConfigError, "K_max must be at least 1");
}

OversampleReport ChebyshevOversampler::absorb(double y) {
  stats_.update(y);
  OversampleReport r;
  r.k_uncapped = cheby_k(y, stats_);
  r.capped = r.k_uncapped > k_max_;
  r.k = r.capped ? k_max_ : r.k_uncapped;
  if (r.capped) ++capped_;
  total_ += r.k;
  return r;
}

void ChebyshevOversampler::save(BinaryWriter& out) const {
  stats_.save(out);
  out.put_u64(k_max_);
  out.put_u64(capped_);
  out.put_u64(total_);
}

ChebyshevOversampler ChebyshevOversampler::load(BinaryReader& in) {
  const StreamStats stats = StreamStats::load(in);
  ChebyshevOversampler s(in.get_u64());
  s.stats_ = stats;
  s.capped_ = in.get_u64();
  s.total_ = in.get_u64();
  return s;
}

}  // namespace sxai
