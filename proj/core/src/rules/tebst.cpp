#include "sxai/rules/tebst.hpp"

#include <cmath>

#include "sxai/core/binary_io.hpp"
#include "sxai/core/error.hpp"

namespace sxai {

void TargetStats::save(BinaryWriter& out) const {
  out.put_f64(n);
  out.put_f64(sum);
  out.put_f64(sum_sq);
}

TargetStats TargetStats::load(BinaryReader& in) {
  TargetStats s;
  s.n = in.get_f64();
  s.sum = in.get_f64();
  s.sum_sq = in.get_f64();
  return s;
}

double round_significant(double value, int digits) {
  if (digits <= 0 || value == 0.0 || !std::isfinite(value)) return value;
  const int magnitude = static_cast<int>(std::floor(std::log10(std::fabs(value))));
  const int decimals = digits - 1 - magnitude;
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

TebstSplitter::TebstSplitter(SplitterConfig config) : config_(config) {}

double TebstSplitter::resolve_key(double v) const {
  if (nodes_.empty() || config_.max_nodes == 0 || nodes_.size() < config_.max_nodes) return v;
  // At capacity: reuse v if it already exists, otherwise the nearest key on
  // the search path (predecessor and successor both lie on it).
  double best = nodes_[0].key;
  std::int32_t i = 0;
  while (i >= 0) {
    const Node& node = nodes_[static_cast<std::size_t>(i)];
    if (node.key == v) return v;
    const double d = std::fabs(node.key - v);
    const double db = std::fabs(best - v);
    if (d < db || (d == db && node.key < best)) best = node.key;
    i = v < node.key ? node.left : node.right;
  }
  return best;
}

void TebstSplitter::insert(double value, double y) {
  if (!std::isfinite(value)) fail(Errc::InvalidValue, "non-finite feature value");
  const double v = resolve_key(round_significant(value, config_.significant_digits));

  if (nodes_.empty()) {
    Node root;
    root.key = v;
    root.le.add(y);
    nodes_.push_back(root);
    return;
  }
  std::size_t i = 0;
  while (true) {
    Node& node = nodes_[i];
    if (v <= node.key) {
      node.le.add(y);
      if (v == node.key) return;
      if (node.left < 0) {
        node.left = static_cast<std::int32_t>(nodes_.size());
        break;
      }
      i = static_cast<std::size_t>(node.left);
    } else {
      node.gt.add(y);
      if (node.right < 0) {
        node.right = static_cast<std::int32_t>(nodes_.size());
        break;
      }
      i = static_cast<std::size_t>(node.right);
    }
  }
  Node leaf;
  leaf.key = v;
  leaf.le.add(y);
  nodes_.push_back(leaf);
}

TargetStats TebstSplitter::total() const {
  if (nodes_.empty()) return {};
  return nodes_[0].le + nodes_[0].gt;
}

std::vector<double> TebstSplitter::keys() const {
  std::vector<double> out;
  out.reserve(nodes_.size());
  std::vector<std::int32_t> stack;
  std::int32_t i = nodes_.empty() ? -1 : 0;
  while (i >= 0 || !stack.empty()) {
    while (i >= 0) {
      stack.push_back(i);
      i = nodes_[static_cast<std::size_t>(i)].left;
    }
    i = stack.back();
    stack.pop_back();
    out.push_back(nodes_[static_cast<std::size_t>(i)].key);
    i = nodes_[static_cast<std::size_t>(i)].right;
  }
  return out;
}

std::optional<SplitCandidate> TebstSplitter::best_split() const {
  if (nodes_.size() < 2) return std::nullopt;
  const TargetStats all = total();

  std::optional<SplitCandidate> best;
  double second = 0.0;

  // In-order walk. `carried` holds the aggregates of every value smaller
  // than the current subtree.
  struct Frame {
    std::int32_t node;
    TargetStats carried;
  };
  std::vector<Frame> stack;
  std::int32_t i = 0;
  TargetStats carried;
  while (i >= 0 || !stack.empty()) {
    while (i >= 0) {
      stack.push_back({i, carried});
      i = nodes_[static_cast<std::size_t>(i)].left;
    }
    const Frame f = stack.back();
    stack.pop_back();
    const Node& node = nodes_[static_cast<std::size_t>(f.node)];
    const TargetStats left = f.carried + node.le;
    if (left.n < all.n) {
      const double merit = sdr(all, left);
      if (!best || merit > best->sdr) {
        if (best) second = std::max(second, best->sdr);
        best = SplitCandidate{node.key, merit, 0.0, left, all - left};
      } else {
        second = std::max(second, merit);
      }
    }
    carried = left;
    i = node.right;
  }
  if (best) best->second_sdr = second;
  return best;
}

std::size_t TebstSplitter::memory_bytes() const noexcept {
  return sizeof(*this) + nodes_.size() * sizeof(Node);
}

void TebstSplitter::save(BinaryWriter& out) const {
  out.put_u32(static_cast<std::uint32_t>(config_.significant_digits));
  out.put_u64(config_.max_nodes);
  out.put_u64(nodes_.size());
  for (const auto& n : nodes_) {
    out.put_f64(n.key);
    n.le.save(out);
    n.gt.save(out);
    out.put_u32(static_cast<std::uint32_t>(n.left));
    out.put_u32(static_cast<std::uint32_t>(n.right));
  }
}

TebstSplitter TebstSplitter::load(BinaryReader& in) {
  SplitterConfig c;
  c.significant_digits = static_cast<int>(in.get_u32());
  c.max_nodes = in.get_u64();
  TebstSplitter t(c);
  const auto count = in.get_count(1u << 26);
  t.nodes_.resize(count);
  for (auto& n : t.nodes_) {
    n.key = in.get_f64();
    n.le = TargetStats::load(in);
    n.gt = TargetStats::load(in);
    n.left = static_cast<std::int32_t>(in.get_u32());
    n.right = static_cast<std::int32_t>(in.get_u32());
    if (n.left >= static_cast<std::int32_t>(count) || n.right >= static_cast<std::int32_t>(count)) {
      fail(Errc::CorruptInput, "splitter child index out of range");
    }
  }
  return t;
}

}  // namespace sxai
