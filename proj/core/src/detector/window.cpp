#include "sxai/detector/window.hpp"

#include "sxai/core/error.hpp"

namespace sxai {

std::vector<std::size_t> resample_indices(std::size_t length, std::size_t target) {
  if (length == 0 || target == 0) fail(Errc::EmptyInput, "resampling an empty sequence");
  std::vector<std::size_t> idx(target);
  for (std::size_t j = 0; j < target; ++j) idx[j] = j * length / target;
  return idx;
}

Matrix resample_rows(const std::vector<std::vector<double>>& rows, std::size_t steps) {
  if (rows.empty()) fail(Errc::EmptyInput, "resampling an empty window");
  const std::size_t width = rows.front().size();
  Matrix out(static_cast<Eigen::Index>(steps), static_cast<Eigen::Index>(width));
  const auto idx = resample_indices(rows.size(), steps);
  for (std::size_t t = 0; t < steps; ++t) {
    const auto& row = rows[idx[t]];
    if (row.size() != width) fail(Errc::ShapeError, "ragged rows in window");
    for (std::size_t j = 0; j < width; ++j) {
      out(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = row[j];
    }
  }
  return out;
}

Windower::Windower(WindowerConfig config) : config_(config) {
  if (config_.steps == 0) fail(Errc::ConfigError, "window length must be positive");
  if (config_.mode == WindowMode::Fixed && config_.stride == 0) {
    fail(Errc::ConfigError, "window stride must be positive");
  }
  if (config_.max_cycle_length == 0) fail(Errc::ConfigError, "cycle cap must be positive");
}

WindowBatch Windower::build(const std::vector<Observation>& rows, bool truncated) {
  std::vector<std::vector<double>> values;
  values.reserve(rows.size());
  for (const auto& o : rows) values.push_back(o.values);
  WindowBatch w;
  w.window_id = next_id_++;
  w.start_ts = rows.front().ts;
  w.end_ts = rows.back().ts;
  w.data = resample_rows(values, config_.steps);
  w.truncated = truncated;
  if (truncated) ++truncated_;
  return w;
}

std::optional<WindowBatch> Windower::push(const Observation& obs) {
  if (last_ts_ && obs.ts <= *last_ts_) fail(Errc::OutOfOrder, "observation timestamps must increase");
  if (channels_ == 0) {
    channels_ = obs.values.size();
    if (config_.mode == WindowMode::Cycle && config_.comp_channel >= channels_) {
      fail(Errc::ShapeError, "COMP channel index outside observation width");
    }
  } else if (obs.values.size() != channels_) {
    fail(Errc::ShapeError, "observation width changed mid-stream");
  }
  last_ts_ = obs.ts;

  std::optional<WindowBatch> out;
  if (config_.mode == WindowMode::Fixed) {
    buffer_.push_back(obs);
    if (buffer_.size() > config_.steps) buffer_.erase(buffer_.begin());
    ++since_emit_;
    if (since_emit_ >= config_.steps && (since_emit_ - config_.steps) % config_.stride == 0) {
      out = build(buffer_, false);
    }
    return out;
  }

  const bool comp_on = obs.values[config_.comp_channel] > 0.5;
  if (boundary_.feed(comp_on)) {
    if (in_cycle_ && !buffer_.empty()) out = build(buffer_, overflow_);
    buffer_.clear();
    overflow_ = false;
    in_cycle_ = true;
  }
  if (in_cycle_) {
    if (buffer_.size() < config_.max_cycle_length) {
      buffer_.push_back(obs);
    } else {
      overflow_ = true;
    }
  }
  return out;
}

}  // namespace sxai
