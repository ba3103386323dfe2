#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace sxai {

using Matrix = Eigen::MatrixXd;

/// One timestamped sample of the monitored channels.
struct Observation {
  std::int64_t ts = 0;
  std::vector<double> values;
};

/// Fixed-shape window handed to the autoencoder: rows are time steps, columns
/// are channels.
struct WindowBatch {
  std::uint64_t window_id = 0;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  Matrix data;
  /// Set when the source cycle exceeded the configured cap and was cut short.
  bool truncated = false;
};

/// Uniform index selection of `target` positions out of `length` samples:
/// index j maps to floor(j * length / target).
std::vector<std::size_t> resample_indices(std::size_t length, std::size_t target);

/// Detects compressor-cycle starts: a cycle begins at every 1 -> 0 transition
/// of the COMP signal.
class CycleBoundary {
 public:
  /// Feeds the next COMP value; returns true when it starts a new cycle.
  bool feed(bool comp_on) {
    const bool starts = prev_on_ && !comp_on;
    prev_on_ = comp_on;
    return starts;
  }

  bool previous_on() const noexcept { return prev_on_; }
  void restore(bool prev_on) noexcept { prev_on_ = prev_on; }

 private:
  bool prev_on_ = false;
};

enum class WindowMode { Cycle, Fixed };

struct WindowerConfig {
  WindowMode mode = WindowMode::Cycle;
  std::size_t steps = 60;
  /// Fixed mode only.
  std::size_t stride = 60;
  /// Cycle mode: channel index of the binary COMP signal.
  std::size_t comp_channel = 0;
  /// Cycle mode: longer cycles are truncated and flagged.
  std::size_t max_cycle_length = 4096;
};

/// Turns an ordered observation stream into WindowBatches.
///
/// Cycle mode buffers everything from one COMP 1 -> 0 transition up to the
/// sample before the next and resamples it to `steps` rows. Fixed mode emits
/// a window of `steps` samples every `stride` samples.
class Windower {
 public:
  explicit Windower(WindowerConfig config);

  /// Throws Errc::OutOfOrder on a non-increasing timestamp and
  /// Errc::ShapeError when the channel count changes.
  std::optional<WindowBatch> push(const Observation& obs);

  std::uint64_t truncated_cycles() const noexcept { return truncated_; }

 private:
  WindowBatch build(const std::vector<Observation>& rows, bool truncated);

  WindowerConfig config_;
  CycleBoundary boundary_;
  bool in_cycle_ = false;
  bool overflow_ = false;
  std::vector<Observation> buffer_;
  std::optional<std::int64_t> last_ts_;
  std::size_t channels_ = 0;
  std::size_t since_emit_ = 0;
  std::uint64_t next_id_ = 0;
  std::uint64_t truncated_ = 0;
};

/// Resamples `rows` (each of equal width) into a steps x width matrix.
Matrix resample_rows(const std::vector<std::vector<double>>& rows, std::size_t steps);

}  // namespace sxai
