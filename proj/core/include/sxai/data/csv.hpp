#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sxai/data/record.hpp"

namespace sxai {

struct ColumnMapping {
  std::string timestamp = "timestamp";
  /// Canonical sensor name -> header name, for files that rename columns.
  std::map<std::string, std::string> rename;
  /// Channels that may be absent from the header; they read as zero.
  std::set<std::string> optional = {"Flowmeter"};
};

/// Lazy reader for MetroPT-style CSV logs.
///
/// Rows with the wrong arity, unparsable or non-finite numbers, digital
/// values outside {0, 1} or non-increasing timestamps are skipped and
/// counted. Exceeding the error budget throws Errc::CorruptInput; a missing
/// required column throws Errc::SchemaError at construction.
class MetroptReader {
 public:
  explicit MetroptReader(std::istream& in, ColumnMapping mapping = {}, std::size_t error_budget = 1000);

  std::optional<RawRecord> next();
  std::vector<RawRecord> read_all();

  std::size_t rows_read() const noexcept { return rows_; }
  std::size_t rows_skipped() const noexcept { return skipped_; }

 private:
  std::optional<RawRecord> parse(const std::string& line);

  std::istream& in_;
  std::size_t budget_;
  std::size_t columns_ = 0;
  std::size_t ts_column_ = 0;
  /// Column index per channel; npos when the channel is optional and absent.
  std::array<std::size_t, kChannelCount> channel_column_{};
  std::optional<std::int64_t> last_ts_;
  std::size_t rows_ = 0;
  std::size_t skipped_ = 0;
  std::size_t line_no_ = 1;
};

std::vector<RawRecord> read_metropt_csv(const std::string& path, const ColumnMapping& mapping = {},
                                        std::size_t error_budget = 1000);

/// Writes the canonical header and one row per record. Analog values use
/// enough digits to round-trip exactly.
void write_metropt_csv(std::ostream& out, std::span<const RawRecord> records);
void write_metropt_csv(const std::string& path, std::span<const RawRecord> records);

}  // namespace sxai
