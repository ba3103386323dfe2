#include "sxai/data/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "sxai/core/error.hpp"
#include "sxai/core/timestamp.hpp"

namespace sxai {
namespace {

constexpr std::size_t kAbsent = static_cast<std::size_t>(-1);

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '"' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '"' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<double> parse_double(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end != tmp.c_str() + tmp.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::vector<std::string> header_aliases(std::string_view canonical) {
  std::vector<std::string> out{std::string(canonical)};
  if (canonical == "DV_electric") out.emplace_back("DV_eletric");
  if (canonical == "Motor_current") out.emplace_back("Motor_Current");
  return out;
}

}  // namespace

MetroptReader::MetroptReader(std::istream& in, ColumnMapping mapping, std::size_t error_budget)
    : in_(in), budget_(error_budget) {
  std::string header;
  if (!std::getline(in_, header)) fail(Errc::SchemaError, "empty input, expected a header row");
  const auto cols = split(header);
  columns_ = cols.size();
  auto find = [&](const std::vector<std::string>& names) -> std::size_t {
    for (std::size_t i = 0; i < cols.size(); ++i)
      for (const auto& n : names)
        if (trim(cols[i]) == n) return i;
    return kAbsent;
  };
  auto names_for = [&](std::string_view canonical) {
    const auto it = mapping.rename.find(std::string(canonical));
    return it != mapping.rename.end() ? std::vector<std::string>{it->second} : header_aliases(canonical);
  };
  ts_column_ = find({mapping.timestamp});
  if (ts_column_ == kAbsent) fail(Errc::SchemaError, "missing column '" + mapping.timestamp + "'");
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    const std::string_view name = c < kAnalogCount ? kAnalogNames[c] : kDigitalNames[c - kAnalogCount];
    channel_column_[c] = find(names_for(name));
    if (channel_column_[c] == kAbsent && !mapping.optional.contains(std::string(name)))
      fail(Errc::SchemaError, "missing column '" + std::string(name) + "'");
  }
}

std::optional<RawRecord> MetroptReader::parse(const std::string& line) {
  const auto cols = split(line);
  if (cols.size() != columns_) return std::nullopt;
  RawRecord r;
  const auto ts = parse_timestamp(cols[ts_column_]);
  if (!ts) return std::nullopt;
  r.ts = *ts;
  for (std::size_t c = 0; c < kChannelCount; ++c) {
    double v = 0.0;
    if (channel_column_[c] != kAbsent) {
      const auto parsed = parse_double(cols[channel_column_[c]]);
      if (!parsed) return std::nullopt;
      v = *parsed;
    }
    if (c < kAnalogCount) {
      r.analog[c] = v;
    } else {
      if (v != 0.0 && v != 1.0) return std::nullopt;
      r.digital[c - kAnalogCount] = v == 1.0 ? 1 : 0;
    }
  }
  if (last_ts_ && r.ts <= *last_ts_) return std::nullopt;
  return r;
}

std::optional<RawRecord> MetroptReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_no_;
    if (trim(line).empty()) continue;
    auto rec = parse(line);
    if (rec) {
      ++rows_;
      last_ts_ = rec->ts;
      return rec;
    }
    if (++skipped_ > budget_)
      fail(Errc::CorruptInput, "too many malformed rows (last at line " + std::to_string(line_no_) + ")");
  }
  return std::nullopt;
}

std::vector<RawRecord> MetroptReader::read_all() {
  std::vector<RawRecord> out;
  while (auto r = next()) out.push_back(*r);
  return out;
}

std::vector<RawRecord> read_metropt_csv(const std::string& path, const ColumnMapping& mapping,
                                        std::size_t error_budget) {
  std::ifstream in(path);
  if (!in) fail(Errc::IoError, "cannot open " + path);
  MetroptReader reader(in, mapping, error_budget);
  return reader.read_all();
}

void write_metropt_csv(std::ostream& out, std::span<const RawRecord> records) {
  out << "timestamp";
  for (auto n : kAnalogNames) out << ',' << n;
  for (auto n : kDigitalNames) out << ',' << n;
  out << '\n';
  char buf[32];
  for (const auto& r : records) {
    out << format_timestamp(r.ts);
    for (double v : r.analog) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      out << ',' << buf;
    }
    for (auto d : r.digital) out << ',' << static_cast<int>(d);
    out << '\n';
  }
}

void write_metropt_csv(const std::string& path, std::span<const RawRecord> records) {
  std::ofstream out(path);
  if (!out) fail(Errc::IoError, "cannot open " + path + " for writing");
  write_metropt_csv(out, records);
  if (!out) fail(Errc::IoError, "write failed for " + path);
}

}  // namespace sxai
