#pragma once

// CSV datasets: header `abscissa,<column>...`, one row per grid point, numbers
// in scientific notation with 17 significant digits, LF line endings.

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "specavg/averaging.hpp"
#include "specavg/error.hpp"

namespace specavg {

inline std::string format_number(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

inline double parse_number(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
    text.remove_suffix(1);
  }
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ArgumentError("not a number: '" + std::string(text) + "'");
  }
  return v;
}

/// Throws ArgumentError unless every curve has the abscissa of the first.
inline void check_shared_grid(const std::vector<StatisticCurve>& curves) {
  if (curves.empty()) throw ArgumentError("no curves to write");
  const auto& grid = curves.front().abscissa;
  for (const auto& c : curves) {
    if (c.mean.size() != c.abscissa.size()) {
      throw ArgumentError("curve " + c.column_name() + " has mismatched array lengths");
    }
    if (c.abscissa != grid) {
      throw ArgumentError("curve " + c.column_name() + " does not share the abscissa grid of " +
                          curves.front().column_name());
    }
  }
}

inline void write_csv(std::ostream& os, const std::vector<StatisticCurve>& curves) {
  check_shared_grid(curves);
  std::string out = "abscissa";
  for (const auto& c : curves) {
    out += ',';
    out += c.column_name();
  }
  out += '\n';
  const auto& grid = curves.front().abscissa;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out += format_number(grid[i]);
    for (const auto& c : curves) {
      out += ',';
      out += format_number(c.mean[i]);
    }
    out += '\n';
  }
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
}

inline void emit_csv(const std::vector<StatisticCurve>& curves, const std::string& path) {
  check_shared_grid(curves);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  write_csv(file, curves);
  file.flush();
  if (!file) throw IoError("write to '" + path + "' failed");
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> columns;  // columns[0] is the abscissa

  const std::vector<double>& column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (header[i] == name) return columns[i];
    }
    throw ArgumentError("no column '" + std::string(name) + "'");
  }
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace detail

inline CsvTable parse_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw ArgumentError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  for (auto f : detail::split_fields(line)) table.header.emplace_back(f);
  table.columns.resize(table.header.size());
  std::size_t row = 1;
  while (std::getline(is, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = detail::split_fields(line);
    if (fields.size() != table.header.size()) {
      throw ArgumentError("CSV row " + std::to_string(row) + " has " +
                          std::to_string(fields.size()) + " fields");
    }
    for (std::size_t i = 0; i < fields.size(); ++i) table.columns[i].push_back(parse_number(fields[i]));
  }
  return table;
}

inline CsvTable read_csv(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "'");
  return parse_csv(file);
}

}  // namespace specavg
