#pragma once

// Flat `key = value` configuration text. `#` starts a comment; blank lines are
// ignored; later assignments override earlier ones.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "specavg/error.hpp"

namespace specavg {

using ConfigValues = std::map<std::string, std::string, std::less<>>;

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline ConfigValues parse_config(std::istream& is, std::string_view source = "config") {
  ConfigValues out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    std::string_view view(line);
    if (const auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = detail::trim(view);
    if (view.empty()) continue;
    const auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigurationError(std::string(source) + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    const auto key = detail::trim(view.substr(0, eq));
    if (key.empty()) {
      throw ConfigurationError(std::string(source) + ":" + std::to_string(lineno) + ": empty key");
    }
    out.insert_or_assign(std::string(key), std::string(detail::trim(view.substr(eq + 1))));
  }
  return out;
}

inline ConfigValues parse_config_text(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_config(is, "<text>");
}

inline ConfigValues read_config_file(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw IoError("cannot open config '" + path + "'");
  return parse_config(file, path);
}

inline double config_real(std::string_view key, std::string_view text) {
  text = detail::trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw ConfigurationError("key '" + std::string(key) + "': not a number: '" + std::string(text) + "'");
  }
  return v;
}

inline std::uint64_t config_unsigned(std::string_view key, std::string_view text) {
  text = detail::trim(text);
  std::uint64_t v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    // Accept integral values written as reals, e.g. 1e3.
    const double d = config_real(key, text);
    if (!(d >= 0.0) || d != static_cast<double>(static_cast<std::uint64_t>(d))) {
      throw ConfigurationError("key '" + std::string(key) + "': not a non-negative integer: '" +
                               std::string(text) + "'");
    }
    return static_cast<std::uint64_t>(d);
  }
  return v;
}

/// Comma-separated reals.
inline std::vector<double> config_real_list(std::string_view key, std::string_view text) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = detail::trim(text.substr(start, comma - start));
    if (!item.empty()) out.push_back(config_real(key, item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigurationError("key '" + std::string(key) + "': empty list");
  return out;
}

}  // namespace specavg
