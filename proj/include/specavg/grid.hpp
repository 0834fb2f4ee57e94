#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "specavg/error.hpp"

namespace specavg {

/// n equally spaced points from lo to hi inclusive.
inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

/// n logarithmically spaced points from lo to hi inclusive; lo, hi > 0.
inline std::vector<double> geomspace(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > 0.0)) throw ArgumentError("geomspace needs positive bounds");
  auto out = linspace(std::log(lo), std::log(hi), n);
  for (double& v : out) v = std::exp(v);
  if (!out.empty()) {
    out.front() = lo;
    out.back() = hi;
  }
  return out;
}

}  // namespace specavg
