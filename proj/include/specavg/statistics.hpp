#pragma once

// Sample (single-spectrum) statistics on an unfolded spectrum.

#include <cmath>
#include <mutex>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "specavg/error.hpp"
#include "specavg/spectrum.hpp"

namespace specavg {

enum class StatisticKind {
  iv,             // interval number variance
  gv,             // global number variance
  sr,             // spectral rigidity at finite width
  saturation_sr,  // spectral rigidity at a saturating width
  cfss,           // staircase correlation at the window edges
  fluctuation,    // staircase deviation N(x) - x
};

constexpr std::string_view kind_name(StatisticKind k) noexcept {
  switch (k) {
    case StatisticKind::iv: return "iv";
    case StatisticKind::gv: return "gv";
    case StatisticKind::sr: return "sr";
    case StatisticKind::saturation_sr: return "sat_sr";
    case StatisticKind::cfss: return "cfss";
    case StatisticKind::fluctuation: return "fluct";
  }
  return "?";
}

/// Interval [center - width/2, center + width/2] of unfolded energy.
struct Window {
  double center = 0.0;
  double width = 0.0;

  constexpr double lo() const noexcept { return center - 0.5 * width; }
  constexpr double hi() const noexcept { return center + 0.5 * width; }
};

/// Collects non-fatal warnings; safe to share between worker threads.
class Diagnostics {
 public:
  void warn(std::string message) {
    std::lock_guard lock(mutex_);
    if (warnings_.size() < kMaxKept) warnings_.push_back(std::move(message));
    ++count_;
  }
  std::vector<std::string> warnings() const {
    std::lock_guard lock(mutex_);
    return warnings_;
  }
  std::size_t count() const {
    std::lock_guard lock(mutex_);
    return count_;
  }

 private:
  static constexpr std::size_t kMaxKept = 64;
  mutable std::mutex mutex_;
  std::vector<std::string> warnings_;
  std::size_t count_ = 0;
};

/// sigma(eps, E) = (N(eps + E/2) - N(eps - E/2) - E)^2
inline double sample_iv(const UnfoldedSpectrum& spec, Window w) {
  if (w.width < 0.0) throw ArgumentError("window width must be non-negative");
  const double n = static_cast<double>(spec.staircase(w.hi())) -
                   static_cast<double>(spec.staircase(w.lo()));
  // Realised length hi - lo keeps IV consistent with the edge deviations.
  const double d = n - (w.hi() - w.lo());
  return d * d;
}

/// sigma_g(eps) = (N(eps) - eps)^2
inline double sample_gv(const UnfoldedSpectrum& spec, double energy) {
  const double d = spec.fluctuation(energy);
  return d * d;
}

/// delta N(eps1) * delta N(eps2) at the window edges.
inline double sample_cfss(const UnfoldedSpectrum& spec, Window w) {
  if (w.width < 0.0) throw ArgumentError("window width must be non-negative");
  return spec.fluctuation(w.lo()) * spec.fluctuation(w.hi());
}

/// Least-squares residual from the three raw staircase integrals:
///   (1/E) int N^2 - [(1/E) int N]^2 - 12 [(1/E^2) int w N(eps + w) dw]^2.
/// Loses digits to cancellation when N is large; sample_sr() avoids that.
inline double rigidity_from_integrals(const StaircaseIntegrals& in, Window w) {
  const double e = w.width;
  const double mean = in.n / e;
  // int w N(eps + w) dw = int x N dx - eps int N dx
  const double first = (in.x_n - w.center * in.n) / (e * e);
  return in.n_squared / e - mean * mean - 12.0 * first * first;
}

/// delta_3(eps, E): mean-square deviation of N from its best-fit line on the window.
inline double sample_sr(const UnfoldedSpectrum& spec, Window w) {
  if (!(w.width > 0.0)) throw ArgumentError("rigidity needs a positive window width");
  const WindowSums s = spec.window_sums(w.lo(), w.hi(), w.center);
  const double e = w.width;
  const double mean = s.k / e;
  const double first = s.offset_k / (e * e);
  const double r = s.k_squared / e - mean * mean - 12.0 * first * first;
  return r > 0.0 ? r : 0.0;
}

/// Saturation width E_sat must exceed this many sqrt(eps); below it is an error.
inline constexpr double kSaturationErrorFactor = 5.0;
/// Below this many sqrt(eps) a warning is recorded.
inline constexpr double kSaturationWarnFactor = 10.0;

inline double sample_saturation_sr(const UnfoldedSpectrum& spec, double energy,
                                   double saturation_width, Diagnostics* diag = nullptr) {
  const double root = std::sqrt(std::max(energy, 0.0));
  if (saturation_width < kSaturationErrorFactor * root) {
    std::ostringstream os;
    os << "saturation width " << saturation_width << " below " << kSaturationErrorFactor
       << " sqrt(eps) at eps=" << energy;
    throw ArgumentError(os.str());
  }
  if (diag != nullptr && saturation_width < kSaturationWarnFactor * root) {
    std::ostringstream os;
    os << "saturation width " << saturation_width << " below " << kSaturationWarnFactor
       << " sqrt(eps) at eps=" << energy;
    diag->warn(os.str());
  }
  return sample_sr(spec, Window{energy, saturation_width});
}

/// Width used for saturation rigidity at a given running energy:
/// `low_width` up to `split`, `high_width` above.
struct SaturationWidthRule {
  double low_width = 1.0e3;
  double high_width = 5.0e3;
  double split = 1.0e4;

  double operator()(double energy) const noexcept {
    return energy <= split ? low_width : high_width;
  }
};

/// Dispatch on kind. `width` is ignored by gv, fluctuation and saturation_sr
/// (the latter takes its width from `rule`).
inline double sample_statistic(StatisticKind kind, const UnfoldedSpectrum& spec, double energy,
                               double width, const SaturationWidthRule& rule = {},
                               Diagnostics* diag = nullptr) {
  switch (kind) {
    case StatisticKind::iv: return sample_iv(spec, Window{energy, width});
    case StatisticKind::gv: return sample_gv(spec, energy);
    case StatisticKind::sr: return sample_sr(spec, Window{energy, width});
    case StatisticKind::saturation_sr:
      return sample_saturation_sr(spec, energy, rule(energy), diag);
    case StatisticKind::cfss: return sample_cfss(spec, Window{energy, width});
    case StatisticKind::fluctuation: return spec.fluctuation(energy);
  }
  throw ArgumentError("unknown statistic kind");
}

/// Half-extent of unfolded energy a statistic reads around its running energy.
inline double statistic_reach(StatisticKind kind, double energy, double width,
                              const SaturationWidthRule& rule = {}) noexcept {
  switch (kind) {
    case StatisticKind::gv:
    case StatisticKind::fluctuation: return 0.0;
    case StatisticKind::saturation_sr: return 0.5 * rule(energy);
    default: return 0.5 * width;
  }
}

}  // namespace specavg
