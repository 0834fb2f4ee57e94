#pragma once

/*
 * Periodic-orbit predictions for the rectangle in unit-mean-spacing variables.
 *
 * A periodic-orbit family is labelled by winding numbers M = (m1, m2) >= 0 with
 * weight delta_M (0 for (0,0), 1/2 on an axis, 1 otherwise) and scaled length
 *
 *     R_M = sqrt(m1^2 alpha^1/2 + m2^2 alpha^-1/2).
 *
 * With a raw energy e in mean-spacing units the action phase of family M is
 * 4 sqrt(pi e) R_M, so a width E shifts the phase by 2 sqrt(pi/e) R_M E. In the
 * diagonal approximation
 *
 *     sigma(e, E)     = 4 sqrt(e/pi^5) sum delta^2 / R^3 sin^2(sqrt(pi/e) R E)
 *     delta3_inf(e)   =   sqrt(e/pi^5) sum delta^2 / R^3
 *     k_N(e, E)       = delta3_inf(e) - sigma(e, E)/2
 *     dN(e)           = sum sqrt(2) delta (e/pi^5)^1/4 R^-3/2 sin(4 sqrt(pi e) R - pi/4)
 *
 * The dN amplitudes satisfy amp^2 = 2 sqrt(e/pi^5) delta^2/R^3, so squaring the
 * staircase sum and keeping diagonal terms regenerates sigma.
 *
 * The absolutely convergent sums over delta^2/R^3 are truncated at R <= r_max and
 * completed with the smooth lattice tail: the weighted mode count below R is
 * (pi/4) R^2 - (p/4) R with p = alpha^1/4 + alpha^-1/4, so
 *
 *     sum_{R > r} delta^2/R^3            ~ pi/(2r) - p/(8 r^2)
 *     sum_{R > r} delta^2/R^3 cos(b R)   ~ int_r^inf (pi/2 R^-2 - p/4 R^-3) cos(bR) dR.
 *
 * What remains is the lattice-point remainder, bounded here by p r^-5/2.
 */

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "specavg/detail/sine_cosine_integrals.hpp"
#include "specavg/error.hpp"
#include "specavg/spectrum.hpp"

namespace specavg {

struct WindingMode {
  int m1 = 0;
  int m2 = 0;
  double weight = 0.0;         // delta_M
  double scaled_length = 0.0;  // R_M
};

constexpr double mode_weight(int m1, int m2) noexcept {
  if (m1 == 0 && m2 == 0) return 0.0;
  if (m1 == 0 || m2 == 0) return 0.5;
  return 1.0;
}

inline double scaled_length(double alpha, int m1, int m2) noexcept {
  const double s = std::sqrt(alpha);
  return std::sqrt(static_cast<double>(m1) * m1 * s + static_cast<double>(m2) * m2 / s);
}

struct POSumConfig {
  /// Truncation radius for the delta^2/R^3 sums; 0 selects it from tail_tol.
  double r_max = 0.0;
  /// Relative tolerance of the truncated delta^2/R^3 sum after tail correction.
  double tail_tol = 1.0e-6;
  /// Largest radius the automatic selection may choose.
  double r_max_cap = 4096.0;
  /// Fixed truncation for the staircase-fluctuation sum, which does not converge
  /// absolutely and is only used for curve comparisons.
  double fluct_r_max = 12.0;
};

/// All modes with 0 < R_M <= r_max, in (m1, m2) lexicographic order.
inline std::vector<WindingMode> enumerate_modes(double alpha, double r_max) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be positive");
  const double smallest = std::min(std::pow(alpha, 0.25), std::pow(alpha, -0.25));
  if (!(r_max >= smallest)) {
    std::ostringstream os;
    os << "r_max=" << r_max << " includes no winding mode (smallest R is " << smallest << ")";
    throw ConfigurationError(os.str());
  }
  const double s = std::sqrt(alpha);
  const double r2 = r_max * r_max;
  std::vector<WindingMode> modes;
  modes.reserve(static_cast<std::size_t>(0.8 * r2 + 4.0 * r_max + 8.0));
  for (int m1 = 0;; ++m1) {
    const double rest = r2 - static_cast<double>(m1) * m1 * s;
    if (rest < 0.0) break;
    int m2max = static_cast<int>(std::floor(std::sqrt(rest * s)));
    while (scaled_length(alpha, m1, m2max + 1) <= r_max) ++m2max;
    while (m2max >= 0 && scaled_length(alpha, m1, m2max) > r_max) --m2max;
    for (int m2 = 0; m2 <= m2max; ++m2) {
      if (m1 == 0 && m2 == 0) continue;
      modes.push_back({m1, m2, mode_weight(m1, m2), scaled_length(alpha, m1, m2)});
    }
  }
  return modes;
}

inline WindingMode enumerate_modes_smallest(double alpha) {
  // (1,0) and (0,1) are the shortest families with nonzero weight.
  const WindingMode a{1, 0, 0.5, scaled_length(alpha, 1, 0)};
  const WindingMode b{0, 1, 0.5, scaled_length(alpha, 0, 1)};
  return a.scaled_length <= b.scaled_length ? a : b;
}

/// Amplitude of family M in the staircase-fluctuation sum.
inline double fluct_amplitude(double energy, const WindingMode& m) noexcept {
  return std::numbers::sqrt2 * m.weight * std::pow(energy / std::pow(kPi, 5), 0.25) /
         std::pow(m.scaled_length, 1.5);
}

/// Action phase 4 sqrt(pi e) R_M of family M.
inline double fluct_phase(double energy, const WindingMode& m) noexcept {
  return 4.0 * std::sqrt(kPi * energy) * m.scaled_length;
}

namespace detail {

inline double smooth_tail(double r, double p) noexcept {
  return 0.5 * kPi / r - p / (8.0 * r * r);
}

// int_r^inf (pi/2 R^-2 - p/4 R^-3) cos(b R) dR
inline double oscillating_tail(double r, double p, double b) {
  if (b == 0.0) return smooth_tail(r, p);
  const double t = b * r;
  const auto sc = sine_cosine_integrals(t);
  const double cos_t = std::cos(t);
  const double sin_t = std::sin(t);
  const double j2 = cos_t / r - b * (0.5 * kPi - sc.si);
  const double j3 = cos_t / (2.0 * r * r) - 0.5 * b * (sin_t / r - b * sc.ci);
  return 0.5 * kPi * j2 - 0.25 * p * j3;
}

}  // namespace detail

/// Truncated, tail-corrected periodic-orbit sums for one aspect ratio. Mode
/// arrays are built once; evaluation is const and thread-safe.
class PeriodicOrbitSums {
 public:
  explicit PeriodicOrbitSums(double alpha, POSumConfig config = {})
      : alpha_(alpha), config_(config) {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ArgumentError("alpha must be positive");
    if (!(config.tail_tol > 0.0)) throw ConfigurationError("tail_tol must be positive");
    p_ = std::pow(alpha, 0.25) + std::pow(alpha, -0.25);

    double r = config.r_max;
    if (r == 0.0) {
      // Estimate the sum cheaply, then pick the radius meeting the tolerance.
      const double estimate = partial_sum(enumerate_modes(alpha, 8.0)) + detail::smooth_tail(8.0, p_);
      r = std::ceil(std::pow(p_ / (config.tail_tol * estimate), 0.4));
      r = std::max(r, 8.0);
      if (r > config.r_max_cap) {
        std::ostringstream os;
        os << "tail_tol=" << config.tail_tol << " needs r_max=" << r << " beyond cap "
           << config.r_max_cap;
        throw ConvergenceError(os.str());
      }
    }
    r_max_ = r;
    const auto modes = enumerate_modes(alpha, r);
    lengths_.reserve(modes.size());
    coeffs_.reserve(modes.size());
    for (const auto& m : modes) {
      lengths_.push_back(m.scaled_length);
      coeffs_.push_back(m.weight * m.weight / (m.scaled_length * m.scaled_length * m.scaled_length));
    }
    weight_sum_ = partial_sum(modes) + detail::smooth_tail(r_max_, p_);
    if (tail_bound() > config.tail_tol * weight_sum_) {
      std::ostringstream os;
      os << "periodic-orbit sum unconverged at r_max=" << r_max_ << ": tail estimate "
         << tail_bound() << " exceeds " << config.tail_tol << " x " << weight_sum_;
      throw ConvergenceError(os.str());
    }
  }

  double alpha() const noexcept { return alpha_; }
  double r_max() const noexcept { return r_max_; }
  std::size_t mode_count() const noexcept { return lengths_.size(); }

  /// Bound on the remaining error of sum delta^2/R^3 after the tail correction.
  double tail_bound() const noexcept { return p_ * std::pow(r_max_, -2.5); }

  /// sum over all modes of delta^2 / R^3.
  double weight_sum() const noexcept { return weight_sum_; }

  /// sum over all modes of delta^2 / R^3 sin^2(k R).
  double oscillating_sum(double k) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < lengths_.size(); ++i) {
      const double s = std::sin(k * lengths_[i]);
      acc += coeffs_[i] * s * s;
    }
    const double tail =
        0.5 * (detail::smooth_tail(r_max_, p_) - detail::oscillating_tail(r_max_, p_, 2.0 * k));
    return acc + tail;
  }

  double sample_iv(double energy, double width) const {
    check_energy(energy);
    if (width < 0.0) throw ArgumentError("width must be non-negative");
    if (width == 0.0) return 0.0;
    const double k = std::sqrt(kPi / energy) * width;
    return 4.0 * prefactor(energy) * oscillating_sum(k);
  }

  double saturation_sr(double energy) const {
    check_energy(energy);
    return prefactor(energy) * weight_sum_;
  }

  double cfss(double energy, double width) const {
    return saturation_sr(energy) - 0.5 * sample_iv(energy, width);
  }

 private:
  static double partial_sum(const std::vector<WindingMode>& modes) {
    double acc = 0.0;
    for (const auto& m : modes) {
      acc += m.weight * m.weight / (m.scaled_length * m.scaled_length * m.scaled_length);
    }
    return acc;
  }

  static double prefactor(double energy) { return std::sqrt(energy / std::pow(kPi, 5)); }

  static void check_energy(double energy) {
    if (!(energy > 0.0)) throw ArgumentError("energy must be positive");
  }

  double alpha_;
  POSumConfig config_;
  double p_ = 0.0;
  double r_max_ = 0.0;
  double weight_sum_ = 0.0;
  std::vector<double> lengths_;
  std::vector<double> coeffs_;
};

inline std::vector<WindingMode> enumerate_modes(double alpha, const POSumConfig& config) {
  return enumerate_modes(alpha, PeriodicOrbitSums(alpha, config).r_max());
}

inline double theory_sample_iv(double energy, double width, double alpha,
                               const POSumConfig& config = {}) {
  return PeriodicOrbitSums(alpha, config).sample_iv(energy, width);
}

inline double theory_saturation_sr(double energy, double alpha, const POSumConfig& config = {}) {
  return PeriodicOrbitSums(alpha, config).saturation_sr(energy);
}

inline double theory_cfss(double energy, double width, double alpha,
                          const POSumConfig& config = {}) {
  return PeriodicOrbitSums(alpha, config).cfss(energy, width);
}

enum class FluctPhase { quarter_pi, none };

/// Staircase fluctuation dN(e) truncated at config.fluct_r_max. `energy` is the
/// raw energy in mean-spacing units.
inline double theory_staircase_fluct(double energy, double alpha, const POSumConfig& config = {},
                                     FluctPhase phase = FluctPhase::quarter_pi) {
  if (!(energy > 0.0)) throw ArgumentError("energy must be positive");
  const double shift = phase == FluctPhase::quarter_pi ? 0.25 * kPi : 0.0;
  double acc = 0.0;
  for (const auto& m : enumerate_modes(alpha, config.fluct_r_max)) {
    acc += fluct_amplitude(energy, m) * std::sin(fluct_phase(energy, m) - shift);
  }
  return acc;
}

/// dN averaged over an ensemble of aspect ratios, on a grid of raw energies.
inline std::vector<double> theory_staircase_fluct_mean(std::span<const double> energies,
                                                       std::span<const double> alphas,
                                                       const POSumConfig& config = {},
                                                       FluctPhase phase = FluctPhase::quarter_pi) {
  if (alphas.empty()) throw ArgumentError("no aspect ratios to average over");
  const double shift = phase == FluctPhase::quarter_pi ? 0.25 * kPi : 0.0;
  std::vector<double> out(energies.size(), 0.0);
  std::vector<double> amp_base, phase_base;
  for (const double e : energies) {
    if (!(e > 0.0)) throw ArgumentError("energy must be positive");
  }
  for (const double alpha : alphas) {
    const auto modes = enumerate_modes(alpha, config.fluct_r_max);
    amp_base.clear();
    phase_base.clear();
    for (const auto& m : modes) {
      amp_base.push_back(fluct_amplitude(1.0, m));
      phase_base.push_back(fluct_phase(1.0, m));
    }
    for (std::size_t i = 0; i < energies.size(); ++i) {
      const double e = energies[i];
      const double amp_scale = std::pow(e, 0.25);
      const double phase_scale = std::sqrt(e);
      double acc = 0.0;
      for (std::size_t j = 0; j < modes.size(); ++j) {
        acc += amp_base[j] * std::sin(phase_base[j] * phase_scale - shift);
      }
      out[i] += amp_scale * acc;
    }
  }
  const double inv = 1.0 / static_cast<double>(alphas.size());
  for (double& v : out) v *= inv;
  return out;
}

/// Leftward shift r with pi r^2 / 4 = mean_energy: the perimeter correction
/// c sqrt(e) at alpha = 1 separating raw and unfolded energy.
inline double perimeter_shift(double mean_energy) {
  if (!(mean_energy > 0.0)) throw ArgumentError("mean energy must be positive");
  return std::sqrt(4.0 * mean_energy / kPi);
}

/// Sampled-energy range beyond which spectral averaging washes out the interval
/// variance oscillation of the slowest family: 2 sqrt(pi) e^3/2 / (R_min E).
inline double sa_decay_threshold(double energy, double width, double alpha) {
  if (!(energy > 0.0) || !(width > 0.0)) throw ArgumentError("energy and width must be positive");
  const double r_min = enumerate_modes_smallest(alpha).scaled_length;
  return 2.0 * std::sqrt(kPi) * std::pow(energy, 1.5) / (r_min * width);
}

}  // namespace specavg
