#pragma once

/*
 * Rectangular billiard spectra in units of the mean level spacing.
 *
 * With the area fixed so that the mean spacing is one, the level with quantum
 * numbers (n1, n2), n1, n2 >= 1, of a rectangle with aspect ratio
 * alpha = a^2/b^2 is
 *
 *     e(n1, n2) = (pi/4) (n1^2 alpha^-1/2 + n2^2 alpha^1/2),
 *
 * and the smooth (Weyl) staircase including the perimeter and corner terms is
 *
 *     <N(e)> = e - c sqrt(e) + 1/4,   c = (alpha^1/4 + alpha^-1/4) / sqrt(pi).
 *
 * Unfolding maps each raw level e to x = <N(e)>, after which the mean spacing is
 * one and <N(x)> = x. The staircase N(x) counts levels <= x (right-continuous).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "specavg/error.hpp"

namespace specavg {

inline constexpr double kPi = std::numbers::pi;

/// alpha0 = 1 - (sqrt(5) - 1)/20, chosen away from the degenerate square.
inline constexpr double kDefaultAspectRatio = 1.0 - (std::numbers::phi - 1.0) / 10.0;

/// Closed interval of unfolded energies.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  constexpr double length() const noexcept { return hi - lo; }
  constexpr bool contains(double x) const noexcept { return x >= lo && x <= hi; }
  constexpr bool contains(const Interval& other) const noexcept {
    return other.lo >= lo && other.hi <= hi;
  }
};

inline std::string describe(const Interval& iv) {
  std::ostringstream os;
  os.precision(10);
  os << '[' << iv.lo << ", " << iv.hi << ']';
  return os.str();
}

class BilliardShape {
 public:
  explicit BilliardShape(double aspect_ratio = kDefaultAspectRatio) : alpha_(aspect_ratio) {
    if (!(aspect_ratio > 0.0) || !std::isfinite(aspect_ratio)) {
      throw ArgumentError("aspect ratio must be positive and finite");
    }
  }

  double aspect_ratio() const noexcept { return alpha_; }

  /// Dimensionless perimeter coefficient c(alpha) of the Weyl staircase.
  double perimeter_coeff() const noexcept {
    const double q = std::pow(alpha_, 0.25);
    return (q + 1.0 / q) / std::sqrt(kPi);
  }

  double level(long n1, long n2) const noexcept {
    const double dn1 = static_cast<double>(n1);
    const double dn2 = static_cast<double>(n2);
    return coeff1() * dn1 * dn1 + coeff2() * dn2 * dn2;
  }

  /// Smooth staircase <N(e)>; the unfolding map.
  double unfold(double e) const noexcept {
    return e - perimeter_coeff() * std::sqrt(e) + 0.25;
  }

  /// Inverse of unfold() on its increasing branch e > c^2/4.
  double raw_energy(double x) const noexcept {
    const double c = perimeter_coeff();
    const double root = 0.5 * (c + std::sqrt(std::max(0.0, c * c + 4.0 * (x - 0.25))));
    return root * root;
  }

  // e = coeff1 n1^2 + coeff2 n2^2
  double coeff1() const noexcept { return 0.25 * kPi / std::sqrt(alpha_); }
  double coeff2() const noexcept { return 0.25 * kPi * std::sqrt(alpha_); }

  friend bool operator==(const BilliardShape&, const BilliardShape&) = default;

 private:
  double alpha_;
};

/// Upper bound on the number of stored levels per spectrum.
struct LevelBudget {
  std::size_t max_levels = 20'000'000;
};

struct RawSpectrum {
  BilliardShape shape;
  std::vector<double> levels;  // ascending, with multiplicity
  double e_max = 0.0;

  std::size_t count() const noexcept { return levels.size(); }
};

/// All levels e(n1, n2) <= e_max, sorted ascending. For each n1 the admissible
/// n2 range is solved in closed form, so the work is proportional to the count.
inline RawSpectrum enumerate_levels(const BilliardShape& shape, double e_max,
                                    LevelBudget budget = {}) {
  if (!(e_max > 0.0) || !std::isfinite(e_max)) {
    throw ArgumentError("e_max must be positive and finite");
  }
  const double c = shape.perimeter_coeff();
  const double sq = std::sqrt(e_max);
  const double estimate = e_max - c * sq + 0.25 + 3.0 * sq;
  if (estimate > static_cast<double>(budget.max_levels)) {
    std::ostringstream os;
    os << "level budget of " << budget.max_levels << " levels exceeded (about "
       << static_cast<long long>(estimate) << " levels below e_max=" << e_max << ")";
    throw ResourceError(os.str());
  }

  RawSpectrum out{shape, {}, e_max};
  out.levels.reserve(static_cast<std::size_t>(std::max(0.0, estimate)) + 16);

  const double q1 = shape.coeff1();
  const double q2 = shape.coeff2();
  for (long n1 = 1;; ++n1) {
    const double rest = e_max - q1 * static_cast<double>(n1) * static_cast<double>(n1);
    if (rest < q2) break;
    long n2max = static_cast<long>(std::floor(std::sqrt(rest / q2)));
    // Guard the floating-point floor against the exact level test.
    while (shape.level(n1, n2max + 1) <= e_max) ++n2max;
    while (n2max > 0 && shape.level(n1, n2max) > e_max) --n2max;
    for (long n2 = 1; n2 <= n2max; ++n2) out.levels.push_back(shape.level(n1, n2));
  }
  std::sort(out.levels.begin(), out.levels.end());
  return out;
}

/// Exact integrals of the staircase over a window: int N dx, int N^2 dx, int x N dx.
struct StaircaseIntegrals {
  double n = 0.0;
  double n_squared = 0.0;
  double x_n = 0.0;
};

/// Integrals over [lo, hi] of k, k^2 and (x - center) k, with k(x) = N(x) - N(lo).
/// The rigidity is invariant under both shifts, and the shifted values are small.
struct WindowSums {
  double k = 0.0;
  double k_squared = 0.0;
  double offset_k = 0.0;
  std::size_t levels_inside = 0;
};

/// Sorted unit-mean-spacing levels with the range on which the staircase is
/// known to be complete. Immutable; copies share storage.
class UnfoldedSpectrum {
 public:
  UnfoldedSpectrum(std::vector<double> levels, Interval usable_range,
                   std::optional<BilliardShape> shape = std::nullopt)
      : data_(std::make_shared<Data>()) {
    if (!std::is_sorted(levels.begin(), levels.end())) {
      throw ArgumentError("unfolded levels must be sorted ascending");
    }
    if (!(usable_range.hi >= usable_range.lo)) {
      throw ArgumentError("usable range is inverted");
    }
    data_->levels = std::move(levels);
    data_->usable = usable_range;
    data_->shape = shape;
    build_prefix_sums();
  }

  std::span<const double> levels() const noexcept { return data_->levels; }
  std::size_t size() const noexcept { return data_->levels.size(); }
  Interval usable_range() const noexcept { return data_->usable; }
  const std::optional<BilliardShape>& shape() const noexcept { return data_->shape; }

  double perimeter_coeff() const noexcept {
    return data_->shape ? data_->shape->perimeter_coeff() : 0.0;
  }

  /// N(x) = #{levels <= x}.
  std::size_t staircase(double x) const {
    require_inside(x);
    return count_at_or_below(x);
  }

  /// Staircase deviation N(x) - x.
  double fluctuation(double x) const { return static_cast<double>(staircase(x)) - x; }

  /// Direct segment-by-segment evaluation of the three staircase integrals.
  StaircaseIntegrals staircase_integrals(double lo, double hi) const {
    require_window(lo, hi);
    const auto& lv = data_->levels;
    std::size_t idx = count_at_or_below(lo);
    const std::size_t end = count_at_or_below(hi);

    StaircaseIntegrals out;
    double left = lo;
    double value = static_cast<double>(idx);
    auto add_segment = [&](double right) {
      const double len = right - left;
      out.n += value * len;
      out.n_squared += value * value * len;
      out.x_n += value * 0.5 * (right - left) * (right + left);
    };
    for (; idx < end; ++idx) {
      add_segment(lv[idx]);
      left = lv[idx];
      value += 1.0;
    }
    add_segment(hi);
    return out;
  }

  /// Shifted window integrals from prefix sums in O(log n). The prefix sums
  /// hold u_j = l_j - j, so only the small parts of the level positions are
  /// accumulated and the integer parts are summed in closed form.
  WindowSums window_sums(double lo, double hi, double center) const {
    require_window(lo, hi);
    const std::size_t i0 = count_at_or_below(lo);
    const std::size_t i1 = count_at_or_below(hi);
    const auto& d = *data_;
    using ld = long double;
    const ld m = static_cast<ld>(i1 - i0);
    const ld first = static_cast<ld>(i0);
    const ld su = d.sum_u[i1] - d.sum_u[i0];
    const ld su2 = d.sum_u2[i1] - d.sum_u2[i0];
    const ld stu = (d.sum_ju[i1] - d.sum_ju[i0]) - first * su;  // sum of (j - i0) u_j
    const ld st = m * (m - 1.0L) / 2.0L;                          // sum of t = j - i0
    const ld st2 = (m - 1.0L) * m * (2.0L * m - 1.0L) / 6.0L;     // sum of t^2
    const ld h = static_cast<ld>(hi) - first;                     // hi - i0
    const ld dc = first - static_cast<ld>(center);                // i0 - center

    WindowSums out;
    out.levels_inside = i1 - i0;
    // k(x) jumps by one at each level: int k = sum (hi - l_j).
    out.k = static_cast<double>(m * h - st - su);
    // int k^2 = sum (2t + 1)(hi - l_j)
    out.k_squared = static_cast<double>(m * m * h - (2.0L * st2 + st) - (2.0L * stu + su));
    // int (x - c) k = [m (hi - c)^2 - sum (l_j - c)^2] / 2, l_j - c = t + dc + u_j
    const ld hc = static_cast<ld>(hi) - static_cast<ld>(center);
    const ld spread = st2 + 2.0L * dc * st + m * dc * dc + 2.0L * (stu + dc * su) + su2;
    out.offset_k = static_cast<double>((m * hc * hc - spread) / 2.0L);
    return out;
  }

  void require_inside(double x) const {
    if (!data_->usable.contains(x)) {
      std::ostringstream os;
      os.precision(10);
      os << "energy " << x << " outside usable range " << describe(data_->usable);
      throw RangeError(os.str());
    }
  }

 private:
  struct Data {
    std::vector<double> levels;
    Interval usable;
    std::optional<BilliardShape> shape;
    std::vector<long double> sum_u, sum_u2, sum_ju;
  };

  std::size_t count_at_or_below(double x) const noexcept {
    const auto& lv = data_->levels;
    return static_cast<std::size_t>(std::upper_bound(lv.begin(), lv.end(), x) - lv.begin());
  }

  void require_window(double lo, double hi) const {
    if (hi < lo) throw ArgumentError("inverted window");
    require_inside(lo);
    require_inside(hi);
  }

  void build_prefix_sums() {
    auto& d = *data_;
    const std::size_t n = d.levels.size();
    d.sum_u.assign(n + 1, 0.0L);
    d.sum_u2.assign(n + 1, 0.0L);
    d.sum_ju.assign(n + 1, 0.0L);
    for (std::size_t j = 0; j < n; ++j) {
      const long double u = static_cast<long double>(d.levels[j]) - static_cast<long double>(j);
      d.sum_u[j + 1] = d.sum_u[j] + u;
      d.sum_u2[j + 1] = d.sum_u2[j] + u * u;
      d.sum_ju[j + 1] = d.sum_ju[j] + static_cast<long double>(j) * u;
    }
  }

  std::shared_ptr<Data> data_;
};

/// Relative margin above c^2/4, the turning point of the unfolding map.
inline constexpr double kTurningPointMargin = 0.1;

inline UnfoldedSpectrum unfold(const RawSpectrum& raw) {
  const BilliardShape& shape = raw.shape;
  const double c = shape.perimeter_coeff();
  std::vector<double> x;
  x.reserve(raw.levels.size());
  for (double e : raw.levels) x.push_back(shape.unfold(e));

  const double e_turn = 0.25 * c * c * (1.0 + kTurningPointMargin);
  const double lo = std::max(1.0, shape.unfold(e_turn));
  // Top 2 sqrt(e_max) of the raw range is not trusted.
  const double e_top = raw.e_max - 2.0 * std::sqrt(raw.e_max);
  const double hi = e_top > e_turn ? shape.unfold(e_top) : lo;
  // Levels below the turning point may be out of order after the map.
  if (!std::is_sorted(x.begin(), x.end())) std::sort(x.begin(), x.end());
  return UnfoldedSpectrum(std::move(x), Interval{lo, std::max(lo, hi)}, shape);
}

/// Raw cutoff whose unfolded spectrum is usable at least up to x_needed.
inline double required_e_max(const BilliardShape& shape, double x_needed) {
  const double e_top = shape.raw_energy(std::max(x_needed, 1.0));
  const double s = 1.0 + std::sqrt(1.0 + e_top);
  return s * s + 1.0;
}

/// Enumerate and unfold a spectrum whose usable range reaches x_needed.
inline UnfoldedSpectrum build_spectrum(const BilliardShape& shape, double x_needed,
                                       LevelBudget budget = {}) {
  return unfold(enumerate_levels(shape, required_e_max(shape, x_needed), budget));
}

/// CSV dump `index,raw_e,unfolded_x`; index is 1-based so that N(x_k) = k.
inline void write_spectrum_csv(std::ostream& os, const RawSpectrum& raw) {
  os << "index,raw_e,unfolded_x\n";
  char buf[64];
  for (std::size_t i = 0; i < raw.levels.size(); ++i) {
    const double e = raw.levels[i];
    const int n = std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, e,
                                raw.shape.unfold(e));
    os.write(buf, n);
  }
}

}  // namespace specavg
