#pragma once

// Independent reference computations used only by the tests. Nothing here
// shares code with the library beyond plain data types.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

/// Every level (pi/4)(n1^2/sqrt(a) + n2^2 sqrt(a)) <= e_max by a plain double loop.
inline std::vector<double> brute_force_levels(double alpha, double e_max) {
  std::vector<double> out;
  const double c1 = 0.25 * pi / std::sqrt(alpha);
  const double c2 = 0.25 * pi * std::sqrt(alpha);
  for (long n1 = 1; c1 * n1 * n1 + c2 <= e_max; ++n1) {
    for (long n2 = 1;; ++n2) {
      const double e = c1 * n1 * n1 + c2 * n2 * n2;
      if (e > e_max) break;
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Weyl-type unfolding x = e - c sqrt(e) + 1/4 with c = (a^1/4 + a^-1/4)/sqrt(pi).
inline double unfold(double alpha, double e) {
  const double c = (std::pow(alpha, 0.25) + std::pow(alpha, -0.25)) / std::sqrt(pi);
  return e - c * std::sqrt(e) + 0.25;
}

/// Count of sorted levels <= x.
inline double count(const std::vector<double>& levels, double x) {
  return static_cast<double>(std::upper_bound(levels.begin(), levels.end(), x) - levels.begin());
}

/// Least-squares rigidity by midpoint quadrature on n cells: fit N(x) ~ A + B x
/// explicitly and integrate the squared residual.
inline double riemann_rigidity(const std::vector<double>& levels, double center, double width,
                               long n = 1'000'000) {
  const double lo = center - 0.5 * width;
  const double h = width / static_cast<double>(n);
  long double s0 = 0, s1 = 0, s2 = 0, sk = 0, sxk = 0, skk = 0;
  auto it = std::upper_bound(levels.begin(), levels.end(), lo);
  long double k = static_cast<long double>(it - levels.begin());
  for (long i = 0; i < n; ++i) {
    const double x = lo + (static_cast<double>(i) + 0.5) * h;
    while (it != levels.end() && *it <= x) {
      ++it;
      k += 1;
    }
    const long double t = static_cast<long double>(x) - center;  // centred abscissa
    s0 += 1;
    s1 += t;
    s2 += t * t;
    sk += k;
    sxk += t * k;
    skk += k * k;
  }
  // Normal equations for k ~ A + B t.
  const long double det = s0 * s2 - s1 * s1;
  const long double a = (sk * s2 - s1 * sxk) / det;
  const long double b = (s0 * sxk - s1 * sk) / det;
  const long double resid = skk - 2 * a * sk - 2 * b * sxk + a * a * s0 + 2 * a * b * s1 + b * b * s2;
  return static_cast<double>(resid / s0);
}

/// Slope and intercept of y ~ a + b x by normal equations.
struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  long double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const long double n = static_cast<long double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += static_cast<long double>(x[i]) * x[i];
    sxy += static_cast<long double>(x[i]) * y[i];
  }
  const long double det = n * sxx - sx * sx;
  return {static_cast<double>((sy * sxx - sx * sxy) / det), static_cast<double>((n * sxy - sx * sy) / det)};
}

/// sum over m1, m2 >= 0, not both zero, of w^2 / R^3 with w = 1/2 on the axes,
/// R^2 = m1^2 sqrt(a) + m2^2 / sqrt(a), from the lattice zeta function in
/// Chowla-Selberg form (exponentially convergent Bessel series).
inline double lattice_weight_sum(double alpha) {
  const double zeta3 = std::riemann_zeta(3.0);
  const double zeta2 = pi * pi / 6.0;
  // Z = sum over Z^2 \ {0} of (A m^2 + C n^2)^(-3/2), A = sqrt(a), C = 1/sqrt(a).
  double z = 2.0 * zeta3 * std::pow(alpha, -0.75) + 4.0 * zeta2 * std::pow(alpha, 0.25);
  double bessel = 0.0;
  const double q = 2.0 * pi / std::sqrt(alpha);
  for (int n = 1; n <= 60; ++n) {
    for (int k = 1; k <= 60; ++k) {
      const double arg = q * n * k;
      if (arg > 700.0) break;
      bessel += (static_cast<double>(k) / n) * std::cyl_bessel_k(1.0, arg);
    }
  }
  z += 16.0 * pi * std::pow(alpha, -0.25) * bessel;
  const double axes = zeta3 * (std::pow(alpha, 0.75) + std::pow(alpha, -0.75));
  return 0.25 * z - 0.25 * axes;
}

/// Direct truncated sum of w^2 / R^3 sin^2(k R) over R <= r_max, no tail term.
inline double direct_oscillating_sum(double alpha, double k, double r_max) {
  const double a = std::sqrt(alpha);
  double acc = 0.0;
  for (long m1 = 0; m1 * m1 * a <= r_max * r_max; ++m1) {
    for (long m2 = 0;; ++m2) {
      const double r2 = m1 * m1 * a + m2 * m2 / a;
      if (r2 > r_max * r_max) break;
      if (m1 == 0 && m2 == 0) continue;
      const double w = (m1 == 0 || m2 == 0) ? 0.5 : 1.0;
      const double r = std::sqrt(r2);
      const double s = std::sin(k * r);
      acc += w * w / (r * r2) * s * s;
    }
  }
  return acc;
}

}  // namespace oracle
