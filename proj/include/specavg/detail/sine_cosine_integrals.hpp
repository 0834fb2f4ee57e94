#pragma once

// Sine and cosine integrals Si(x), Ci(x) for x > 0: power series below 2 and a
// continued fraction for E1(ix) above (modified Lentz).

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

namespace specavg::detail {

struct SineCosineIntegrals {
  double si = 0.0;
  double ci = 0.0;
};

inline SineCosineIntegrals sine_cosine_integrals(double x) {
  constexpr int kMaxIter = 200;
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  constexpr double kTiny = std::numeric_limits<double>::min() / kEps;
  constexpr double kSwitch = 2.0;

  const double t = std::fabs(x);
  if (t == 0.0) return {0.0, -std::numeric_limits<double>::infinity()};

  SineCosineIntegrals out;
  if (t > kSwitch) {
    std::complex<double> b(1.0, t);
    std::complex<double> c(1.0 / kTiny, 0.0);
    std::complex<double> d = 1.0 / b;
    std::complex<double> h = d;
    for (int i = 2; i <= kMaxIter; ++i) {
      const double a = -static_cast<double>((i - 1) * (i - 1));
      b += 2.0;
      d = 1.0 / (a * d + b);
      c = b + a / c;
      const std::complex<double> del = c * d;
      h *= del;
      if (std::fabs(del.real() - 1.0) + std::fabs(del.imag()) < kEps) break;
    }
    h *= std::complex<double>(std::cos(t), -std::sin(t));
    out.ci = -h.real();
    out.si = 0.5 * std::numbers::pi + h.imag();
  } else {
    double sum = 0.0, sums = 0.0, sumc = 0.0;
    double sign = 1.0, fact = 1.0;
    bool odd = true;
    for (int k = 1; k <= kMaxIter; ++k) {
      fact *= t / k;
      const double term = fact / k;
      sum += sign * term;
      const double err = term / std::fabs(sum);
      if (odd) {
        sign = -sign;
        sums = sum;
        sum = sumc;
      } else {
        sumc = sum;
        sum = sums;
      }
      if (err < kEps) break;
      odd = !odd;
    }
    out.si = sums;
    out.ci = sumc + std::log(t) + std::numbers::egamma;
  }
  if (x < 0.0) out.si = -out.si;
  return out;
}

}  // namespace specavg::detail
