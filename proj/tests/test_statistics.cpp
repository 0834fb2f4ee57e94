#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "oracles/oracles.hpp"
#include "specavg/spectrum.hpp"
#include "specavg/statistics.hpp"

using namespace specavg;
using Catch::Approx;

namespace {

const UnfoldedSpectrum& shared_spectrum() {
  static const UnfoldedSpectrum spec = build_spectrum(BilliardShape(), 3.0e4);
  return spec;
}

}  // namespace

TEST_CASE("rigidity of a single step is 1/16", "[statistics]") {
  for (double width : {1.0, 3.0, 250.0}) {
    const UnfoldedSpectrum spec({10.0}, Interval{-1000.0, 1000.0});
    CHECK(sample_sr(spec, Window{10.0, width}) == Approx(1.0 / 16.0).epsilon(1e-14));
    CHECK(rigidity_from_integrals(spec.staircase_integrals(10.0 - 0.5 * width, 10.0 + 0.5 * width),
                                  Window{10.0, width}) == Approx(1.0 / 16.0).epsilon(1e-12));
  }
}

TEST_CASE("rigidity of an evenly spaced spectrum", "[statistics]") {
  // Levels at every half-integer: N(x) - x is a zero-mean sawtooth of variance 1/12.
  std::vector<double> lv;
  for (int i = 0; i < 200; ++i) lv.push_back(i + 0.5);
  const UnfoldedSpectrum spec(lv, Interval{0.0, 200.0});
  CHECK(sample_sr(spec, Window{100.0, 100.0}) == Approx(1.0 / 12.0).epsilon(1e-3));
}

TEST_CASE("rigidity matches fine-grid quadrature", "[statistics]") {
  const auto& spec = shared_spectrum();
  const std::vector<double> levels(spec.levels().begin(), spec.levels().end());
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> centre(2.0e3, 2.5e4), width(5.0, 2000.0);
  for (int i = 0; i < 15; ++i) {
    const double c = centre(gen), w = width(gen);
    const double fast = sample_sr(spec, Window{c, w});
    const double ref = oracle::riemann_rigidity(levels, c, w);
    CHECK(fast == Approx(ref).epsilon(1e-4));
    const double direct =
        rigidity_from_integrals(spec.staircase_integrals(c - 0.5 * w, c + 0.5 * w), Window{c, w});
    CHECK(fast == Approx(direct).epsilon(1e-5));  // direct form cancels ~6 digits
  }
}

TEST_CASE("IV, GV and CFSS satisfy the edge identity", "[statistics]") {
  const auto& spec = shared_spectrum();
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> centre(3.0e3, 2.5e4), width(0.0, 3000.0);
  for (int i = 0; i < 500; ++i) {
    const Window w{centre(gen), width(gen)};
    const double lhs = sample_iv(spec, w);
    const double rhs = sample_gv(spec, w.lo()) + sample_gv(spec, w.hi()) - 2.0 * sample_cfss(spec, w);
    CHECK(lhs == Approx(rhs).epsilon(1e-12).margin(1e-9));
  }
}

TEST_CASE("zero-width window", "[statistics]") {
  const auto& spec = shared_spectrum();
  CHECK(sample_iv(spec, Window{5000.0, 0.0}) == 0.0);
  CHECK(sample_cfss(spec, Window{5000.0, 0.0}) == Approx(sample_gv(spec, 5000.0)));
  CHECK_THROWS_AS(sample_sr(spec, Window{5000.0, 0.0}), ArgumentError);
  CHECK_THROWS_AS(sample_iv(spec, Window{5000.0, -1.0}), ArgumentError);
}

TEST_CASE("windows escaping the usable range raise range errors", "[statistics]") {
  const auto& spec = shared_spectrum();
  const double top = spec.usable_range().hi;
  CHECK_THROWS_AS(sample_iv(spec, Window{top, 10.0}), RangeError);
  CHECK_THROWS_AS(sample_sr(spec, Window{top, 10.0}), RangeError);
  CHECK_THROWS_AS(sample_gv(spec, 0.0), RangeError);
}

TEST_CASE("saturation width checks", "[statistics]") {
  const auto& spec = shared_spectrum();
  Diagnostics diag;
  CHECK_THROWS_AS(sample_saturation_sr(spec, 1.0e4, 400.0, &diag), ArgumentError);
  sample_saturation_sr(spec, 1.0e4, 800.0, &diag);
  CHECK(diag.count() == 1);
  sample_saturation_sr(spec, 1.0e4, 1200.0, &diag);
  CHECK(diag.count() == 1);
}

TEST_CASE("saturation width rule switches at the split", "[statistics]") {
  const SaturationWidthRule rule;
  CHECK(rule(1.0e4) == 1.0e3);
  CHECK(rule(1.0001e4) == 5.0e3);
  CHECK(statistic_reach(StatisticKind::saturation_sr, 2.0e4, 7.0, rule) == 2.5e3);
  CHECK(statistic_reach(StatisticKind::iv, 2.0e4, 7.0, rule) == 3.5);
  CHECK(statistic_reach(StatisticKind::gv, 2.0e4, 7.0, rule) == 0.0);
}

TEST_CASE("dispatch agrees with the direct functions", "[statistics]") {
  const auto& spec = shared_spectrum();
  const Window w{7000.0, 123.0};
  CHECK(sample_statistic(StatisticKind::iv, spec, w.center, w.width) == sample_iv(spec, w));
  CHECK(sample_statistic(StatisticKind::sr, spec, w.center, w.width) == sample_sr(spec, w));
  CHECK(sample_statistic(StatisticKind::cfss, spec, w.center, w.width) == sample_cfss(spec, w));
  CHECK(sample_statistic(StatisticKind::gv, spec, w.center, w.width) == sample_gv(spec, w.center));
  CHECK(sample_statistic(StatisticKind::fluctuation, spec, w.center, 0.0) == spec.fluctuation(w.center));
  CHECK(kind_name(StatisticKind::saturation_sr) == "sat_sr");
}
