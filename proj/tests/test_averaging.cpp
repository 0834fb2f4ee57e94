#include <catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include "specavg/averaging.hpp"
#include "specavg/theory.hpp"

using namespace specavg;
using Catch::Approx;

namespace {

const UnfoldedSpectrum& spectrum_to_130k() {
  static const UnfoldedSpectrum spec = build_spectrum(BilliardShape(), 1.3e5);
  return spec;
}

double stddev(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / v.size());
}

}  // namespace

TEST_CASE("plans validate and build their grids", "[averaging]") {
  const SAPlan plan{1000.0, 100.0, 5};
  const auto grid = plan.grid();
  REQUIRE(grid.size() == 5);
  CHECK(grid.front() == 950.0);
  CHECK(grid.back() == 1050.0);
  CHECK(grid[2] == Approx(1000.0));
  CHECK_THROWS_AS((SAPlan{1000.0, 100.0, 1}.grid()), ConfigurationError);
  CHECK_THROWS_AS((SAPlan{1000.0, 0.0, 10}.grid()), ConfigurationError);

  const auto rsa = RSAPlan::uniform(1.0e5);
  CHECK(rsa.scale_ratios.size() == 1000);
  CHECK(rsa.scale_ratios.front() == 1.0);
  CHECK(rsa.scale_ratios.back() == 2.0);
  CHECK_THROWS_AS((RSAPlan{1.0e5, {1.0, 0.5}}.validate()), ConfigurationError);
  CHECK_THROWS_AS((RSAPlan{1.0e5, {1.5}}.validate()), ConfigurationError);
}

TEST_CASE("averages of a constant statistic return the constant", "[averaging]") {
  const auto constant = [](auto...) { return 2.75; };
  CHECK(spectral_mean(SAPlan{1.0e4, 500.0, 17}, constant) == 2.75);
  CHECK(rescaled_mean(RSAPlan{1.0e4, std::vector<double>(9, 1.0)}, 10.0, constant) == 2.75);
  // A statistic obeying the square-root scaling law is returned unchanged.
  const auto scaling = [](double energy, double) { return 2.75 * std::sqrt(energy / 1.0e4); };
  CHECK(rescaled_mean(RSAPlan::uniform(1.0e4, 2.0, 33), 10.0, scaling) == Approx(2.75).epsilon(1e-14));
  PAPlan pa;
  pa.n_members = 50;
  draw_alphas(pa);
  CHECK(parametric_mean(pa, constant) == Approx(2.75).epsilon(1e-15));
}

TEST_CASE("rescaled averaging with unit ratios is the sample statistic", "[averaging]") {
  const auto& spec = spectrum_to_130k();
  const RSAPlan plan{1.0e5, std::vector<double>(10, 1.0)};
  for (auto kind : {StatisticKind::iv, StatisticKind::cfss}) {
    CHECK(rsa_mean(kind, spec, plan, 321.0) == Approx(sample_statistic(kind, spec, 1.0e5, 321.0)));
  }
  CHECK(rsa_mean(StatisticKind::saturation_sr, spec, plan, 0.0) ==
        Approx(sample_statistic(StatisticKind::saturation_sr, spec, 1.0e5, 0.0)));
}

TEST_CASE("rescaled averaging rejects statistics without a scaling law", "[averaging]") {
  const auto& spec = spectrum_to_130k();
  const auto plan = RSAPlan::uniform(1.0e4, 2.0, 10);
  CHECK_THROWS_AS(rsa_mean(StatisticKind::gv, spec, plan, 10.0), UnsupportedStatisticError);
  CHECK_THROWS_AS(rsa_mean(StatisticKind::sr, spec, plan, 10.0), UnsupportedStatisticError);
  CHECK_THROWS_AS(rsa_mean(StatisticKind::fluctuation, spec, plan, 10.0), UnsupportedStatisticError);
}

TEST_CASE("spectral averaging outside the usable range is a range error", "[averaging]") {
  const auto& spec = spectrum_to_130k();
  const std::vector<double> widths{10.0};
  CHECK_THROWS_AS(sa_average(StatisticKind::iv, spec, SAPlan{1.3e5, 2.0e4, 10}, widths), RangeError);
}

TEST_CASE("aspect-ratio draws", "[averaging]") {
  PAPlan a;
  PAPlan b;
  draw_alphas(a);
  draw_alphas(b);
  CHECK(a.alphas == b.alphas);
  REQUIRE(a.alphas.size() == 2000);
  const double mean = std::accumulate(a.alphas.begin(), a.alphas.end(), 0.0) / a.alphas.size();
  CHECK(std::abs(mean - kDefaultAspectRatio) < 0.015);
  CHECK(stddev(a.alphas) == Approx(0.2).epsilon(0.1));
  for (double x : a.alphas) CHECK(x > 0.0);

  PAPlan other;
  other.seed = 2;
  draw_alphas(other);
  CHECK(other.alphas != a.alphas);

  PAPlan wide;
  wide.std_alpha = 3.0;
  wide.n_members = 500;
  draw_alphas(wide);
  for (double x : wide.alphas) CHECK(x > 0.0);

  PAPlan hopeless;
  hopeless.mean_alpha = -1.0;
  hopeless.std_alpha = 0.2;
  CHECK_THROWS_AS(draw_alphas(hopeless), ConfigurationError);
}

TEST_CASE("parametric averaging with one member is the sample statistic", "[averaging]") {
  PAPlan plan;
  plan.n_members = 1;
  draw_alphas(plan);
  const std::vector<double> widths{5.0, 80.0, 400.0};
  const auto curve = pa_average(StatisticKind::iv, plan, widths, PAGridMode::over_widths, 2.0e4);
  const auto spec = build_spectrum(BilliardShape(plan.alphas[0]), 2.1e4);
  for (std::size_t i = 0; i < widths.size(); ++i) {
    CHECK(curve.mean[i] == sample_iv(spec, Window{2.0e4, widths[i]}));
  }
  CHECK(curve.n_members == 1);
  CHECK(curve.column_name() == "pa_iv");
}

TEST_CASE("parametric averaging is bit-identical across thread counts", "[averaging]") {
  const std::vector<double> grid{3.0e3, 3.5e3, 4.0e3, 4.5e3};
  std::vector<StatisticCurve> runs;
  for (unsigned threads : {1u, 3u, 4u}) {
    PAPlan plan;
    plan.n_members = 40;
    plan.seed = 99;
    AveragingOptions opts;
    opts.threads = threads;
    const std::array queries{
        PAQuery{StatisticKind::gv, PAGridMode::over_energies, grid, 0.0, {}},
        PAQuery{StatisticKind::saturation_sr, PAGridMode::over_energies, grid, 0.0, "x"},
    };
    auto curves = pa_average(queries, plan, opts);
    REQUIRE(curves.size() == 2);
    CHECK(curves[1].column_name() == "pa_sat_sr_x");
    runs.push_back(curves[0]);
    runs.push_back(curves[1]);
  }
  for (std::size_t i = 2; i < runs.size(); ++i) CHECK(runs[i].mean == runs[i % 2].mean);
}

TEST_CASE("parametric averaging names the failing member", "[averaging]") {
  PAPlan plan;
  plan.n_members = 3;
  draw_alphas(plan);
  const std::vector<double> grid{100.0};
  try {
    pa_average(StatisticKind::iv, plan, grid, PAGridMode::over_widths, 10.0);
    FAIL("expected a range error");
  } catch (const RangeError& e) {
    CHECK(std::string(e.what()).find("below the usable range") != std::string::npos);
  }
  // A budget too small for any member fails as a resource error.
  AveragingOptions tiny;
  tiny.budget.max_levels = 100;
  CHECK_THROWS_AS(pa_average(StatisticKind::gv, plan, std::vector<double>{5.0e3},
                             PAGridMode::over_energies, 0.0, tiny),
                  ResourceError);
}

TEST_CASE("wide spectral averaging suppresses large-width oscillations", "[averaging]") {
  const auto& spec = spectrum_to_130k();
  const double eps = 1.0e5;
  const double root = std::sqrt(eps);
  const auto widths = linspace(2.0 * root, 10.0 * root, 200);
  const auto narrow = sa_average(StatisticKind::iv, spec, SAPlan{eps, 1.0e4, 1000}, widths);
  const auto wide = sa_average(StatisticKind::iv, spec, SAPlan{eps, 5.0e4, 1000}, widths);
  CHECK(stddev(wide.mean) < stddev(narrow.mean));
}

TEST_CASE("spectral average of GV over a window is the sample rigidity", "[averaging]") {
  const auto& spec = spectrum_to_130k();
  for (double eps : {2.0e4, 6.0e4, 1.0e5}) {
    for (double omega : {2.0e3, 1.0e4}) {
      const SAPlan plan{eps, omega, 20000};
      const double sa_gv = sa_mean(StatisticKind::gv, spec, plan, 0.0);
      const double sr = sample_sr(spec, Window{eps, omega});
      CHECK(sa_gv == Approx(sr).epsilon(0.05));
    }
  }
}
