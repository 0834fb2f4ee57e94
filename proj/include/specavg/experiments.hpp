#pragma once

/*
 * Named experiments: each assembles spectra, an ensemble, statistics and the
 * matching theory curve into a set of StatisticCurves on one abscissa grid.
 *
 *   fluct_sa      N(x) - x under SA, ranges from sa_ranges          (x grid)
 *   fluct_pa      N(x) - x under PA with the alpha-averaged theory  (x grid)
 *   iv_sa         IV under SA for each of sa_intervals              (E grid)
 *   iv_rsa_pa     IV under RSA and PA                               (E grid)
 *   cfss_rsa_pa   CFSS under RSA and PA                             (E grid)
 *   satsr_rsa_pa  saturation SR under RSA and PA                    (x grid)
 *   satsr_sa_pa   saturation SR under SA, PA, and one sample        (x grid)
 *   gv_pa         GV and saturation SR under PA, no theory          (x grid)
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "specavg/averaging.hpp"
#include "specavg/config.hpp"
#include "specavg/csv.hpp"
#include "specavg/error.hpp"
#include "specavg/grid.hpp"
#include "specavg/spectrum.hpp"
#include "specavg/statistics.hpp"
#include "specavg/theory.hpp"

namespace specavg {

enum class KeyGroup : unsigned {
  general = 1u << 0,
  energy_grid = 1u << 1,
  width_grid = 1u << 2,
  sa = 1u << 3,
  sa_ranges = 1u << 4,
  sa_intervals = 1u << 5,
  rsa = 1u << 6,
  pa = 1u << 7,
  saturation = 1u << 8,
  theory = 1u << 9,
  fluct = 1u << 10,
};

constexpr unsigned operator|(KeyGroup a, KeyGroup b) noexcept {
  return static_cast<unsigned>(a) | static_cast<unsigned>(b);
}
constexpr unsigned operator|(unsigned a, KeyGroup b) noexcept { return a | static_cast<unsigned>(b); }

struct ConfigKey {
  std::string_view name;
  KeyGroup group;
  std::string_view doc;
};

inline constexpr std::array kConfigKeys{
    ConfigKey{"experiment", KeyGroup::general, "experiment name (the CLI argument takes precedence)"},
    ConfigKey{"alpha", KeyGroup::general, "aspect ratio of the single spectrum used by SA, RSA and theory"},
    ConfigKey{"seed", KeyGroup::general, "seed for the aspect-ratio draws"},
    ConfigKey{"threads", KeyGroup::general, "worker threads for PA members, 0 = all cores"},
    ConfigKey{"output", KeyGroup::general, "CSV output path"},
    ConfigKey{"level_budget", KeyGroup::general, "maximum number of levels per spectrum"},
    ConfigKey{"e_min", KeyGroup::energy_grid, "first running energy of the grid"},
    ConfigKey{"e_max", KeyGroup::energy_grid, "last running energy of the grid"},
    ConfigKey{"e_points", KeyGroup::energy_grid, "number of running energies"},
    ConfigKey{"energy", KeyGroup::width_grid, "fixed running energy"},
    ConfigKey{"width_min", KeyGroup::width_grid, "first interval width"},
    ConfigKey{"width_max", KeyGroup::width_grid, "last interval width (default 10 sqrt(energy))"},
    ConfigKey{"width_points", KeyGroup::width_grid, "number of interval widths"},
    ConfigKey{"sa_samples", KeyGroup::sa, "sampled energies per SA average"},
    ConfigKey{"sa_ranges", KeyGroup::sa_ranges, "comma-separated SA ranges, one curve each"},
    ConfigKey{"sa_intervals", KeyGroup::sa_intervals, "comma-separated lo:hi sampled-energy intervals"},
    ConfigKey{"rsa_samples", KeyGroup::rsa, "sampled energies per RSA average"},
    ConfigKey{"rsa_max_ratio", KeyGroup::rsa, "largest energy ratio c sampled by RSA"},
    ConfigKey{"pa_members", KeyGroup::pa, "number of aspect ratios in the PA ensemble"},
    ConfigKey{"pa_mean_alpha", KeyGroup::pa, "mean of the aspect-ratio distribution"},
    ConfigKey{"pa_std_alpha", KeyGroup::pa, "standard deviation of the aspect-ratio distribution"},
    ConfigKey{"sat_width_low", KeyGroup::saturation, "saturation width up to sat_width_split"},
    ConfigKey{"sat_width_high", KeyGroup::saturation, "saturation width above sat_width_split"},
    ConfigKey{"sat_width_split", KeyGroup::saturation, "energy where the saturation width switches"},
    ConfigKey{"tail_tol", KeyGroup::theory, "relative truncation tolerance of the orbit sums"},
    ConfigKey{"fluct_r_max", KeyGroup::fluct, "truncation radius of the staircase fluctuation sum"},
};

struct ExperimentInfo {
  std::string_view name;
  unsigned groups;
  std::string_view summary;
};

inline constexpr unsigned kCommon = static_cast<unsigned>(KeyGroup::general);

inline constexpr std::array kExperiments{
    ExperimentInfo{"fluct_sa",
                   kCommon | KeyGroup::energy_grid | KeyGroup::sa | KeyGroup::sa_ranges |
                       KeyGroup::fluct,
                   "staircase fluctuation under spectral averaging"},
    ExperimentInfo{"fluct_pa", kCommon | KeyGroup::energy_grid | KeyGroup::pa | KeyGroup::fluct,
                   "staircase fluctuation under parametric averaging"},
    ExperimentInfo{"iv_sa",
                   kCommon | KeyGroup::width_grid | KeyGroup::sa | KeyGroup::sa_intervals |
                       KeyGroup::theory,
                   "interval number variance under spectral averaging"},
    ExperimentInfo{"iv_rsa_pa",
                   kCommon | KeyGroup::width_grid | KeyGroup::rsa | KeyGroup::pa | KeyGroup::theory,
                   "interval number variance under rescaled and parametric averaging"},
    ExperimentInfo{"cfss_rsa_pa",
                   kCommon | KeyGroup::width_grid | KeyGroup::rsa | KeyGroup::pa | KeyGroup::theory,
                   "staircase edge correlation under rescaled and parametric averaging"},
    ExperimentInfo{"satsr_rsa_pa",
                   kCommon | KeyGroup::energy_grid | KeyGroup::rsa | KeyGroup::pa |
                       KeyGroup::saturation | KeyGroup::theory,
                   "saturation rigidity under rescaled and parametric averaging"},
    ExperimentInfo{"satsr_sa_pa",
                   kCommon | KeyGroup::energy_grid | KeyGroup::sa | KeyGroup::sa_ranges |
                       KeyGroup::pa | KeyGroup::saturation | KeyGroup::theory,
                   "saturation rigidity under spectral and parametric averaging"},
    ExperimentInfo{"gv_pa",
                   kCommon | KeyGroup::energy_grid | KeyGroup::pa | KeyGroup::saturation,
                   "global number variance against saturation rigidity under parametric averaging"},
};

inline std::string experiment_names() {
  std::string out;
  for (const auto& e : kExperiments) {
    if (!out.empty()) out += ", ";
    out += e.name;
  }
  return out;
}

inline const ExperimentInfo& experiment_info(std::string_view name) {
  for (const auto& e : kExperiments) {
    if (e.name == name) return e;
  }
  throw ConfigurationError("unknown experiment '" + std::string(name) +
                           "'; valid: " + experiment_names());
}

struct ExperimentConfig {
  std::string experiment;
  double alpha = kDefaultAspectRatio;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output_path;
  LevelBudget budget{};

  double e_min = 1.0e4;
  double e_max = 1.1e4;
  std::size_t e_points = 1001;

  double energy = 1.0e5;
  double width_min = 10.0;
  std::optional<double> width_max;  // 10 sqrt(energy) when unset
  std::size_t width_points = 300;

  std::size_t sa_samples = 1000;
  std::vector<double> sa_ranges{1.0e3};
  std::vector<Interval> sa_intervals;

  std::size_t rsa_samples = 1000;
  double rsa_max_ratio = 2.0;

  std::size_t pa_members = 2000;
  double pa_mean_alpha = kDefaultAspectRatio;
  double pa_std_alpha = 0.2;

  SaturationWidthRule saturation{};
  double tail_tol = 1.0e-6;
  double fluct_r_max = 12.0;

  double resolved_width_max() const { return width_max.value_or(10.0 * std::sqrt(energy)); }
  std::vector<double> energy_grid() const { return linspace(e_min, e_max, e_points); }
  std::vector<double> width_grid() const {
    return linspace(width_min, resolved_width_max(), width_points);
  }
};

/// Defaults for a named experiment.
inline ExperimentConfig default_config(std::string_view name) {
  experiment_info(name);
  ExperimentConfig c;
  c.experiment = std::string(name);
  if (name == "fluct_pa") {
    c.pa_mean_alpha = 1.0;
  } else if (name == "iv_sa") {
    c.sa_intervals = {Interval{90500.0, 100500.0}, Interval{75000.0, 125000.0}};
  } else if (name == "cfss_rsa_pa") {
    c.width_min = 0.0;
    c.width_points = 301;
  } else if (name == "satsr_rsa_pa") {
    c.e_min = 1.0e3;
    c.e_max = 1.0e5;
    c.e_points = 100;
  } else if (name == "satsr_sa_pa") {
    c.e_min = 3.0e4;
    c.e_max = 1.0e5;
    c.e_points = 141;
    c.sa_ranges = {1.0e4, 5.0e4};
  } else if (name == "gv_pa") {
    c.e_min = 1.0e3;
    c.e_max = 1.0e5;
    c.e_points = 991;
  }
  return c;
}

namespace detail {

inline std::vector<Interval> parse_intervals(std::string_view key, std::string_view text) {
  std::vector<Interval> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma - start));
    if (!item.empty()) {
      const auto colon = item.find(':');
      if (colon == std::string_view::npos) {
        throw ConfigurationError("key '" + std::string(key) + "': expected lo:hi, got '" +
                                 std::string(item) + "'");
      }
      out.push_back(Interval{config_real(key, item.substr(0, colon)),
                             config_real(key, item.substr(colon + 1))});
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw ConfigurationError("key '" + std::string(key) + "': empty list");
  return out;
}

inline void set_key(ExperimentConfig& c, std::string_view key, std::string_view v) {
  auto real = [&] { return config_real(key, v); };
  auto count = [&] { return static_cast<std::size_t>(config_unsigned(key, v)); };
  if (key == "experiment") {
    if (trim(v) != c.experiment) {
      throw ConfigurationError("config names experiment '" + std::string(trim(v)) +
                               "' but '" + c.experiment + "' was requested");
    }
  } else if (key == "alpha") c.alpha = real();
  else if (key == "seed") c.seed = config_unsigned(key, v);
  else if (key == "threads") c.threads = static_cast<unsigned>(config_unsigned(key, v));
  else if (key == "output") c.output_path = std::string(trim(v));
  else if (key == "level_budget") c.budget.max_levels = count();
  else if (key == "e_min") c.e_min = real();
  else if (key == "e_max") c.e_max = real();
  else if (key == "e_points") c.e_points = count();
  else if (key == "energy") c.energy = real();
  else if (key == "width_min") c.width_min = real();
  else if (key == "width_max") c.width_max = real();
  else if (key == "width_points") c.width_points = count();
  else if (key == "sa_samples") c.sa_samples = count();
  else if (key == "sa_ranges") c.sa_ranges = config_real_list(key, v);
  else if (key == "sa_intervals") c.sa_intervals = parse_intervals(key, v);
  else if (key == "rsa_samples") c.rsa_samples = count();
  else if (key == "rsa_max_ratio") c.rsa_max_ratio = real();
  else if (key == "pa_members") c.pa_members = count();
  else if (key == "pa_mean_alpha") c.pa_mean_alpha = real();
  else if (key == "pa_std_alpha") c.pa_std_alpha = real();
  else if (key == "sat_width_low") c.saturation.low_width = real();
  else if (key == "sat_width_high") c.saturation.high_width = real();
  else if (key == "sat_width_split") c.saturation.split = real();
  else if (key == "tail_tol") c.tail_tol = real();
  else if (key == "fluct_r_max") c.fluct_r_max = real();
}

}  // namespace detail

/// Apply key/value settings on top of the experiment defaults. Unknown keys and
/// keys for an ensemble or grid the experiment does not use are errors.
inline ExperimentConfig make_config(std::string_view name, const ConfigValues& values) {
  const auto& info = experiment_info(name);
  ExperimentConfig c = default_config(name);
  for (const auto& [key, value] : values) {
    const auto it = std::find_if(kConfigKeys.begin(), kConfigKeys.end(),
                                 [&](const ConfigKey& k) { return k.name == key; });
    if (it == kConfigKeys.end()) throw ConfigurationError("unknown config key '" + key + "'");
    if ((info.groups & static_cast<unsigned>(it->group)) == 0) {
      throw ConfigurationError("config key '" + key + "' does not apply to experiment '" +
                               std::string(name) + "'");
    }
    detail::set_key(c, key, value);
  }
  return c;
}

inline void validate(const ExperimentConfig& c) {
  const auto& info = experiment_info(c.experiment);
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigurationError(what);
  };
  auto uses = [&](KeyGroup g) { return (info.groups & static_cast<unsigned>(g)) != 0; };
  need(c.alpha > 0.0 && std::isfinite(c.alpha), "alpha must be positive");
  if (uses(KeyGroup::energy_grid)) {
    need(c.e_min > 0.0 && c.e_max >= c.e_min, "energy grid needs 0 < e_min <= e_max");
    need(c.e_points >= 1, "e_points must be at least 1");
  }
  if (uses(KeyGroup::width_grid)) {
    need(c.energy > 0.0, "energy must be positive");
    need(c.width_min >= 0.0 && c.resolved_width_max() >= c.width_min,
         "width grid needs 0 <= width_min <= width_max");
    need(c.width_points >= 1, "width_points must be at least 1");
  }
  if (uses(KeyGroup::sa)) need(c.sa_samples >= 2, "sa_samples must be at least 2");
  if (uses(KeyGroup::sa_ranges)) {
    need(!c.sa_ranges.empty(), "sa_ranges is empty");
    for (double r : c.sa_ranges) need(r > 0.0, "SA ranges must be positive");
  }
  if (uses(KeyGroup::sa_intervals)) {
    need(!c.sa_intervals.empty(), "sa_intervals is empty");
    for (const auto& iv : c.sa_intervals) need(iv.hi > iv.lo, "SA intervals need lo < hi");
  }
  if (uses(KeyGroup::rsa)) {
    need(c.rsa_samples >= 1, "rsa_samples must be at least 1");
    need(c.rsa_max_ratio >= 1.0, "rsa_max_ratio must be at least 1");
  }
  if (uses(KeyGroup::pa)) {
    need(c.pa_members >= 1, "pa_members must be at least 1");
    need(c.pa_mean_alpha > 0.0, "pa_mean_alpha must be positive");
    need(c.pa_std_alpha >= 0.0, "pa_std_alpha must be non-negative");
  }
  if (uses(KeyGroup::saturation)) {
    need(c.saturation.low_width > 0.0 && c.saturation.high_width > 0.0,
         "saturation widths must be positive");
  }
  need(c.tail_tol > 0.0, "tail_tol must be positive");
  need(c.fluct_r_max > 0.0, "fluct_r_max must be positive");
}

struct ExperimentResult {
  std::vector<StatisticCurve> curves;
  std::vector<std::string> warnings;
  std::vector<double> alphas;  // PA draws, empty if no PA ensemble
};

namespace detail {

inline std::string range_label(double range) {
  std::ostringstream os;
  os << 'r' << std::llround(range);
  return os.str();
}

inline std::string interval_label(const Interval& iv) {
  std::ostringstream os;
  os << std::llround(iv.lo) << '_' << std::llround(iv.hi);
  return os.str();
}

inline StatisticCurve make_curve(Method method, StatisticKind kind, std::vector<double> grid,
                                 std::vector<double> mean, std::size_t members = 1,
                                 std::string qualifier = {}) {
  StatisticCurve c;
  c.method = method;
  c.kind = kind;
  c.abscissa = std::move(grid);
  c.mean = std::move(mean);
  c.n_members = members;
  c.qualifier = std::move(qualifier);
  return c;
}

inline PAPlan pa_plan(const ExperimentConfig& c) {
  PAPlan plan;
  plan.mean_alpha = c.pa_mean_alpha;
  plan.std_alpha = c.pa_std_alpha;
  plan.n_members = c.pa_members;
  plan.seed = c.seed;
  draw_alphas(plan);
  return plan;
}

inline POSumConfig theory_config(const ExperimentConfig& c) {
  POSumConfig p;
  p.tail_tol = c.tail_tol;
  p.fluct_r_max = c.fluct_r_max;
  return p;
}

}  // namespace detail

/// Run an experiment; writes the CSV when `output_path` is set.
inline ExperimentResult run_experiment(const ExperimentConfig& c) {
  validate(c);
  Diagnostics diag;
  AveragingOptions opts;
  opts.saturation = c.saturation;
  opts.diagnostics = &diag;
  opts.threads = c.threads;
  opts.budget = c.budget;

  const BilliardShape shape(c.alpha);
  const auto spectrum_to = [&](double x_needed) { return build_spectrum(shape, x_needed, c.budget); };
  ExperimentResult result;
  auto& curves = result.curves;
  const std::string& name = c.experiment;

  if (name == "fluct_sa") {
    const auto grid = c.energy_grid();
    const double widest = *std::max_element(c.sa_ranges.begin(), c.sa_ranges.end());
    const auto spec = spectrum_to(c.e_max + 0.5 * widest);
    for (const double range : c.sa_ranges) {
      auto curve = sa_average_over_energies(StatisticKind::fluctuation, spec, range, c.sa_samples,
                                            grid, 0.0, opts);
      curve.qualifier = detail::range_label(range);
      curves.push_back(std::move(curve));
    }
    std::vector<double> sample, theory;
    const auto po = detail::theory_config(c);
    for (const double x : grid) {
      sample.push_back(spec.fluctuation(x));
      theory.push_back(theory_staircase_fluct(shape.raw_energy(x), c.alpha, po));
    }
    curves.push_back(detail::make_curve(Method::sample, StatisticKind::fluctuation, grid, sample));
    curves.push_back(detail::make_curve(Method::theory, StatisticKind::fluctuation, grid, theory));
  } else if (name == "fluct_pa") {
    const auto grid = c.energy_grid();
    PAPlan plan = detail::pa_plan(c);
    curves.push_back(pa_average(StatisticKind::fluctuation, plan, grid, PAGridMode::over_energies,
                                0.0, opts));
    // Theory in raw energy, moved onto the unfolded axis by the perimeter shift.
    const double shift = perimeter_shift(0.5 * (c.e_min + c.e_max));
    std::vector<double> shifted(grid);
    for (double& x : shifted) x += shift;
    const auto po = detail::theory_config(c);
    curves.push_back(detail::make_curve(
        Method::theory, StatisticKind::fluctuation, grid,
        theory_staircase_fluct_mean(shifted, plan.alphas, po, FluctPhase::quarter_pi),
        plan.alphas.size()));
    curves.push_back(detail::make_curve(
        Method::theory, StatisticKind::fluctuation, grid,
        theory_staircase_fluct_mean(shifted, plan.alphas, po, FluctPhase::none),
        plan.alphas.size(), "nophase"));
    result.alphas = plan.alphas;
  } else if (name == "iv_sa") {
    const auto widths = c.width_grid();
    double x_top = 0.0;
    for (const auto& iv : c.sa_intervals) x_top = std::max(x_top, iv.hi);
    const auto spec = spectrum_to(x_top + 0.5 * c.resolved_width_max());
    for (const auto& iv : c.sa_intervals) {
      auto curve = sa_average(StatisticKind::iv, spec, SAPlan::from_interval(iv.lo, iv.hi, c.sa_samples),
                              widths, opts);
      curve.qualifier = detail::interval_label(iv);
      curves.push_back(std::move(curve));
    }
    const PeriodicOrbitSums po(c.alpha, detail::theory_config(c));
    std::vector<double> theory;
    for (const double w : widths) theory.push_back(po.sample_iv(c.energy, w));
    curves.push_back(detail::make_curve(Method::theory, StatisticKind::iv, widths, theory));
  } else if (name == "iv_rsa_pa" || name == "cfss_rsa_pa") {
    const StatisticKind kind = name == "iv_rsa_pa" ? StatisticKind::iv : StatisticKind::cfss;
    const auto widths = c.width_grid();
    const double root = std::sqrt(c.rsa_max_ratio);
    const auto spec = spectrum_to(c.rsa_max_ratio * c.energy + 0.5 * root * c.resolved_width_max());
    curves.push_back(rsa_average(kind, spec, RSAPlan::uniform(c.energy, c.rsa_max_ratio, c.rsa_samples),
                                 widths, opts));
    PAPlan plan = detail::pa_plan(c);
    curves.push_back(pa_average(kind, plan, widths, PAGridMode::over_widths, c.energy, opts));
    const PeriodicOrbitSums po(c.alpha, detail::theory_config(c));
    std::vector<double> theory;
    for (const double w : widths) {
      theory.push_back(kind == StatisticKind::iv ? po.sample_iv(c.energy, w) : po.cfss(c.energy, w));
    }
    curves.push_back(detail::make_curve(Method::theory, kind, widths, theory));
    result.alphas = plan.alphas;
  } else if (name == "satsr_rsa_pa" || name == "satsr_sa_pa") {
    const auto grid = c.energy_grid();
    const double half_sat = 0.5 * std::max(c.saturation.low_width, c.saturation.high_width);
    if (name == "satsr_rsa_pa") {
      const auto spec = spectrum_to(c.rsa_max_ratio * c.e_max + half_sat);
      curves.push_back(rsa_average_over_energies(StatisticKind::saturation_sr, spec, c.rsa_max_ratio,
                                                 c.rsa_samples, grid, 0.0, opts));
    } else {
      const double widest = *std::max_element(c.sa_ranges.begin(), c.sa_ranges.end());
      const auto spec = spectrum_to(c.e_max + 0.5 * widest + half_sat);
      for (const double range : c.sa_ranges) {
        auto curve = sa_average_over_energies(StatisticKind::saturation_sr, spec, range,
                                              c.sa_samples, grid, 0.0, opts);
        curve.qualifier = detail::range_label(range);
        curves.push_back(std::move(curve));
      }
      std::vector<double> sample;
      for (const double x : grid) {
        sample.push_back(sample_statistic(StatisticKind::saturation_sr, spec, x, 0.0, c.saturation, &diag));
      }
      curves.push_back(detail::make_curve(Method::sample, StatisticKind::saturation_sr, grid, sample));
    }
    PAPlan plan = detail::pa_plan(c);
    curves.push_back(pa_average(StatisticKind::saturation_sr, plan, grid, PAGridMode::over_energies,
                                0.0, opts));
    const PeriodicOrbitSums po(c.alpha, detail::theory_config(c));
    std::vector<double> theory;
    for (const double x : grid) theory.push_back(po.saturation_sr(x));
    curves.push_back(detail::make_curve(Method::theory, StatisticKind::saturation_sr, grid, theory));
    result.alphas = plan.alphas;
  } else if (name == "gv_pa") {
    const auto grid = c.energy_grid();
    PAPlan plan = detail::pa_plan(c);
    const std::array queries{
        PAQuery{StatisticKind::gv, PAGridMode::over_energies, grid, 0.0, {}},
        PAQuery{StatisticKind::saturation_sr, PAGridMode::over_energies, grid, 0.0, {}},
    };
    for (auto& curve : pa_average(queries, plan, opts)) curves.push_back(std::move(curve));
    result.alphas = plan.alphas;
  }

  result.warnings = diag.warnings();
  if (!c.output_path.empty()) emit_csv(curves, c.output_path);
  return result;
}

}  // namespace specavg
