#pragma once

/*
 * Ensemble averaging of sample statistics.
 *
 *   SA   spectral averaging: one spectrum at fixed aspect ratio, running energy
 *        sampled on an equally spaced grid of a range centred on eps.
 *   RSA  rescaled spectral averaging: running energy c_i eps and width
 *        sqrt(c_i) E, each sample divided by sqrt(c_i). Valid for statistics
 *        obeying s(c eps, sqrt(c) E) = sqrt(c) s(eps, E).
 *   PA   parametric averaging: fixed (eps, E), aspect ratio drawn from a
 *        Gaussian, one spectrum per member.
 *
 * Means are reduced in index order so results do not depend on thread count.
 */

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "specavg/error.hpp"
#include "specavg/grid.hpp"
#include "specavg/spectrum.hpp"
#include "specavg/statistics.hpp"

namespace specavg {

enum class Method { sa, rsa, pa, sample, theory };

constexpr std::string_view method_name(Method m) noexcept {
  switch (m) {
    case Method::sa: return "sa";
    case Method::rsa: return "rsa";
    case Method::pa: return "pa";
    case Method::sample: return "sample";
    case Method::theory: return "theory";
  }
  return "?";
}

struct StatisticCurve {
  std::vector<double> abscissa;
  std::vector<double> mean;
  std::size_t n_members = 1;
  Method method = Method::sample;
  StatisticKind kind = StatisticKind::iv;
  std::string qualifier;  // distinguishes curves of the same method and kind

  /// `<method>_<kind>` with `_<qualifier>` appended when present.
  std::string column_name() const {
    std::string name{method_name(method)};
    name += '_';
    name += kind_name(kind);
    if (!qualifier.empty()) {
      name += '_';
      name += qualifier;
    }
    return name;
  }
};

struct AveragingOptions {
  SaturationWidthRule saturation{};
  Diagnostics* diagnostics = nullptr;
  /// Worker threads for parametric averaging; 0 uses the hardware concurrency.
  unsigned threads = 0;
  LevelBudget budget{};
};

// ---------------------------------------------------------------------------
// Spectral averaging

struct SAPlan {
  double center = 0.0;
  double range = 0.0;
  std::size_t n_samples = 1000;

  static SAPlan from_interval(double lo, double hi, std::size_t n_samples = 1000) {
    return SAPlan{0.5 * (lo + hi), hi - lo, n_samples};
  }

  void validate() const {
    if (n_samples < 2) throw ConfigurationError("spectral averaging needs at least 2 samples");
    if (!(range > 0.0)) throw ConfigurationError("spectral averaging range must be positive");
  }

  /// Equally spaced energies on [center - range/2, center + range/2].
  std::vector<double> grid() const {
    validate();
    return linspace(center - 0.5 * range, center + 0.5 * range, n_samples);
  }
};

/// Mean of stat(x) over the sampled energies x of the plan.
template <class Stat>
double spectral_mean(const SAPlan& plan, Stat&& stat) {
  const auto energies = plan.grid();
  double acc = 0.0;
  for (const double x : energies) acc += stat(x);
  return acc / static_cast<double>(energies.size());
}

inline double sa_mean(StatisticKind kind, const UnfoldedSpectrum& spec, const SAPlan& plan,
                      double width, const AveragingOptions& opts = {}) {
  return spectral_mean(plan, [&](double x) {
    return sample_statistic(kind, spec, x, width, opts.saturation, opts.diagnostics);
  });
}

/// SA at a fixed running energy as a function of the width E.
inline StatisticCurve sa_average(StatisticKind kind, const UnfoldedSpectrum& spec,
                                 const SAPlan& plan, std::span<const double> widths,
                                 const AveragingOptions& opts = {}) {
  StatisticCurve out;
  out.method = Method::sa;
  out.kind = kind;
  out.n_members = plan.n_samples;
  out.abscissa.assign(widths.begin(), widths.end());
  out.mean.reserve(widths.size());
  for (const double w : widths) out.mean.push_back(sa_mean(kind, spec, plan, w, opts));
  return out;
}

/// SA with a fixed range around each running energy of a grid.
inline StatisticCurve sa_average_over_energies(StatisticKind kind, const UnfoldedSpectrum& spec,
                                               double range, std::size_t n_samples,
                                               std::span<const double> energies, double width,
                                               const AveragingOptions& opts = {}) {
  StatisticCurve out;
  out.method = Method::sa;
  out.kind = kind;
  out.n_members = n_samples;
  out.abscissa.assign(energies.begin(), energies.end());
  out.mean.reserve(energies.size());
  for (const double e : energies) {
    out.mean.push_back(sa_mean(kind, spec, SAPlan{e, range, n_samples}, width, opts));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rescaled spectral averaging

struct RSAPlan {
  double base_energy = 0.0;
  std::vector<double> scale_ratios;  // c_i >= 1, c_0 = 1

  /// c_i equally spaced on [1, max_ratio], n_points values including both ends.
  static RSAPlan uniform(double base_energy, double max_ratio = 2.0,
                         std::size_t n_points = 1000) {
    if (n_points < 1) throw ConfigurationError("rescaled averaging needs at least one energy");
    if (!(max_ratio >= 1.0)) throw ConfigurationError("rescaled averaging needs max ratio >= 1");
    RSAPlan plan{base_energy, n_points == 1 ? std::vector<double>{1.0}
                                            : linspace(1.0, max_ratio, n_points)};
    return plan;
  }

  void validate() const {
    if (!(base_energy > 0.0)) throw ConfigurationError("rescaled averaging needs eps > 0");
    if (scale_ratios.empty()) throw ConfigurationError("rescaled averaging needs scale ratios");
    if (scale_ratios.front() != 1.0) throw ConfigurationError("first scale ratio must be 1");
    for (const double c : scale_ratios) {
      if (!(c >= 1.0) || !std::isfinite(c)) throw ConfigurationError("scale ratios must be >= 1");
    }
  }
};

/// Mean over i of stat(c_i eps, sqrt(c_i) E) / sqrt(c_i).
template <class Stat>
double rescaled_mean(const RSAPlan& plan, double width, Stat&& stat) {
  plan.validate();
  double acc = 0.0;
  for (const double c : plan.scale_ratios) {
    const double root = std::sqrt(c);
    acc += stat(c * plan.base_energy, root * width) / root;
  }
  return acc / static_cast<double>(plan.scale_ratios.size());
}

inline bool rsa_supported(StatisticKind kind) noexcept {
  return kind == StatisticKind::iv || kind == StatisticKind::cfss ||
         kind == StatisticKind::saturation_sr;
}

inline double rsa_mean(StatisticKind kind, const UnfoldedSpectrum& spec, const RSAPlan& plan,
                       double width, const AveragingOptions& opts = {}) {
  if (!rsa_supported(kind)) {
    throw UnsupportedStatisticError("no rescaled form of spectral averaging for statistic '" +
                                    std::string(kind_name(kind)) + "'");
  }
  return rescaled_mean(plan, width, [&](double energy, double w) {
    return sample_statistic(kind, spec, energy, w, opts.saturation, opts.diagnostics);
  });
}

inline StatisticCurve rsa_average(StatisticKind kind, const UnfoldedSpectrum& spec,
                                  const RSAPlan& plan, std::span<const double> widths,
                                  const AveragingOptions& opts = {}) {
  StatisticCurve out;
  out.method = Method::rsa;
  out.kind = kind;
  out.n_members = plan.scale_ratios.size();
  out.abscissa.assign(widths.begin(), widths.end());
  out.mean.reserve(widths.size());
  for (const double w : widths) out.mean.push_back(rsa_mean(kind, spec, plan, w, opts));
  return out;
}

inline StatisticCurve rsa_average_over_energies(StatisticKind kind, const UnfoldedSpectrum& spec,
                                                double max_ratio, std::size_t n_points,
                                                std::span<const double> energies, double width,
                                                const AveragingOptions& opts = {}) {
  StatisticCurve out;
  out.method = Method::rsa;
  out.kind = kind;
  out.n_members = n_points;
  out.abscissa.assign(energies.begin(), energies.end());
  out.mean.reserve(energies.size());
  for (const double e : energies) {
    out.mean.push_back(rsa_mean(kind, spec, RSAPlan::uniform(e, max_ratio, n_points), width, opts));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parametric averaging

struct PAPlan {
  double mean_alpha = kDefaultAspectRatio;
  double std_alpha = 0.2;
  std::size_t n_members = 2000;
  std::uint64_t seed = 1;
  std::vector<double> alphas;  // recorded draws
};

namespace detail {

// Uniform on [0, 1) from the top 53 bits; mt19937_64 output is fully specified.
inline double unit_uniform(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

}  // namespace detail

/// Gaussian draws of the aspect ratio, rejecting non-positive values. The
/// sequence depends only on the seed.
inline const std::vector<double>& draw_alphas(PAPlan& plan) {
  if (plan.n_members < 1) throw ConfigurationError("parametric averaging needs members");
  if (!(plan.std_alpha >= 0.0) || !std::isfinite(plan.mean_alpha)) {
    throw ConfigurationError("invalid aspect-ratio distribution");
  }
  std::mt19937_64 gen(plan.seed);
  std::vector<double> out;
  out.reserve(plan.n_members);
  std::size_t rejected = 0;
  while (out.size() < plan.n_members) {
    // Box-Muller, both variates used.
    const double u1 = 1.0 - detail::unit_uniform(gen);
    const double u2 = detail::unit_uniform(gen);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    for (const double z : {radius * std::cos(angle), radius * std::sin(angle)}) {
      if (out.size() == plan.n_members) break;
      const double a = plan.mean_alpha + plan.std_alpha * z;
      if (a > 0.0) {
        out.push_back(a);
      } else if (++rejected > plan.n_members) {
        std::ostringstream os;
        os << "aspect-ratio rejection rate above 50% (mean " << plan.mean_alpha << ", std "
           << plan.std_alpha << ")";
        throw ConfigurationError(os.str());
      }
    }
  }
  plan.alphas = std::move(out);
  return plan.alphas;
}

/// Mean of stat(alpha) over the recorded draws, in member order.
template <class Stat>
double parametric_mean(const PAPlan& plan, Stat&& stat) {
  if (plan.alphas.empty()) throw ConfigurationError("aspect ratios have not been drawn");
  double acc = 0.0;
  for (const double a : plan.alphas) acc += stat(a);
  return acc / static_cast<double>(plan.alphas.size());
}

enum class PAGridMode {
  over_energies,  // grid of running energies at a fixed width
  over_widths,    // grid of widths at a fixed running energy
};

struct PAQuery {
  StatisticKind kind = StatisticKind::iv;
  PAGridMode mode = PAGridMode::over_widths;
  std::vector<double> grid;
  double fixed = 0.0;  // width (over_energies) or running energy (over_widths)
  std::string qualifier;

  double energy_at(std::size_t i) const { return mode == PAGridMode::over_energies ? grid[i] : fixed; }
  double width_at(std::size_t i) const { return mode == PAGridMode::over_energies ? fixed : grid[i]; }
};

/// Evaluate several queries over one ensemble; each member spectrum is built
/// once and covers every query. Draws alphas into the plan if it has none.
inline std::vector<StatisticCurve> pa_average(std::span<const PAQuery> queries, PAPlan& plan,
                                              const AveragingOptions& opts = {}) {
  if (plan.alphas.empty()) draw_alphas(plan);
  const std::size_t members = plan.alphas.size();

  std::size_t points = 0;
  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = 0.0;
  for (const auto& q : queries) {
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
      const double e = q.energy_at(i);
      const double reach = statistic_reach(q.kind, e, q.width_at(i), opts.saturation);
      x_lo = std::min(x_lo, e - reach);
      x_hi = std::max(x_hi, e + reach);
    }
    points += q.grid.size();
  }
  if (points == 0) throw ConfigurationError("parametric averaging with an empty grid");
  if (x_lo < 1.0) {
    std::ostringstream os;
    os << "parametric averaging reads unfolded energy " << x_lo << " below the usable range";
    throw RangeError(os.str());
  }

  auto evaluate_member = [&](std::size_t m, double* row) {
    const BilliardShape shape(plan.alphas[m]);
    try {
      const UnfoldedSpectrum spec = build_spectrum(shape, x_hi, opts.budget);
      std::size_t p = 0;
      for (const auto& q : queries) {
        for (std::size_t i = 0; i < q.grid.size(); ++i) {
          row[p++] = sample_statistic(q.kind, spec, q.energy_at(i), q.width_at(i), opts.saturation,
                                      opts.diagnostics);
        }
      }
    } catch (const RangeError& err) {
      std::ostringstream os;
      os << "member " << m << " (alpha=" << plan.alphas[m] << "): " << err.what();
      throw RangeError(os.str());
    }
  };

  unsigned threads = opts.threads != 0 ? opts.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(members)));
  const std::size_t batch = std::max<std::size_t>(8 * threads, 32);

  std::vector<double> sums(points, 0.0);
  std::vector<double> rows(batch * points);
  for (std::size_t start = 0; start < members; start += batch) {
    const std::size_t count = std::min(batch, members - start);
    if (threads == 1) {
      for (std::size_t j = 0; j < count; ++j) evaluate_member(start + j, rows.data() + j * points);
    } else {
      std::vector<std::exception_ptr> errors(threads);
      std::vector<std::thread> pool;
      pool.reserve(threads);
      for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
          try {
            for (std::size_t j = t; j < count; j += threads) {
              evaluate_member(start + j, rows.data() + j * points);
            }
          } catch (...) {
            errors[t] = std::current_exception();
          }
        });
      }
      for (auto& th : pool) th.join();
      for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }
    for (std::size_t j = 0; j < count; ++j) {
      const double* row = rows.data() + j * points;
      for (std::size_t p = 0; p < points; ++p) sums[p] += row[p];
    }
  }

  std::vector<StatisticCurve> out;
  out.reserve(queries.size());
  std::size_t p = 0;
  for (const auto& q : queries) {
    StatisticCurve c;
    c.method = Method::pa;
    c.kind = q.kind;
    c.qualifier = q.qualifier;
    c.n_members = members;
    c.abscissa = q.grid;
    c.mean.reserve(q.grid.size());
    for (std::size_t i = 0; i < q.grid.size(); ++i) {
      c.mean.push_back(sums[p++] / static_cast<double>(members));
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline StatisticCurve pa_average(StatisticKind kind, PAPlan& plan, std::span<const double> grid,
                                 PAGridMode mode, double fixed, const AveragingOptions& opts = {}) {
  const PAQuery q{kind, mode, std::vector<double>(grid.begin(), grid.end()), fixed, {}};
  return std::move(pa_average(std::span<const PAQuery>(&q, 1), plan, opts).front());
}

}  // namespace specavg
