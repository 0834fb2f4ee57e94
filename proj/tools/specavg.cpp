// specavg: command-line front end for the experiments.
//
//   specavg spectrum --alpha A --e-max X [--out PATH]
//   specavg run <experiment> [--config PATH] [--seed N] [--out PATH] [--set key=value]...
//   specavg list-experiments
//
// On failure prints `error: <category>: <message>` to stderr and exits with the
// category's code.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "specavg/specavg.hpp"

namespace {

int run_spectrum(double alpha, double x_max, const std::string& out) {
  const specavg::BilliardShape shape(alpha);
  const auto raw = specavg::enumerate_levels(shape, specavg::required_e_max(shape, x_max));
  if (out.empty() || out == "-") {
    specavg::write_spectrum_csv(std::cout, raw);
    return 0;
  }
  std::ofstream file(out, std::ios::binary | std::ios::trunc);
  if (!file) throw specavg::IoError("cannot open '" + out + "' for writing");
  specavg::write_spectrum_csv(file, raw);
  if (!file) throw specavg::IoError("write to '" + out + "' failed");
  return 0;
}

int run_experiment(const std::string& name, const std::string& config_path,
                   std::optional<std::uint64_t> seed, const std::string& out,
                   const std::vector<std::string>& sets) {
  specavg::ConfigValues values;
  if (!config_path.empty()) values = specavg::read_config_file(config_path);
  for (const auto& s : sets) {
    for (auto& [k, v] : specavg::parse_config_text(s)) values.insert_or_assign(k, v);
  }
  if (seed) values.insert_or_assign("seed", std::to_string(*seed));
  if (!out.empty()) values.insert_or_assign("output", out);

  auto config = specavg::make_config(name, values);
  if (config.output_path.empty()) config.output_path = name + ".csv";
  const auto result = specavg::run_experiment(config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << "wrote " << config.output_path << " (" << result.curves.size() << " curves, "
            << result.curves.front().abscissa.size() << " rows)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Ensemble averages of spectral statistics for rectangular billiards"};
  app.require_subcommand(1);

  double alpha = specavg::kDefaultAspectRatio;
  double x_max = 1.0e4;
  std::string spectrum_out;
  auto* spectrum = app.add_subcommand("spectrum", "write the levels of one billiard as CSV");
  spectrum->add_option("--alpha", alpha, "aspect ratio")->check(CLI::PositiveNumber);
  spectrum->add_option("--x-max", x_max, "highest unfolded energy to cover")->check(CLI::PositiveNumber);
  spectrum->add_option("--out", spectrum_out, "output path, '-' for stdout");

  std::string experiment, config_path, out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  auto* run = app.add_subcommand("run", "run a named experiment and write its CSV");
  run->add_option("experiment", experiment, "experiment name")->required();
  run->add_option("--config", config_path, "key = value config file");
  run->add_option("--seed", seed, "seed for the aspect-ratio draws");
  run->add_option("--out", out, "CSV output path (default <experiment>.csv)");
  run->add_option("--set", sets, "override a config key, key=value");

  auto* list = app.add_subcommand("list-experiments", "list experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : specavg::exit_code(specavg::ErrorCategory::argument);
  }

  try {
    if (spectrum->parsed()) return run_spectrum(alpha, x_max, spectrum_out);
    if (run->parsed()) return run_experiment(experiment, config_path, seed, out, sets);
    if (list->parsed()) {
      for (const auto& e : specavg::kExperiments) std::cout << e.name << '\t' << e.summary << '\n';
      return 0;
    }
  } catch (const specavg::Error& e) {
    std::cerr << "error: " << specavg::to_string(e.category()) << ": " << e.what() << '\n';
    return specavg::exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "error: internal: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
