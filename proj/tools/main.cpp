#include <iostream>

#include "CLI11.hpp"
#include "pdattack/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace pdattack::cli;
  CLI::App app{"Pole-dynamics attack simulation and analysis"};
  app.require_subcommand(1);
  GlobalOptions opts;
  bool no_timestamps = false;
  std::uint64_t seed = 0;
  long long runs = 0;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opts.config, "Scenario JSON file")->required();
    sub->add_option("--out-dir", opts.out_dir, "Directory for CSV output")->capture_default_str();
    sub->add_flag("--no-timestamps", no_timestamps, "Omit the timestamp line from the report");
    sub->add_option("--seed", seed, "Noise seed (overrides noise.seed)");
  };
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and score it");
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate the detector threshold from attack-free runs");
  auto* check_ic = app.add_subcommand("check-ic", "Check whether an auxiliary-model start converges");
  auto* omega = app.add_subcommand("omega", "Assemble the delay stability matrix and test its sign");
  auto* compare = app.add_subcommand("compare", "Run several attacks against one scenario");
  for (auto* sub : {simulate, calibrate, check_ic, omega, compare}) add_common(sub);
  auto* runs_opt = calibrate->add_option("--runs", runs, "Number of runs (>= 2)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  opts.timestamps = !no_timestamps;
  for (auto* sub : {simulate, calibrate, check_ic, omega, compare})
    if (sub->count("--seed") > 0) opts.seed = seed;
  if (runs_opt->count() > 0) opts.runs = runs;

  if (*simulate) return cmd_simulate(opts, std::cout, std::cerr);
  if (*calibrate) return cmd_calibrate(opts, std::cout, std::cerr);
  if (*check_ic) return cmd_check_ic(opts, std::cout, std::cerr);
  if (*omega) return cmd_omega(opts, std::cout, std::cerr);
  return cmd_compare(opts, std::cout, std::cerr);
}
