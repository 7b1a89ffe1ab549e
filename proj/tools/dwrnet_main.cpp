// dwrnet: run deep-collocation DWR experiments from a JSON config.
#include <iostream>

#include <CLI11.hpp>

#include "dwrnet/runner/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Deep-collocation solver with dual-weighted-residual error estimation"};
  app.require_subcommand(1);
  auto* run_cmd = app.add_subcommand("run", "run an experiment config");
  std::string config;
  std::uint64_t seed = 0;
  int jobs = 1;
  int level = -1;
  std::string out_dir;
  bool dry_run = false;
  run_cmd->add_option("config", config, "experiment config (JSON)")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override the base seed");
  auto* jobs_opt = run_cmd->add_option("--jobs", jobs, "parallel sweep cells")->check(CLI::PositiveNumber);
  auto* level_opt = run_cmd->add_option("--level", level, "run only this schedule level");
  auto* out_opt = run_cmd->add_option("--out", out_dir, "override the output directory");
  run_cmd->add_flag("--dry-run", dry_run, "validate the config without training");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  dwrnet::run::Overrides ov;
  if (*seed_opt) ov.seed = seed;
  if (*jobs_opt) ov.jobs = jobs;
  if (*level_opt) ov.level = level;
  if (*out_opt) ov.output_dir = out_dir;
  ov.dry_run = dry_run;
  try {
    const auto cfg = dwrnet::run::load_config(config);
    return dwrnet::run::run(cfg, ov);
  } catch (const dwrnet::Error& e) {
    std::cerr << e.what() << '\n';
    return e.exit_code();
  }
}
