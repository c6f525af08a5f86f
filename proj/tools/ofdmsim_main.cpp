#include "ofdmsim/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
  CLI::App app{"MIMO-OFDM link simulator with blind subspace channel estimation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_csv;
  int jobs = 1;
  std::uint64_t seed = 0;

  CLI::App* run = app.add_subcommand("run", "run the sweep described by a config file");
  run->add_option("config", config_path, "config or manifest file")->required();
  run->add_option("--out", out_csv, "output CSV path")->required();
  run->add_option("--jobs", jobs, "worker threads (default 1, deterministic either way)")
      ->check(CLI::PositiveNumber);
  CLI::Option* seed_opt = run->add_option("--seed", seed, "override the master seed");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config file");
  std::string validate_path;
  validate->add_option("config", validate_path, "config or manifest file")->required();

  CLI::App* version = app.add_subcommand("version", "print the tool version");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) {
    ofdmsim::RunOptions opt;
    opt.config_path = config_path;
    opt.out_csv = out_csv;
    opt.jobs = jobs;
    if (seed_opt->count() > 0) opt.seed_override = seed;
    return ofdmsim::run_command(opt, std::cout, std::cerr);
  }
  if (validate->parsed())
    return ofdmsim::validate_command(validate_path, std::cout, std::cerr);
  if (version->parsed()) {
    std::cout << ofdmsim::kToolName << " " << ofdmsim::kToolVersion << "\n";
    return 0;
  }
  return 1;
}
