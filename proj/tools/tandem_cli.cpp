// Experiment runner CLI: design tandem networks, evaluate closed-form
// baselines, run exhaustive-search oracles and Monte Carlo validation, all
// driven by a structured config file. Writes one CSV per series plus a run
// manifest.

#include <CLI11.hpp>
#include <iostream>
#include <optional>
#include <string>

#include "tandem/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tandem network design and evaluation for decentralized hypothesis testing"};
  app.require_subcommand(1);

  struct Common {
    std::string config;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
  };
  std::map<std::string, Common> opts;
  for (const char* name : {"design", "baseline", "oracle", "montecarlo"}) {
    auto* sub = app.add_subcommand(name);
    auto& c = opts[name];
    sub->add_option("--config", c.config, "experiment config file")->required();
    sub->add_option("--out", c.out, "output directory (overrides output.dir)");
    sub->add_option("--seed", c.seed, "root seed (overrides network.seed)");
  }
  app.get_subcommand("design")->description("design networks per rate and N, write error curves");
  app.get_subcommand("baseline")->description("closed-form curves: swaszek, cover, linear");
  app.get_subcommand("oracle")->description("exhaustive-search optimum on tiny instances");
  app.get_subcommand("montecarlo")->description("design, then validate by simulation");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage problems are config errors
  }

  const std::string kind = app.get_subcommands().front()->get_name();
  const Common& c = opts[kind];
  return tandem::cli::run_command(kind, c.config, c.out, c.seed, std::cout, std::cerr);
}
