#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "kernelbayes/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Exact Bayesian inference with Markov kernels on finite spaces"};
  app.require_subcommand(1);

  std::string scenario;
  std::size_t samples = kb::cli::kDefaultLawSamples;
  std::optional<std::uint64_t> seed;
  std::size_t resolution = kb::cli::kDefaultApResolution;
  std::string distribution = "uniform";

  auto* infer = app.add_subcommand("infer", "Inference map, data prior and sequential posteriors");
  infer->add_option("scenario", scenario, "Scenario JSON file")->required();

  auto* laws = app.add_subcommand("laws", "Monad laws and decision-rule algebra laws");
  laws->add_option("scenario", scenario, "Scenario JSON file")->required();
  laws->add_option("--samples", samples, "Number of generated higher-order samples");
  laws->add_option("--seed", seed, "Sampling seed (overrides KERNELBAYES_SEED)");

  auto* transport = app.add_subcommand("transport", "Exact optimal transport between two marginals");
  transport->add_option("scenario", scenario, "Scenario JSON file")->required();

  auto* ap = app.add_subcommand("ap", "Expectation of a second-order distribution over Bernoulli parameters");
  ap->add_option("--resolution", resolution, "Grid resolution n (parameters k/n)");
  ap->add_option("--distribution", distribution, "'uniform' or 'point:<p>'");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kb::cli::kExitInvalid;
  }

  kb::cli::Report report;
  if (*infer) report = kb::cli::cmd_infer(scenario);
  else if (*laws) report = kb::cli::cmd_laws(scenario, samples, seed, std::getenv("KERNELBAYES_SEED"));
  else if (*transport) report = kb::cli::cmd_transport(scenario);
  else report = kb::cli::cmd_ap(resolution, distribution);

  std::cout << report.out;
  std::cerr << report.err;
  return report.exit_code;
}
