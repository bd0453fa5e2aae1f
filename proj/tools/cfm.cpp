// SPDX-License-Identifier: Apache-2.0
// Command line runner for the experiment configs.
#include <CLI11.hpp>

#include <iostream>

#include "cfm/cli.hpp"
#include "cfm/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Conformal moduli and maps on parameterized surfaces"};
  app.require_subcommand(1);

  std::string config;
  int p = 0;
  for (const char* verb : {"modulus", "map", "convergence", "mercator", "multiholes"}) {
    auto* sub = app.add_subcommand(verb, std::string("run a ") + verb + " experiment");
    sub->add_option("--config", config, "experiment INI file")->required();
    sub->add_option("--p", p, "polynomial degree, replaces the schedule")->check(CLI::Range(1, 30));
  }
  app.add_subcommand("catalog", "list surfaces, domains and modes");

  CLI11_PARSE(app, argc, argv);
  const std::string verb = app.get_subcommands().front()->get_name();
  try {
    if (verb == "catalog") {
      std::cout << cfm::catalog_text();
      return 0;
    }
    cfm::ExperimentConfig cfg = cfm::load_config(config, verb);
    if (p > 0) cfg.ps = {p};
    std::cout << cfm::run(cfg).report;
  } catch (const cfm::Error& e) {
    std::cerr << "cfm: " << e.what() << "\n";
    return e.code() == cfm::ErrorCode::ConfigError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "cfm: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
