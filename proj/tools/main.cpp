#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bifluid/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Viscous compressible bifluid simulator and verification suite"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  bool quiet = false;
  const char* verbs[][2] = {
      {"simulate", "Run the solver with the enabled monitors"},
      {"verify", "Run the solver with every estimate monitor"},
      {"mms", "Manufactured-solution convergence study"},
      {"uniqueness", "Continuous-dependence scaling experiment"},
      {"galerkin", "Spectral Galerkin oracle checks"},
  };
  for (const auto& verb : verbs) {
    CLI::App* sub = app.add_subcommand(verb[0], verb[1]);
    sub->add_option("--config", config_path, "Key-value configuration file")->required();
    sub->add_option("--out", out, "Output directory")->required();
    sub->add_flag("--quiet", quiet, "Suppress progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bifluid::kExitInputError;
  }

  bifluid::CommandContext ctx;
  ctx.out = out;
  ctx.quiet = quiet;
  ctx.log = &std::cout;
  ctx.err = &std::cerr;
  return bifluid::run_command(app.get_subcommands().front()->get_name(), config_path, ctx);
}
