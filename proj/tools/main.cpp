#include <CLI11.hpp>
#include <cstdio>

#include "commands.hpp"
#include "ek/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Traveling waves and multi-solitons of the 1-D Euler-Korteweg system"};
  std::string config, out = "out";
  int verbosity = 1;
  app.add_option("--config", config, "JSON configuration file (defaults are used for missing keys)");
  app.add_option("--out", out, "output directory");
  app.add_option("--verbosity", verbosity, "0 quiet, 1 progress, 2 details")->check(CLI::Range(0, 2));
  app.require_subcommand(1);
  for (const auto& name : ekcli::subcommands()) app.add_subcommand(name)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  ekcli::RunConfig cfg;
  try {
    if (!config.empty()) cfg = ekcli::load_config(config);
  } catch (const ek::Error& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 2;
  }
  return ekcli::run(app.get_subcommands().front()->get_name(), cfg, out, verbosity);
}
