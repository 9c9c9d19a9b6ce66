#include "commands.hpp"

#include "leakywire/errors.hpp"

#include <CLI11.hpp>

#include <functional>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
  using namespace leakywire::cli;
  CLI::App app{"Bound states of 3D Schroedinger operators with a delta interaction on a curve"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  int workers = 0;
  bool verbose = false;

  const std::map<std::string, std::pair<std::string, std::function<int(const Context&)>>> commands = {
      {"spectrum", {"Bound states below the threshold (spectrum.json)", cmd_spectrum}},
      {"existence", {"Existence thresholds and the curve's verdict (existence.json)", cmd_existence}},
      {"hiatus", {"Eigenvalue sweep over hiatus widths (hiatus_sweep.csv, hiatus_fit.json)", cmd_hiatus}},
      {"regcheck", {"Regularization independence check (regcheck.csv, regcheck.json)", cmd_regcheck}},
      {"eigfun", {"Eigenfunction values off the curve (eigfun.csv)", cmd_eigfun}},
  };
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    sub->add_option("--config", config_path, "TOML configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--workers", workers, "Worker threads (overrides the config)")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", verbose, "Progress messages on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    Context ctx;
    ctx.config = load_config(config_path);
    if (workers > 0) ctx.config.workers = workers;
    ctx.out = out_dir;
    ctx.verbose = verbose;
    for (const auto& [name, entry] : commands)
      if (app.got_subcommand(name)) return entry.second(ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
