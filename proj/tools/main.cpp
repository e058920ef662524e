#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "chordflow/cli.hpp"
#include "chordflow/errors.hpp"

namespace {

// Registers every config key as --<key>; values are applied after an optional --config file.
struct SharedOptions {
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  bool project_on_reject = false;
  bool allow_3d = false;
  CLI::Option* project_flag = nullptr;
  CLI::Option* allow_3d_flag = nullptr;

  void attach(CLI::App& app) {
    app.add_option("--config", config_path, "key=value config file; flags override it");
    for (const auto& key : chordflow::RunConfig::keys()) {
      if (key == "project-on-reject" || key == "allow-3d") continue;
      options[key] = app.add_option("--" + key, values[key]);
    }
    project_flag = app.add_flag("--project-on-reject", project_on_reject,
                                "Wulff-project the body when a step collapses");
    allow_3d_flag = app.add_flag("--allow-3d", allow_3d, "enable the experimental n = 3 flow");
  }

  chordflow::RunConfig resolve() const {
    chordflow::RunConfig config;
    if (!config_path.empty()) chordflow::load_config(config_path, config);
    for (const auto& [key, opt] : options) {
      if (opt->count() > 0) config.set(key, values.at(key));
    }
    if (project_flag->count() > 0) config.project_on_reject = project_on_reject;
    if (allow_3d_flag->count() > 0) config.allow_3d = allow_3d;
    return config;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orlicz chord Minkowski problem solver (normalized Gauss curvature flow)"};
  app.require_subcommand(1);

  SharedOptions solve_opts, verify_opts, sweep_opts;
  CLI::App* solve = app.add_subcommand("solve", "run the flow and write results to --out");
  solve_opts.attach(*solve);

  CLI::App* verify = app.add_subcommand("verify", "run a verification suite, CSV on stdout");
  std::string suite;
  verify->add_option("suite", suite, "identities | ball | ellipse | variational | flow-invariants")
      ->required();
  verify_opts.attach(*verify);

  CLI::App* sweep = app.add_subcommand("sweep", "solve once per parameter value");
  std::string param;
  std::vector<std::string> values;
  sweep->add_option("--param", param, "config key, or p for the power exponent")->required();
  sweep->add_option("--values", values, "comma separated values")->delimiter(',')->required();
  sweep_opts.attach(*sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : chordflow::kExitConfig;
  }

  try {
    if (*solve) return chordflow::cmd_solve(solve_opts.resolve(), std::cerr);
    if (*verify) return chordflow::cmd_verify(suite, verify_opts.resolve(), std::cout);
    if (*sweep) return chordflow::cmd_sweep(sweep_opts.resolve(), param, values, std::cerr);
  } catch (const chordflow::Error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return chordflow::kExitConfig;
  }
  return chordflow::kExitConfig;
}
