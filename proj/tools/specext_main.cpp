// Command-line front end: dispatches JSON-configured jobs to the library.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "specext/errors.hpp"
#include "specext/jobs.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  long seed = 0;
  bool seed_given = false;
  bool out_dir_given = false;
};

void add_common(CLI::App* sub, CommonArgs& args) {
  sub->add_option("--config", args.config_path, "Path to the JSON job config")
      ->required();
  sub->add_option("--out-dir", args.out_dir,
                  "Output directory (overrides the config)")
      ->each([&](const std::string&) { args.out_dir_given = true; });
  sub->add_option("--seed", args.seed,
                  "Seed recorded in output metadata (overrides the config)")
      ->each([&](const std::string&) { args.seed_given = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"specext: rational spectral density estimation from covariance "
               "and generalized cepstral moments on the discrete torus"};
  app.require_subcommand(1);

  static const char* commands[] = {"moments",      "solve",
                                   "verify",       "sweep-lambda",
                                   "converge-grid", "entropy-curve"};
  CommonArgs args;
  for (const char* name : commands) add_common(app.add_subcommand(name), args);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    specext::JobConfig config = specext::load_job_config(args.config_path, command);
    if (args.out_dir_given) config.out_dir = args.out_dir;
    if (args.seed_given) config.seed = args.seed;
    return specext::run_job(config);
  } catch (const specext::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return specext::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return specext::kExitConfig;
  } catch (const specext::infeasible_error& e) {
    std::cerr << "infeasible data: " << e.what() << "\n";
    return specext::kExitInfeasible;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 70;
  }
}
