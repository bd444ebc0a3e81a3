// Experiment runner for the conditional optimal transport toolkit.
// Thin shell over the C API: parse arguments, load the config file, run the
// command, print the report. Exit codes: 0 success, 2 validation failure,
// 1 numerical failure.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "condot.h"

namespace {

int run_one(const std::string& command, const std::string& config_path,
            int64_t seed, const std::string& out_dir, int jobs,
            bool print_defaults) {
  if (print_defaults) {
    char* text = nullptr;
    const int rc = condot_command_defaults(command.c_str(), &text);
    if (rc != CONDOT_OK) {
      std::cerr << "error: " << condot_last_error() << "\n";
      return rc;
    }
    std::cout << text << "\n";
    condot_string_free(text);
    return 0;
  }

  std::string config;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) {
      std::cerr << "error: cannot read config file " << config_path << "\n";
      return CONDOT_ERR_VALIDATION;
    }
    std::ostringstream ss;
    ss << is.rdbuf();
    config = ss.str();
  }

  char* report = nullptr;
  const int rc = condot_run_command(command.c_str(), config.c_str(), seed,
                                    out_dir.c_str(), jobs, &report);
  if (rc != CONDOT_OK) {
    std::cerr << "error: " << condot_last_error() << "\n";
    return rc;
  }
  std::cout << report << "\n";
  condot_string_free(report);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string("condot experiment runner (") + condot_version() +
               ")"};
  app.require_subcommand(1);

  const char* commands[] = {"counterexample", "beta_sweep",   "duality_check",
                            "geodesic_check", "particle_flow", "gmm_train",
                            "gmm_eval"};

  struct Options {
    std::string config;
    int64_t seed = -1;
    std::string out = "runs";
    int jobs = 1;
    bool print_defaults = false;
  };

  std::vector<std::pair<CLI::App*, Options>> subs;
  subs.reserve(std::size(commands));
  for (const char* name : commands) {
    CLI::App* sub = app.add_subcommand(name);
    subs.emplace_back(sub, Options{});
    Options& opt = subs.back().second;
    sub->add_option("--config", opt.config, "JSON config file");
    sub->add_option("--seed", opt.seed, "seed override");
    sub->add_option("--out", opt.out, "output directory")->capture_default_str();
    sub->add_option("--jobs", opt.jobs, "parallel jobs for independent work")
        ->capture_default_str();
    sub->add_flag("--print-defaults", opt.print_defaults,
                  "print the default config and exit");
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [sub, opt] : subs)
    if (sub->parsed())
      return run_one(sub->get_name(), opt.config, opt.seed, opt.out, opt.jobs,
                     opt.print_defaults);
  return 0;
}
