#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "isaacs/config.hpp"
#include "isaacs/errors.hpp"
#include "isaacs/runner.hpp"

namespace {

struct Options {
  std::string config_path;
  std::string output_dir;
  int threads = 1;
  bool verbose = false;
};

void add_common_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("-c,--config", opt.config_path,
                  "path to the JSON run configuration")
      ->required();
  cmd->add_option("-o,--output-dir", opt.output_dir,
                  "artifact directory (overrides the config)");
  cmd->add_option("-t,--threads", opt.threads,
                  "worker threads (reserved; this build solves single-threaded)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("-v,--verbose", opt.verbose, "progress notes on stderr");
}

int execute(const Options& opt, isaacs::RunMode mode) {
  isaacs::RunConfig config;
  try {
    config = isaacs::load_config(opt.config_path);
  } catch (const isaacs::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  if (config.mode != mode) {
    std::cerr << "error: mode: config requests '" << to_string(config.mode)
              << "' but the '" << to_string(mode)
              << "' subcommand was invoked\n";
    return 2;
  }
  if (!opt.output_dir.empty()) config.output_dir = opt.output_dir;
  return isaacs::run_to_exit_code(config, std::cerr,
                                  opt.verbose ? &std::cerr : nullptr);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Monotone finite-difference solver for Dirichlet problems of "
      "uniformly elliptic Isaacs equations on bounded 2-D domains"};
  app.require_subcommand(1);

  struct Mode {
    const char* name;
    isaacs::RunMode mode;
    const char* help;
  };
  const Mode modes[] = {
      {"solve", isaacs::RunMode::solve,
       "solve one Dirichlet problem and dump the grid and solution"},
      {"rates", isaacs::RunMode::rates,
       "grid-convergence study on a manufactured benchmark"},
      {"sandwich", isaacs::RunMode::sandwich,
       "truncation study: gap between the upper and lower regularized "
       "solutions across levels K"},
      {"check-decomposition", isaacs::RunMode::check_decomposition,
       "audit the second-order decomposition of every coefficient matrix "
       "on the configured stencil"},
      {"verify-barrier", isaacs::RunMode::verify_barrier,
       "tune and sample-verify the boundary barrier for the problem's "
       "ellipticity band"},
  };

  Options opt;
  CLI::App* parsed[std::size(modes)] = {};
  for (std::size_t i = 0; i < std::size(modes); ++i) {
    parsed[i] = app.add_subcommand(modes[i].name, modes[i].help);
    add_common_flags(parsed[i], opt);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // --help exits 0; usage errors map to 2
  }

  for (std::size_t i = 0; i < std::size(modes); ++i)
    if (parsed[i]->parsed()) return execute(opt, modes[i].mode);
  return 2;
}
