// pwfwi — frequency-domain waveform-inversion workbench.
//
// Subcommands: synth, simulate, invert, compare, error.  Exit codes:
// 0 success, 2 configuration/usage error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <Eigen/Core>

#include "pwfwi/errors.hpp"
#include "pwfwi/raster_io.hpp"
#include "pwfwi/run_config.hpp"
#include "pwfwi/workbench.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration file")
      ->required();
  cmd->add_option("--out-dir", flags.out_dir,
                  "directory all relative paths resolve against (created if missing)");
  cmd->add_option("--seed", flags.seed, "seed of the synthetic-model generators");
  cmd->add_option("--threads", flags.threads, "Eigen thread count")
      ->check(CLI::PositiveNumber);
}

int verbosity_from_env() {
  const char* v = std::getenv("PWFWI_LOG");
  if (!v || !*v) return 0;
  try {
    return std::max(0, std::stoi(v));
  } catch (const std::exception&) {
    return 1;
  }
}

// Loads the config from the invoking directory, then moves to out_dir so
// every relative path inside the config resolves there.
pwfwi::RunConfig enter_out_dir(const CommonFlags& flags) {
  pwfwi::RunConfig cfg = pwfwi::RunConfig::from_file(flags.config_path);
  std::filesystem::create_directories(flags.out_dir);
  std::filesystem::current_path(flags.out_dir);
  Eigen::setNbThreads(flags.threads);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"frequency-domain waveform-inversion workbench"};
  app.require_subcommand(1);

  CommonFlags synth_flags, simulate_flags, invert_flags, compare_flags;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic true model");
  add_common(synth, synth_flags);
  CLI::App* simulate = app.add_subcommand("simulate", "simulate observed data");
  add_common(simulate, simulate_flags);
  CLI::App* invert = app.add_subcommand("invert", "run the inversion schedule");
  add_common(invert, invert_flags);
  CLI::App* compare = app.add_subcommand("compare", "rank regularizers on one problem");
  add_common(compare, compare_flags);

  std::string error_model, error_true;
  CLI::App* error_cmd =
      app.add_subcommand("error", "relative l2 error between two model rasters");
  error_cmd->add_option("model", error_model, "reconstructed model raster")->required();
  error_cmd->add_option("true", error_true, "true model raster")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  pwfwi::WorkbenchOptions opt;
  opt.verbosity = verbosity_from_env();

  try {
    if (*synth) {
      opt.seed = synth_flags.seed;
      pwfwi::run_synth(enter_out_dir(synth_flags), opt);
    } else if (*simulate) {
      opt.seed = simulate_flags.seed;
      pwfwi::run_simulate(enter_out_dir(simulate_flags), opt);
    } else if (*invert) {
      opt.seed = invert_flags.seed;
      const double err = pwfwi::run_invert(enter_out_dir(invert_flags), opt);
      if (!std::isnan(err))
        std::printf("model_error = %s\n", pwfwi::format_double(err).c_str());
    } else if (*compare) {
      opt.seed = compare_flags.seed;
      pwfwi::run_compare(enter_out_dir(compare_flags), opt);
    } else if (*error_cmd) {
      const double err = pwfwi::model_error_files(error_model, error_true);
      std::printf("%s\n", pwfwi::format_double(err).c_str());
    }
  } catch (const pwfwi::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const pwfwi::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
