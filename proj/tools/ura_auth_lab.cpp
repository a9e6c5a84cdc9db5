// ============================================================================
// ura-auth-lab: command-line front end for the identification workbench.
// Subcommands: analytic, simulate, compare-schemes, selftest.
// Exit codes: 0 success, 1 selftest failure, 2 usage error, 3 infeasible
// configuration.
// ============================================================================

#include <fstream>
#include <functional>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "uralab/errors.hpp"
#include "uralab/experiment.hpp"

namespace {

constexpr int kExitSelftestFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;

struct CommonArgs {
  std::string configPath;
  std::string presetName;
  std::string outPath;
  uint64_t seed = 0;
  uint64_t trials = 0;
  bool haveSeed = false;
  bool haveTrials = false;
};

void add_common_options(CLI::App* cmd, CommonArgs& args) {
  auto* config = cmd->add_option("--config", args.configPath, "Experiment spec (JSON)");
  auto* preset = cmd->add_option("--preset", args.presetName, "Built-in experiment name");
  config->excludes(preset);
  preset->excludes(config);
  cmd->add_option("--seed", args.seed, "Master seed override")
      ->each([&args](const std::string&) { args.haveSeed = true; });
  cmd->add_option("--trials", args.trials, "Trial count override")
      ->check(CLI::PositiveNumber)
      ->each([&args](const std::string&) { args.haveTrials = true; });
  cmd->add_option("--out", args.outPath, "Output file (default: stdout)");
}

uralab::ExperimentSpec load_spec(const CommonArgs& args) {
  if (args.configPath.empty() && args.presetName.empty())
    throw uralab::ParseError("either --config or --preset is required");
  uralab::ExperimentSpec spec = args.presetName.empty()
                                    ? uralab::ExperimentSpec::from_file(args.configPath)
                                    : uralab::ExperimentSpec::preset(args.presetName);
  if (args.haveSeed) spec.masterSeed = args.seed;
  if (args.haveTrials) spec.trials = args.trials;
  if (!args.outPath.empty()) spec.outputPath = args.outPath;
  return spec;
}

int with_output(const std::string& path, const std::function<int(std::ostream&)>& fn) {
  if (path.empty()) return fn(std::cout);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw uralab::ConfigError("cannot open output file: " + path);
  int rc = fn(out);
  out.flush();
  if (!out) throw uralab::ConfigError("failed writing output file: " + path);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Workbench for MAC-based user identification on unsourced random access"};
  app.require_subcommand(1);

  CommonArgs analyticArgs, simulateArgs, compareArgs;
  unsigned workers = 0;
  uint64_t selftestSeed = 1;
  std::string selftestOut;

  CLI::App* analytic = app.add_subcommand("analytic", "Evaluate closed forms over a sweep");
  add_common_options(analytic, analyticArgs);

  CLI::App* simulate = app.add_subcommand("simulate", "Run Monte Carlo trials");
  add_common_options(simulate, simulateArgs);
  simulate->add_option("--workers", workers,
                       "Worker threads (0 = hardware concurrency; never affects output)");

  CLI::App* compare = app.add_subcommand("compare-schemes",
                                         "Compose scheme error rates from decoder tables");
  add_common_options(compare, compareArgs);

  CLI::App* selftest = app.add_subcommand("selftest", "Run the built-in verification battery");
  selftest->add_option("--seed", selftestSeed, "Master seed for the Monte Carlo checks");
  selftest->add_option("--out", selftestOut, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (analytic->parsed()) {
      uralab::ExperimentSpec spec = load_spec(analyticArgs);
      return with_output(spec.outputPath,
                         [&](std::ostream& out) { return uralab::cmd_analytic(spec, out); });
    }
    if (simulate->parsed()) {
      uralab::ExperimentSpec spec = load_spec(simulateArgs);
      return with_output(spec.outputPath, [&](std::ostream& out) {
        return uralab::cmd_simulate(spec, workers, out);
      });
    }
    if (compare->parsed()) {
      uralab::ExperimentSpec spec = load_spec(compareArgs);
      return with_output(spec.outputPath, [&](std::ostream& out) {
        return uralab::cmd_compare_schemes(spec, out);
      });
    }
    int rc = with_output(selftestOut, [&](std::ostream& out) {
      return uralab::cmd_selftest(selftestSeed, out);
    });
    return rc == 0 ? 0 : kExitSelftestFailure;
  } catch (const uralab::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  }
}
