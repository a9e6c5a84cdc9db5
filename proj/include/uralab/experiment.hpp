#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uralab/channel.hpp"
#include "uralab/model.hpp"
#include "uralab/sim.hpp"

namespace uralab {

/// Channel selection as written in an experiment file; resolved to a
/// ChannelModel when the run starts.
struct ChannelSpec {
  ChannelModel::Kind kind = ChannelModel::Kind::Parametric;
  double pTP = 1.0;            // parametric
  bool haveCodebookSeed = false;
  uint64_t codebookSeed = 0;   // gaussian toy
  std::string tablePath;       // table driven
  double energyDb = 0.0;       // table driven
};

struct MacSpec {
  MacMode::Kind kind = MacMode::Kind::IdealOracle;
  bool haveSeed = false;
  uint64_t seed = 0;
};

struct SweepSpec {
  std::string parameter;        // empty: no sweep
  std::vector<double> values;
};

/// A full experiment description: the system, the channel, the
/// authenticator, the workload, and where the output goes.
struct ExperimentSpec {
  std::string name = "experiment";
  SystemConfig config;
  ChannelSpec channel;
  AuthVariant variant = AuthVariant::Exhaustive;
  OrderPolicy policy = OrderPolicy::UniformRandomPerMessage;
  MacSpec mac;
  uint64_t trials = 1000;
  uint64_t masterSeed = 1;
  uint64_t spoofCount = 0;
  unsigned keyBits = KeyRegistry::kDefaultKeyBits;
  std::string outputPath;       // empty: stdout
  SweepSpec sweep;
  bool haveComposition = false;
  double compositionPtp = 0.0;  // decoder true-positive rate for analytic tables
  double compositionPfp = 0.0;  // decoder false-positive rate for analytic tables
  std::map<std::string, std::string> tables;  // scheme name -> PfpTable path

  static ExperimentSpec from_json(const nlohmann::json& j);
  static ExperimentSpec from_file(const std::string& path);
  static ExperimentSpec preset(const std::string& name);

  /// Resolved round-trip form (embedded in every output header).
  nlohmann::ordered_json to_json() const;
};

/// Analytic sweep table (CSV). The fig3 preset writes its condensed column
/// set; general sweeps write the full operation columns.
int cmd_analytic(const ExperimentSpec& spec, std::ostream& out);

/// Monte Carlo run (JSON report).
int cmd_simulate(const ExperimentSpec& spec, unsigned workers, std::ostream& out);

/// Three-scheme total-misauthentication composition over an energy grid
/// (CSV), with the collision-floor row appended.
int cmd_compare_schemes(const ExperimentSpec& spec, std::ostream& out);

/// Built-in verification battery; returns 0 when every check passes.
int cmd_selftest(uint64_t seed, std::ostream& out);

}  // namespace uralab
