#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uralab/auth.hpp"
#include "uralab/channel.hpp"
#include "uralab/mac.hpp"
#include "uralab/model.hpp"

namespace uralab {

enum class AuthVariant { Exhaustive, Heuristic, Addressed };

std::string variant_name(AuthVariant v);
AuthVariant variant_from_name(const std::string& name);

/// Outcome tallies over a set of rounds, together with the per-message
/// analytic prediction sums that the reports compare them against. Merging
/// is exact integer/sum addition, so any partition of the rounds folds to
/// the same totals as long as the fold order is fixed.
struct RoundStats {
  uint64_t rounds = 0;

  // Genuine (true-positive) list entries.
  uint64_t genuineSeen = 0;
  uint64_t genuineAcceptedCorrect = 0;
  uint64_t genuineMisidentified = 0;
  uint64_t genuineRejectedType1 = 0;
  uint64_t genuineRejectedType2 = 0;
  uint64_t genuineRejectedBoth = 0;
  uint64_t genuineRejectedNoKey = 0;
  uint64_t genuineNotDecoded = 0;
  uint64_t genuineType1Events = 0;  // marginal: some other key matched
  uint64_t genuineType2Events = 0;  // marginal: own key matched elsewhere

  // Foreign (channel false-positive) list entries.
  uint64_t fpSeen = 0;
  uint64_t fpAccepted = 0;
  uint64_t fpRejected = 0;
  uint64_t fpDefinite = 0;

  // Spoofed packets.
  uint64_t spoofInjected = 0;
  uint64_t spoofNotDecoded = 0;
  uint64_t spoofSeen = 0;
  uint64_t spoofAccepted = 0;
  uint64_t spoofRejected = 0;

  // Round composition.
  uint64_t kTP = 0;  // summed over rounds
  uint64_t kFP = 0;  // summed over rounds
  uint64_t duplicateErrors = 0;
  uint64_t roundsWithDuplicates = 0;

  // Heuristic bookkeeping: genuine entries whose own key was still
  // unconsumed when they were processed.
  uint64_t genuineFreeSeen = 0;
  uint64_t genuineFreeAcceptedCorrect = 0;
  uint64_t genuineFreeMisidentified = 0;

  // Scan depth over genuine-free entries.
  uint64_t keysTriedCount = 0;
  uint64_t keysTriedSum = 0;
  double keysTriedSumSq = 0.0;

  // Misauthentication events (misidentified genuine + accepted foreign +
  // accepted spoof) over all authenticator-seen entries.
  uint64_t misauthEvents = 0;
  uint64_t misauthSeen = 0;

  // Analytic prediction sums (one probability added per relevant message).
  double predGenuineSuccess = 0.0;
  double predGenuineMisid = 0.0;
  double predType1 = 0.0;
  double predType2 = 0.0;
  double predRejType1Only = 0.0;
  double predRejType2Only = 0.0;
  double predRejBoth = 0.0;
  double predFpAccept = 0.0;
  double predFpDefinite = 0.0;
  double predMisauth = 0.0;
  double predSpoofAccept = 0.0;
  double predGenuineFreeSuccess = 0.0;
  double predGenuineFreeMisid = 0.0;
  double predKeysTried = 0.0;

  // Population-level upper bounds (heuristic rates evaluated at Nj = N).
  double boundMisid = 0.0;
  double boundFpAccept = 0.0;

  // False when a population carries no analytic prediction in this variant.
  bool spoofPredicted = true;
  bool misauthPredicted = true;

  void merge(const RoundStats& other);
};

/// One reported proportion with its interval and, when available, the mean
/// analytic prediction plus a 3-standard-error agreement flag.
struct RateReport {
  std::string name;
  uint64_t events = 0;
  uint64_t population = 0;
  double rate = 0.0;
  double wilsonLo = 0.0;
  double wilsonHi = 1.0;
  bool hasPrediction = false;
  double predicted = 0.0;
  double zResidual = 0.0;
  bool covered = false;
};

/// One-sided check of an observed rate against an analytic upper bound.
struct BoundReport {
  std::string name;
  uint64_t events = 0;
  uint64_t population = 0;
  double rate = 0.0;
  double bound = 0.0;
  bool within = false;
};

struct SimOptions {
  AuthVariant variant = AuthVariant::Exhaustive;
  MacMode macMode = MacMode::ideal(0);
  OrderPolicy policy = OrderPolicy::UniformRandomPerMessage;
  uint64_t trials = 0;
  uint64_t masterSeed = 1;
  uint64_t spoofCount = 0;
  unsigned workers = 0;  // 0: one worker per hardware thread
  unsigned keyBits = KeyRegistry::kDefaultKeyBits;
};

struct Aggregate {
  SystemConfig config;
  SimOptions options;
  std::string channelName;
  RoundStats stats;

  std::vector<RateReport> rate_reports() const;
  std::vector<BoundReport> bound_reports() const;
  nlohmann::ordered_json to_json() const;
};

/// Derive an auxiliary seed (registry, oracle, codebook) from a master seed
/// and a fixed role tag.
uint64_t derive_seed(uint64_t masterSeed, uint64_t roleTag);

inline constexpr uint64_t kSeedRoleRegistry = 0x5245474953545259ull;  // "REGISTRY"
inline constexpr uint64_t kSeedRoleMacOracle = 0x4d41434f5241434cull;  // "MACORACL"
inline constexpr uint64_t kSeedRoleCodebook = 0x434f4445424f4f4bull;   // "CODEBOOK"

/// Run `trials` independent rounds of the full pipeline (round generation,
/// channel, spoof injection, authentication, scoring) and fold the results.
/// Trials are dealt to workers in fixed 64-trial chunks that are merged in
/// chunk order, so the aggregate is byte-identical for any worker count.
Aggregate run_trials(const SystemConfig& config, const ChannelModel& channel,
                     const SimOptions& options);

}  // namespace uralab
