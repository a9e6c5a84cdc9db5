#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uralab/channel.hpp"
#include "uralab/mac.hpp"
#include "uralab/model.hpp"
#include "uralab/rng.hpp"

namespace uralab {

enum class Verdict {
  AcceptedCorrect,
  AcceptedWrongUser,
  AcceptedFalsePositive,
  RejectedCollision,
  RejectedNoKey,
  NotApplicable,
};

std::string verdict_name(Verdict v);

/// Authentication result for one decoded list entry.
struct AuthOutcome {
  uint32_t messageIndex = 0;
  Verdict verdict = Verdict::NotApplicable;
  uint32_t userId = 0;        // attributed user; meaningful for Accepted* only
  uint64_t keysTried = 0;     // MAC verifications spent on this entry
  uint64_t njRemaining = 0;   // unconsumed keys when this entry was processed
  bool matchedOtherKey = false;  // exhaustive: a non-sender key also matched
  bool senderKeyReused = false;  // exhaustive: the sender's key matched another entry
};

/// Key scan order for the heuristic authenticator.
enum class OrderPolicy { AscendingUserId, UniformRandomPerMessage };

std::string policy_name(OrderPolicy p);

/// Exhaustive search: verify every key against every message; accept an
/// entry only when exactly one key matches it and that key matches nothing
/// else in the round. Ambiguity is rejected, never guessed.
std::vector<AuthOutcome> authenticate_exhaustive(
    const std::vector<DecodedMessage>& list, const SystemConfig& config,
    const MacEngine& engine, const std::vector<MacEngine::KeyCtx>& keyCtxs,
    const Nonce& nonce);

/// Heuristic first-match search: process the list in order; for each entry
/// scan the still-unconsumed keys (in the policy's order) and accept the
/// first match, consuming that key for the rest of the round.
std::vector<AuthOutcome> authenticate_heuristic(
    const std::vector<DecodedMessage>& list, const SystemConfig& config,
    const MacEngine& engine, const std::vector<MacEngine::KeyCtx>& keyCtxs,
    const Nonce& nonce, OrderPolicy policy, Rng& rng);

/// Address-based check: verify only the key named by the payload's address
/// field; a single MAC verification per entry. Out-of-range addresses are
/// rejected outright.
std::vector<AuthOutcome> authenticate_addressed(
    const std::vector<DecodedMessage>& list, const SystemConfig& config,
    const MacEngine& engine, const std::vector<MacEngine::KeyCtx>& keyCtxs,
    const Nonce& nonce);

struct SpoofResult {
  uint64_t injected = 0;
  uint64_t survived = 0;
};

/// Append `count` forged packets (random data, random tag, and — under the
/// address scheme — a uniformly random in-range address), each surviving the
/// channel independently with probability survivalProb. The random draws are
/// made for every attempt regardless of survival, so the stream position
/// depends only on `count`.
SpoofResult inject_spoof(std::vector<DecodedMessage>& list, uint64_t count,
                         double survivalProb, const SystemConfig& config, Rng& rng);

}  // namespace uralab
