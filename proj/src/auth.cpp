#include "uralab/auth.hpp"

#include <algorithm>

#include "uralab/errors.hpp"

namespace uralab {

namespace {

struct ParsedEntry {
  MacEngine::MsgCtx msgCtx;
  uint64_t claimedTag = 0;
  uint64_t address = 0;
};

std::vector<ParsedEntry> parse_entries(const std::vector<DecodedMessage>& list,
                                       const SystemConfig& config, const MacEngine& engine,
                                       const Nonce& nonce) {
  const PayloadLayout lay = config.layout();
  if (lay.macBits == 0) throw ConfigError("authentication requires a MAC-bearing scheme");
  std::vector<ParsedEntry> entries;
  entries.reserve(list.size());
  for (const DecodedMessage& msg : list) {
    if (msg.payload.width() != lay.totalBits)
      throw ConfigError("decoded payload width does not match the scheme layout");
    ParsedEntry e;
    Bits data = msg.payload.field(lay.dataOffset, lay.dataBits);
    e.msgCtx = engine.msg_ctx(data, nonce);
    e.claimedTag = msg.payload.field(lay.macOffset, lay.macBits).as_u64();
    if (lay.addressBits > 0)
      e.address = msg.payload.field(lay.addressOffset, lay.addressBits).as_u64();
    entries.push_back(std::move(e));
  }
  return entries;
}

bool is_sender(const DecodedMessage& msg, uint64_t userId) {
  return std::find(msg.senders.begin(), msg.senders.end(), userId) != msg.senders.end();
}

Verdict accepted_verdict(const DecodedMessage& msg, uint64_t userId) {
  if (msg.provenance != Provenance::TruePositive) return Verdict::AcceptedFalsePositive;
  return is_sender(msg, userId) ? Verdict::AcceptedCorrect : Verdict::AcceptedWrongUser;
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::AcceptedCorrect: return "AcceptedCorrect";
    case Verdict::AcceptedWrongUser: return "AcceptedWrongUser";
    case Verdict::AcceptedFalsePositive: return "AcceptedFalsePositive";
    case Verdict::RejectedCollision: return "RejectedCollision";
    case Verdict::RejectedNoKey: return "RejectedNoKey";
    case Verdict::NotApplicable: return "NotApplicable";
  }
  return "?";
}

std::string policy_name(OrderPolicy p) {
  return p == OrderPolicy::AscendingUserId ? "ascending" : "uniform";
}

std::vector<AuthOutcome> authenticate_exhaustive(
    const std::vector<DecodedMessage>& list, const SystemConfig& config,
    const MacEngine& engine, const std::vector<MacEngine::KeyCtx>& keyCtxs,
    const Nonce& nonce) {
  if (keyCtxs.size() != config.N) throw ConfigError("key context table size mismatch");
  const auto entries = parse_entries(list, config, engine, nonce);
  const size_t M = entries.size();
  const uint64_t N = config.N;

  std::vector<uint32_t> matchCount(M, 0);
  std::vector<uint64_t> firstKey(M, 0);
  std::vector<uint32_t> keyMatches(N, 0);
  for (uint64_t u = 0; u < N; ++u) {
    const MacEngine::KeyCtx& kc = keyCtxs[u];
    for (size_t m = 0; m < M; ++m) {
      if (engine.tag_value(kc, entries[m].msgCtx) == entries[m].claimedTag) {
        if (matchCount[m]++ == 0) firstKey[m] = u;
        ++keyMatches[u];
      }
    }
  }

  std::vector<AuthOutcome> outcomes(M);
  for (size_t m = 0; m < M; ++m) {
    AuthOutcome& out = outcomes[m];
    out.messageIndex = static_cast<uint32_t>(m);
    out.keysTried = N;
    out.njRemaining = N;
    if (matchCount[m] == 0) {
      out.verdict = Verdict::RejectedNoKey;
    } else {
      uint64_t u = firstKey[m];
      bool unique = matchCount[m] == 1 && keyMatches[u] == 1;
      out.verdict = unique ? accepted_verdict(list[m], u) : Verdict::RejectedCollision;
      if (unique) out.userId = static_cast<uint32_t>(u);
    }
    if (list[m].provenance == Provenance::TruePositive) {
      out.matchedOtherKey = matchCount[m] > static_cast<uint32_t>(list[m].senders.size());
      out.senderKeyReused = false;
      for (uint32_t s : list[m].senders)
        if (keyMatches[s] > 1) out.senderKeyReused = true;
    }
  }
  return outcomes;
}

std::vector<AuthOutcome> authenticate_heuristic(
    const std::vector<DecodedMessage>& list, const SystemConfig& config,
    const MacEngine& engine, const std::vector<MacEngine::KeyCtx>& keyCtxs,
    const Nonce& nonce, OrderPolicy policy, Rng& rng) {
  if (keyCtxs.size() != config.N) throw ConfigError("key context table size mismatch");
  const auto entries = parse_entries(list, config, engine, nonce);
  const size_t M = entries.size();

  std::vector<uint32_t> alive(config.N);
  for (uint64_t u = 0; u < config.N; ++u) alive[u] = static_cast<uint32_t>(u);

  std::vector<AuthOutcome> outcomes(M);
  for (size_t m = 0; m < M; ++m) {
    AuthOutcome& out = outcomes[m];
    out.messageIndex = static_cast<uint32_t>(m);
    out.njRemaining = alive.size();

    size_t matchedAt = alive.size();
    for (size_t idx = 0; idx < alive.size(); ++idx) {
      if (policy == OrderPolicy::UniformRandomPerMessage) {
        size_t j = idx + static_cast<size_t>(rng.below(alive.size() - idx));
        std::swap(alive[idx], alive[j]);
      }
      uint32_t u = alive[idx];
      if (engine.tag_value(keyCtxs[u], entries[m].msgCtx) == entries[m].claimedTag) {
        matchedAt = idx;
        break;
      }
    }

    if (matchedAt == alive.size()) {
      out.verdict = Verdict::RejectedNoKey;
      out.keysTried = alive.size();
    } else {
      uint32_t u = alive[matchedAt];
      out.keysTried = matchedAt + 1;
      out.verdict = accepted_verdict(list[m], u);
      out.userId = u;
      alive.erase(alive.begin() + static_cast<ptrdiff_t>(matchedAt));
    }
  }
  return outcomes;
}

std::vector<AuthOutcome> authenticate_addressed(
    const std::vector<DecodedMessage>& list, const SystemConfig& config,
    const MacEngine& engine, const std::vector<MacEngine::KeyCtx>& keyCtxs,
    const Nonce& nonce) {
  if (config.scheme != Scheme::AddressMac)
    throw ConfigError("addressed authentication requires the AddressMac scheme");
  if (keyCtxs.size() != config.N) throw ConfigError("key context table size mismatch");
  const auto entries = parse_entries(list, config, engine, nonce);

  std::vector<AuthOutcome> outcomes(entries.size());
  for (size_t m = 0; m < entries.size(); ++m) {
    AuthOutcome& out = outcomes[m];
    out.messageIndex = static_cast<uint32_t>(m);
    out.njRemaining = config.N;
    uint64_t addr = entries[m].address;
    if (addr >= config.N) {
      out.verdict = Verdict::RejectedNoKey;
      out.keysTried = 0;
      continue;
    }
    out.keysTried = 1;
    if (engine.tag_value(keyCtxs[addr], entries[m].msgCtx) == entries[m].claimedTag) {
      out.verdict = accepted_verdict(list[m], addr);
      out.userId = static_cast<uint32_t>(addr);
    } else {
      out.verdict = Verdict::RejectedNoKey;
    }
  }
  return outcomes;
}

SpoofResult inject_spoof(std::vector<DecodedMessage>& list, uint64_t count,
                         double survivalProb, const SystemConfig& config, Rng& rng) {
  if (survivalProb < 0.0 || survivalProb > 1.0)
    throw ConfigError("spoof survival probability must lie in [0,1]");
  const PayloadLayout lay = config.layout();
  SpoofResult res;
  res.injected = count;
  for (uint64_t i = 0; i < count; ++i) {
    Bits data = rng.bits(lay.dataBits);
    Bits address;
    if (lay.addressBits > 0)
      address = Bits::from_u64(rng.below(config.N), lay.addressBits);
    Bits tag = lay.macBits > 0 ? rng.bits(lay.macBits) : Bits();
    bool survives = rng.bernoulli(survivalProb);
    if (!survives) continue;
    DecodedMessage msg;
    msg.payload = data.concat(address).concat(tag);
    msg.provenance = Provenance::Spoof;
    list.push_back(std::move(msg));
    ++res.survived;
  }
  return res;
}

}  // namespace uralab
