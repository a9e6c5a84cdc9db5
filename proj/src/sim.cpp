#include "uralab/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "uralab/analytics.hpp"
#include "uralab/errors.hpp"
#include "uralab/round.hpp"
#include "uralab/stats.hpp"

namespace uralab {

std::string variant_name(AuthVariant v) {
  switch (v) {
    case AuthVariant::Exhaustive: return "exhaustive";
    case AuthVariant::Heuristic: return "heuristic";
    case AuthVariant::Addressed: return "addressed";
  }
  return "?";
}

AuthVariant variant_from_name(const std::string& name) {
  if (name == "exhaustive") return AuthVariant::Exhaustive;
  if (name == "heuristic") return AuthVariant::Heuristic;
  if (name == "addressed") return AuthVariant::Addressed;
  throw ParseError("unknown auth variant: " + name);
}

void RoundStats::merge(const RoundStats& o) {
  rounds += o.rounds;
  genuineSeen += o.genuineSeen;
  genuineAcceptedCorrect += o.genuineAcceptedCorrect;
  genuineMisidentified += o.genuineMisidentified;
  genuineRejectedType1 += o.genuineRejectedType1;
  genuineRejectedType2 += o.genuineRejectedType2;
  genuineRejectedBoth += o.genuineRejectedBoth;
  genuineRejectedNoKey += o.genuineRejectedNoKey;
  genuineNotDecoded += o.genuineNotDecoded;
  genuineType1Events += o.genuineType1Events;
  genuineType2Events += o.genuineType2Events;
  fpSeen += o.fpSeen;
  fpAccepted += o.fpAccepted;
  fpRejected += o.fpRejected;
  fpDefinite += o.fpDefinite;
  spoofInjected += o.spoofInjected;
  spoofNotDecoded += o.spoofNotDecoded;
  spoofSeen += o.spoofSeen;
  spoofAccepted += o.spoofAccepted;
  spoofRejected += o.spoofRejected;
  kTP += o.kTP;
  kFP += o.kFP;
  duplicateErrors += o.duplicateErrors;
  roundsWithDuplicates += o.roundsWithDuplicates;
  genuineFreeSeen += o.genuineFreeSeen;
  genuineFreeAcceptedCorrect += o.genuineFreeAcceptedCorrect;
  genuineFreeMisidentified += o.genuineFreeMisidentified;
  keysTriedCount += o.keysTriedCount;
  keysTriedSum += o.keysTriedSum;
  keysTriedSumSq += o.keysTriedSumSq;
  misauthEvents += o.misauthEvents;
  misauthSeen += o.misauthSeen;
  predGenuineSuccess += o.predGenuineSuccess;
  predGenuineMisid += o.predGenuineMisid;
  predType1 += o.predType1;
  predType2 += o.predType2;
  predRejType1Only += o.predRejType1Only;
  predRejType2Only += o.predRejType2Only;
  predRejBoth += o.predRejBoth;
  predFpAccept += o.predFpAccept;
  predFpDefinite += o.predFpDefinite;
  predMisauth += o.predMisauth;
  predSpoofAccept += o.predSpoofAccept;
  predGenuineFreeSuccess += o.predGenuineFreeSuccess;
  predGenuineFreeMisid += o.predGenuineFreeMisid;
  predKeysTried += o.predKeysTried;
  boundMisid += o.boundMisid;
  boundFpAccept += o.boundFpAccept;
  spoofPredicted = spoofPredicted && o.spoofPredicted;
  misauthPredicted = misauthPredicted && o.misauthPredicted;
}

uint64_t derive_seed(uint64_t masterSeed, uint64_t roleTag) {
  return Rng::mix(masterSeed ^ Rng::mix(roleTag));
}

namespace {

/// Per-run analytic lookup tables for the scorer's per-message predictions.
struct PredCtx {
  SystemConfig config;
  AuthVariant variant = AuthVariant::Exhaustive;
  double p = 0.0;
  double type1Const = 0.0;
  double defFpConst = 0.0;
  std::vector<double> exSucc;   // by surviving-spoof count; (1-p)^(N+len-2)
  std::vector<double> exType2;  // by surviving-spoof count; 1-(1-p)^(len-1)
  uint64_t heurBase = 0;        // window start for the Nj-indexed tables
  std::vector<double> hSucc, hFpAcc, hDefFp, hKeys;
  double boundMisidAtN = 0.0;
  double boundFpAccAtN = 0.0;

  double heur_succ(uint64_t nj) const { return nj == 0 ? 0.0 : hSucc[nj - heurBase]; }
  double heur_fpacc(uint64_t nj) const { return nj == 0 ? 0.0 : hFpAcc[nj - heurBase]; }
  double heur_deffp(uint64_t nj) const { return nj == 0 ? 1.0 : hDefFp[nj - heurBase]; }
  double heur_keys(uint64_t nj) const { return nj == 0 ? 0.0 : hKeys[nj - heurBase]; }
};

PredCtx build_pred_ctx(const SystemConfig& config, const SimOptions& opt) {
  PredCtx ctx;
  ctx.config = config;
  ctx.variant = opt.variant;
  ctx.p = analytics::p_tag(config.L);
  ctx.type1Const = analytics::prob_type1(config.N, config.L);
  ctx.defFpConst = analytics::prob_definite_fp(config.N, config.L);

  if (opt.variant == AuthVariant::Exhaustive) {
    ctx.exSucc.resize(opt.spoofCount + 1, 0.0);
    ctx.exType2.resize(opt.spoofCount + 1, 0.0);
    for (uint64_t s = 0; s <= opt.spoofCount; ++s) {
      uint64_t len = config.K + s;
      if (len == 0) continue;
      ctx.exSucc[s] = analytics::prob_success_exhaustive(config.N, len, config.L);
      ctx.exType2[s] = analytics::prob_type2(len, config.L);
    }
  }

  if (opt.variant == AuthVariant::Heuristic) {
    uint64_t span = config.K + opt.spoofCount;
    ctx.heurBase = config.N > span ? config.N - span : 0;
    uint64_t lo = std::max<uint64_t>(ctx.heurBase, 1);
    ctx.hSucc.resize(config.N - ctx.heurBase + 1, 0.0);
    ctx.hFpAcc.resize(config.N - ctx.heurBase + 1, 0.0);
    ctx.hDefFp.resize(config.N - ctx.heurBase + 1, 1.0);
    ctx.hKeys.resize(config.N - ctx.heurBase + 1, 0.0);
    for (uint64_t nj = lo; nj <= config.N; ++nj) {
      size_t i = nj - ctx.heurBase;
      ctx.hSucc[i] = analytics::prob_success_heuristic(nj, config.L);
      ctx.hFpAcc[i] = analytics::prob_fp_accept_heuristic(nj, config.L);
      ctx.hDefFp[i] = analytics::pow_one_minus_p(ctx.p, static_cast<double>(nj));
      ctx.hKeys[i] = analytics::expected_keys_tried(nj, config.L);
    }
    ctx.boundMisidAtN = analytics::prob_misid_heuristic(config.N, config.L);
    ctx.boundFpAccAtN = analytics::prob_fp_accept_heuristic(config.N, config.L);
  }
  return ctx;
}

void score_round(const PredCtx& ctx, const GroundTruth& truth,
                 const std::vector<DecodedMessage>& list, const SpoofResult& sp,
                 const std::vector<AuthOutcome>& outcomes, RoundStats& st) {
  const SystemConfig& cfg = ctx.config;
  const PayloadLayout lay = cfg.layout();
  st.rounds += 1;

  uint64_t kTPr = 0, kFPr = 0, spoofR = 0, decodedSenders = 0;
  for (const DecodedMessage& msg : list) {
    switch (msg.provenance) {
      case Provenance::TruePositive:
        ++kTPr;
        decodedSenders += msg.senders.size();
        break;
      case Provenance::FalsePositive: ++kFPr; break;
      case Provenance::Spoof: ++spoofR; break;
    }
  }
  st.kTP += kTPr;
  st.kFP += kFPr;
  st.genuineNotDecoded += cfg.K - decodedSenders;
  for (const auto& group : truth.duplicatePayloadGroups) st.duplicateErrors += group.size();
  if (!truth.duplicatePayloadGroups.empty()) st.roundsWithDuplicates += 1;
  st.spoofInjected += sp.injected;
  st.spoofNotDecoded += sp.injected - sp.survived;

  double exSuccP = 0.0, exT2P = 0.0, exFpAccP = 0.0;
  if (ctx.variant == AuthVariant::Exhaustive && !list.empty()) {
    exSuccP = ctx.exSucc[spoofR];
    exT2P = ctx.exType2[spoofR];
    exFpAccP = static_cast<double>(cfg.N - decodedSenders) * ctx.p * exSuccP;
  }

  std::unordered_set<uint32_t> consumedKeys;  // heuristic replay
  for (size_t m = 0; m < outcomes.size(); ++m) {
    const AuthOutcome& out = outcomes[m];
    const DecodedMessage& msg = list[m];
    const bool accepted = out.verdict == Verdict::AcceptedCorrect ||
                          out.verdict == Verdict::AcceptedWrongUser ||
                          out.verdict == Verdict::AcceptedFalsePositive;
    const uint64_t nj = out.njRemaining;

    switch (msg.provenance) {
      case Provenance::TruePositive: {
        st.genuineSeen += 1;
        st.misauthSeen += 1;
        bool free = false;
        if (ctx.variant == AuthVariant::Exhaustive) {
          if (out.matchedOtherKey) st.genuineType1Events += 1;
          if (out.senderKeyReused) st.genuineType2Events += 1;
          // With s senders behind one entry (payload collision), q1 is the
          // chance no foreign key matches it and q2 the chance none of the s
          // sender keys matches any other entry; the entry can only be
          // accepted when s == 1.
          const uint64_t s = msg.senders.size();
          double q1, q2, succ;
          if (s == 1) {
            q1 = 1.0 - ctx.type1Const;
            q2 = 1.0 - exT2P;
            succ = exSuccP;
          } else {
            q1 = analytics::pow_one_minus_p(ctx.p, static_cast<double>(cfg.N - s));
            q2 = analytics::pow_one_minus_p(
                ctx.p, static_cast<double>(s * (list.size() - 1)));
            succ = 0.0;
          }
          st.predGenuineSuccess += succ;
          st.predType1 += 1.0 - q1;
          st.predType2 += 1.0 - q2;
          st.predRejType1Only += s == 1 ? (1.0 - q1) * q2 : q2;
          st.predRejType2Only += q1 * (1.0 - q2);
          st.predRejBoth += (1.0 - q1) * (1.0 - q2);
        } else if (ctx.variant == AuthVariant::Heuristic) {
          for (uint32_t s : msg.senders) {
            if (!consumedKeys.count(s)) {
              free = true;
              break;
            }
          }
          if (free) {
            double succ = ctx.heur_succ(nj);
            st.genuineFreeSeen += 1;
            st.predGenuineFreeSuccess += succ;
            st.predGenuineFreeMisid += 1.0 - succ;
            st.predGenuineSuccess += succ;
            st.predGenuineMisid += 1.0 - succ;
            st.predMisauth += 1.0 - succ;
            st.predKeysTried += ctx.heur_keys(nj);
            st.keysTriedCount += 1;
            st.keysTriedSum += out.keysTried;
            st.keysTriedSumSq +=
                static_cast<double>(out.keysTried) * static_cast<double>(out.keysTried);
          } else {
            st.predGenuineMisid += ctx.heur_fpacc(nj);
            st.predMisauth += ctx.heur_fpacc(nj);
          }
          st.boundMisid += ctx.boundMisidAtN;
        } else {
          st.predGenuineSuccess += 1.0;
        }
        switch (out.verdict) {
          case Verdict::AcceptedCorrect:
            st.genuineAcceptedCorrect += 1;
            if (free) st.genuineFreeAcceptedCorrect += 1;
            break;
          case Verdict::AcceptedWrongUser:
            st.genuineMisidentified += 1;
            st.misauthEvents += 1;
            if (free) st.genuineFreeMisidentified += 1;
            break;
          case Verdict::RejectedCollision:
            if (out.matchedOtherKey && out.senderKeyReused)
              st.genuineRejectedBoth += 1;
            else if (out.senderKeyReused)
              st.genuineRejectedType2 += 1;
            else
              st.genuineRejectedType1 += 1;
            break;
          case Verdict::RejectedNoKey:
            st.genuineRejectedNoKey += 1;
            break;
          default:
            break;
        }
        break;
      }
      case Provenance::FalsePositive: {
        st.fpSeen += 1;
        st.misauthSeen += 1;
        if (ctx.variant == AuthVariant::Exhaustive) {
          st.predFpAccept += exFpAccP;
          st.predFpDefinite += ctx.defFpConst;
          st.predMisauth += exFpAccP;
        } else if (ctx.variant == AuthVariant::Heuristic) {
          st.predFpAccept += ctx.heur_fpacc(nj);
          st.predFpDefinite += ctx.heur_deffp(nj);
          st.predMisauth += ctx.heur_fpacc(nj);
          st.boundFpAccept += ctx.boundFpAccAtN;
        } else {
          uint64_t addr = msg.payload.field(lay.addressOffset, lay.addressBits).as_u64();
          double pAcc = addr < cfg.N ? ctx.p : 0.0;
          st.predFpAccept += pAcc;
          st.predFpDefinite += 1.0 - pAcc;
          st.predMisauth += pAcc;
        }
        if (accepted) {
          st.fpAccepted += 1;
          st.misauthEvents += 1;
        } else {
          st.fpRejected += 1;
          if (out.verdict == Verdict::RejectedNoKey) st.fpDefinite += 1;
        }
        break;
      }
      case Provenance::Spoof: {
        st.spoofSeen += 1;
        st.misauthSeen += 1;
        if (ctx.variant == AuthVariant::Heuristic) {
          st.predSpoofAccept += ctx.heur_fpacc(nj);
          st.predMisauth += ctx.heur_fpacc(nj);
        } else if (ctx.variant == AuthVariant::Addressed) {
          st.predSpoofAccept += ctx.p;
          st.predMisauth += ctx.p;
        }
        if (accepted) {
          st.spoofAccepted += 1;
          st.misauthEvents += 1;
        } else {
          st.spoofRejected += 1;
        }
        break;
      }
    }
    if (ctx.variant == AuthVariant::Heuristic && accepted)
      consumedKeys.insert(out.userId);
  }
}

}  // namespace

Aggregate run_trials(const SystemConfig& config, const ChannelModel& channel,
                     const SimOptions& opt) {
  config.validate();
  if (opt.trials == 0) throw ConfigError("trials must be at least 1");
  if (config.scheme == Scheme::Bare)
    throw ConfigError("simulation requires a MAC-bearing scheme");
  if (opt.variant == AuthVariant::Addressed && config.scheme != Scheme::AddressMac)
    throw ConfigError("addressed authentication requires the AddressMac scheme");
  if (opt.spoofCount > 0 && !channel.has_survival_prob())
    throw ConfigError("spoof injection requires a channel with a survival probability");

  MacEngine engine(opt.macMode, config.L);
  KeyRegistry registry = KeyRegistry::generate(
      config.N, derive_seed(opt.masterSeed, kSeedRoleRegistry), opt.keyBits);
  std::vector<MacEngine::KeyCtx> keyCtxs;
  keyCtxs.reserve(config.N);
  for (uint64_t u = 0; u < config.N; ++u) keyCtxs.push_back(engine.key_ctx(registry.key(u)));

  const PredCtx ctx = build_pred_ctx(config, opt);

  constexpr uint64_t kChunk = 64;
  const uint64_t numChunks = (opt.trials + kChunk - 1) / kChunk;
  std::vector<RoundStats> chunkStats(numChunks);
  std::atomic<uint64_t> nextChunk{0};
  std::mutex errorMutex;
  std::exception_ptr firstError;

  auto worker = [&]() {
    try {
      for (;;) {
        uint64_t c = nextChunk.fetch_add(1);
        if (c >= numChunks) break;
        RoundStats& st = chunkStats[c];
        const uint64_t lo = c * kChunk;
        const uint64_t hi = std::min(opt.trials, lo + kChunk);
        for (uint64_t trial = lo; trial < hi; ++trial) {
          Rng rng = Rng::substream(opt.masterSeed, trial);
          Nonce nonce{trial, rng.next()};
          GroundTruth truth = generate_round(config, registry, engine, nonce, rng, &keyCtxs);
          std::vector<DecodedMessage> list = channel.apply(truth, config, rng);
          SpoofResult sp{};
          if (opt.spoofCount > 0)
            sp = inject_spoof(list, opt.spoofCount, channel.pTP, config, rng);
          std::vector<AuthOutcome> outcomes;
          switch (opt.variant) {
            case AuthVariant::Exhaustive:
              outcomes = authenticate_exhaustive(list, config, engine, keyCtxs, nonce);
              break;
            case AuthVariant::Heuristic:
              outcomes = authenticate_heuristic(list, config, engine, keyCtxs, nonce,
                                                opt.policy, rng);
              break;
            case AuthVariant::Addressed:
              outcomes = authenticate_addressed(list, config, engine, keyCtxs, nonce);
              break;
          }
          score_round(ctx, truth, list, sp, outcomes, st);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(errorMutex);
      if (!firstError) firstError = std::current_exception();
    }
  };

  unsigned workers = opt.workers != 0
                         ? opt.workers
                         : std::max(1u, std::thread::hardware_concurrency());
  if (static_cast<uint64_t>(workers) > numChunks)
    workers = static_cast<unsigned>(numChunks);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (firstError) std::rethrow_exception(firstError);

  Aggregate agg;
  agg.config = config;
  agg.options = opt;
  agg.channelName = channel.name();
  for (const RoundStats& cs : chunkStats) agg.stats.merge(cs);
  if (opt.variant == AuthVariant::Exhaustive && opt.spoofCount > 0) {
    agg.stats.spoofPredicted = false;
    agg.stats.misauthPredicted = false;
  }
  return agg;
}

std::vector<RateReport> Aggregate::rate_reports() const {
  std::vector<RateReport> out;
  auto add = [&out](const char* name, uint64_t events, uint64_t population,
                    bool hasPred, double predSum) {
    if (population == 0) return;
    RateReport r;
    r.name = name;
    r.events = events;
    r.population = population;
    r.rate = static_cast<double>(events) / static_cast<double>(population);
    stats::Interval iv = stats::wilson(events, population);
    r.wilsonLo = iv.lo;
    r.wilsonHi = iv.hi;
    if (hasPred) {
      double pbar = predSum / static_cast<double>(population);
      pbar = std::clamp(pbar, 0.0, 1.0);
      r.hasPrediction = true;
      r.predicted = pbar;
      double se = std::sqrt(std::max(pbar * (1.0 - pbar), 0.0) /
                            static_cast<double>(population));
      double diff = r.rate - pbar;
      r.covered = std::abs(diff) <= 3.0 * se + 1e-12;
      r.zResidual = se > 0.0 ? diff / se : 0.0;
    }
    out.push_back(std::move(r));
  };

  const RoundStats& s = stats;
  const bool exh = options.variant == AuthVariant::Exhaustive;
  const bool heur = options.variant == AuthVariant::Heuristic;
  add("genuine_success", s.genuineAcceptedCorrect, s.genuineSeen, true, s.predGenuineSuccess);
  add("genuine_misid", s.genuineMisidentified, s.genuineSeen, true, s.predGenuineMisid);
  if (exh) {
    add("genuine_type1_marginal", s.genuineType1Events, s.genuineSeen, true, s.predType1);
    add("genuine_type2_marginal", s.genuineType2Events, s.genuineSeen, true, s.predType2);
    add("genuine_rejected_type1", s.genuineRejectedType1, s.genuineSeen, true, s.predRejType1Only);
    add("genuine_rejected_type2", s.genuineRejectedType2, s.genuineSeen, true, s.predRejType2Only);
    add("genuine_rejected_both", s.genuineRejectedBoth, s.genuineSeen, true, s.predRejBoth);
  }
  if (heur) {
    add("genuine_free_success", s.genuineFreeAcceptedCorrect, s.genuineFreeSeen, true,
        s.predGenuineFreeSuccess);
    add("genuine_free_misid", s.genuineFreeMisidentified, s.genuineFreeSeen, true,
        s.predGenuineFreeMisid);
    add("genuine_rejected_nokey", s.genuineRejectedNoKey, s.genuineSeen, false, 0.0);
  }
  add("fp_accept", s.fpAccepted, s.fpSeen, true, s.predFpAccept);
  add("fp_definite", s.fpDefinite, s.fpSeen, true, s.predFpDefinite);
  add("misauth", s.misauthEvents, s.misauthSeen, s.misauthPredicted, s.predMisauth);
  add("spoof_accept_seen", s.spoofAccepted, s.spoofSeen, s.spoofPredicted, s.predSpoofAccept);
  add("spoof_accept_attempt", s.spoofAccepted, s.spoofInjected, s.spoofPredicted,
      s.predSpoofAccept);
  return out;
}

std::vector<BoundReport> Aggregate::bound_reports() const {
  std::vector<BoundReport> out;
  if (options.variant != AuthVariant::Heuristic) return out;
  auto add = [&out](const char* name, uint64_t events, uint64_t population, double boundSum) {
    if (population == 0) return;
    BoundReport b;
    b.name = name;
    b.events = events;
    b.population = population;
    b.rate = static_cast<double>(events) / static_cast<double>(population);
    b.bound = boundSum / static_cast<double>(population);
    double se = std::sqrt(std::max(b.bound * (1.0 - b.bound), 0.0) /
                          static_cast<double>(population));
    b.within = b.rate <= b.bound + 3.0 * se + 1e-12;
    out.push_back(std::move(b));
  };
  add("misid_at_full_population", stats.genuineMisidentified, stats.genuineSeen,
      stats.boundMisid);
  add("fp_accept_at_full_population", stats.fpAccepted, stats.fpSeen, stats.boundFpAccept);
  return out;
}

nlohmann::ordered_json Aggregate::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config.to_json();
  j["channel"] = channelName;
  j["variant"] = variant_name(options.variant);
  j["policy"] = policy_name(options.policy);
  j["macMode"] = options.macMode.kind == MacMode::Kind::IdealOracle ? "ideal" : "keyed";
  if (options.macMode.kind == MacMode::Kind::IdealOracle)
    j["macSeed"] = options.macMode.simulationSeed;
  j["trials"] = options.trials;
  j["masterSeed"] = options.masterSeed;
  j["spoofCount"] = options.spoofCount;
  j["keyBits"] = options.keyBits;

  nlohmann::ordered_json c;
  c["rounds"] = stats.rounds;
  c["kTP"] = stats.kTP;
  c["kFP"] = stats.kFP;
  c["genuineSeen"] = stats.genuineSeen;
  c["genuineAcceptedCorrect"] = stats.genuineAcceptedCorrect;
  c["genuineMisidentified"] = stats.genuineMisidentified;
  c["genuineRejectedType1"] = stats.genuineRejectedType1;
  c["genuineRejectedType2"] = stats.genuineRejectedType2;
  c["genuineRejectedBoth"] = stats.genuineRejectedBoth;
  c["genuineRejectedNoKey"] = stats.genuineRejectedNoKey;
  c["genuineNotDecoded"] = stats.genuineNotDecoded;
  c["genuineType1Events"] = stats.genuineType1Events;
  c["genuineType2Events"] = stats.genuineType2Events;
  c["genuineFreeSeen"] = stats.genuineFreeSeen;
  c["genuineFreeAcceptedCorrect"] = stats.genuineFreeAcceptedCorrect;
  c["genuineFreeMisidentified"] = stats.genuineFreeMisidentified;
  c["fpSeen"] = stats.fpSeen;
  c["fpAccepted"] = stats.fpAccepted;
  c["fpRejected"] = stats.fpRejected;
  c["fpDefinite"] = stats.fpDefinite;
  c["spoofInjected"] = stats.spoofInjected;
  c["spoofNotDecoded"] = stats.spoofNotDecoded;
  c["spoofSeen"] = stats.spoofSeen;
  c["spoofAccepted"] = stats.spoofAccepted;
  c["spoofRejected"] = stats.spoofRejected;
  c["duplicateErrors"] = stats.duplicateErrors;
  c["roundsWithDuplicates"] = stats.roundsWithDuplicates;
  c["misauthEvents"] = stats.misauthEvents;
  c["misauthSeen"] = stats.misauthSeen;
  j["counters"] = std::move(c);

  nlohmann::ordered_json rates = nlohmann::ordered_json::array();
  for (const RateReport& r : rate_reports()) {
    nlohmann::ordered_json e;
    e["name"] = r.name;
    e["events"] = r.events;
    e["population"] = r.population;
    e["rate"] = r.rate;
    e["wilsonLo"] = r.wilsonLo;
    e["wilsonHi"] = r.wilsonHi;
    if (r.hasPrediction) {
      e["predicted"] = r.predicted;
      e["z"] = r.zResidual;
      e["covered"] = r.covered;
    } else {
      e["predicted"] = nullptr;
    }
    rates.push_back(std::move(e));
  }
  j["rates"] = std::move(rates);

  nlohmann::ordered_json bounds = nlohmann::ordered_json::array();
  for (const BoundReport& b : bound_reports()) {
    nlohmann::ordered_json e;
    e["name"] = b.name;
    e["events"] = b.events;
    e["population"] = b.population;
    e["rate"] = b.rate;
    e["bound"] = b.bound;
    e["within"] = b.within;
    bounds.push_back(std::move(e));
  }
  j["bounds"] = std::move(bounds);

  if (stats.keysTriedCount > 0) {
    double n = static_cast<double>(stats.keysTriedCount);
    double mean = static_cast<double>(stats.keysTriedSum) / n;
    nlohmann::ordered_json kt;
    kt["population"] = stats.keysTriedCount;
    kt["observedMean"] = mean;
    kt["predictedMean"] = stats.predKeysTried / n;
    kt["observedVariance"] = std::max(0.0, stats.keysTriedSumSq / n - mean * mean);
    j["keysTried"] = std::move(kt);
  }
  return j;
}

}  // namespace uralab
