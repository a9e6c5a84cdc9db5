#pragma once

#include <cstdint>
#include <vector>

#include "uralab/bits.hpp"
#include "uralab/model.hpp"
#include "uralab/rng.hpp"
#include "uralab/sha256.hpp"

namespace uralab {

/// Tag computation backend.
///   IdealOracle: a seeded stateless mixer standing in for a uniform random
///                function of (key, data, nonce); fast path for large
///                statistical runs.
///   KeyedPrf:    HMAC-SHA-256 truncated to the first L bits.
struct MacMode {
  enum class Kind { IdealOracle, KeyedPrf };
  Kind kind = Kind::KeyedPrf;
  uint64_t simulationSeed = 0;  // IdealOracle only

  static MacMode ideal(uint64_t seed) { return MacMode{Kind::IdealOracle, seed}; }
  static MacMode keyed_prf() { return MacMode{Kind::KeyedPrf, 0}; }
};

/// Computes L-bit tags over (key, data, nonce). The per-key and per-message
/// halves of the computation can be cached separately, which turns the inner
/// loop of an authenticator (every key against every message) into a single
/// combine step per pair.
class MacEngine {
public:
  MacEngine(MacMode mode, unsigned tagBits);

  struct KeyCtx {
    HmacMidstate mid{};   // KeyedPrf: states after the ipad/opad blocks
    uint64_t keyMix = 0;  // IdealOracle: key digest folded with the seed
  };

  struct MsgCtx {
    std::vector<uint8_t> bytes;  // KeyedPrf: data bytes ‖ nonce bytes
    uint64_t msgMix = 0;         // IdealOracle: folded message digest
  };

  KeyCtx key_ctx(const SecretKey& key) const;
  MsgCtx msg_ctx(const Bits& data, const Nonce& nonce) const;

  /// Tag as an integer in [0, 2^L): the first L bits of the underlying
  /// 64-bit (IdealOracle) or 256-bit (KeyedPrf) output string.
  uint64_t tag_value(const KeyCtx& key, const MsgCtx& msg) const;

  Bits tag(const KeyCtx& key, const MsgCtx& msg) const {
    return Bits::from_u64(tag_value(key, msg), tagBits_);
  }

  /// One-shot convenience paths.
  Bits compute(const SecretKey& key, const Bits& data, const Nonce& nonce) const;
  bool verify(const SecretKey& key, const Bits& data, const Nonce& nonce,
              const Bits& claimedTag) const;

  unsigned tag_width() const { return tagBits_; }
  const MacMode& mode() const { return mode_; }

private:
  MacMode mode_;
  unsigned tagBits_;
  uint64_t seedMix_;  // IdealOracle: pre-mixed simulation seed
};

/// Tag over (key, data, nonce) in the given mode.
Bits compute_mac(const MacEngine& engine, const SecretKey& key, const Bits& data,
                 const Nonce& nonce);

/// Constant-pattern check: recompute and compare.
bool verify_mac(const MacEngine& engine, const SecretKey& key, const Bits& data,
                const Nonce& nonce, const Bits& claimedTag);

}  // namespace uralab
