#include "uralab/mac.hpp"

#include "uralab/errors.hpp"

namespace uralab {

namespace {

// FNV-1a over a byte string, finalized through the 64-bit mixer.
uint64_t fold_bytes(const uint8_t* data, size_t len) {
  uint64_t f = 0xcbf29ce484222325ull;
  for (size_t i = 0; i < len; ++i) {
    f = (f ^ data[i]) * 0x100000001b3ull;
  }
  return Rng::mix(f);
}

uint64_t first_bits_be(const uint8_t* bytes) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | bytes[i];
  return v;
}

}  // namespace

MacEngine::MacEngine(MacMode mode, unsigned tagBits)
    : mode_(mode), tagBits_(tagBits) {
  if (tagBits > 64) throw ConfigError("MAC tag width exceeds 64 bits");
  seedMix_ = Rng::mix(mode.simulationSeed ^ 0xA0761D6478BD642Full);
}

MacEngine::KeyCtx MacEngine::key_ctx(const SecretKey& key) const {
  KeyCtx ctx;
  if (mode_.kind == MacMode::Kind::KeyedPrf) {
    ctx.mid = hmac_midstate(key.bytes.data(), key.bytes.size());
  } else {
    ctx.keyMix = Rng::mix(fold_bytes(key.bytes.data(), key.bytes.size()) ^ seedMix_);
  }
  return ctx;
}

MacEngine::MsgCtx MacEngine::msg_ctx(const Bits& data, const Nonce& nonce) const {
  MsgCtx ctx;
  std::vector<uint8_t> bytes = data.to_bytes();
  auto nonceBytes = nonce.to_bytes();
  bytes.insert(bytes.end(), nonceBytes.begin(), nonceBytes.end());
  if (mode_.kind == MacMode::Kind::KeyedPrf) {
    ctx.bytes = std::move(bytes);
  } else {
    ctx.msgMix = fold_bytes(bytes.data(), bytes.size());
  }
  return ctx;
}

uint64_t MacEngine::tag_value(const KeyCtx& key, const MsgCtx& msg) const {
  if (tagBits_ == 0) return 0;
  uint64_t first64;
  if (mode_.kind == MacMode::Kind::KeyedPrf) {
    auto digest = hmac_from_midstate(key.mid, msg.bytes.data(), msg.bytes.size());
    first64 = first_bits_be(digest.data());
  } else {
    first64 = Rng::mix(key.keyMix ^ msg.msgMix);
  }
  return first64 >> (64 - tagBits_);
}

Bits MacEngine::compute(const SecretKey& key, const Bits& data, const Nonce& nonce) const {
  return tag(key_ctx(key), msg_ctx(data, nonce));
}

bool MacEngine::verify(const SecretKey& key, const Bits& data, const Nonce& nonce,
                       const Bits& claimedTag) const {
  return compute(key, data, nonce) == claimedTag;
}

Bits compute_mac(const MacEngine& engine, const SecretKey& key, const Bits& data,
                 const Nonce& nonce) {
  return engine.compute(key, data, nonce);
}

bool verify_mac(const MacEngine& engine, const SecretKey& key, const Bits& data,
                const Nonce& nonce, const Bits& claimedTag) {
  return engine.verify(key, data, nonce, claimedTag);
}

}  // namespace uralab
