#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace uralab {

/// Incremental SHA-256 (FIPS 180-4).
class Sha256 {
public:
  struct State {
    std::array<uint32_t, 8> h;
    uint64_t bytesProcessed;  // whole blocks only
  };

  Sha256() { reset(); }

  void reset();
  void update(const uint8_t* data, size_t len);
  std::array<uint8_t, 32> finish();

  static std::array<uint8_t, 32> digest(const uint8_t* data, size_t len) {
    Sha256 h;
    h.update(data, len);
    return h.finish();
  }

  /// Capture the compression state after all complete blocks absorbed so
  /// far. Only valid when the byte count is a block multiple (no residue).
  State midstate() const;

  /// Resume from a captured block-aligned state.
  void restore(const State& s);

private:
  void compress(const uint8_t block[64]);

  std::array<uint32_t, 8> h_;
  uint8_t buffer_[64];
  size_t bufferLen_;
  uint64_t totalBytes_;
};

/// HMAC-SHA-256 (RFC 2104).
std::array<uint8_t, 32> hmac_sha256(const uint8_t* key, size_t keyLen,
                                    const uint8_t* msg, size_t msgLen);

/// Per-key HMAC midstates: the compression states after absorbing the ipad
/// and opad blocks. Computing a tag from a midstate costs two compressions
/// for short messages instead of four.
struct HmacMidstate {
  Sha256::State inner;
  Sha256::State outer;
};

HmacMidstate hmac_midstate(const uint8_t* key, size_t keyLen);

std::array<uint8_t, 32> hmac_from_midstate(const HmacMidstate& mid,
                                           const uint8_t* msg, size_t msgLen);

}  // namespace uralab
