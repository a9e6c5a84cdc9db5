#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uralab/bits.hpp"
#include "uralab/errors.hpp"
#include "uralab/rng.hpp"

namespace uralab {

/// Packet composition scheme.
///   Bare:       payload = data                    (B = D)
///   MacOnly:    payload = data ‖ mac              (B = D + L)
///   AddressMac: payload = data ‖ address ‖ mac    (B = D + A + L)
enum class Scheme { Bare, MacOnly, AddressMac };

std::string scheme_name(Scheme s);
Scheme scheme_from_name(const std::string& name);

/// Bit offsets of the payload fields, counted from the most significant end.
struct PayloadLayout {
  unsigned dataOffset = 0;
  unsigned dataBits = 0;
  unsigned addressOffset = 0;
  unsigned addressBits = 0;
  unsigned macOffset = 0;
  unsigned macBits = 0;
  unsigned totalBits = 0;
};

PayloadLayout payload_layout(Scheme scheme, unsigned dataBits, unsigned macBits,
                             unsigned addressBits);

/// Static system parameters for one experiment.
struct SystemConfig {
  uint64_t N = 0;            // user population size
  uint64_t K = 0;            // active users per round
  unsigned L = 0;            // MAC tag bits
  unsigned D = 0;            // data bits
  unsigned A = 0;            // address bits (AddressMac only)
  unsigned B = 0;            // total payload bits (derived from scheme)
  unsigned n = 32768;        // channel uses per slot
  double P = 1.0;            // per-symbol power budget
  Scheme scheme = Scheme::MacOnly;
  double noiseVariance = 1.0;

  PayloadLayout layout() const { return payload_layout(scheme, D, L, A); }

  /// Enforce the structural invariants; throws ConfigError on violation.
  void validate() const;

  static SystemConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

/// Long-term per-user secret key.
struct SecretKey {
  std::vector<uint8_t> bytes;

  bool operator==(const SecretKey& rhs) const { return bytes == rhs.bytes; }
};

/// userId -> key map over the full population 0..N-1. Keys are pairwise
/// distinct; iteration is by ascending userId.
class KeyRegistry {
public:
  static constexpr unsigned kDefaultKeyBits = 128;

  static KeyRegistry generate(uint64_t populationSize, uint64_t seed,
                              unsigned keyBits = kDefaultKeyBits);

  uint64_t size() const { return keys_.size(); }
  const SecretKey& key(uint64_t userId) const { return keys_.at(userId); }
  const std::vector<SecretKey>& keys() const { return keys_; }

private:
  std::vector<SecretKey> keys_;
};

/// Per-round freshness input to the MAC: the round index plus 64 random bits
/// drawn once per round and shared by every participant.
struct Nonce {
  uint64_t roundIndex = 0;
  uint64_t randomBits = 0;

  std::array<uint8_t, 16> to_bytes() const {
    std::array<uint8_t, 16> out;
    for (int i = 0; i < 8; ++i) out[i] = static_cast<uint8_t>(roundIndex >> (8 * (7 - i)));
    for (int i = 0; i < 8; ++i) out[8 + i] = static_cast<uint8_t>(randomBits >> (8 * (7 - i)));
    return out;
  }
};

/// One transmitted packet with the fields that compose its payload.
struct Packet {
  uint32_t senderId = 0;
  Bits data;
  Bits address;  // width A under AddressMac, else width 0
  Bits mac;      // width L under MacOnly/AddressMac, else width 0
  Bits payload;  // assembled per the scheme layout
};

/// Everything the simulator knows about a round that the authenticator must
/// not see: who transmitted what, and which payloads collided.
struct GroundTruth {
  std::vector<uint32_t> activeUsers;  // ascending
  std::vector<Packet> packets;        // same order as activeUsers
  Nonce nonce;
  /// Sender groups (size >= 2) that produced byte-identical payloads; such a
  /// group is decoded as one list entry at best.
  std::vector<std::vector<uint32_t>> duplicatePayloadGroups;
};

// generate_round lives in round.hpp (it needs the MAC engine types).

}  // namespace uralab
