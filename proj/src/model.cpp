#include "uralab/model.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "uralab/mac.hpp"
#include "uralab/round.hpp"

namespace uralab {

std::string scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Bare: return "Bare";
    case Scheme::MacOnly: return "MacOnly";
    case Scheme::AddressMac: return "AddressMac";
  }
  throw std::logic_error("unreachable scheme");
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "Bare") return Scheme::Bare;
  if (name == "MacOnly") return Scheme::MacOnly;
  if (name == "AddressMac") return Scheme::AddressMac;
  throw ParseError("unknown scheme: " + name);
}

PayloadLayout payload_layout(Scheme scheme, unsigned dataBits, unsigned macBits,
                             unsigned addressBits) {
  PayloadLayout lay;
  lay.dataOffset = 0;
  lay.dataBits = dataBits;
  switch (scheme) {
    case Scheme::Bare:
      lay.addressOffset = dataBits;
      lay.addressBits = 0;
      lay.macOffset = dataBits;
      lay.macBits = 0;
      lay.totalBits = dataBits;
      break;
    case Scheme::MacOnly:
      lay.addressOffset = dataBits;
      lay.addressBits = 0;
      lay.macOffset = dataBits;
      lay.macBits = macBits;
      lay.totalBits = dataBits + macBits;
      break;
    case Scheme::AddressMac:
      lay.addressOffset = dataBits;
      lay.addressBits = addressBits;
      lay.macOffset = dataBits + addressBits;
      lay.macBits = macBits;
      lay.totalBits = dataBits + addressBits + macBits;
      break;
  }
  return lay;
}

void SystemConfig::validate() const {
  if (N < 1) throw ConfigError("N must be at least 1");
  if (K > N) throw ConfigError("K must not exceed N");
  if (D < 1) throw ConfigError("D must be at least 1");
  if (L > 64) throw ConfigError("L must not exceed 64");
  switch (scheme) {
    case Scheme::Bare:
      if (L != 0) throw ConfigError("Bare scheme carries no MAC; L must be 0");
      if (A != 0) throw ConfigError("Bare scheme carries no address; A must be 0");
      break;
    case Scheme::MacOnly:
      if (L < 1) throw ConfigError("MacOnly scheme requires L >= 1");
      if (A != 0) throw ConfigError("MacOnly scheme carries no address; A must be 0");
      break;
    case Scheme::AddressMac:
      if (L < 1) throw ConfigError("AddressMac scheme requires L >= 1");
      if (A < 1) throw ConfigError("AddressMac scheme requires A >= 1");
      if (A < 64 && N > (uint64_t(1) << A))
        throw ConfigError("address field too narrow for the population");
      break;
  }
  if (B != layout().totalBits)
    throw ConfigError("B does not match the scheme-derived payload width");
  if (B > Bits::kMaxBits) throw ConfigError("payload exceeds 256 bits");
  if (n < 1) throw ConfigError("n must be at least 1");
  if (P <= 0.0) throw ConfigError("P must be positive");
  if (noiseVariance < 0.0) throw ConfigError("noiseVariance must be nonnegative");
}

namespace {

const nlohmann::json& require_field(const nlohmann::json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw ParseError(std::string("missing config field: ") + name);
  return *it;
}

uint64_t as_u64(const nlohmann::json& v, const char* name) {
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<int64_t>() >= 0))
    throw ParseError(std::string("field must be a nonnegative integer: ") + name);
  return v.get<uint64_t>();
}

unsigned as_unsigned(const nlohmann::json& v, const char* name) {
  uint64_t x = as_u64(v, name);
  if (x > 0xffffffffull) throw ParseError(std::string("field out of range: ") + name);
  return static_cast<unsigned>(x);
}

double as_double(const nlohmann::json& v, const char* name) {
  if (!v.is_number()) throw ParseError(std::string("field must be a number: ") + name);
  return v.get<double>();
}

}  // namespace

SystemConfig SystemConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("config must be a JSON object");
  static const std::unordered_set<std::string> known = {
      "N", "K", "L", "D", "A", "B", "n", "P", "scheme", "noiseVariance"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw ParseError("unknown config field: " + item.key());
  }

  SystemConfig c;
  c.N = as_u64(require_field(j, "N"), "N");
  c.K = as_u64(require_field(j, "K"), "K");
  c.L = as_unsigned(require_field(j, "L"), "L");
  c.D = as_unsigned(require_field(j, "D"), "D");
  const auto& schemeField = require_field(j, "scheme");
  if (!schemeField.is_string()) throw ParseError("scheme must be a string");
  c.scheme = scheme_from_name(schemeField.get<std::string>());
  if (j.contains("A")) c.A = as_unsigned(j.at("A"), "A");
  if (j.contains("n")) c.n = as_unsigned(j.at("n"), "n");
  if (j.contains("P")) c.P = as_double(j.at("P"), "P");
  if (j.contains("noiseVariance")) c.noiseVariance = as_double(j.at("noiseVariance"), "noiseVariance");
  c.B = c.layout().totalBits;
  if (j.contains("B") && as_unsigned(j.at("B"), "B") != c.B)
    throw ConfigError("B does not match the scheme-derived payload width");
  c.validate();
  return c;
}

nlohmann::ordered_json SystemConfig::to_json() const {
  nlohmann::ordered_json j;
  j["N"] = N;
  j["K"] = K;
  j["L"] = L;
  j["D"] = D;
  j["A"] = A;
  j["B"] = B;
  j["n"] = n;
  j["P"] = P;
  j["scheme"] = scheme_name(scheme);
  j["noiseVariance"] = noiseVariance;
  return j;
}

KeyRegistry KeyRegistry::generate(uint64_t populationSize, uint64_t seed, unsigned keyBits) {
  if (keyBits < 8 || keyBits % 8 != 0)
    throw ConfigError("key width must be a positive byte multiple");
  if (keyBits < 64 && populationSize > (uint64_t(1) << keyBits))
    throw ConfigError("key space too small for a distinct key per user");
  KeyRegistry reg;
  reg.keys_.resize(populationSize);
  Rng rng(seed);
  std::unordered_set<std::string> seen;
  seen.reserve(populationSize * 2);
  const unsigned keyBytes = keyBits / 8;
  for (uint64_t u = 0; u < populationSize; ++u) {
    std::string probe;
    SecretKey key;
    do {
      key.bytes.assign(keyBytes, 0);
      for (unsigned i = 0; i < keyBytes; i += 8) {
        uint64_t w = rng.next();
        for (unsigned b = 0; b < 8 && i + b < keyBytes; ++b)
          key.bytes[i + b] = static_cast<uint8_t>(w >> (8 * (7 - b)));
      }
      probe.assign(key.bytes.begin(), key.bytes.end());
    } while (!seen.insert(probe).second);
    reg.keys_[u] = std::move(key);
  }
  return reg;
}

GroundTruth generate_round(const SystemConfig& config, const KeyRegistry& registry,
                           const MacEngine& engine, const Nonce& nonce, Rng& rng,
                           const std::vector<MacEngine::KeyCtx>* keyCtxs) {
  GroundTruth truth;
  truth.nonce = nonce;
  if (registry.size() < config.N) throw ConfigError("key registry smaller than population");

  // Floyd's algorithm: K distinct draws from {0,...,N-1}.
  std::unordered_set<uint64_t> chosen;
  chosen.reserve(config.K * 2);
  for (uint64_t j = config.N - config.K; j < config.N; ++j) {
    uint64_t t = rng.below(j + 1);
    chosen.insert(chosen.count(t) ? j : t);
  }
  truth.activeUsers.assign(chosen.begin(), chosen.end());
  std::sort(truth.activeUsers.begin(), truth.activeUsers.end());

  const PayloadLayout lay = config.layout();
  truth.packets.reserve(truth.activeUsers.size());
  for (uint32_t u : truth.activeUsers) {
    Packet p;
    p.senderId = u;
    p.data = rng.bits(config.D);
    if (lay.addressBits > 0) p.address = Bits::from_u64(u, lay.addressBits);
    if (lay.macBits > 0) {
      MacEngine::MsgCtx mc = engine.msg_ctx(p.data, nonce);
      MacEngine::KeyCtx kc = keyCtxs ? (*keyCtxs)[u] : engine.key_ctx(registry.key(u));
      p.mac = engine.tag(kc, mc);
    }
    p.payload = p.data.concat(p.address).concat(p.mac);
    truth.packets.push_back(std::move(p));
  }

  // Group senders whose assembled payloads are byte-identical.
  std::unordered_map<Bits, std::vector<uint32_t>, BitsHash> byPayload;
  for (const Packet& p : truth.packets) byPayload[p.payload].push_back(p.senderId);
  for (const Packet& p : truth.packets) {
    auto& group = byPayload[p.payload];
    if (group.size() >= 2 && group.front() == p.senderId)
      truth.duplicatePayloadGroups.push_back(group);
  }
  return truth;
}

}  // namespace uralab
