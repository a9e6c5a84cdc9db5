#include "uralab/sha256.hpp"

#include <cstring>

namespace uralab {

namespace {

constexpr uint32_t kInit[8] = {
    0x6a09e667u, 0xbb67ae85u, 0x3c6ef372u, 0xa54ff53au,
    0x510e527fu, 0x9b05688cu, 0x1f83d9abu, 0x5be0cd19u,
};

constexpr uint32_t kRound[64] = {
    0x428a2f98u, 0x71374491u, 0xb5c0fbcfu, 0xe9b5dba5u, 0x3956c25bu,
    0x59f111f1u, 0x923f82a4u, 0xab1c5ed5u, 0xd807aa98u, 0x12835b01u,
    0x243185beu, 0x550c7dc3u, 0x72be5d74u, 0x80deb1feu, 0x9bdc06a7u,
    0xc19bf174u, 0xe49b69c1u, 0xefbe4786u, 0x0fc19dc6u, 0x240ca1ccu,
    0x2de92c6fu, 0x4a7484aau, 0x5cb0a9dcu, 0x76f988dau, 0x983e5152u,
    0xa831c66du, 0xb00327c8u, 0xbf597fc7u, 0xc6e00bf3u, 0xd5a79147u,
    0x06ca6351u, 0x14292967u, 0x27b70a85u, 0x2e1b2138u, 0x4d2c6dfcu,
    0x53380d13u, 0x650a7354u, 0x766a0abbu, 0x81c2c92eu, 0x92722c85u,
    0xa2bfe8a1u, 0xa81a664bu, 0xc24b8b70u, 0xc76c51a3u, 0xd192e819u,
    0xd6990624u, 0xf40e3585u, 0x106aa070u, 0x19a4c116u, 0x1e376c08u,
    0x2748774cu, 0x34b0bcb5u, 0x391c0cb3u, 0x4ed8aa4au, 0x5b9cca4fu,
    0x682e6ff3u, 0x748f82eeu, 0x78a5636fu, 0x84c87814u, 0x8cc70208u,
    0x90befffau, 0xa4506cebu, 0xbef9a3f7u, 0xc67178f2u,
};

inline uint32_t rotr(uint32_t x, int n) { return (x >> n) | (x << (32 - n)); }

}  // namespace

void Sha256::reset() {
  for (int i = 0; i < 8; ++i) h_[i] = kInit[i];
  bufferLen_ = 0;
  totalBytes_ = 0;
}

void Sha256::compress(const uint8_t block[64]) {
  uint32_t w[64];
  for (int i = 0; i < 16; ++i) {
    w[i] = (uint32_t(block[4 * i]) << 24) | (uint32_t(block[4 * i + 1]) << 16) |
           (uint32_t(block[4 * i + 2]) << 8) | uint32_t(block[4 * i + 3]);
  }
  for (int i = 16; i < 64; ++i) {
    uint32_t s0 = rotr(w[i - 15], 7) ^ rotr(w[i - 15], 18) ^ (w[i - 15] >> 3);
    uint32_t s1 = rotr(w[i - 2], 17) ^ rotr(w[i - 2], 19) ^ (w[i - 2] >> 10);
    w[i] = w[i - 16] + s0 + w[i - 7] + s1;
  }

  uint32_t a = h_[0], b = h_[1], c = h_[2], d = h_[3];
  uint32_t e = h_[4], f = h_[5], g = h_[6], h = h_[7];
  for (int i = 0; i < 64; ++i) {
    uint32_t s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25);
    uint32_t ch = (e & f) ^ (~e & g);
    uint32_t t1 = h + s1 + ch + kRound[i] + w[i];
    uint32_t s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22);
    uint32_t maj = (a & b) ^ (a & c) ^ (b & c);
    uint32_t t2 = s0 + maj;
    h = g;
    g = f;
    f = e;
    e = d + t1;
    d = c;
    c = b;
    b = a;
    a = t1 + t2;
  }
  h_[0] += a;
  h_[1] += b;
  h_[2] += c;
  h_[3] += d;
  h_[4] += e;
  h_[5] += f;
  h_[6] += g;
  h_[7] += h;
}

void Sha256::update(const uint8_t* data, size_t len) {
  totalBytes_ += len;
  if (bufferLen_ > 0) {
    size_t take = 64 - bufferLen_;
    if (take > len) take = len;
    std::memcpy(buffer_ + bufferLen_, data, take);
    bufferLen_ += take;
    data += take;
    len -= take;
    if (bufferLen_ == 64) {
      compress(buffer_);
      bufferLen_ = 0;
    }
  }
  while (len >= 64) {
    compress(data);
    data += 64;
    len -= 64;
  }
  if (len > 0) {
    std::memcpy(buffer_, data, len);
    bufferLen_ = len;
  }
}

std::array<uint8_t, 32> Sha256::finish() {
  uint64_t bitLen = totalBytes_ * 8;
  uint8_t pad[72];
  size_t padLen = 0;
  pad[padLen++] = 0x80;
  while ((totalBytes_ + padLen) % 64 != 56) pad[padLen++] = 0;
  for (int i = 7; i >= 0; --i) pad[padLen++] = static_cast<uint8_t>(bitLen >> (8 * i));
  update(pad, padLen);

  std::array<uint8_t, 32> out;
  for (int i = 0; i < 8; ++i) {
    out[4 * i] = static_cast<uint8_t>(h_[i] >> 24);
    out[4 * i + 1] = static_cast<uint8_t>(h_[i] >> 16);
    out[4 * i + 2] = static_cast<uint8_t>(h_[i] >> 8);
    out[4 * i + 3] = static_cast<uint8_t>(h_[i]);
  }
  reset();
  return out;
}

Sha256::State Sha256::midstate() const {
  return State{h_, totalBytes_};
}

void Sha256::restore(const State& s) {
  h_ = s.h;
  totalBytes_ = s.bytesProcessed;
  bufferLen_ = 0;
}

std::array<uint8_t, 32> hmac_sha256(const uint8_t* key, size_t keyLen,
                                    const uint8_t* msg, size_t msgLen) {
  HmacMidstate mid = hmac_midstate(key, keyLen);
  return hmac_from_midstate(mid, msg, msgLen);
}

HmacMidstate hmac_midstate(const uint8_t* key, size_t keyLen) {
  uint8_t block[64] = {};
  if (keyLen > 64) {
    auto digest = Sha256::digest(key, keyLen);
    std::memcpy(block, digest.data(), digest.size());
  } else {
    std::memcpy(block, key, keyLen);
  }

  uint8_t pad[64];
  HmacMidstate mid;
  Sha256 h;

  for (int i = 0; i < 64; ++i) pad[i] = block[i] ^ 0x36;
  h.update(pad, 64);
  mid.inner = h.midstate();

  h.reset();
  for (int i = 0; i < 64; ++i) pad[i] = block[i] ^ 0x5c;
  h.update(pad, 64);
  mid.outer = h.midstate();
  return mid;
}

std::array<uint8_t, 32> hmac_from_midstate(const HmacMidstate& mid,
                                           const uint8_t* msg, size_t msgLen) {
  Sha256 h;
  h.restore(mid.inner);
  h.update(msg, msgLen);
  auto innerDigest = h.finish();

  h.restore(mid.outer);
  h.update(innerDigest.data(), innerDigest.size());
  return h.finish();
}

}  // namespace uralab
