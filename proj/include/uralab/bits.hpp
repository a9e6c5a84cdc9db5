#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace uralab {

/// Fixed-width bit string, up to 256 bits, with value semantics.
///
/// A Bits of width w models the integer value of a w-bit field. Bit offsets
/// are counted from the most significant (leftmost) end, so that a payload
/// assembled as data‖address‖mac places the data field at offset 0 and the
/// serialized big-endian byte form reads left to right in field order.
class Bits {
public:
  static constexpr unsigned kMaxBits = 256;

  Bits() = default;
  explicit Bits(unsigned width) : width_(check_width(width)) {}

  static Bits from_u64(uint64_t value, unsigned width) {
    Bits b(width);
    if (width < 64 && width > 0) value &= (uint64_t(1) << width) - 1;
    if (width == 0) value = 0;
    b.limb_[0] = value;
    return b;
  }

  unsigned width() const { return width_; }

  /// Integer value; only valid for widths up to 64.
  uint64_t as_u64() const {
    if (width_ > 64) throw std::logic_error("Bits::as_u64: width exceeds 64");
    return limb_[0];
  }

  /// Concatenation: *this becomes the high-order field, rhs the low-order one.
  Bits concat(const Bits& rhs) const {
    if (width_ + rhs.width_ > kMaxBits)
      throw std::logic_error("Bits::concat: result exceeds 256 bits");
    Bits out = shifted_left(*this, rhs.width_);
    out.width_ = static_cast<uint16_t>(width_ + rhs.width_);
    for (int i = 0; i < 4; ++i) out.limb_[i] |= rhs.limb_[i];
    return out;
  }

  /// Extract the field of `fieldWidth` bits starting `offset` bits from the
  /// most significant end.
  Bits field(unsigned offset, unsigned fieldWidth) const {
    if (offset + fieldWidth > width_)
      throw std::logic_error("Bits::field: range out of bounds");
    unsigned drop = width_ - offset - fieldWidth;  // low-order bits below the field
    Bits out = shifted_right(*this, drop);
    out.width_ = static_cast<uint16_t>(fieldWidth);
    out.mask_to_width();
    return out;
  }

  /// Big-endian byte serialization: ceil(width/8) bytes, value right-aligned
  /// (left-padded with zero bits when width is not a byte multiple).
  std::vector<uint8_t> to_bytes() const {
    std::vector<uint8_t> out((width_ + 7) / 8);
    for (size_t i = 0; i < out.size(); ++i) {
      unsigned shift = 8 * static_cast<unsigned>(out.size() - 1 - i);
      out[i] = static_cast<uint8_t>(limb_[shift / 64] >> (shift % 64));
    }
    return out;
  }

  std::string to_hex() const {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (uint8_t byte : to_bytes()) {
      s.push_back(digits[byte >> 4]);
      s.push_back(digits[byte & 0xf]);
    }
    return s;
  }

  bool operator==(const Bits& rhs) const {
    return width_ == rhs.width_ && limb_ == rhs.limb_;
  }
  bool operator!=(const Bits& rhs) const { return !(*this == rhs); }

  size_t hash() const {
    uint64_t h = 0x9E3779B97F4A7C15ull ^ width_;
    for (uint64_t w : limb_) {
      h ^= w + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
    }
    return static_cast<size_t>(h);
  }

  /// Direct limb access for hashing/serialization helpers (limb 0 = least
  /// significant 64 bits).
  const std::array<uint64_t, 4>& limbs() const { return limb_; }

  void set_limbs_masked(const std::array<uint64_t, 4>& raw) {
    limb_ = raw;
    mask_to_width();
  }

private:
  static unsigned check_width(unsigned w) {
    if (w > kMaxBits) throw std::logic_error("Bits: width exceeds 256");
    return w;
  }

  void mask_to_width() {
    for (unsigned i = 0; i < 4; ++i) {
      unsigned lo = 64 * i;
      if (width_ <= lo) {
        limb_[i] = 0;
      } else if (width_ < lo + 64) {
        limb_[i] &= (uint64_t(1) << (width_ - lo)) - 1;
      }
    }
  }

  static Bits shifted_left(const Bits& in, unsigned n) {
    Bits out;
    out.width_ = in.width_;
    unsigned limbShift = n / 64, bitShift = n % 64;
    for (int i = 3; i >= 0; --i) {
      uint64_t v = 0;
      int src = i - static_cast<int>(limbShift);
      if (src >= 0) {
        v = in.limb_[src] << bitShift;
        if (bitShift && src > 0) v |= in.limb_[src - 1] >> (64 - bitShift);
      }
      out.limb_[i] = v;
    }
    return out;
  }

  static Bits shifted_right(const Bits& in, unsigned n) {
    Bits out;
    out.width_ = in.width_;
    unsigned limbShift = n / 64, bitShift = n % 64;
    for (int i = 0; i < 4; ++i) {
      uint64_t v = 0;
      unsigned src = i + limbShift;
      if (src < 4) {
        v = in.limb_[src] >> bitShift;
        if (bitShift && src + 1 < 4) v |= in.limb_[src + 1] << (64 - bitShift);
      }
      out.limb_[i] = v;
    }
    return out;
  }

  uint16_t width_ = 0;
  std::array<uint64_t, 4> limb_{};
};

struct BitsHash {
  size_t operator()(const Bits& b) const { return b.hash(); }
};

}  // namespace uralab
