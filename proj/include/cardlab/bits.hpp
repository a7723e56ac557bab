#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cardlab/common.hpp"

namespace cardlab {

// A bit string with exact length. Bit 0 is the first bit written/read; within
// each byte, earlier bits occupy higher positions (big-endian bit order).
class BitString {
 public:
  BitString() = default;

  u64 size() const { return nbits_; }
  bool empty() const { return nbits_ == 0; }

  bool bit(u64 i) const {
    if (i >= nbits_) throw MalformedCodeword("bit index past end");
    return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
  }

  void push_bit(bool b) {
    if ((nbits_ & 7) == 0) bytes_.push_back(0);
    if (b) bytes_[nbits_ >> 3] |= static_cast<u8>(1u << (7 - (nbits_ & 7)));
    ++nbits_;
  }

  // Append `value` in exactly `nbits` bits, most significant bit first.
  void append(u64 value, unsigned nbits) {
    if (nbits < 64 && nbits > 0 && (value >> nbits) != 0)
      throw ConfigError("BitString::append: value does not fit");
    for (unsigned i = nbits; i-- > 0;) push_bit((value >> i) & 1);
  }

  void append(const BitString& other) {
    for (u64 i = 0; i < other.size(); ++i) push_bit(other.bit(i));
  }

  bool operator==(const BitString& o) const {
    if (nbits_ != o.nbits_) return false;
    for (u64 i = 0; i < nbits_; ++i)
      if (bit(i) != o.bit(i)) return false;
    return true;
  }
  bool operator!=(const BitString& o) const { return !(*this == o); }

  std::string to_string() const {
    std::string s;
    s.reserve(nbits_);
    for (u64 i = 0; i < nbits_; ++i) s.push_back(bit(i) ? '1' : '0');
    return s;
  }

 private:
  std::vector<u8> bytes_;
  u64 nbits_ = 0;
};

// Sequential reader over a BitString; throws MalformedCodeword on overrun.
class BitReader {
 public:
  explicit BitReader(const BitString& s) : s_(s) {}

  u64 remaining() const { return s_.size() - pos_; }
  bool at_end() const { return pos_ == s_.size(); }

  bool read_bit() {
    if (pos_ >= s_.size()) throw MalformedCodeword("read past end of codeword");
    return s_.bit(pos_++);
  }

  // Read `nbits` as an unsigned value, most significant bit first.
  u64 read(unsigned nbits) {
    if (nbits > 64) throw ConfigError("BitReader::read: nbits > 64");
    u64 v = 0;
    for (unsigned i = 0; i < nbits; ++i) v = (v << 1) | (read_bit() ? 1 : 0);
    return v;
  }

 private:
  const BitString& s_;
  u64 pos_ = 0;
};

// Number of bits needed to address `count` distinct values (0 for count <= 1).
unsigned bits_for_count(u64 count);

}  // namespace cardlab
