#pragma once

#include <cstdint>
#include <vector>

#include "cardlab/common.hpp"

namespace cardlab {

// SplitMix64 finalizer: the standard 64-bit mixing permutation.
constexpr u64 mix64(u64 x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Combine a key with a tag into a fresh key (order-sensitive).
constexpr u64 mix_key(u64 key, u64 tag) { return mix64(key ^ mix64(tag + 0x632be59bd9b4e019ULL)); }

// Deterministic counter-based bit stream. Word i of the stream is
// mix64(key + i), so any (key, counter) position can be reproduced exactly;
// no state beyond the counter and a partial-word bit buffer.
//
// Bit accounting: next_bits(k) consumes exactly k bits; next_u64 consumes 64;
// uniform_below consumes 64 per sampling attempt (whole words, so that
// rejection never leaks partial entropy into later draws).
class Stream {
 public:
  explicit Stream(u64 key) : key_(key) {}

  u64 key() const { return key_; }
  u64 bits_consumed() const { return bits_consumed_; }

  // Independent child stream; does not consume bits from this one.
  Stream substream(u64 tag) const { return Stream(mix_key(key_, tag)); }

  u64 next_u64() {
    bits_consumed_ += 64;
    buffered_ = 0;
    return next_word();
  }

  // Exactly `k` fresh bits (0 <= k <= 64), as the low bits of the result.
  u64 next_bits(unsigned k) {
    if (k == 0) return 0;
    if (k > 64) throw ConfigError("next_bits: k > 64");
    bits_consumed_ += k;
    if (buffered_ < k) {
      u64 w = next_word();
      if (buffered_ == 0) {
        buffer_ = w;
        buffered_ = 64;
      } else {
        // Top up the buffer; keep ordering deterministic (old bits first).
        unsigned need = k - buffered_;
        u64 out = (buffer_ << need) | (w & ((need == 64) ? ~0ULL : ((1ULL << need) - 1)));
        buffer_ = w >> need;
        buffered_ = 64 - need;
        return out & ((k == 64) ? ~0ULL : ((1ULL << k) - 1));
      }
    }
    u64 out = buffer_ & ((k == 64) ? ~0ULL : ((1ULL << k) - 1));
    buffer_ >>= (k == 64) ? 0 : k;
    if (k == 64) buffer_ = 0;
    buffered_ -= k;
    return out;
  }

  // Unbiased uniform draw from [0, bound). Lemire-style multiply-shift with
  // rejection; each attempt consumes one 64-bit word.
  u64 uniform_below(u64 bound) {
    if (bound == 0) throw ConfigError("uniform_below: bound == 0");
    if (bound == 1) return 0;
    while (true) {
      bits_consumed_ += 64;
      buffered_ = 0;
      u64 x = next_word();
      __uint128_t m = static_cast<__uint128_t>(x) * bound;
      u64 lo = static_cast<u64>(m);
      if (lo < bound) {
        u64 threshold = (0 - bound) % bound;
        if (lo < threshold) continue;
      }
      return static_cast<u64>(m >> 64);
    }
  }

  // Uniform card label in 1..n.
  card_t uniform_card(u32 n) { return static_cast<card_t>(uniform_below(n)) + 1; }

  // IEEE double in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(next_bits(53)) * 0x1.0p-53; }

 private:
  u64 next_word() { return mix64(key_ + 0x9e3779b97f4a7c15ULL * (++counter_)); }

  u64 key_;
  u64 counter_ = 0;
  u64 buffer_ = 0;
  unsigned buffered_ = 0;
  u64 bits_consumed_ = 0;
};

// Fisher-Yates shuffle driven by a Stream (deterministic given the key).
template <class T>
void shuffle(std::vector<T>& v, Stream& s) {
  for (u64 i = v.size(); i > 1; --i) {
    u64 j = s.uniform_below(i);
    std::swap(v[i - 1], v[j]);
  }
}

// Sample k distinct cards from 1..n, returned sorted ascending.
std::vector<card_t> sample_distinct_cards(u32 n, u32 k, Stream& s);

// The three per-trial randomness streams: long-lived guesser randomness
// (hash functions, sampled subsets), on-the-fly guesser randomness (uncharged
// per-turn coin flips), and the dealer's own randomness. Derivation is
// counter-based from (master_seed, trial_index, stream_id) so any trial can be
// replayed in isolation.
struct RandomnessStreams {
  Stream guesser_long_lived;
  Stream guesser_on_the_fly;
  Stream dealer;
};

RandomnessStreams derive_streams(u64 master_seed, u64 trial_index);

}  // namespace cardlab
