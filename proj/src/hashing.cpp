#include "cardlab/hashing.hpp"

#include <bit>

namespace cardlab {

PairwisePerm sample_pairwise(const Gf2Field& f, Stream& long_lived) {
  // Exactly 2*l bits: l for a, l for b. a must be nonzero; mapping the raw
  // draw through 1 + (raw mod (2^l - 1)) keeps the bit count exact at the
  // cost of a 2^(1-l) bias on a (the enumeration-based independence tests
  // cover the family's exact distribution).
  u32 raw_a = static_cast<u32>(long_lived.next_bits(f.ell()));
  u32 raw_b = static_cast<u32>(long_lived.next_bits(f.ell()));
  PairwisePerm h;
  h.a = 1 + raw_a % (f.order() - 1);
  h.b = raw_b;
  return h;
}

card_t eval_pairwise(const Gf2Field& f, const PairwisePerm& h, card_t x) {
  return f.add(f.mul(h.a, x - 1), h.b) + 1;
}

card_t invert_pairwise(const Gf2Field& f, const PairwisePerm& h, card_t y) {
  return f.mul(f.inv(h.a), f.add(y - 1, h.b)) + 1;
}

std::vector<PairwisePerm> enumerate_pairwise(const Gf2Field& f) {
  std::vector<PairwisePerm> out;
  out.reserve(static_cast<size_t>(f.order() - 1) * f.order());
  for (u32 a = 1; a < f.order(); ++a)
    for (u32 b = 0; b < f.order(); ++b) out.push_back(PairwisePerm{a, b});
  return out;
}

KWisePoly sample_kwise(const Gf2Field& f, u32 k, Stream& long_lived) {
  if (k == 0) throw ConfigError("sample_kwise: k must be >= 1");
  KWisePoly h;
  h.coeffs.resize(k);
  for (u32 i = 0; i < k; ++i)
    h.coeffs[i] = static_cast<u32>(long_lived.next_bits(f.ell()));
  return h;
}

card_t eval_kwise(const Gf2Field& f, const KWisePoly& h, card_t x) {
  u32 xe = x - 1;
  u32 acc = 0;
  for (size_t i = h.coeffs.size(); i-- > 0;) acc = f.add(f.mul(acc, xe), h.coeffs[i]);
  return acc + 1;
}

std::vector<KWisePoly> enumerate_kwise(const Gf2Field& f, u32 k) {
  u64 total = 1;
  for (u32 i = 0; i < k; ++i) {
    total *= f.order();
    if (total > (1u << 24)) throw ConfigError("enumerate_kwise: family too large");
  }
  std::vector<KWisePoly> out;
  out.reserve(total);
  for (u64 idx = 0; idx < total; ++idx) {
    KWisePoly h;
    h.coeffs.resize(k);
    u64 v = idx;
    for (u32 i = 0; i < k; ++i) {
      h.coeffs[i] = static_cast<u32>(v % f.order());
      v /= f.order();
    }
    out.push_back(std::move(h));
  }
  return out;
}

unsigned bucket_of(card_t y) {
  if (y == 0) throw ConfigError("bucket_of: y must be >= 1");
  if (y <= 2) return 1;
  return static_cast<unsigned>(std::bit_width(y - 1));  // ceil(log2 y) for y >= 2
}

u32 bucket_size(unsigned j) {
  if (j == 0) throw ConfigError("bucket index starts at 1");
  return j == 1 ? 2u : (1u << (j - 1));
}

card_t bucket_low(unsigned j) {
  if (j == 0) throw ConfigError("bucket index starts at 1");
  return j == 1 ? 1u : ((1u << (j - 1)) + 1);
}

u32 bucket_index_of(card_t y) {
  unsigned j = bucket_of(y);
  return y - bucket_low(j) + 1;
}

card_t bucket_member(unsigned j, u32 index) {
  if (index == 0 || index > bucket_size(j)) throw ConfigError("bucket index out of range");
  return bucket_low(j) + index - 1;
}

}  // namespace cardlab
