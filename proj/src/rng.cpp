#include "cardlab/rng.hpp"

#include <algorithm>

namespace cardlab {

std::vector<card_t> sample_distinct_cards(u32 n, u32 k, Stream& s) {
  if (k > n) throw ConfigError("sample_distinct_cards: k > n");
  std::vector<card_t> out;
  out.reserve(k);
  if (k == 0) return out;
  // Rejection against a membership set; our callers keep k well below n.
  std::vector<u8> seen(n + 1, 0);
  while (out.size() < k) {
    card_t c = s.uniform_card(n);
    if (!seen[c]) {
      seen[c] = 1;
      out.push_back(c);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {
// Stream identifiers; arbitrary distinct constants.
constexpr u64 kGuesserLongLived = 0x67756573736c6f6eULL;
constexpr u64 kGuesserOnTheFly = 0x6775657373666c79ULL;
constexpr u64 kDealer = 0x6465616c65727272ULL;
}  // namespace

RandomnessStreams derive_streams(u64 master_seed, u64 trial_index) {
  u64 trial_key = mix_key(mix64(master_seed), trial_index);
  return RandomnessStreams{
      Stream(mix_key(trial_key, kGuesserLongLived)),
      Stream(mix_key(trial_key, kGuesserOnTheFly)),
      Stream(mix_key(trial_key, kDealer)),
  };
}

}  // namespace cardlab
