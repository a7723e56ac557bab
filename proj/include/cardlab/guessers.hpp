#pragma once

#include <bit>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "cardlab/engine.hpp"
#include "cardlab/field.hpp"
#include "cardlab/hashing.hpp"
#include "cardlab/power_sum.hpp"
#include "cardlab/rng.hpp"

namespace cardlab {

// The fixed "don't care" guess used whenever a strategy has nothing useful
// to say: card 1.
inline constexpr card_t kFallbackCard = 1;

// ---------------------------------------------------------------------------
// Missing-element accumulator: tracks a w-element universe {1..w} under
// arrivals of distinct values; 2*ceil(log2 w) bits suffice because only
// w^2-w+2 (count, sum) states are reachable (count=0 forces sum=0, count=w
// forces sum = T mod w). When exactly one value is missing it is recoverable
// as (T - sum) mod w.
struct Accumulator {
  u32 w = 0;          // universe size (>= 1; w == 0 means an empty, inert slot)
  u32 count = 0;      // values observed so far
  u32 sum = 0;        // sum of observed values mod w
  u32 total_mod = 0;  // (1 + 2 + ... + w) mod w

  void init(u32 universe) {
    w = universe;
    count = 0;
    sum = 0;
    total_mod = (w == 0) ? 0 : static_cast<u32>((static_cast<u64>(w) * (w + 1) / 2) % w);
  }

  void add(u32 value) {  // value in 1..w, each at most once
    ++count;
    sum += value % w;
    if (sum >= w) sum -= w;
  }

  bool one_missing() const { return w != 0 && count == w - 1; }
  bool done() const { return w != 0 && count == w; }

  // The single missing value (valid when one_missing()).
  u32 missing() const {
    u32 r = (total_mod + w - sum) % w;
    return r == 0 ? w : r;
  }

  unsigned bits() const {
    if (w == 0) return 0;
    if (w == 1) return 1;
    return 2 * static_cast<unsigned>(std::bit_width(w - 1));
  }

  u64 code() const {
    if (count == 0) return 0;
    if (count == w) return static_cast<u64>(w) * w - w + 1;
    return 1 + static_cast<u64>(count - 1) * w + sum;
  }

  void restore_code(u64 code) {
    const u64 full = static_cast<u64>(w) * w - w + 1;
    if (code == 0) {
      count = 0;
      sum = 0;
    } else if (code == full) {
      count = w;
      sum = total_mod;
    } else if (code < full) {
      count = static_cast<u32>((code - 1) / w) + 1;
      sum = static_cast<u32>((code - 1) % w);
    } else {
      throw MalformedCodeword("invalid accumulator code");
    }
  }
};

// ---------------------------------------------------------------------------
// Strategy spec, registry and factory.

struct GuesserSpec {
  std::string kind;      // see guesser_registry()
  u64 m = 0;             // memory parameter (subset size / combined budget)
  double delta = 1.0;    // following: range growth; amplified: failure bound
  u32 k = 0;             // power_sum: tracked sums; amplified: independence (0 = default)
  card_t fixed_card = kFallbackCard;  // memoryless
  u64 shrink_m = 0;      // nonzero: wrap in a shrunken-domain adapter with this budget
};

std::vector<std::string> guesser_registry();
std::unique_ptr<Guesser> make_guesser(const GuesserSpec& spec, u32 n, Stream long_lived,
                                      Stream on_the_fly);

// True for strategies that use no randomness at all (required by the
// adversarial arrangement construction).
bool guesser_deterministic(const GuesserSpec& spec);

// Domain used by the shrunken-domain adapter: 2^floor(sqrt(m)).
u32 shrunken_domain(u64 m);

// ---------------------------------------------------------------------------
// Concrete strategies (exposed for direct instantiation by tests and the
// monomorphized simulation path).

class MemorylessGuesser final : public Guesser {
 public:
  MemorylessGuesser(u32 n, card_t fixed) : fixed_(fixed) {
    if (fixed < 1 || fixed > n) throw ConfigError("memoryless: fixed card out of range");
  }
  card_t guess(u32) override { return fixed_; }
  void observe(card_t, u32) override {}
  u64 state_bits() const override { return 0; }
  BitString serialize_state() const override { return {}; }
  void restore_state(const BitString& bits) override {
    if (!bits.empty()) throw MalformedCodeword("memoryless state must be empty");
  }

 private:
  card_t fixed_;
};

// Remembers every card seen (n bits) and guesses uniformly among the unseen.
class PerfectMemoryGuesser final : public Guesser {
 public:
  PerfectMemoryGuesser(u32 n, Stream on_the_fly);
  card_t guess(u32 turn) override;
  void observe(card_t drawn, u32 turn) override;
  u64 state_bits() const override { return n_; }
  BitString serialize_state() const override;
  void restore_state(const BitString& bits) override;

 private:
  u32 n_;
  Stream fly_;
  std::vector<u64> seen_;  // bit c-1 set once card c observed
  u32 unseen_ = 0;
};

// Tracks an m-card sampled subset A (one seen-flag per member) and guesses
// uniformly among unseen members until A is exhausted.
class SubsetGuesser final : public Guesser {
 public:
  SubsetGuesser(u32 n, u64 m, Stream long_lived, Stream on_the_fly);
  card_t guess(u32 turn) override;
  void observe(card_t drawn, u32 turn) override;
  u64 state_bits() const override { return members_.size(); }
  BitString serialize_state() const override;
  void restore_state(const BitString& bits) override;

  const std::vector<card_t>& members() const { return members_; }

 private:
  u32 n_;
  Stream fly_;
  std::vector<card_t> members_;  // sorted
  std::vector<u32> slot_;        // card -> 1+index into members_, 0 if absent
  std::vector<u64> seen_;        // member-index bitmask
  u32 unseen_ = 0;
};

// Maintains the first k power sums of the undrawn set mod q and, once at
// most k cards remain, recovers them and guesses uniformly among them.
class PowerSumGuesser final : public Guesser {
 public:
  PowerSumGuesser(u32 n, u32 k, Stream on_the_fly);
  card_t guess(u32 turn) override;
  void observe(card_t drawn, u32 turn) override;
  u64 state_bits() const override;
  BitString serialize_state() const override;
  void restore_state(const BitString& bits) override;

  const PowerSumState& state() const { return st_; }

 private:
  Stream fly_;
  PowerSumState st_;
  unsigned residue_bits_;
  unsigned counter_bits_;
};

// Splits an m-bit budget: floor(m/2) seen-flags drive a subset strategy for
// the early game, and the rest funds the largest power-sum strategy whose
// literal layout fits, covering the final turns.
class CombinedGuesser final : public Guesser {
 public:
  CombinedGuesser(u32 n, u64 m, Stream long_lived, Stream on_the_fly);
  card_t guess(u32 turn) override;
  void observe(card_t drawn, u32 turn) override;
  u64 state_bits() const override;
  BitString serialize_state() const override;
  void restore_state(const BitString& bits) override;

  u32 power_sum_k() const { return power_ ? power_->state().k : 0; }

 private:
  u32 n_;
  std::unique_ptr<SubsetGuesser> subset_;
  std::unique_ptr<PowerSumGuesser> power_;
};

// Deterministic nested-range follower: one missing-element accumulator per
// range [1..w], w in {2, 2(1+delta), ...} capped at n; guesses the missing
// card of the smallest range with exactly one card outstanding.
class FollowingSubsetsGuesser final : public Guesser {
 public:
  // max_state_bits > 0 trims the largest ranges until the layout fits (used
  // by the shrunken-domain adapter).
  FollowingSubsetsGuesser(u32 n, double delta, u64 max_state_bits = 0);
  card_t guess(u32 turn) override;
  void observe(card_t drawn, u32 turn) override;
  u64 state_bits() const override { return declared_bits_; }
  BitString serialize_state() const override;
  void restore_state(const BitString& bits) override;

  const std::vector<u32>& range_sizes() const { return widths_; }

 private:
  void refresh_qualify(size_t i);

  std::vector<u32> widths_;        // ascending
  std::vector<Accumulator> accs_;  // parallel to widths_
  std::vector<u64> qualify_;       // bitmask over ranges with one card missing
  u64 declared_bits_ = 0;
};

// Pairwise-hashed dyadic buckets with one accumulator per bucket plus an
// explicitly-accounted sampled subset A for the first half of the game.
class RandomizedSubsetsGuesser final : public Guesser {
 public:
  RandomizedSubsetsGuesser(u32 n, Stream long_lived, Stream on_the_fly);
  card_t guess(u32 turn) override;
  void observe(card_t drawn, u32 turn) override;
  u64 state_bits() const override { return core_bits_ + members_.size(); }
  u64 aux_allowance_bits() const override { return members_.size(); }
  BitString serialize_state() const override;
  void restore_state(const BitString& bits) override;

  u64 core_state_bits() const { return core_bits_; }
  const PairwisePerm& hash() const { return h_; }

 private:
  u32 n_;
  unsigned ell_;
  const Gf2Field* field_;
  Stream fly_;
  PairwisePerm h_;
  std::vector<Accumulator> buckets_;  // index j-1 for bucket j
  u64 core_bits_ = 0;
  std::vector<card_t> members_;  // sampled subset A, sorted
  std::vector<u32> slot_;
  std::vector<u64> seen_;  // member-index bitmask
  u32 unseen_ = 0;
};

// Probability-amplified bucket strategy: ceil(2.5*log2(1/delta)) independent
// k-wise hash functions, one bucket collection each, plus the same sampled
// first-half set A as the single-function strategy. In the second half it
// probes each collection's matched bucket in fixed order and guesses the
// first singleton found.
class AmplifiedSubsetsGuesser final : public Guesser {
 public:
  AmplifiedSubsetsGuesser(u32 n, double delta, u32 k, Stream long_lived, Stream on_the_fly);
  card_t guess(u32 turn) override;
  void observe(card_t drawn, u32 turn) override;
  u64 state_bits() const override { return declared_bits_ + a_members_.size(); }
  u64 aux_allowance_bits() const override { return a_members_.size(); }
  BitString serialize_state() const override;
  void restore_state(const BitString& bits) override;

  u32 function_count() const { return f_count_; }
  u32 independence() const { return k_; }
  u64 bucket_state_bits() const { return declared_bits_; }

 private:
  u32 n_;
  unsigned ell_;
  u32 f_count_;
  u32 k_;
  Stream fly_;
  std::vector<Accumulator> accs_;       // f * ell_ + (j-1)
  std::vector<std::vector<card_t>> members_;  // per (f, j): sorted member list
  std::vector<u32> slot_;               // per (f, card): packed bucket/index
  u64 declared_bits_ = 0;
  std::vector<card_t> a_members_;  // sampled subset A, sorted
  std::vector<u32> a_slot_;
  std::vector<u64> a_seen_;  // member-index bitmask
  u32 a_unseen_ = 0;
};

namespace detail {
template <class T>
T& as_guesser(T& x) {
  return x;
}
inline Guesser& as_guesser(std::unique_ptr<Guesser>& p) { return *p; }
inline Guesser& as_guesser(const std::unique_ptr<Guesser>& p) { return *p; }
}  // namespace detail

// Ignores every card above 2^floor(sqrt(m)) and plays the inner strategy on
// the shrunken domain (inner turns advance only when inner cards appear).
// Inner is either a concrete guesser (monomorphized path) or
// unique_ptr<Guesser> (generic factory path).
template <class Inner>
class ShrunkenGuesser final : public Guesser {
 public:
  ShrunkenGuesser(u32 inner_n, Inner inner) : inner_n_(inner_n), inner_(std::move(inner)) {}

  card_t guess(u32) override {
    if (inner_seen_ >= inner_n_) return kFallbackCard;
    return detail::as_guesser(inner_).guess(inner_seen_ + 1);
  }
  void observe(card_t drawn, u32) override {
    if (drawn <= inner_n_ && inner_seen_ < inner_n_) {
      detail::as_guesser(inner_).observe(drawn, inner_seen_ + 1);
      ++inner_seen_;
    }
  }
  u64 state_bits() const override { return detail::as_guesser(inner_).state_bits(); }
  u64 aux_allowance_bits() const override {
    return detail::as_guesser(inner_).aux_allowance_bits();
  }
  BitString serialize_state() const override {
    return detail::as_guesser(inner_).serialize_state();
  }
  void restore_state(const BitString& bits) override {
    detail::as_guesser(inner_).restore_state(bits);
  }

  u32 inner_domain() const { return inner_n_; }

 private:
  u32 inner_n_;
  Inner inner_;
  u32 inner_seen_ = 0;
};

// Type-erased shrunken adapter used by the generic factory.
using ShrunkenAny = ShrunkenGuesser<std::unique_ptr<Guesser>>;

}  // namespace cardlab
