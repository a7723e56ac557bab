#include "cardlab/guessers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace cardlab {

namespace {

// Select the r-th (0-based) zero bit among the first n positions of a
// seen-bitmap; positions are cards 1..n.
card_t select_unseen(const std::vector<u64>& seen, u32 n, u64 r) {
  const size_t words = seen.size();
  for (size_t wi = 0; wi < words; ++wi) {
    u64 unseen = ~seen[wi];
    if (wi == words - 1 && (n & 63) != 0) unseen &= (1ULL << (n & 63)) - 1;
    unsigned cnt = static_cast<unsigned>(std::popcount(unseen));
    if (r < cnt) {
      for (u64 m = unseen; m; m &= m - 1) {
        if (r == 0) return static_cast<card_t>(wi * 64 + std::countr_zero(m) + 1);
        --r;
      }
    }
    r -= cnt;
  }
  throw ConfigError("select_unseen: rank out of range");
}

u32 require_power_of_two(u32 n, const char* who) {
  if (n < 4 || (n & (n - 1)) != 0)
    throw ConfigError(std::string(who) + " requires n to be a power of two, n >= 4");
  return static_cast<u32>(std::bit_width(n) - 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// PerfectMemoryGuesser

PerfectMemoryGuesser::PerfectMemoryGuesser(u32 n, Stream on_the_fly)
    : n_(n), fly_(on_the_fly), seen_((n + 63) / 64, 0), unseen_(n) {
  if (n == 0) throw ConfigError("perfect: n >= 1 required");
}

card_t PerfectMemoryGuesser::guess(u32 turn) {
  if (unseen_ == 0) return kFallbackCard;
  Stream coin = fly_.substream(turn);
  return select_unseen(seen_, n_, coin.uniform_below(unseen_));
}

void PerfectMemoryGuesser::observe(card_t drawn, u32) {
  u64& w = seen_[(drawn - 1) >> 6];
  const u64 bit = 1ULL << ((drawn - 1) & 63);
  if (!(w & bit)) {
    w |= bit;
    --unseen_;
  }
}

BitString PerfectMemoryGuesser::serialize_state() const {
  BitString out;
  for (u32 c = 1; c <= n_; ++c) out.push_bit((seen_[(c - 1) >> 6] >> ((c - 1) & 63)) & 1);
  return out;
}

void PerfectMemoryGuesser::restore_state(const BitString& bits) {
  if (bits.size() != n_) throw MalformedCodeword("perfect: state length mismatch");
  std::fill(seen_.begin(), seen_.end(), 0);
  unseen_ = n_;
  for (u32 c = 1; c <= n_; ++c) {
    if (bits.bit(c - 1)) {
      seen_[(c - 1) >> 6] |= 1ULL << ((c - 1) & 63);
      --unseen_;
    }
  }
}

// ---------------------------------------------------------------------------
// SubsetGuesser

SubsetGuesser::SubsetGuesser(u32 n, u64 m, Stream long_lived, Stream on_the_fly)
    : n_(n), fly_(on_the_fly) {
  if (m < 1 || m > n) throw ConfigError("subset: need 1 <= m <= n");
  members_ = sample_distinct_cards(n, static_cast<u32>(m), long_lived);
  slot_.assign(n + 1, 0);
  for (u32 i = 0; i < members_.size(); ++i) slot_[members_[i]] = i + 1;
  seen_.assign((members_.size() + 63) / 64, 0);
  unseen_ = static_cast<u32>(members_.size());
}

card_t SubsetGuesser::guess(u32 turn) {
  Stream coin = fly_.substream(turn);
  // Once the tracked subset is exhausted, guess a uniform card: a fixed
  // fallback card would let an arrangement that deals it late inflate the
  // score, whereas a uniform guess hits with probability exactly 1/n per
  // turn against every dealer.
  if (unseen_ == 0) return coin.uniform_card(n_);
  const u32 i = select_unseen(seen_, static_cast<u32>(members_.size()),
                              coin.uniform_below(unseen_));
  return members_[i - 1];
}

void SubsetGuesser::observe(card_t drawn, u32) {
  const u32 s = slot_[drawn];
  if (s == 0) return;
  u64& w = seen_[(s - 1) >> 6];
  const u64 bit = 1ULL << ((s - 1) & 63);
  if (!(w & bit)) {
    w |= bit;
    --unseen_;
  }
}

BitString SubsetGuesser::serialize_state() const {
  BitString out;
  for (u32 i = 0; i < members_.size(); ++i)
    out.push_bit((seen_[i >> 6] >> (i & 63)) & 1);
  return out;
}

void SubsetGuesser::restore_state(const BitString& bits) {
  if (bits.size() != members_.size())
    throw MalformedCodeword("subset: state length mismatch");
  std::fill(seen_.begin(), seen_.end(), 0);
  unseen_ = 0;
  for (u32 i = 0; i < members_.size(); ++i) {
    if (bits.bit(i))
      seen_[i >> 6] |= 1ULL << (i & 63);
    else
      ++unseen_;
  }
}

// ---------------------------------------------------------------------------
// PowerSumGuesser

PowerSumGuesser::PowerSumGuesser(u32 n, u32 k, Stream on_the_fly)
    : fly_(on_the_fly), st_(init_power_sums(n, k)) {
  if (k > n) throw ConfigError("power_sum: k <= n required");
  residue_bits_ = bits_for_count(st_.q);
  counter_bits_ = bits_for_count(static_cast<u64>(n) + 1);
}

card_t PowerSumGuesser::guess(u32 turn) {
  if (st_.remaining > st_.k || st_.remaining == 0) return kFallbackCard;
  std::vector<card_t> missing = recover_missing(st_);
  Stream coin = fly_.substream(turn);
  return missing[coin.uniform_below(missing.size())];
}

void PowerSumGuesser::observe(card_t drawn, u32) { power_sum_observe(st_, drawn); }

u64 PowerSumGuesser::state_bits() const {
  return static_cast<u64>(st_.k) * residue_bits_ + counter_bits_;
}

BitString PowerSumGuesser::serialize_state() const {
  BitString out;
  for (u32 p = 0; p < st_.k; ++p) out.append(st_.sums[p], residue_bits_);
  out.append(st_.remaining, counter_bits_);
  return out;
}

void PowerSumGuesser::restore_state(const BitString& bits) {
  if (bits.size() != state_bits()) throw MalformedCodeword("power_sum: state length mismatch");
  BitReader rd(bits);
  for (u32 p = 0; p < st_.k; ++p) {
    u64 v = rd.read(residue_bits_);
    if (v >= st_.q) throw MalformedCodeword("power_sum: residue out of range");
    st_.sums[p] = static_cast<u32>(v);
  }
  u64 rem = rd.read(counter_bits_);
  if (rem > st_.n) throw MalformedCodeword("power_sum: counter out of range");
  st_.remaining = static_cast<u32>(rem);
}

// ---------------------------------------------------------------------------
// CombinedGuesser

CombinedGuesser::CombinedGuesser(u32 n, u64 m, Stream long_lived, Stream on_the_fly) : n_(n) {
  if (static_cast<u64>(m) * m > n)
    throw ConfigError("combined: m <= sqrt(n) required");
  if (m < 2) throw ConfigError("combined: m >= 2 required");
  const u64 half = m / 2;
  subset_ = std::make_unique<SubsetGuesser>(n, half, long_lived, on_the_fly.substream(1));
  // Largest k whose literal layout (k residues + remaining counter) fits the
  // other half of the budget.
  const u32 q = smallest_prime_above(n);
  const unsigned rbits = bits_for_count(q);
  const unsigned cbits = bits_for_count(static_cast<u64>(n) + 1);
  u32 k = 0;
  while ((static_cast<u64>(k) + 1) * rbits + cbits <= half) ++k;
  if (k > n) k = n;
  if (k > 0) power_ = std::make_unique<PowerSumGuesser>(n, k, on_the_fly.substream(2));
}

card_t CombinedGuesser::guess(u32 turn) {
  if (power_ && power_->state().remaining <= power_->state().k) return power_->guess(turn);
  card_t g = subset_->guess(turn);
  return g;
}

void CombinedGuesser::observe(card_t drawn, u32 turn) {
  subset_->observe(drawn, turn);
  if (power_) power_->observe(drawn, turn);
}

u64 CombinedGuesser::state_bits() const {
  return subset_->state_bits() + (power_ ? power_->state_bits() : 0);
}

BitString CombinedGuesser::serialize_state() const {
  BitString out = subset_->serialize_state();
  if (power_) out.append(power_->serialize_state());
  return out;
}

void CombinedGuesser::restore_state(const BitString& bits) {
  if (bits.size() != state_bits()) throw MalformedCodeword("combined: state length mismatch");
  BitString sub, pow;
  u64 i = 0;
  for (; i < subset_->state_bits(); ++i) sub.push_bit(bits.bit(i));
  for (; i < bits.size(); ++i) pow.push_bit(bits.bit(i));
  subset_->restore_state(sub);
  if (power_) power_->restore_state(pow);
}

// ---------------------------------------------------------------------------
// FollowingSubsetsGuesser

FollowingSubsetsGuesser::FollowingSubsetsGuesser(u32 n, double delta, u64 max_state_bits) {
  if (n < 2) throw ConfigError("following: n >= 2 required");
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("following: delta in (0,1] required");
  double w = 2.0;
  while (true) {
    u32 wi = static_cast<u32>(std::min<double>(n, std::ceil(w)));
    if (widths_.empty() || wi > widths_.back()) widths_.push_back(wi);
    if (wi >= n) break;
    w *= 1.0 + delta;
  }
  accs_.resize(widths_.size());
  for (size_t i = 0; i < widths_.size(); ++i) accs_[i].init(widths_[i]);
  for (const Accumulator& a : accs_) declared_bits_ += a.bits();
  if (max_state_bits > 0) {
    while (!widths_.empty() && declared_bits_ > max_state_bits) {
      declared_bits_ -= accs_.back().bits();
      widths_.pop_back();
      accs_.pop_back();
    }
    if (widths_.empty()) throw ConfigError("following: budget too small for any range");
  }
  qualify_.assign((widths_.size() + 63) / 64, 0);
}

void FollowingSubsetsGuesser::refresh_qualify(size_t i) {
  const u64 bit = 1ULL << (i & 63);
  if (accs_[i].one_missing())
    qualify_[i >> 6] |= bit;
  else
    qualify_[i >> 6] &= ~bit;
}

card_t FollowingSubsetsGuesser::guess(u32) {
  for (size_t wi = 0; wi < qualify_.size(); ++wi) {
    if (qualify_[wi]) {
      const size_t i = (wi << 6) + std::countr_zero(qualify_[wi]);
      return accs_[i].missing();
    }
  }
  return kFallbackCard;
}

void FollowingSubsetsGuesser::observe(card_t drawn, u32) {
  // Only ranges with w >= drawn contain the card; they sit at the tail.
  for (size_t i = widths_.size(); i-- > 0 && widths_[i] >= drawn;) {
    accs_[i].add(drawn);
    refresh_qualify(i);
  }
}

BitString FollowingSubsetsGuesser::serialize_state() const {
  BitString out;
  for (const Accumulator& a : accs_) out.append(a.code(), a.bits());
  return out;
}

void FollowingSubsetsGuesser::restore_state(const BitString& bits) {
  if (bits.size() != declared_bits_) throw MalformedCodeword("following: state length mismatch");
  BitReader rd(bits);
  for (size_t i = 0; i < accs_.size(); ++i) {
    accs_[i].restore_code(rd.read(accs_[i].bits()));
    refresh_qualify(i);
  }
}

// ---------------------------------------------------------------------------
// RandomizedSubsetsGuesser

RandomizedSubsetsGuesser::RandomizedSubsetsGuesser(u32 n, Stream long_lived, Stream on_the_fly)
    : n_(n), ell_(require_power_of_two(n, "randomized")), field_(&field_for(ell_)),
      fly_(on_the_fly) {
  h_ = sample_pairwise(*field_, long_lived);
  buckets_.resize(ell_);
  for (unsigned j = 1; j <= ell_; ++j) {
    buckets_[j - 1].init(bucket_size(j));
    core_bits_ += buckets_[j - 1].bits();
  }
  const u64 a_size = std::min<u64>(static_cast<u64>(ell_) * ell_, n);
  members_ = sample_distinct_cards(n, static_cast<u32>(a_size), long_lived);
  slot_.assign(n + 1, 0);
  for (u32 i = 0; i < members_.size(); ++i) slot_[members_[i]] = i + 1;
  seen_.assign((members_.size() + 63) / 64, 0);
  unseen_ = static_cast<u32>(members_.size());
}

card_t RandomizedSubsetsGuesser::guess(u32 turn) {
  const u32 cards_left = n_ - turn + 1;
  if (cards_left > n_ / 2) {
    // First half: uniform among unseen members of A.
    if (unseen_ == 0) return kFallbackCard;
    Stream coin = fly_.substream(turn);
    const u32 i = select_unseen(seen_, static_cast<u32>(members_.size()),
                                coin.uniform_below(unseen_));
    return members_[i - 1];
  }
  // Second half: probe the bucket matched to the number of cards left,
  // j = floor(log2(n / (2 * cards_left))).
  const unsigned ceil_log = bits_for_count(cards_left);  // ceil(log2 cards_left)
  if (ell_ < 1 + ceil_log + 1) return kFallbackCard;     // j < 1
  const unsigned j = ell_ - 1 - ceil_log;
  if (j < 1 || j > ell_) return kFallbackCard;
  const Accumulator& acc = buckets_[j - 1];
  if (!acc.one_missing()) return kFallbackCard;
  return invert_pairwise(*field_, h_, bucket_member(j, acc.missing()));
}

void RandomizedSubsetsGuesser::observe(card_t drawn, u32) {
  const card_t y = eval_pairwise(*field_, h_, drawn);
  const unsigned j = bucket_of(y);
  buckets_[j - 1].add(bucket_index_of(y));
  const u32 s = slot_[drawn];
  if (s == 0) return;
  u64& w = seen_[(s - 1) >> 6];
  const u64 bit = 1ULL << ((s - 1) & 63);
  if (!(w & bit)) {
    w |= bit;
    --unseen_;
  }
}

BitString RandomizedSubsetsGuesser::serialize_state() const {
  BitString out;
  for (const Accumulator& a : buckets_) out.append(a.code(), a.bits());
  for (u32 i = 0; i < members_.size(); ++i)
    out.push_bit((seen_[i >> 6] >> (i & 63)) & 1);
  return out;
}

void RandomizedSubsetsGuesser::restore_state(const BitString& bits) {
  if (bits.size() != state_bits()) throw MalformedCodeword("randomized: state length mismatch");
  BitReader rd(bits);
  for (Accumulator& a : buckets_) a.restore_code(rd.read(a.bits()));
  std::fill(seen_.begin(), seen_.end(), 0);
  unseen_ = 0;
  for (u32 i = 0; i < members_.size(); ++i) {
    if (rd.read_bit())
      seen_[i >> 6] |= 1ULL << (i & 63);
    else
      ++unseen_;
  }
}

// ---------------------------------------------------------------------------
// AmplifiedSubsetsGuesser

AmplifiedSubsetsGuesser::AmplifiedSubsetsGuesser(u32 n, double delta, u32 k, Stream long_lived,
                                                 Stream on_the_fly)
    : n_(n), ell_(require_power_of_two(n, "amplified")), fly_(on_the_fly) {
  if (!(delta > 0.0) || delta > 1.0) throw ConfigError("amplified: delta in (0,1] required");
  if (ell_ > 24) throw ConfigError("amplified: n above 2^24 unsupported (slot packing)");
  f_count_ = static_cast<u32>(std::ceil(2.5 * std::log2(1.0 / delta)));
  if (f_count_ == 0) f_count_ = 1;  // delta = 1: a single function, no amplification
  k_ = (k == 0) ? 2 * ell_ : k;
  if (k_ < 2 * ell_) throw ConfigError("amplified: k >= 2*log2(n) required");
  const Gf2Field& f = field_for(ell_);

  members_.assign(static_cast<size_t>(f_count_) * ell_, {});
  slot_.assign(static_cast<size_t>(f_count_) * (n + 1), 0);
  accs_.resize(static_cast<size_t>(f_count_) * ell_);
  for (u32 fi = 0; fi < f_count_; ++fi) {
    KWisePoly h = sample_kwise(f, k_, long_lived);
    for (card_t x = 1; x <= n; ++x) {
      const card_t y = eval_kwise(f, h, x);
      const unsigned j = bucket_of(y);
      std::vector<card_t>& list = members_[fi * ell_ + (j - 1)];
      slot_[static_cast<size_t>(fi) * (n + 1) + x] =
          (j << 24) | static_cast<u32>(list.size() + 1);
      list.push_back(x);  // x ascending, so lists end up sorted
    }
    for (unsigned j = 1; j <= ell_; ++j) {
      Accumulator& a = accs_[fi * ell_ + (j - 1)];
      a.init(static_cast<u32>(members_[fi * ell_ + (j - 1)].size()));
      declared_bits_ += a.bits();
    }
  }

  const u64 a_size = std::min<u64>(static_cast<u64>(ell_) * ell_, n);
  a_members_ = sample_distinct_cards(n, static_cast<u32>(a_size), long_lived);
  a_slot_.assign(n + 1, 0);
  for (u32 i = 0; i < a_members_.size(); ++i) a_slot_[a_members_[i]] = i + 1;
  a_seen_.assign((a_members_.size() + 63) / 64, 0);
  a_unseen_ = static_cast<u32>(a_members_.size());
}

card_t AmplifiedSubsetsGuesser::guess(u32 turn) {
  const u32 cards_left = n_ - turn + 1;
  if (cards_left > n_ / 2) {
    // First half: uniform among unseen members of A.
    if (a_unseen_ == 0) return kFallbackCard;
    Stream coin = fly_.substream(turn);
    const u32 i = select_unseen(a_seen_, static_cast<u32>(a_members_.size()),
                                coin.uniform_below(a_unseen_));
    return a_members_[i - 1];
  }
  // Second half: probe bucket j = floor(log2(n / cards_left)), sized so the
  // expected number of undrawn members is between 1/4 and 1/2 — large enough
  // that a lone missing member is likely, across every collection.
  const unsigned ceil_log = bits_for_count(cards_left);
  if (ell_ < ceil_log + 1) return kFallbackCard;
  const unsigned j = ell_ - ceil_log;
  for (u32 fi = 0; fi < f_count_; ++fi) {
    const Accumulator& a = accs_[fi * ell_ + (j - 1)];
    if (a.one_missing()) return members_[fi * ell_ + (j - 1)][a.missing() - 1];
  }
  return kFallbackCard;
}

void AmplifiedSubsetsGuesser::observe(card_t drawn, u32) {
  for (u32 fi = 0; fi < f_count_; ++fi) {
    const u32 packed = slot_[static_cast<size_t>(fi) * (n_ + 1) + drawn];
    const unsigned j = packed >> 24;
    const u32 idx = packed & 0xFFFFFF;
    accs_[fi * ell_ + (j - 1)].add(idx);
  }
  const u32 s = a_slot_[drawn];
  if (s == 0) return;
  u64& w = a_seen_[(s - 1) >> 6];
  const u64 bit = 1ULL << ((s - 1) & 63);
  if (!(w & bit)) {
    w |= bit;
    --a_unseen_;
  }
}

BitString AmplifiedSubsetsGuesser::serialize_state() const {
  BitString out;
  for (const Accumulator& a : accs_) out.append(a.code(), a.bits());
  for (u32 i = 0; i < a_members_.size(); ++i)
    out.push_bit((a_seen_[i >> 6] >> (i & 63)) & 1);
  return out;
}

void AmplifiedSubsetsGuesser::restore_state(const BitString& bits) {
  if (bits.size() != state_bits()) throw MalformedCodeword("amplified: state length mismatch");
  BitReader rd(bits);
  for (Accumulator& a : accs_) a.restore_code(rd.read(a.bits()));
  std::fill(a_seen_.begin(), a_seen_.end(), 0);
  a_unseen_ = 0;
  for (u32 i = 0; i < a_members_.size(); ++i) {
    if (rd.read_bit())
      a_seen_[i >> 6] |= 1ULL << (i & 63);
    else
      ++a_unseen_;
  }
}

// ---------------------------------------------------------------------------
// Registry / factory

std::vector<std::string> guesser_registry() {
  return {"memoryless", "perfect",   "subset",     "power_sum",
          "combined",   "following", "randomized", "amplified"};
}

u32 shrunken_domain(u64 m) {
  if (m < 1) throw ConfigError("shrink: m >= 1 required");
  const u32 s = static_cast<u32>(std::floor(std::sqrt(static_cast<double>(m))));
  return 1u << s;
}

bool guesser_deterministic(const GuesserSpec& spec) {
  return spec.kind == "memoryless" || spec.kind == "following";
}

std::unique_ptr<Guesser> make_guesser(const GuesserSpec& spec, u32 n, Stream long_lived,
                                      Stream on_the_fly) {
  if (spec.shrink_m != 0) {
    const double log2n = std::log2(static_cast<double>(n));
    if (static_cast<double>(spec.shrink_m) >= log2n * log2n)
      throw ConfigError("shrink: m < log2(n)^2 required");
    GuesserSpec inner = spec;
    inner.shrink_m = 0;
    const u32 inner_n = std::min<u32>(shrunken_domain(spec.shrink_m), n);
    if (inner.kind == "following")
      return std::make_unique<ShrunkenGuesser<FollowingSubsetsGuesser>>(
          inner_n, FollowingSubsetsGuesser(inner_n, inner.delta, spec.shrink_m));
    return std::make_unique<ShrunkenAny>(inner_n,
                                         make_guesser(inner, inner_n, long_lived, on_the_fly));
  }
  if (spec.kind == "memoryless")
    return std::make_unique<MemorylessGuesser>(n, spec.fixed_card);
  if (spec.kind == "perfect") return std::make_unique<PerfectMemoryGuesser>(n, on_the_fly);
  if (spec.kind == "subset")
    return std::make_unique<SubsetGuesser>(n, spec.m, long_lived, on_the_fly);
  if (spec.kind == "power_sum") {
    if (spec.k == 0) throw ConfigError("power_sum: k >= 1 required");
    return std::make_unique<PowerSumGuesser>(n, spec.k, on_the_fly);
  }
  if (spec.kind == "combined")
    return std::make_unique<CombinedGuesser>(n, spec.m, long_lived, on_the_fly);
  if (spec.kind == "following")
    return std::make_unique<FollowingSubsetsGuesser>(n, spec.delta);
  if (spec.kind == "randomized")
    return std::make_unique<RandomizedSubsetsGuesser>(n, long_lived, on_the_fly);
  if (spec.kind == "amplified")
    return std::make_unique<AmplifiedSubsetsGuesser>(n, spec.delta, spec.k, long_lived,
                                                     on_the_fly);
  throw ConfigError("unknown guesser kind: " + spec.kind);
}

}  // namespace cardlab
