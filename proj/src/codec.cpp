#include "cardlab/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cardlab/engine.hpp"

namespace cardlab {

namespace {

// Guesser reconstruction shared by encoders and decoders: both sides derive
// the long-lived and on-the-fly streams from the seed alone, so the sampled
// subsets / hash functions are bit-identical on each side.
std::unique_ptr<Guesser> guesser_from_seed(const GuesserSpec& spec, u32 n,
                                           u64 gamma) {
  RandomnessStreams rs = derive_streams(gamma, 0);
  return make_guesser(spec, n, rs.guesser_long_lived, rs.guesser_on_the_fly);
}

void require_cards(const std::vector<card_t>& cards, u32 n, const char* what) {
  std::vector<u8> seen(static_cast<size_t>(n) + 1, 0);
  for (card_t c : cards) {
    if (c < 1 || c > n) throw ConfigError(std::string(what) + ": card out of range");
    if (seen[c]) throw ConfigError(std::string(what) + ": duplicate card");
    seen[c] = 1;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Exact combinatorics.

u64 binom(u64 n, u64 k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  __uint128_t r = 1;
  for (u64 i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // divisible at every step
    if (r > std::numeric_limits<u64>::max())
      throw RankOutOfRange("binomial coefficient overflows 64 bits");
  }
  return static_cast<u64>(r);
}

u64 falling_factorial(u64 n, u64 k) {
  if (k > n) return 0;
  __uint128_t r = 1;
  for (u64 i = 0; i < k; ++i) {
    r *= (n - i);
    if (r > std::numeric_limits<u64>::max())
      throw RankOutOfRange("falling factorial overflows 64 bits");
  }
  return static_cast<u64>(r);
}

// ---------------------------------------------------------------------------
// Ranking.

SubsetRank rank_subset(const std::vector<card_t>& S, u32 n) {
  require_cards(S, n, "rank_subset");
  std::vector<card_t> s(S);
  std::sort(s.begin(), s.end());
  const u32 k = static_cast<u32>(s.size());
  binom(n, k);  // fail early if the rank range itself overflows
  u64 r = 0;
  u64 prev = 0;
  for (u32 i = 0; i < k; ++i) {
    for (u64 v = prev + 1; v < s[i]; ++v) r += binom(n - v, k - 1 - i);
    prev = s[i];
  }
  return {n, k, r};
}

std::vector<card_t> unrank_subset(u64 r, u32 n, u32 k) {
  if (k > n) throw RankOutOfRange("unrank_subset: k > n");
  if (r >= binom(n, k)) throw RankOutOfRange("unrank_subset: rank too large");
  std::vector<card_t> out;
  out.reserve(k);
  u64 v = 1;
  for (u32 i = 0; i < k; ++i) {
    while (true) {
      const u64 c = binom(n - v, k - 1 - i);
      if (r < c) {
        out.push_back(static_cast<card_t>(v));
        ++v;
        break;
      }
      r -= c;
      ++v;
    }
  }
  return out;
}

OrderedRank rank_ordered(const std::vector<card_t>& B, u32 n) {
  require_cards(B, n, "rank_ordered");
  const u32 k = static_cast<u32>(B.size());
  falling_factorial(n, k);  // overflow guard for the rank range
  std::vector<u8> used(static_cast<size_t>(n) + 1, 0);
  u64 r = 0;
  for (u32 i = 0; i < k; ++i) {
    u64 below = 0;
    for (card_t x = 1; x < B[i]; ++x)
      if (!used[x]) ++below;
    r = r * (n - i) + below;
    used[B[i]] = 1;
  }
  return {n, k, r};
}

std::vector<card_t> unrank_ordered(u64 r, u32 n, u32 k) {
  if (k > n) throw RankOutOfRange("unrank_ordered: k > n");
  if (r >= falling_factorial(n, k))
    throw RankOutOfRange("unrank_ordered: rank too large");
  std::vector<u64> digit(k, 0);
  for (u32 i = k; i-- > 0;) {
    digit[i] = r % (n - i);
    r /= (n - i);
  }
  std::vector<u8> used(static_cast<size_t>(n) + 1, 0);
  std::vector<card_t> out;
  out.reserve(k);
  for (u32 i = 0; i < k; ++i) {
    u64 skip = digit[i];
    for (card_t x = 1; x <= n; ++x) {
      if (used[x]) continue;
      if (skip == 0) {
        out.push_back(x);
        used[x] = 1;
        break;
      }
      --skip;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ordered-suffix codec.

u64 encoded_length_ordered(u64 m, u32 k, u32 alpha, u32 n) {
  return 1 + m + bits_for_count(binom(k, alpha)) +
         bits_for_count(falling_factorial(n, k - alpha));
}

BitString encode_ordered(const std::vector<card_t>& suffix,
                         const std::vector<card_t>& prefix,
                         const GuesserSpec& guesser, u64 gamma, u32 alpha,
                         u32 n) {
  const u32 k = static_cast<u32>(suffix.size());
  if (alpha > k) throw ConfigError("encode_ordered: alpha > suffix size");
  std::vector<card_t> arrangement(prefix);
  arrangement.insert(arrangement.end(), suffix.begin(), suffix.end());
  require_permutation(arrangement, n);

  std::unique_ptr<Guesser> g = guesser_from_seed(guesser, n, gamma);
  StaticDealer dealer(n, arrangement);
  const u32 split = n - k;  // memory snapshot taken after this turn

  BitString memory;
  if (split == 0) memory = g->serialize_state();
  std::vector<u8> correct_at(k, 0);  // suffix-relative positions 1..k
  GameConfig cfg;
  cfg.n = n;
  run_game(cfg, *g, dealer, [&](u32 t, card_t, card_t, bool, bool correct) {
    if (t == split) memory = g->serialize_state();
    if (t > split && correct) correct_at[t - split - 1] = 1;
  });

  std::vector<u32> tags;  // first alpha correct positions, 1-based
  for (u32 p = 1; p <= k && tags.size() < alpha; ++p)
    if (correct_at[p - 1]) tags.push_back(p);

  BitString out;
  if (tags.size() < alpha) {
    out.push_bit(false);
    out.append(rank_ordered(suffix, n).rank,
               bits_for_count(falling_factorial(n, k)));
    return out;
  }

  std::vector<u8> tagged(k + 1, 0);
  std::vector<card_t> tag_positions;
  for (u32 p : tags) {
    tagged[p] = 1;
    tag_positions.push_back(static_cast<card_t>(p));
  }
  std::vector<card_t> rest;  // cards drawn at untagged suffix turns, in order
  for (u32 p = 1; p <= k; ++p)
    if (!tagged[p]) rest.push_back(suffix[p - 1]);

  out.push_bit(true);
  out.append(memory);
  out.append(rank_subset(tag_positions, k).rank,
             bits_for_count(binom(k, alpha)));
  out.append(rank_ordered(rest, n).rank,
             bits_for_count(falling_factorial(n, k - alpha)));
  return out;
}

std::vector<card_t> decode_ordered(const BitString& bits,
                                   const GuesserSpec& guesser, u64 gamma,
                                   u32 alpha, u32 k, u32 n) {
  if (alpha > k) throw ConfigError("decode_ordered: alpha > k");
  BitReader in(bits);
  if (!in.read_bit()) {
    const u64 r = in.read(bits_for_count(falling_factorial(n, k)));
    return unrank_ordered(r, n, k);
  }

  std::unique_ptr<Guesser> g = guesser_from_seed(guesser, n, gamma);
  const unsigned mbits = static_cast<unsigned>(g->state_bits());
  BitString memory;
  for (u64 i = 0; i < mbits; ++i) memory.push_bit(in.read_bit());
  g->restore_state(memory);

  const u64 trank = in.read(bits_for_count(binom(k, alpha)));
  std::vector<card_t> tag_positions = unrank_subset(trank, k, alpha);
  const u64 brank = in.read(bits_for_count(falling_factorial(n, k - alpha)));
  std::vector<card_t> rest = unrank_ordered(brank, n, k - alpha);

  std::vector<u8> tagged(k + 1, 0);
  for (card_t p : tag_positions) tagged[p] = 1;

  std::vector<card_t> out;
  out.reserve(k);
  size_t next_rest = 0;
  const u32 split = n - k;
  for (u32 p = 1; p <= k; ++p) {
    const u32 t = split + p;
    const card_t guess = g->guess(t);
    card_t draw;
    if (tagged[p]) {
      draw = guess;
    } else {
      if (next_rest >= rest.size())
        throw MalformedCodeword("decode_ordered: ran out of listed cards");
      draw = rest[next_rest++];
    }
    out.push_back(draw);
    g->observe(draw, t);
  }
  return out;
}

std::vector<card_t> best_prefix_search(const std::vector<card_t>& suffix,
                                       const GuesserSpec& guesser, u64 gamma,
                                       u32 n) {
  if (n > 8) throw ConfigError("best_prefix_search: exhaustive search is n <= 8 only");
  require_cards(suffix, n, "best_prefix_search");
  std::vector<u8> in_suffix(static_cast<size_t>(n) + 1, 0);
  for (card_t c : suffix) in_suffix[c] = 1;
  std::vector<card_t> prefix;
  for (card_t c = 1; c <= n; ++c)
    if (!in_suffix[c]) prefix.push_back(c);

  const u32 k = static_cast<u32>(suffix.size());
  std::vector<card_t> best;
  u64 best_correct = 0;
  bool first = true;
  do {
    std::unique_ptr<Guesser> g = guesser_from_seed(guesser, n, gamma);
    std::vector<card_t> arrangement(prefix);
    arrangement.insert(arrangement.end(), suffix.begin(), suffix.end());
    StaticDealer dealer(n, arrangement);
    u64 correct = 0;
    GameConfig cfg;
    cfg.n = n;
    run_game(cfg, *g, dealer, [&](u32 t, card_t, card_t, bool, bool ok) {
      if (t > n - k && ok) ++correct;
    });
    if (first || correct > best_correct) {
      best = prefix;
      best_correct = correct;
      first = false;
    }
  } while (std::next_permutation(prefix.begin(), prefix.end()));
  return best;
}

// ---------------------------------------------------------------------------
// Unordered-set codec.

namespace {

// Schedule checks shared by the unordered encoder and decoder. Returns the
// epoch (1-based index validated against `epochs`).
const EpochParams& check_unordered_config(const std::vector<EpochParams>& epochs,
                                          u32 epoch_index, u32 alpha, u32 n) {
  if (epochs.empty()) throw ScheduleMismatch("unordered codec needs at least one epoch");
  validate_schedule(epochs, n);
  if (epoch_index < 1 || epoch_index > epochs.size())
    throw ScheduleMismatch("epoch index outside the schedule");
  const EpochParams& e = epochs[epoch_index - 1];
  if (alpha > e.ell)
    throw ScheduleMismatch("alpha exceeds the epoch length");
  if (alpha > e.u)
    throw ScheduleMismatch("alpha exceeds the move-back budget");
  return e;
}

// Minimum-priority card among `deck` entries still present and outside the
// back-set; ties break toward the smaller card. Mirrors the min-order dealer.
card_t min_order_draw(const std::vector<card_t>& deck,
                      const std::vector<u8>& present,
                      const detail::BackSet& back, const PrioritySource& prio,
                      u32 turn) {
  card_t pick = 0;
  u64 best = 0;
  for (card_t c : deck) {
    if (!present[c] || back.in_back(c)) continue;
    const u64 p = prio.priority(turn, c);
    if (pick == 0 || p < best || (p == best && c < pick)) {
      pick = c;
      best = p;
    }
  }
  if (pick == 0) throw MalformedCodeword("unordered replay ran out of cards");
  return pick;
}

}  // namespace

u64 encoded_length_unordered(u64 m, u64 k1, u64 ell, u32 alpha, u32 n) {
  return 1 + m + bits_for_count(binom(ell, alpha)) + alpha +
         bits_for_count(binom(n, k1 - alpha));
}

BitString encode_unordered(const std::vector<card_t>& reserved,
                           const GuesserSpec& guesser, u64 gamma,
                           const PrioritySource& priorities, u32 alpha,
                           u32 epoch_index,
                           const std::vector<EpochParams>& epochs, u32 n) {
  const EpochParams& e = check_unordered_config(epochs, epoch_index, alpha, n);
  require_cards(reserved, n, "encode_unordered");
  const u64 k1 = epochs.front().k;
  if (reserved.size() != k1)
    throw ScheduleMismatch("reserved set must have k1 cards");

  std::unique_ptr<Guesser> g = guesser_from_seed(guesser, n, gamma);
  MinOrderDealer dealer(n, epochs, MinOrderRandomness{priorities, reserved});

  const u32 split = static_cast<u32>(n - k1);
  const u32 epoch_first = static_cast<u32>(n - e.k) + 1;  // first epoch turn
  BitString memory;
  if (split == 0) memory = g->serialize_state();
  const u32 ell = static_cast<u32>(e.ell);
  std::vector<u8> reasonable_at(ell, 0);
  std::vector<u8> correct_at(ell, 0);
  std::vector<card_t> guess_at(ell, 0);
  GameConfig cfg;
  cfg.n = n;
  run_game(cfg, *g, dealer,
           [&](u32 t, card_t guess, card_t, bool reasonable, bool correct) {
             if (t == split) memory = g->serialize_state();
             if (t >= epoch_first && t < epoch_first + ell) {
               const u32 p = t - epoch_first;
               reasonable_at[p] = reasonable;
               correct_at[p] = correct;
               guess_at[p] = guess;
             }
           });

  std::vector<u32> tags;  // epoch-relative positions 1..ell
  for (u32 p = 1; p <= ell && tags.size() < alpha; ++p)
    if (reasonable_at[p - 1]) tags.push_back(p);

  BitString out;
  if (tags.size() < alpha) {
    out.push_bit(false);
    out.append(rank_subset(reserved, n).rank, bits_for_count(binom(n, k1)));
    return out;
  }

  std::vector<card_t> tag_positions;
  std::vector<u8> is_tagged_card(static_cast<size_t>(n) + 1, 0);
  for (u32 p : tags) {
    tag_positions.push_back(static_cast<card_t>(p));
    is_tagged_card[guess_at[p - 1]] = 1;
  }
  std::vector<card_t> remainder;  // reserved minus the tagged guesses
  for (card_t c : reserved)
    if (!is_tagged_card[c]) remainder.push_back(c);
  if (remainder.size() != k1 - alpha)
    throw ProtocolViolation("tagged guesses were not distinct reserved cards");

  out.push_bit(true);
  out.append(memory);
  out.append(rank_subset(tag_positions, ell).rank,
             bits_for_count(binom(ell, alpha)));
  for (u32 p : tags) out.push_bit(correct_at[p - 1] != 0);
  out.append(rank_subset(remainder, n).rank,
             bits_for_count(binom(n, k1 - alpha)));
  return out;
}

std::vector<card_t> decode_unordered(const BitString& bits,
                                     const GuesserSpec& guesser, u64 gamma,
                                     const PrioritySource& priorities,
                                     u32 alpha, u32 epoch_index,
                                     const std::vector<EpochParams>& epochs,
                                     u32 n) {
  const EpochParams& e = check_unordered_config(epochs, epoch_index, alpha, n);
  const u64 k1 = epochs.front().k;

  BitReader in(bits);
  if (!in.read_bit()) {
    const u64 r = in.read(bits_for_count(binom(n, k1)));
    return unrank_subset(r, n, static_cast<u32>(k1));
  }

  std::unique_ptr<Guesser> g = guesser_from_seed(guesser, n, gamma);
  const unsigned mbits = static_cast<unsigned>(g->state_bits());
  BitString memory;
  for (u64 i = 0; i < mbits; ++i) memory.push_bit(in.read_bit());
  g->restore_state(memory);

  const u32 ell = static_cast<u32>(e.ell);
  const u64 trank = in.read(bits_for_count(binom(ell, alpha)));
  std::vector<card_t> tag_positions = unrank_subset(trank, ell, alpha);
  std::vector<u8> correct_tag(ell + 1, 0);
  std::vector<u8> tagged(ell + 1, 0);
  for (card_t p : tag_positions) tagged[p] = 1;
  for (card_t p : tag_positions) correct_tag[p] = in.read_bit() ? 1 : 0;
  const u64 drank = in.read(bits_for_count(binom(n, k1 - alpha)));
  std::vector<card_t> partial =
      unrank_subset(drank, n, static_cast<u32>(k1 - alpha));
  if (alpha == 0) return partial;

  // Replay the final k1 turns: the partial set stands in for the reserved
  // deck, guesses drive the move-to-back bookkeeping, tagged turns substitute
  // the guesser's own guess, and the replay halts at the alpha-th tag.
  std::vector<u8> present(static_cast<size_t>(n) + 1, 0);
  for (card_t c : partial) present[c] = 1;
  detail::BackSet back;
  back.init(n, epochs);

  const u32 split = static_cast<u32>(n - k1);
  const u32 epoch_first = static_cast<u32>(n - e.k) + 1;
  std::vector<card_t> found;  // the tagged guesses, recovered in turn order
  for (u32 t = split + 1; t <= n; ++t) {
    back.advance(n - t + 1);
    const card_t guess = g->guess(t);
    card_t draw = 0;
    const bool in_epoch = t >= epoch_first && t < epoch_first + ell;
    const u32 p = in_epoch ? (t - epoch_first + 1) : 0;
    if (in_epoch && tagged[p]) {
      if (correct_tag[p]) {
        draw = guess;
      } else {
        draw = min_order_draw(partial, present, back, priorities, t);
        present[draw] = 0;
      }
      back.maybe_move_back(guess);
      found.push_back(guess);
      if (found.size() == alpha) break;
    } else {
      draw = min_order_draw(partial, present, back, priorities, t);
      present[draw] = 0;
      if (present[guess]) back.maybe_move_back(guess);
    }
    g->observe(draw, t);
  }
  if (found.size() != alpha)
    throw MalformedCodeword("decode_unordered: tagged turns never completed");

  std::vector<card_t> out(partial);
  out.insert(out.end(), found.begin(), found.end());
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Length analytics.

double log2_binom(double n, double k) {
  if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
  return (std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1)) /
         std::log(2.0);
}

double codeword_length_w(double m, double k1, double ell, double alpha,
                         double n) {
  return 1.0 + m + alpha + log2_binom(n, k1 - alpha) + log2_binom(ell, alpha);
}

std::vector<CompressionRow> compression_diagnostics(double m, u64 k1, u64 ell,
                                                    u64 n, u32 alpha_lo,
                                                    u32 alpha_hi) {
  const double H = log2_binom(static_cast<double>(n), static_cast<double>(k1));
  std::vector<CompressionRow> rows;
  for (u32 a = alpha_lo; a <= alpha_hi; ++a) {
    const double w =
        codeword_length_w(m, static_cast<double>(k1), static_cast<double>(ell),
                          static_cast<double>(a), static_cast<double>(n));
    rows.push_back({a, w, H - w});
  }
  return rows;
}

}  // namespace cardlab
