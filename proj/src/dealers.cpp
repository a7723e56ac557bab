#include "cardlab/dealers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cardlab {

// ---------------------------------------------------------------------------
// Schedules.

void validate_schedule(const std::vector<EpochParams>& epochs, u64 n) {
  for (size_t i = 0; i < epochs.size(); ++i) {
    const EpochParams& e = epochs[i];
    if (e.k < 1 || e.k > n)
      throw ScheduleMismatch("epoch start outside 1..n");
    if (e.ell < 1 || e.ell > e.k)
      throw ScheduleMismatch("epoch length outside 1..k");
    if (e.u > std::min(e.k - e.ell, e.ell))
      throw ScheduleMismatch("back-set capacity above min{k - ell, ell}");
    if (i > 0 && epochs[i - 1].k - epochs[i - 1].ell < e.k)
      throw ScheduleMismatch("epochs overlap or are out of order");
  }
}

MtbeSchedule mtbe_params(u64 n, u64 m) {
  if (n < 2) throw ConfigError("mtbe: n >= 2 required");
  const double log2n = std::log2(static_cast<double>(n));
  if (static_cast<double>(m) > static_cast<double>(n) / (log2n * log2n))
    throw ConfigError("mtbe: m <= n/log2^2 n required");
  MtbeSchedule s;
  s.k1 = static_cast<u64>(static_cast<double>(n) / (8.0 * std::exp(1.0) * log2n));
  s.ell = static_cast<u64>(static_cast<double>(m) * log2n);
  s.final_cutoff = static_cast<u64>(2.0 * static_cast<double>(m) * log2n);
  if (s.ell < 1 || s.k1 < s.final_cutoff + s.ell)
    throw Infeasible("mtbe: no room for a suppression epoch at this (n, m)");
  s.d = (s.k1 - s.final_cutoff) / s.ell;
  for (u64 i = 1; i <= s.d; ++i)
    s.epochs.push_back({s.k1 - (i - 1) * s.ell, s.ell, s.ell});
  validate_schedule(s.epochs, n);
  return s;
}

UniversalSchedule universal_params(u64 n) {
  if (n < 4) throw ConfigError("universal: n >= 4 required");
  const double log2n = std::log2(static_cast<double>(n));
  UniversalSchedule s;
  s.tail_cutoff = static_cast<u64>(std::pow(log2n, 4.0));
  const double denom = 8.0 * std::exp(1.0) * std::pow(log2n, 6.0);
  const double inner = static_cast<double>(n) / denom;
  if (inner > 1.0 && log2n > 1.0) {
    const double d_real = std::log(inner) / std::log(log2n);
    if (d_real >= 1.0) s.d = static_cast<u64>(d_real);
  }
  for (u64 i = 1; i <= s.d; ++i) {
    const double k_i =
        static_cast<double>(n) / (8.0 * std::exp(1.0) * std::pow(log2n, 1.0 + static_cast<double>(i)));
    EpochParams e;
    e.k = static_cast<u64>(k_i);
    e.ell = static_cast<u64>(static_cast<double>(e.k) * (1.0 - 1.0 / log2n));
    e.u = static_cast<u64>(2.0 * static_cast<double>(e.ell) / (log2n * log2n));
    s.epochs.push_back(e);
  }
  validate_schedule(s.epochs, n);
  return s;
}

// ---------------------------------------------------------------------------
// ShuffleDealer.

ShuffleDealer::ShuffleDealer(u32 n, Stream dealer) : n_(n), stream_(dealer) {
  if (n == 0) throw ConfigError("dealer: n >= 1 required");
  deck_.resize(n);
  std::iota(deck_.begin(), deck_.end(), 1);
  pos_.resize(n + 1);
  for (u32 i = 0; i < n; ++i) pos_[deck_[i]] = i;
}

card_t ShuffleDealer::commit_draw(u32) {
  const u32 j = next_ + static_cast<u32>(stream_.uniform_below(n_ - next_));
  std::swap(pos_[deck_[next_]], pos_[deck_[j]]);
  std::swap(deck_[next_], deck_[j]);
  return deck_[next_];
}

bool ShuffleDealer::drawable(card_t c) const {
  return c >= 1 && c <= n_ && pos_[c] >= next_;
}

void ShuffleDealer::observe_guess(card_t, u32) { ++next_; }

// ---------------------------------------------------------------------------
// StaticDealer and arrangements.

void require_permutation(const std::vector<card_t>& arrangement, u32 n) {
  if (arrangement.size() != n)
    throw InvalidArrangement("arrangement has wrong length");
  std::vector<u8> seen(n + 1, 0);
  for (card_t c : arrangement) {
    if (c < 1 || c > n || seen[c])
      throw InvalidArrangement("arrangement is not a permutation of 1..n");
    seen[c] = 1;
  }
}

StaticDealer::StaticDealer(u32 n, std::vector<card_t> arrangement)
    : arrangement_(std::move(arrangement)) {
  require_permutation(arrangement_, n);
  order_.resize(n + 1);
  for (u32 i = 0; i < n; ++i) order_[arrangement_[i]] = i;
}

card_t StaticDealer::commit_draw(u32 turn) { return arrangement_[turn - 1]; }

bool StaticDealer::drawable(card_t c) const {
  return c >= 1 && c < order_.size() && order_[c] >= removed_;
}

void StaticDealer::observe_guess(card_t, u32) { ++removed_; }

std::vector<card_t> arrangement_identity(u32 n) {
  std::vector<card_t> a(n);
  std::iota(a.begin(), a.end(), 1);
  return a;
}

std::vector<card_t> arrangement_reverse(u32 n) {
  std::vector<card_t> a(n);
  for (u32 i = 0; i < n; ++i) a[i] = n - i;
  return a;
}

std::vector<card_t> arrangement_bit_reversal(u32 n) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw ConfigError("bitrev arrangement requires n to be a power of two");
  const unsigned bits = static_cast<unsigned>(std::bit_width(n) - 1);
  std::vector<card_t> a(n);
  for (u32 i = 0; i < n; ++i) {
    u32 r = 0;
    for (unsigned b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
    a[i] = r + 1;
  }
  return a;
}

std::vector<card_t> arrangement_random(u32 n, Stream& dealer) {
  std::vector<card_t> a = arrangement_identity(n);
  shuffle(a, dealer);
  return a;
}

std::vector<card_t> load_arrangement(const std::string& path, u32 n) {
  std::ifstream in(path);
  if (!in) throw InvalidArrangement("cannot open arrangement file: " + path);
  std::vector<card_t> a;
  a.reserve(n);
  u64 value = 0;
  while (in >> value) {
    if (value < 1 || value > n)
      throw InvalidArrangement("arrangement entry outside 1..n");
    a.push_back(static_cast<card_t>(value));
  }
  if (!in.eof()) throw InvalidArrangement("non-numeric arrangement entry");
  require_permutation(a, n);
  return a;
}

std::vector<card_t> adversarial_arrangement_for(const GuesserSpec& spec, u32 n) {
  if (!guesser_deterministic(spec))
    throw NotDeterministic("adversarial arrangement needs a deterministic guesser");
  std::unique_ptr<Guesser> gu = make_guesser(spec, n, Stream(0), Stream(0));
  std::vector<u8> drawn(n + 1, 0);
  std::vector<card_t> arrangement;
  arrangement.reserve(n);
  card_t lowest = 1;  // smallest undrawn card
  for (u32 t = 1; t <= n; ++t) {
    while (lowest <= n && drawn[lowest]) ++lowest;
    const card_t g = gu->guess(t);
    card_t pick = lowest;
    if (pick == g) {
      // Second-smallest remaining card, if any; else the guess is forced.
      card_t alt = pick + 1;
      while (alt <= n && drawn[alt]) ++alt;
      if (alt <= n) pick = alt;
    }
    drawn[pick] = 1;
    arrangement.push_back(pick);
    gu->observe(pick, t);
  }
  return arrangement;
}

// ---------------------------------------------------------------------------
// MtbeDealer.

MtbeDealer::MtbeDealer(u32 n, std::vector<EpochParams> epochs, Stream dealer)
    : n_(n), epochs_(std::move(epochs)), stream_(dealer) {
  if (n == 0) throw ConfigError("dealer: n >= 1 required");
  validate_schedule(epochs_, n);
  deck_.resize(n);
  std::iota(deck_.begin(), deck_.end(), 1);
  pos_.resize(n + 1);
  for (u32 i = 0; i < n; ++i) pos_[deck_[i]] = i;
  back_.init(n, epochs_);
}

void MtbeDealer::remove_card(card_t c) {
  const u32 i = pos_[c];
  const card_t last = deck_.back();
  deck_[i] = last;
  pos_[last] = i;
  deck_.pop_back();
  pos_[c] = kDrawn;
}

card_t MtbeDealer::commit_draw(u32) {
  back_.advance(deck_.size());
  u64 idx;
  if (back_.active && back_.count > 0) {
    // Rejection-sample remaining \ B; B is always a minority of the deck.
    do {
      idx = stream_.uniform_below(deck_.size());
    } while (back_.in_back(deck_[idx]));
  } else {
    idx = stream_.uniform_below(deck_.size());
  }
  pending_ = deck_[idx];
  return pending_;
}

bool MtbeDealer::drawable(card_t c) const {
  return c >= 1 && c <= n_ && pos_[c] != kDrawn && !back_.in_back(c);
}

void MtbeDealer::observe_guess(card_t g, u32) {
  remove_card(pending_);
  if (g >= 1 && g <= n_ && pos_[g] != kDrawn) back_.maybe_move_back(g);
}

std::vector<EpochView> MtbeDealer::epoch_views() const {
  std::vector<EpochView> views;
  views.reserve(epochs_.size());
  for (const EpochParams& e : epochs_) views.push_back({e.k, e.ell, e.u});
  return views;
}

// ---------------------------------------------------------------------------
// Min-order dealer.

PrioritySource PrioritySource::keyed(u64 key) {
  PrioritySource p;
  p.keyed_ = true;
  p.key_ = key;
  return p;
}

PrioritySource PrioritySource::table(std::vector<std::vector<u64>> rows) {
  PrioritySource p;
  p.keyed_ = false;
  p.rows_ = std::move(rows);
  return p;
}

u64 PrioritySource::priority(u32 turn, card_t c) const {
  if (keyed_) return mix_key(mix_key(key_, turn), c);
  if (turn < 1 || turn > rows_.size() || c < 1 || c > rows_[turn - 1].size())
    throw InvalidRandomness("priority table does not cover (turn, card)");
  return rows_[turn - 1][c - 1];
}

MinOrderDealer::MinOrderDealer(u32 n, std::vector<EpochParams> epochs, MinOrderRandomness rand)
    : n_(n), epochs_(std::move(epochs)), prio_(std::move(rand.priorities)) {
  if (n == 0) throw ConfigError("dealer: n >= 1 required");
  validate_schedule(epochs_, n);
  k1_ = epochs_.empty() ? rand.reserved.size() : epochs_[0].k;
  if (rand.reserved.size() != k1_)
    throw InvalidRandomness("reserved set must hold exactly k1 cards");
  reserved_mark_.assign(n + 1, 0);
  for (card_t c : rand.reserved) {
    if (c < 1 || c > n || reserved_mark_[c])
      throw InvalidRandomness("reserved set is not a set of cards in 1..n");
    reserved_mark_[c] = 1;
  }
  deck_.resize(n);
  std::iota(deck_.begin(), deck_.end(), 1);
  pos_.resize(n + 1);
  for (u32 i = 0; i < n; ++i) pos_[deck_[i]] = i;
  back_.init(n, epochs_);
}

void MinOrderDealer::remove_card(card_t c) {
  const u32 i = pos_[c];
  const card_t last = deck_.back();
  deck_[i] = last;
  pos_[last] = i;
  deck_.pop_back();
  pos_[c] = kDrawn;
}

card_t MinOrderDealer::commit_draw(u32 turn) {
  const u64 cards_left = deck_.size();
  const bool reserved_phase = cards_left > k1_;
  if (!reserved_phase) back_.advance(cards_left);
  card_t best = 0;
  u64 best_p = ~0ULL;
  for (card_t c : deck_) {
    if (reserved_phase ? reserved_mark_[c] != 0 : back_.in_back(c)) continue;
    const u64 p = prio_.priority(turn, c);
    if (best == 0 || p < best_p || (p == best_p && c < best)) {
      best = c;
      best_p = p;
    }
  }
  if (best == 0) throw ScheduleMismatch("min-order dealer has no drawable card");
  pending_ = best;
  return pending_;
}

bool MinOrderDealer::drawable(card_t c) const {
  if (c < 1 || c > n_ || pos_[c] == kDrawn) return false;
  if (deck_.size() > k1_) return reserved_mark_[c] == 0;
  return !back_.in_back(c);
}

void MinOrderDealer::observe_guess(card_t g, u32) {
  remove_card(pending_);
  if (g >= 1 && g <= n_ && pos_[g] != kDrawn) back_.maybe_move_back(g);
}

std::vector<EpochView> MinOrderDealer::epoch_views() const {
  std::vector<EpochView> views;
  views.reserve(epochs_.size());
  for (const EpochParams& e : epochs_) views.push_back({e.k, e.ell, e.u});
  return views;
}

// ---------------------------------------------------------------------------
// Registry / factory.

std::vector<std::string> dealer_registry() {
  return {"shuffle", "static", "static-adversarial", "mtbe", "mtbe-minorder", "universal"};
}

namespace {

std::vector<card_t> arrangement_by_name(const DealerSpec& spec, u32 n, Stream& dealer) {
  if (spec.arrangement == "identity") return arrangement_identity(n);
  if (spec.arrangement == "reverse") return arrangement_reverse(n);
  if (spec.arrangement == "bitrev") return arrangement_bit_reversal(n);
  if (spec.arrangement == "random") return arrangement_random(n, dealer);
  if (spec.arrangement == "file") return load_arrangement(spec.arrangement_file, n);
  throw ConfigError("unknown arrangement kind: " + spec.arrangement);
}

}  // namespace

std::unique_ptr<Dealer> make_dealer(const DealerSpec& spec, u32 n, Stream dealer) {
  if (spec.kind == "shuffle") return std::make_unique<ShuffleDealer>(n, dealer);
  if (spec.kind == "static")
    return std::make_unique<StaticDealer>(n, arrangement_by_name(spec, n, dealer));
  if (spec.kind == "static-adversarial")
    return std::make_unique<StaticDealer>(n, adversarial_arrangement_for(spec.target, n));
  if (spec.kind == "mtbe")
    return std::make_unique<MtbeDealer>(n, mtbe_params(n, spec.m).epochs, dealer);
  if (spec.kind == "mtbe-minorder") {
    MtbeSchedule s = mtbe_params(n, spec.m);
    MinOrderRandomness rand{
        PrioritySource::keyed(dealer.next_u64()),
        sample_distinct_cards(n, static_cast<u32>(s.k1), dealer)};
    return std::make_unique<MinOrderDealer>(n, std::move(s.epochs), std::move(rand));
  }
  if (spec.kind == "universal")
    return std::make_unique<MtbeDealer>(n, universal_params(n).epochs, dealer);
  throw ConfigError("unknown dealer kind: " + spec.kind);
}

}  // namespace cardlab
