#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cardlab/engine.hpp"
#include "cardlab/guessers.hpp"
#include "cardlab/rng.hpp"

namespace cardlab {

// ---------------------------------------------------------------------------
// Move-to-back epoch schedules.

// One suppression epoch: starts when k cards remain, lasts ell turns, and
// keeps at most u guessed cards out of play until its end.
struct EpochParams {
  u64 k = 0;
  u64 ell = 0;
  u64 u = 0;
};

// Checks 1 <= ell <= k <= n, u <= min{k - ell, ell}, and that consecutive
// epochs are ordered without overlap (k_{i+1} <= k_i - ell_i).
// Throws ScheduleMismatch.
void validate_schedule(const std::vector<EpochParams>& epochs, u64 n);

// d equal-length epochs of length ell = floor(m*log2 n) starting at
// k1 = floor(n / (8e*log2 n)), leaving at least final_cutoff = floor(2m*log2 n)
// cards for the tail; every epoch uses u = ell.
struct MtbeSchedule {
  u64 k1 = 0;
  u64 ell = 0;
  u64 final_cutoff = 0;
  u64 d = 0;
  std::vector<EpochParams> epochs;  // epoch i starts at k1 - (i-1)*ell
};

// Throws ConfigError unless m <= n/log2^2 n, Infeasible when not even one
// epoch fits (d < 1).
MtbeSchedule mtbe_params(u64 n, u64 m);

// Geometric epoch ladder: epoch i starts at k_i = floor(n / (8e*log2^{1+i} n))
// with ell_i = floor(k_i*(1 - 1/log2 n)) and u_i = floor(2*ell_i / log2^2 n);
// the epoch count is d = floor(log_{log2 n}(n / (8e*log2^6 n))), which is zero
// for every deck small enough to simulate. The final cards are dealt at
// random from tail_cutoff = floor(log2^4 n).
struct UniversalSchedule {
  u64 d = 0;
  u64 tail_cutoff = 0;
  std::vector<EpochParams> epochs;
};

UniversalSchedule universal_params(u64 n);

namespace detail {

// Epoch-phase and back-set bookkeeping shared by the move-to-back dealers.
// Cards are marked with the stamp of the epoch that moved them back, so
// clearing B at an epoch boundary is a stamp bump.
struct BackSet {
  const std::vector<EpochParams>* epochs = nullptr;
  size_t cur = 0;
  bool active = false;
  u32 stamp = 1;
  u64 count = 0;
  std::vector<u32> mark;  // card -> stamp of the epoch holding it back

  void init(u32 n, const std::vector<EpochParams>& eps) {
    epochs = &eps;
    mark.assign(static_cast<size_t>(n) + 1, 0);
  }

  const EpochParams& epoch() const { return (*epochs)[cur]; }

  // Update the phase for a turn that begins with `cards_left` cards undrawn.
  void advance(u64 cards_left) {
    if (active && cards_left + epoch().ell <= epoch().k) {
      active = false;
      ++stamp;
      count = 0;
      ++cur;
    }
    if (!active && cur < epochs->size()) {
      const EpochParams& e = (*epochs)[cur];
      if (cards_left <= e.k && cards_left + e.ell > e.k) active = true;
    }
  }

  bool in_back(card_t c) const { return active && mark[c] == stamp; }

  // Move a guessed, still-remaining card to the back if the epoch has room.
  void maybe_move_back(card_t g) {
    if (!active || count >= epoch().u) return;
    if (mark[g] != stamp) {
      mark[g] = stamp;
      ++count;
    }
  }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Dealers.

// Uniform draw from the remaining deck every turn (incremental Fisher-Yates).
class ShuffleDealer final : public Dealer {
 public:
  ShuffleDealer(u32 n, Stream dealer);
  card_t commit_draw(u32 turn) override;
  bool drawable(card_t c) const override;
  void observe_guess(card_t g, u32 turn) override;

 private:
  u32 n_;
  Stream stream_;
  std::vector<card_t> deck_;  // deck_[0..next_-1] already dealt
  std::vector<u32> pos_;      // card -> index in deck_
  u32 next_ = 0;
};

// Fixed draw order; drawable = not yet drawn.
class StaticDealer final : public Dealer {
 public:
  StaticDealer(u32 n, std::vector<card_t> arrangement);
  card_t commit_draw(u32 turn) override;
  bool drawable(card_t c) const override;
  void observe_guess(card_t g, u32 turn) override;

  const std::vector<card_t>& arrangement() const { return arrangement_; }

 private:
  std::vector<card_t> arrangement_;  // arrangement_[t-1] is drawn at turn t
  std::vector<u32> order_;           // card -> 0-based draw position
  u32 removed_ = 0;
};

// Arrangement builders for the static dealer.
std::vector<card_t> arrangement_identity(u32 n);
std::vector<card_t> arrangement_reverse(u32 n);
std::vector<card_t> arrangement_bit_reversal(u32 n);  // n must be a power of two
std::vector<card_t> arrangement_random(u32 n, Stream& dealer);
std::vector<card_t> load_arrangement(const std::string& path, u32 n);

// Throws InvalidArrangement unless `arrangement` is a permutation of 1..n.
void require_permutation(const std::vector<card_t>& arrangement, u32 n);

// Tailored arrangement holding a deterministic guesser to exactly one correct
// guess: each turn deals the smallest remaining card other than the guess
// (the last turn is forced). Throws NotDeterministic for randomized specs.
std::vector<card_t> adversarial_arrangement_for(const GuesserSpec& spec, u32 n);

// Move-to-back dealer: uniform draws outside epochs; inside an epoch, uniform
// draws from remaining \ B, where B collects up to u cards guessed while
// still in the deck and empties at the epoch boundary. An empty schedule
// degenerates to ShuffleDealer behavior.
class MtbeDealer final : public Dealer {
 public:
  MtbeDealer(u32 n, std::vector<EpochParams> epochs, Stream dealer);
  card_t commit_draw(u32 turn) override;
  bool drawable(card_t c) const override;
  void observe_guess(card_t g, u32 turn) override;
  std::vector<EpochView> epoch_views() const override;

 private:
  void remove_card(card_t c);

  u32 n_;
  std::vector<EpochParams> epochs_;
  Stream stream_;
  std::vector<card_t> deck_;  // remaining cards, unordered
  std::vector<u32> pos_;      // card -> index in deck_, kDrawn once dealt
  detail::BackSet back_;
  card_t pending_ = 0;

  static constexpr u32 kDrawn = 0xFFFFFFFFu;
};

// Per-turn priority order over cards: the allowed card with the smallest
// priority value is drawn (ties break toward the smaller card label).
class PrioritySource {
 public:
  // Priorities derived by hashing (turn, card) with the key.
  static PrioritySource keyed(u64 key);
  // Explicit priorities, rows[t-1][c-1]; rows must cover every queried turn.
  static PrioritySource table(std::vector<std::vector<u64>> rows);

  u64 priority(u32 turn, card_t c) const;

 private:
  PrioritySource() = default;
  bool keyed_ = true;
  u64 key_ = 0;
  std::vector<std::vector<u64>> rows_;
};

// Randomness of the min-order dealer: a per-turn priority order plus the
// reserved set D of cards dealt only in the final k1 turns.
struct MinOrderRandomness {
  PrioritySource priorities;
  std::vector<card_t> reserved;
};

// Priority-order reimplementation of the move-to-back dealer: while more
// than |D| cards remain it draws the minimum-priority card outside D; then
// the minimum-priority card outside the epoch back-set B. With uniform
// randomness its draw distribution matches MtbeDealer's exactly.
class MinOrderDealer final : public Dealer {
 public:
  // If `epochs` is nonempty its first epoch must start at |reserved|.
  // Throws InvalidRandomness when the reserved set is malformed.
  MinOrderDealer(u32 n, std::vector<EpochParams> epochs, MinOrderRandomness rand);
  card_t commit_draw(u32 turn) override;
  bool drawable(card_t c) const override;
  void observe_guess(card_t g, u32 turn) override;
  std::vector<EpochView> epoch_views() const override;

  u64 reserved_phase_start() const { return k1_; }

 private:
  void remove_card(card_t c);

  u32 n_;
  std::vector<EpochParams> epochs_;
  PrioritySource prio_;
  std::vector<u8> reserved_mark_;  // card -> member of D
  u64 k1_ = 0;
  std::vector<card_t> deck_;
  std::vector<u32> pos_;
  detail::BackSet back_;
  card_t pending_ = 0;

  static constexpr u32 kDrawn = 0xFFFFFFFFu;
};

// ---------------------------------------------------------------------------
// Registry / factory.

struct DealerSpec {
  std::string kind;                    // see dealer_registry()
  std::string arrangement = "random";  // static: identity|reverse|bitrev|random|file
  std::string arrangement_file;        // static with arrangement == "file"
  u64 m = 0;                           // mtbe / mtbe-minorder: targeted guesser budget
  GuesserSpec target;                  // static-adversarial: the guesser to pin down
};

std::vector<std::string> dealer_registry();
std::unique_ptr<Dealer> make_dealer(const DealerSpec& spec, u32 n, Stream dealer);

}  // namespace cardlab
