#pragma once

#include <algorithm>
#include <iosfwd>
#include <vector>

#include "cardlab/bits.hpp"
#include "cardlab/common.hpp"
#include "cardlab/rng.hpp"

namespace cardlab {

// One game: n turns over a deck of n distinct cards. Per-turn order:
//   1. the dealer commits its draw d_t (using history through t-1 only);
//   2. the guesser emits g_t (it may use the turn counter for free);
//   3. the reasonable flag is the dealer's drawable-set predicate on g_t,
//      evaluated before the reveal (d_t itself is still drawable);
//   4. d_t is revealed to the guesser;
//   5. g_t is revealed to the dealer.
struct GameConfig {
  u32 n = 0;
  u64 memory_budget = ~0ULL;  // bits; unlimited by default
  bool strict_memory = false; // serialize + check the state every turn
};

class Guesser {
 public:
  virtual ~Guesser() = default;
  virtual card_t guess(u32 turn) = 0;
  virtual void observe(card_t drawn, u32 turn) = 0;

  // Declared canonical serialization length in bits. serialize_state() must
  // produce exactly this many bits; restore_state() must round-trip.
  virtual u64 state_bits() const = 0;
  // Bits of explicitly-exempted tracking state (charged separately from the
  // memory budget; 0 for almost all guessers).
  virtual u64 aux_allowance_bits() const { return 0; }
  virtual BitString serialize_state() const = 0;
  virtual void restore_state(const BitString& bits) = 0;
};

// Schedule view used for per-epoch statistics: the epoch starts when
// `cards_left_start` cards remain and lasts `len` turns.
struct EpochView {
  u64 cards_left_start = 0;
  u64 len = 0;
  u64 u = 0;  // back-set capacity
};

class Dealer {
 public:
  virtual ~Dealer() = default;
  virtual card_t commit_draw(u32 turn) = 0;
  virtual bool drawable(card_t c) const = 0;
  virtual void observe_guess(card_t g, u32 turn) = 0;
  virtual std::vector<EpochView> epoch_views() const { return {}; }
};

struct TurnRecord {
  card_t guess = 0;
  card_t draw = 0;
  bool reasonable = false;
  bool correct = false;
};

struct Transcript {
  u32 n = 0;
  std::vector<TurnRecord> turns;  // turns[t-1]
  u64 peak_state_bits = 0;
};

struct ScoreSummary {
  u64 correct = 0;
  u64 reasonable = 0;
};

// Core loop, shared by the virtual-dispatch entry points and the harness's
// monomorphized fast path. Sink is called as sink(t, guess, draw, reasonable,
// correct) after each completed turn. Returns the peak serialized state size
// (declared size in fast mode). Throws ProtocolViolation on illegal draws or
// layout disagreement, MemoryBudgetExceeded when the budget is enforced.
template <class G, class D, class Sink>
u64 run_game(const GameConfig& cfg, G& guesser, D& dealer, Sink&& sink) {
  const u32 n = cfg.n;
  if (n == 0) throw ConfigError("game needs n >= 1");
  const u64 aux = guesser.aux_allowance_bits();
  u64 peak = 0;

  auto strict_check = [&]() {
    BitString st = guesser.serialize_state();
    if (st.size() != guesser.state_bits())
      throw ProtocolViolation("serialized state disagrees with declared layout");
    peak = std::max(peak, st.size());
    if (st.size() - std::min(aux, st.size()) > cfg.memory_budget)
      throw MemoryBudgetExceeded("guesser state exceeds memory budget");
  };
  if (cfg.strict_memory) {
    strict_check();
  } else {
    peak = guesser.state_bits();
    if (peak - std::min(aux, peak) > cfg.memory_budget)
      throw MemoryBudgetExceeded("declared layout exceeds memory budget");
  }

  std::vector<u64> drawn((n + 64) / 64, 0);
  for (u32 t = 1; t <= n; ++t) {
    const card_t d = dealer.commit_draw(t);
    if (d < 1 || d > n) throw ProtocolViolation("dealer draw out of range");
    const card_t g = guesser.guess(t);
    if (g < 1 || g > n) throw ProtocolViolation("guess out of range");
    const bool reasonable = dealer.drawable(g);
    const bool correct = (g == d);
    u64& word = drawn[(d - 1) >> 6];
    const u64 bit = 1ULL << ((d - 1) & 63);
    if (word & bit) throw ProtocolViolation("dealer repeated a card");
    word |= bit;
    guesser.observe(d, t);
    dealer.observe_guess(g, t);
    if (cfg.strict_memory) strict_check();
    sink(t, g, d, reasonable, correct);
  }
  return peak;
}

Transcript play_game(const GameConfig& cfg, Guesser& guesser, Dealer& dealer);
ScoreSummary play_game_scored(const GameConfig& cfg, Guesser& guesser, Dealer& dealer);

ScoreSummary score(const Transcript& tr);

// True iff a full strict-mode game stays within the budget (catches
// MemoryBudgetExceeded; other protocol errors still propagate).
bool memory_bound_holds(GameConfig cfg, Guesser& guesser, Dealer& dealer);

// CSV rows "trial,t,guess,draw,reasonable,correct" (header written by caller
// via transcript_csv_header).
extern const char* const kTranscriptCsvHeader;
void write_transcript_csv(std::ostream& os, const Transcript& tr, u64 trial);

}  // namespace cardlab
