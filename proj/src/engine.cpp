#include "cardlab/engine.hpp"

#include <ostream>

namespace cardlab {

Transcript play_game(const GameConfig& cfg, Guesser& guesser, Dealer& dealer) {
  Transcript tr;
  tr.n = cfg.n;
  tr.turns.resize(cfg.n);
  tr.peak_state_bits = run_game(cfg, guesser, dealer,
                                [&](u32 t, card_t g, card_t d, bool reasonable, bool correct) {
                                  tr.turns[t - 1] = TurnRecord{g, d, reasonable, correct};
                                });
  return tr;
}

ScoreSummary play_game_scored(const GameConfig& cfg, Guesser& guesser, Dealer& dealer) {
  ScoreSummary s;
  run_game(cfg, guesser, dealer, [&](u32, card_t, card_t, bool reasonable, bool correct) {
    s.correct += correct;
    s.reasonable += reasonable;
  });
  return s;
}

ScoreSummary score(const Transcript& tr) {
  ScoreSummary s;
  for (const TurnRecord& r : tr.turns) {
    s.correct += r.correct;
    s.reasonable += r.reasonable;
  }
  return s;
}

bool memory_bound_holds(GameConfig cfg, Guesser& guesser, Dealer& dealer) {
  cfg.strict_memory = true;
  try {
    play_game_scored(cfg, guesser, dealer);
  } catch (const MemoryBudgetExceeded&) {
    return false;
  }
  return true;
}

const char* const kTranscriptCsvHeader = "trial,t,guess,draw,reasonable,correct";

void write_transcript_csv(std::ostream& os, const Transcript& tr, u64 trial) {
  for (u32 t = 1; t <= tr.n; ++t) {
    const TurnRecord& r = tr.turns[t - 1];
    os << trial << ',' << t << ',' << r.guess << ',' << r.draw << ',' << (r.reasonable ? 1 : 0)
       << ',' << (r.correct ? 1 : 0) << '\n';
  }
}

}  // namespace cardlab
