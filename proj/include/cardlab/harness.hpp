#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cardlab/dealers.hpp"
#include "cardlab/guessers.hpp"

namespace cardlab {

// ---------------------------------------------------------------------------
// Monte Carlo experiments.

struct ExperimentConfig {
  GuesserSpec guesser;
  DealerSpec dealer;
  u32 n = 0;
  u64 m = 0;           // nominal memory parameter (reporting / theory curves)
  u64 trials = 1;
  u64 master_seed = 0;
  bool strict_memory = false;      // serialize + audit the state every turn
  u64 memory_budget = ~0ULL;       // bits; enforced by the engine
  unsigned threads = 0;            // 0 = hardware concurrency
};

// Per-epoch tallies, aligned with the dealer's reported schedule. The epoch
// covers the `len` turns starting when `cards_left_start` cards remain.
struct EpochStat {
  u64 cards_left_start = 0;
  u64 len = 0;
  double mean_reasonable = 0.0;
  double stderr_reasonable = 0.0;
  double mean_correct = 0.0;
  double stderr_correct = 0.0;
};

struct StatResult {
  u64 trials = 0;
  double mean_correct = 0.0;
  double stderr_correct = 0.0;
  double mean_reasonable = 0.0;
  double stderr_reasonable = 0.0;
  // Populated only when the dealer reports an epoch schedule.
  std::vector<EpochStat> epochs;
  // Correct guesses summed over all epoch turns of a trial (mean / stderr of
  // that per-trial total; not derivable from the per-epoch stderrs).
  double mean_epoch_correct_total = 0.0;
  double stderr_epoch_correct_total = 0.0;
  // Largest serialized (strict mode) or declared state seen in any trial.
  u64 peak_state_bits = 0;
};

// Runs `trials` independent games. Trial i uses streams derived from
// (master_seed, i), so any subset of trials reproduces exactly; aggregation
// is by integer sums, so the result is identical for any thread count.
// Propagates Infeasible / ConfigError / MemoryBudgetExceeded.
StatResult monte_carlo(const ExperimentConfig& config);

// ---------------------------------------------------------------------------
// Closed-form theory curves. Names and their formulas (logs as in the
// source analyses: ln is natural, log2 is binary):
//   half_log        0.5 * log2 n
//   general_delta   delta / ((1+delta) * ln(1+delta)) * ln n
//   quarter_ln      0.25 * ln n
//   subset          ln m
//   combined        2 ln m - ln log2 n
//   static_bound    2 * sqrt(m+1) + 2
//   adaptive_bound  ln m + 2 ln log2 n + ln 16e
//   universal_bound 8 * ln log2 n
struct TheoryParams {
  double n = 0.0;
  double m = 0.0;
  double delta = 1.0;
};

// Throws UnknownCurve for unrecognized names.
double theory_curve(const std::string& name, const TheoryParams& params);

// The curve a sweep row reports by default: dealers with a score bound pick
// that bound (mtbe / mtbe-minorder -> adaptive_bound, universal ->
// universal_bound, static-adversarial -> static_bound), otherwise the
// guesser's expectation curve (following -> half_log or general_delta,
// randomized -> quarter_ln, subset -> subset, combined -> combined).
// Returns {"", NaN} when no curve applies.
std::pair<std::string, double> default_theory(const GuesserSpec& guesser,
                                              const DealerSpec& dealer, u32 n,
                                              u64 m, double delta);

// ---------------------------------------------------------------------------
// Sweeps and CSV emission. Fixed column order:
//   guesser,dealer,n,m,delta,trials,mean_correct,stderr_correct,
//   mean_reasonable,stderr_reasonable,theory_name,theory_value,error
// Success rows leave `error` empty; infeasible/config failures leave the
// stat columns empty and set `error`, and the sweep continues.

extern const char* const kSweepCsvHeader;

struct SweepCell {
  GuesserSpec guesser;
  DealerSpec dealer;
  u32 n = 0;
  u64 m = 0;
  u64 trials = 1;
};

struct SweepGrid {
  std::vector<GuesserSpec> guessers;
  std::vector<DealerSpec> dealers;
  std::vector<u32> ns;
  std::vector<u64> ms;
  u64 trials = 1;
  u64 master_seed = 0;
  bool strict_memory = false;
  unsigned threads = 0;
};

// Cross product in guesser-major order: guessers x dealers x ns x ms.
std::vector<SweepCell> expand_grid(const SweepGrid& grid);

// One CSV row per cell, header first; deterministic byte output for a fixed
// input (locale-independent '.' decimals).
void sweep_cells(const std::vector<SweepCell>& cells, u64 master_seed,
                 bool strict_memory, unsigned threads, std::ostream& os);
void sweep(const SweepGrid& grid, std::ostream& os);

// One formatted row (exposed for tests); `header` is written by the caller.
std::string sweep_row(const SweepCell& cell, u64 master_seed,
                      bool strict_memory, unsigned threads);

}  // namespace cardlab
