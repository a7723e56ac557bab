#pragma once

#include <vector>

#include "cardlab/bits.hpp"
#include "cardlab/common.hpp"
#include "cardlab/dealers.hpp"
#include "cardlab/guessers.hpp"

namespace cardlab {

// ---------------------------------------------------------------------------
// Exact combinatorics.

// C(n, k); throws RankOutOfRange if the value does not fit in 64 bits.
u64 binom(u64 n, u64 k);

// n * (n-1) * ... * (n-k+1); same overflow rule. Zero when k > n.
u64 falling_factorial(u64 n, u64 k);

// ---------------------------------------------------------------------------
// Combinatorial ranking: bijections between subsets (resp. ordered subsets)
// of 1..n and integer ranks, both in lexicographic order. These realize the
// "describe a set in ceil(log C(n,k)) bits" steps of the codecs.

struct SubsetRank {
  u32 n = 0;
  u32 k = 0;
  u64 rank = 0;
};

struct OrderedRank {
  u32 n = 0;
  u32 k = 0;
  u64 rank = 0;
};

// S must hold distinct cards in 1..n (any order; ranked as a sorted set).
SubsetRank rank_subset(const std::vector<card_t>& S, u32 n);
// Inverse: returns the sorted subset with the given rank. RankOutOfRange if
// r >= C(n, k).
std::vector<card_t> unrank_subset(u64 r, u32 n, u32 k);

// B is an ordered list of distinct cards in 1..n; order-sensitive rank.
OrderedRank rank_ordered(const std::vector<card_t>& B, u32 n);
// Inverse. RankOutOfRange if r >= n*(n-1)*...*(n-k+1).
std::vector<card_t> unrank_ordered(u64 r, u32 n, u32 k);

// ---------------------------------------------------------------------------
// Ordered-suffix codec. The encoder deals `prefix` then `suffix` as a static
// arrangement against the guesser built from seed `gamma`, and exploits the
// guesser's correct guesses in the last k turns: with at least `alpha` of
// them the suffix is stored as (indicator=1, memory state M at turn n-k,
// the first alpha correct-guess positions as a rank over C(k, alpha), and the
// ordered rank of the k-alpha cards drawn at the other turns); with fewer it
// is stored explicitly (indicator=0, full ordered rank). The decoder replays
// the last k turns from M, substituting the guesser's own guess at tagged
// turns, so the codeword never has to spell those cards out.
//
// Both sides derive the guesser from `gamma` alone; every strategy in the
// registry is deterministic given its streams, its state and the turn number,
// which is what makes the replay exact.
BitString encode_ordered(const std::vector<card_t>& suffix,
                         const std::vector<card_t>& prefix,
                         const GuesserSpec& guesser, u64 gamma, u32 alpha,
                         u32 n);
std::vector<card_t> decode_ordered(const BitString& bits,
                                   const GuesserSpec& guesser, u64 gamma,
                                   u32 alpha, u32 k, u32 n);

// Emitted length of the indicator=1 branch: 1 + m + ceil(log C(k,alpha)) +
// ceil(log n(n-1)...(n-k+alpha+1)).
u64 encoded_length_ordered(u64 m, u32 k, u32 alpha, u32 n);

// Exhaustive search (n <= 8 only, ConfigError otherwise) for the prefix
// arrangement of [n] \ suffix that maximizes the guesser's correct guesses
// over the suffix turns; ties resolve to the lexicographically first prefix.
std::vector<card_t> best_prefix_search(const std::vector<card_t>& suffix,
                                       const GuesserSpec& guesser, u64 gamma,
                                       u32 n);

// ---------------------------------------------------------------------------
// Unordered-set codec. The encoder simulates the guesser against the
// min-order move-to-back dealer whose reserved set is exactly `reserved` (the
// set being encoded) and whose per-turn priorities are `priorities`; it
// counts the guesser's reasonable guesses inside epoch `epoch_index`
// (1-based into `epochs`). With at least `alpha` of them the set is stored as
// (indicator=1, memory state M at turn n-k1, the first alpha reasonable
// positions as a rank over C(ell, alpha), an alpha-bit vector V flagging
// which of those guesses were also correct, and the subset rank of the
// remaining k1-alpha cards); with fewer it is stored explicitly.
//
// The decoder never receives the reserved set: it replays the final k1 turns
// against a modified dealer that runs the same min-order rule over the
// decoded partial set, draws the guesser's own guess at turns tagged
// reasonable-and-correct, and stops at the alpha-th tagged turn. The tagged
// guesses plus the partial set reassemble the original.
//
// Requirements checked up front (ScheduleMismatch): the schedule validates,
// epoch_index is in range, and alpha <= min{ell_i, u_i} - the move-back
// budget must cover every tagged guess or the two simulations can diverge.
BitString encode_unordered(const std::vector<card_t>& reserved,
                           const GuesserSpec& guesser, u64 gamma,
                           const PrioritySource& priorities, u32 alpha,
                           u32 epoch_index,
                           const std::vector<EpochParams>& epochs, u32 n);
std::vector<card_t> decode_unordered(const BitString& bits,
                                     const GuesserSpec& guesser, u64 gamma,
                                     const PrioritySource& priorities,
                                     u32 alpha, u32 epoch_index,
                                     const std::vector<EpochParams>& epochs,
                                     u32 n);

// Emitted length of the indicator=1 branch: 1 + m + ceil(log C(ell,alpha)) +
// alpha + ceil(log C(n, k1-alpha)).
u64 encoded_length_unordered(u64 m, u64 k1, u64 ell, u32 alpha, u32 n);

// ---------------------------------------------------------------------------
// Length analytics (real-valued, via log-gamma, safe at astronomic n).

// log2 C(n, k) without overflow.
double log2_binom(double n, double k);

// w(m, k1, ell, alpha) = log2(2 * 2^m * 2^alpha * C(n, k1-alpha) *
// C(ell, alpha)): the analytic codeword length of the unordered codec's
// compressed branch.
double codeword_length_w(double m, double k1, double ell, double alpha,
                         double n);

// One row per alpha in [alpha_lo, alpha_hi]: the analytic length w and the
// savings H - w against the entropy H = log2 C(n, k1). Positive savings means
// the codec beats the explicit description.
struct CompressionRow {
  u32 alpha = 0;
  double w_bits = 0.0;
  double savings = 0.0;
};

std::vector<CompressionRow> compression_diagnostics(double m, u64 k1, u64 ell,
                                                    u64 n, u32 alpha_lo,
                                                    u32 alpha_hi);

}  // namespace cardlab
