#pragma once

#include <vector>

#include "cardlab/common.hpp"

namespace cardlab {

// Smallest prime strictly greater than n.
u32 smallest_prime_above(u32 n);

// Running power sums S_p = sum over *undrawn* cards of card^p mod q, for
// p = 1..k, with q the smallest prime above n. Initialized over the full
// deck; observing a draw subtracts its powers.
struct PowerSumState {
  u32 n = 0;
  u32 k = 0;
  u32 q = 0;
  u32 remaining = 0;       // undrawn cards
  std::vector<u32> sums;   // sums[p-1] = S_p
};

PowerSumState init_power_sums(u32 n, u32 k);
void power_sum_observe(PowerSumState& st, card_t drawn);

// Recover the undrawn set when remaining <= k: Newton's identities over
// GF(q) give the elementary symmetric polynomials e_1..e_r of the missing
// cards; the monic polynomial with those coefficients is scanned for roots
// among 1..n. Throws RecoveryInconsistent unless exactly `remaining` roots
// are found. Result is sorted ascending.
std::vector<card_t> recover_missing(const PowerSumState& st);

}  // namespace cardlab
