#include "cardlab/power_sum.hpp"

namespace cardlab {

namespace {

u64 mod_pow(u64 a, u64 e, u64 q) {
  u64 r = 1 % q;
  a %= q;
  while (e) {
    if (e & 1) r = r * a % q;
    a = a * a % q;
    e >>= 1;
  }
  return r;
}

u64 mod_inv(u64 a, u64 q) { return mod_pow(a, q - 2, q); }  // q prime

bool is_prime(u32 v) {
  if (v < 2) return false;
  for (u64 d = 2; d * d <= v; ++d)
    if (v % d == 0) return false;
  return true;
}

}  // namespace

u32 smallest_prime_above(u32 n) {
  u32 v = n + 1;
  while (!is_prime(v)) ++v;
  return v;
}

PowerSumState init_power_sums(u32 n, u32 k) {
  if (n == 0 || k == 0) throw ConfigError("power sums need n >= 1, k >= 1");
  PowerSumState st;
  st.n = n;
  st.k = k;
  st.q = smallest_prime_above(n);
  st.remaining = n;
  st.sums.assign(k, 0);
  for (u32 x = 1; x <= n; ++x) {
    u64 xp = 1;
    for (u32 p = 0; p < k; ++p) {
      xp = xp * x % st.q;
      st.sums[p] = static_cast<u32>((st.sums[p] + xp) % st.q);
    }
  }
  return st;
}

void power_sum_observe(PowerSumState& st, card_t drawn) {
  if (drawn < 1 || drawn > st.n) throw ConfigError("power_sum_observe: card out of range");
  if (st.remaining == 0) throw ConfigError("power_sum_observe: no cards remaining");
  u64 xp = 1;
  for (u32 p = 0; p < st.k; ++p) {
    xp = xp * drawn % st.q;
    st.sums[p] = static_cast<u32>((st.sums[p] + st.q - xp % st.q) % st.q);
  }
  --st.remaining;
}

std::vector<card_t> recover_missing(const PowerSumState& st) {
  const u32 r = st.remaining;
  const u64 q = st.q;
  if (r > st.k) throw ConfigError("recover_missing: more cards remaining than tracked sums");
  if (r == 0) return {};

  // Newton's identities: e_0 = 1, e_j = (1/j) * sum_{i=1..j} (-1)^(i-1) e_{j-i} p_i.
  std::vector<u64> e(r + 1, 0);
  e[0] = 1;
  for (u32 j = 1; j <= r; ++j) {
    u64 acc = 0;
    for (u32 i = 1; i <= j; ++i) {
      u64 term = e[j - i] * (st.sums[i - 1] % q) % q;
      acc = (i % 2 == 1) ? (acc + term) % q : (acc + q - term) % q;
    }
    e[j] = acc * mod_inv(j, q) % q;
  }

  // P(x) = sum_{i=0..r} (-1)^i e_i x^(r-i); its roots are the missing cards.
  std::vector<u64> coeff(r + 1);  // coeff[i] multiplies x^(r-i)
  for (u32 i = 0; i <= r; ++i) coeff[i] = (i % 2 == 0) ? e[i] : (q - e[i]) % q;

  std::vector<card_t> roots;
  for (u32 x = 1; x <= st.n; ++x) {
    u64 v = 0;
    for (u32 i = 0; i <= r; ++i) v = (v * x + coeff[i]) % q;
    if (v == 0) {
      roots.push_back(x);
      if (roots.size() > r) break;
    }
  }
  if (roots.size() != r)
    throw RecoveryInconsistent("power-sum recovery found the wrong number of roots");
  return roots;
}

}  // namespace cardlab
