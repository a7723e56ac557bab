#include "cardlab/field.hpp"

#include <array>
#include <bit>
#include <memory>
#include <mutex>

namespace cardlab {

namespace {

// Smallest irreducible polynomial of each degree when read as an integer
// (coefficient bit i = x^i). Verified again at construction.
constexpr std::array<u32, 31> kReductionPolys = {
    0,          0,          0x7,        0xB,        0x13,       0x25,       0x43,      0x83,
    0x11B,      0x203,      0x409,      0x805,      0x1009,     0x201B,     0x4021,    0x8003,
    0x1002B,    0x20009,    0x40009,    0x80027,    0x100009,   0x200005,   0x400003,  0x800021,
    0x100001B,  0x2000009,  0x400001B,  0x8000027,  0x10000003, 0x20000005, 0x40000003};

// Carry-less (XOR) product of GF(2) polynomials.
u64 clmul(u64 a, u64 b) {
  u64 r = 0;
  while (b) {
    if (b & 1) r ^= a;
    a <<= 1;
    b >>= 1;
  }
  return r;
}

// Remainder of polynomial division over GF(2).
u64 polymod(u64 a, u64 mod) {
  const unsigned dm = std::bit_width(mod) - 1;
  while (a && std::bit_width(a) - 1 >= dm) {
    a ^= mod << (std::bit_width(a) - 1 - dm);
  }
  return a;
}

constexpr unsigned kMaxTableEll = 20;  // log/antilog tables up to 4M entries

}  // namespace

u32 Gf2Field::reduction_poly_for(unsigned ell) {
  if (ell < 2 || ell > 30) throw ConfigError("field degree must be in 2..30");
  return kReductionPolys[ell];
}

bool Gf2Field::is_irreducible(u64 poly) {
  int deg = std::bit_width(poly) - 1;
  if (deg < 1) return false;
  if ((poly & 1) == 0) return deg == 1;  // divisible by x
  for (int d = 1; 2 * d <= deg; ++d) {
    for (u64 q = (1ULL << d); q < (2ULL << d); ++q) {
      if (polymod(poly, q) == 0) return false;
    }
  }
  return true;
}

Gf2Field::Gf2Field(unsigned ell)
    : ell_(ell), poly_(reduction_poly_for(ell)), order_(1u << ell) {
  if (!is_irreducible(poly_))
    throw ConfigError("reduction polynomial is not irreducible");
  if (ell_ <= kMaxTableEll) build_tables();
}

u32 Gf2Field::mul_clmul(u32 a, u32 b) const {
  u64 prod = clmul(a, b);
  return static_cast<u32>(polymod(prod, poly_));
}

u32 Gf2Field::pow(u32 a, u64 e) const {
  u32 r = 1;
  while (e) {
    if (e & 1) r = mul_clmul(r, a);
    a = mul_clmul(a, a);
    e >>= 1;
  }
  return r;
}

void Gf2Field::build_tables() {
  const u32 group = order_ - 1;
  // Find a multiplicative generator: try candidates until one has full order.
  // Factor the group order by trial division (group < 2^30).
  std::vector<u32> prime_factors;
  {
    u32 g = group;
    for (u32 p = 2; static_cast<u64>(p) * p <= g; ++p) {
      if (g % p == 0) {
        prime_factors.push_back(p);
        while (g % p == 0) g /= p;
      }
    }
    if (g > 1) prime_factors.push_back(g);
  }
  u32 gen = 0;
  for (u32 cand = 2; cand < order_; ++cand) {
    bool primitive = true;
    for (u32 p : prime_factors) {
      if (pow(cand, group / p) == 1) {
        primitive = false;
        break;
      }
    }
    if (primitive) {
      gen = cand;
      break;
    }
  }
  if (gen == 0) throw ConfigError("no multiplicative generator found");

  log_.assign(order_, 0);
  exp_.assign(2 * group + 1, 1);
  u32 v = 1;
  for (u32 i = 0; i < group; ++i) {
    exp_[i] = v;
    log_[v] = i;
    v = mul_clmul(v, gen);
  }
  if (v != 1) throw ConfigError("generator order mismatch");
  for (u32 i = group; i <= 2 * group; ++i) exp_[i] = exp_[i - group];
}

const Gf2Field& field_for(unsigned ell) {
  static std::mutex mu;
  static std::array<std::unique_ptr<Gf2Field>, 31> cache;
  if (ell < 2 || ell > 30) throw ConfigError("field degree must be in 2..30");
  std::lock_guard<std::mutex> lock(mu);
  if (!cache[ell]) cache[ell] = std::make_unique<Gf2Field>(ell);
  return *cache[ell];
}

}  // namespace cardlab
