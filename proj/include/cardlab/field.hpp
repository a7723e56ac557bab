#pragma once

#include <cstdint>
#include <vector>

#include "cardlab/common.hpp"

namespace cardlab {

// GF(2^l) for l in 2..30, elements as l-bit integers 0..2^l-1. Multiplication
// is the carry-less product reduced by a fixed irreducible polynomial (one
// published constant per degree, verified irreducible by trial division at
// construction). Fields are cached per degree; for l <= 20 a log/antilog
// table pair accelerates mul/inv, and the table path is property-tested
// against the definitional shift-reduce route.
class Gf2Field {
 public:
  explicit Gf2Field(unsigned ell);

  unsigned ell() const { return ell_; }
  u32 order() const { return order_; }          // 2^l
  u32 reduction_poly() const { return poly_; }  // includes the x^l term

  static u32 reduction_poly_for(unsigned ell);
  static bool is_irreducible(u64 poly);

  u32 add(u32 a, u32 b) const { return a ^ b; }

  // Definitional multiply: carry-less product, then polynomial reduction.
  u32 mul_clmul(u32 a, u32 b) const;

  u32 mul(u32 a, u32 b) const {
    if (!log_.empty()) {
      if (a == 0 || b == 0) return 0;
      return exp_[log_[a] + log_[b]];
    }
    return mul_clmul(a, b);
  }

  u32 inv(u32 a) const {
    if (a == 0) throw DivisionByZero("inverse of zero in GF(2^l)");
    if (!log_.empty()) return exp_[(order_ - 1) - log_[a]];
    return pow(a, order_ - 2);
  }

  u32 pow(u32 a, u64 e) const;

 private:
  void build_tables();

  unsigned ell_;
  u32 poly_;
  u32 order_;
  std::vector<u32> log_;  // log_[a] for a != 0
  std::vector<u32> exp_;  // exp_[i] for i in [0, 2*(order-1)], doubled to skip a mod
};

// Cached shared instance per degree (built once, reused across trials).
const Gf2Field& field_for(unsigned ell);

}  // namespace cardlab
