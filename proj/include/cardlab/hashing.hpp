#pragma once

#include <vector>

#include "cardlab/common.hpp"
#include "cardlab/field.hpp"
#include "cardlab/rng.hpp"

namespace cardlab {

// Hash functions act on cards 1..n with n = 2^l: card c corresponds to the
// field element with bit pattern c-1, and results map back the same way.

// h(x) = a*x + b over GF(2^l) with a != 0: a uniform permutation family in
// which any two distinct points map to any two distinct targets with
// probability 1/(n(n-1)).
struct PairwisePerm {
  u32 a = 1, b = 0;
};

// Sampling consumes exactly 2*l long-lived bits; a is mapped into 1..2^l-1
// (bias 2^(1-l), see the sampler note in the implementation).
PairwisePerm sample_pairwise(const Gf2Field& f, Stream& long_lived);
card_t eval_pairwise(const Gf2Field& f, const PairwisePerm& h, card_t x);
card_t invert_pairwise(const Gf2Field& f, const PairwisePerm& h, card_t y);
std::vector<PairwisePerm> enumerate_pairwise(const Gf2Field& f);  // all (2^l-1)*2^l members

// Degree-(k-1) polynomial over GF(2^l): the classic k-wise independent family
// (all q^k polynomials; any k distinct points map to any k targets with
// probability n^-k). Evaluation is Horner's rule.
struct KWisePoly {
  std::vector<u32> coeffs;  // coeffs[i] multiplies x^i; size k
};

KWisePoly sample_kwise(const Gf2Field& f, u32 k, Stream& long_lived);  // exactly k*l bits
card_t eval_kwise(const Gf2Field& f, const KWisePoly& h, card_t x);
std::vector<KWisePoly> enumerate_kwise(const Gf2Field& f, u32 k);  // all n^k members (tiny fields)

// Dyadic buckets over hash values y in 1..2^l: bucket j holds y in
// (2^(j-1), 2^j] for j >= 2; bucket 1 absorbs {1, 2}. Buckets are 1..l.
unsigned bucket_of(card_t y);
u32 bucket_size(unsigned j);                    // 2 for j=1, 2^(j-1) for j>=2
card_t bucket_low(unsigned j);                  // smallest member: 1 for j=1, 2^(j-1)+1 for j>=2
u32 bucket_index_of(card_t y);                  // 1-based index of y inside its bucket
card_t bucket_member(unsigned j, u32 index);    // inverse of bucket_index_of

}  // namespace cardlab
