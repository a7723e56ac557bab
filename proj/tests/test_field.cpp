#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "cardlab/field.hpp"
#include "cardlab/rng.hpp"

using namespace cardlab;

TEST_CASE("reduction polynomials are the fixed published constants") {
  // Lowest-weight irreducible polynomial of each degree, as bit patterns
  // including the x^l term (e.g. degree 4: x^4 + x + 1 = 0x13).
  CHECK(Gf2Field::reduction_poly_for(2) == 0x7u);
  CHECK(Gf2Field::reduction_poly_for(3) == 0xbu);
  CHECK(Gf2Field::reduction_poly_for(4) == 0x13u);
  CHECK(Gf2Field::reduction_poly_for(8) == 0x11bu);   // AES polynomial
  CHECK(Gf2Field::reduction_poly_for(16) == 0x1002bu);
  CHECK(Gf2Field::reduction_poly_for(20) == 0x100009u);
  CHECK(Gf2Field::reduction_poly_for(30) == 0x40000003u);
}

TEST_CASE("every reduction polynomial is irreducible") {
  for (unsigned ell = 2; ell <= 30; ++ell) {
    CHECK(Gf2Field::is_irreducible(Gf2Field::reduction_poly_for(ell)));
  }
}

TEST_CASE("is_irreducible rejects known reducibles") {
  CHECK_FALSE(Gf2Field::is_irreducible(0x6));   // x^2 + x = x(x+1)
  CHECK_FALSE(Gf2Field::is_irreducible(0x5));   // x^2 + 1 = (x+1)^2
  CHECK_FALSE(Gf2Field::is_irreducible(0x1b));  // x^4+x^3+x+1 divisible by x+1
  CHECK(Gf2Field::is_irreducible(0x3));         // x + 1
  CHECK(Gf2Field::is_irreducible(0x7));         // x^2 + x + 1
}

TEST_CASE("GF(4) multiplication table is the textbook one") {
  // Elements 0,1,2,3 with 2 = x, 3 = x+1 under x^2 + x + 1.
  const Gf2Field& f = field_for(2);
  CHECK(f.order() == 4);
  u32 expect[4][4] = {{0, 0, 0, 0}, {0, 1, 2, 3}, {0, 2, 3, 1}, {0, 3, 1, 2}};
  for (u32 a = 0; a < 4; ++a)
    for (u32 b = 0; b < 4; ++b) CHECK(f.mul(a, b) == expect[a][b]);
}

TEST_CASE("known AES field products") {
  const Gf2Field& f = field_for(8);
  CHECK(f.mul(0x57, 0x83) == 0xc1);  // FIPS-197 worked example
  CHECK(f.mul(0x57, 0x13) == 0xfe);
  CHECK(f.mul(0x02, 0x80) == 0x1b);  // overflow wraps through the polynomial
}

TEST_CASE("field axioms hold exhaustively in small fields") {
  for (unsigned ell : {2u, 3u, 4u}) {
    const Gf2Field& f = field_for(ell);
    u32 q = f.order();
    for (u32 a = 0; a < q; ++a) {
      CHECK(f.mul(a, 1) == a);
      CHECK(f.mul(1, a) == a);
      CHECK(f.mul(a, 0) == 0);
      CHECK(f.add(a, a) == 0);  // characteristic 2
      for (u32 b = 0; b < q; ++b) {
        CHECK(f.mul(a, b) == f.mul(b, a));
        for (u32 c = 0; c < q; ++c) {
          CHECK(f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c));
          CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
        }
      }
    }
  }
}

TEST_CASE("multiplicative inverses") {
  for (unsigned ell : {2u, 3u, 8u}) {
    const Gf2Field& f = field_for(ell);
    for (u32 a = 1; a < f.order(); ++a) CHECK(f.mul(a, f.inv(a)) == 1);
    CHECK_THROWS_AS((void)f.inv(0), DivisionByZero);
  }
}

TEST_CASE("nonzero elements form a group (no zero divisors)") {
  const Gf2Field& f = field_for(5);
  for (u32 a = 1; a < f.order(); ++a) {
    std::set<u32> row;
    for (u32 b = 1; b < f.order(); ++b) row.insert(f.mul(a, b));
    CHECK(row.size() == f.order() - 1);  // each row a permutation
    CHECK(row.count(0) == 0);
  }
}

TEST_CASE("table path agrees with the definitional clmul path") {
  // l = 12 uses log tables; spot-check against mul_clmul on random pairs.
  const Gf2Field& f = field_for(12);
  Stream rng(17);
  for (int i = 0; i < 20000; ++i) {
    u32 a = static_cast<u32>(rng.uniform_below(f.order()));
    u32 b = static_cast<u32>(rng.uniform_below(f.order()));
    CHECK(f.mul(a, b) == f.mul_clmul(a, b));
  }
}

TEST_CASE("large fields beyond the table limit still satisfy axioms on samples") {
  const Gf2Field& f = field_for(24);
  CHECK(f.order() == (1u << 24));
  Stream rng(31);
  for (int i = 0; i < 2000; ++i) {
    u32 a = static_cast<u32>(rng.uniform_below(f.order()));
    u32 b = static_cast<u32>(rng.uniform_below(f.order()));
    u32 c = static_cast<u32>(rng.uniform_below(f.order()));
    CHECK(f.mul(a, b) == f.mul(b, a));
    CHECK(f.mul(a, f.mul(b, c)) == f.mul(f.mul(a, b), c));
    CHECK(f.mul(a, f.add(b, c)) == f.add(f.mul(a, b), f.mul(a, c)));
    if (a != 0) CHECK(f.mul(a, f.inv(a)) == 1);
  }
}

TEST_CASE("pow matches repeated multiplication") {
  const Gf2Field& f = field_for(6);
  for (u32 a : {1u, 2u, 5u, 63u}) {
    u32 acc = 1;
    for (u64 e = 0; e <= 10; ++e) {
      CHECK(f.pow(a, e) == acc);
      acc = f.mul(acc, a);
    }
  }
  // Fermat: a^(q-1) = 1 for nonzero a.
  for (u32 a = 1; a < f.order(); ++a) CHECK(f.pow(a, f.order() - 1) == 1);
}

TEST_CASE("field_for caches instances") {
  CHECK(&field_for(9) == &field_for(9));
  CHECK(field_for(9).ell() == 9);
  CHECK_THROWS_AS((void)field_for(1), ConfigError);
  CHECK_THROWS_AS((void)field_for(31), ConfigError);
}
