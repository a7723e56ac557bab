#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "cardlab/dealers.hpp"
#include "cardlab/engine.hpp"
#include "cardlab/guessers.hpp"

using namespace cardlab;

namespace {

double harmonic(u32 m) {
  double h = 0;
  for (u32 i = 1; i <= m; ++i) h += 1.0 / i;
  return h;
}

// Mean and standard error of the correct-count over `trials` games.
std::pair<double, double> mean_correct(const GuesserSpec& gs, const DealerSpec& ds, u32 n,
                                       u32 trials, u64 seed) {
  double sum = 0, sumsq = 0;
  for (u32 i = 0; i < trials; ++i) {
    auto streams = derive_streams(seed, i);
    auto g = make_guesser(gs, n, streams.guesser_long_lived, streams.guesser_on_the_fly);
    auto d = make_dealer(ds, n, streams.dealer);
    GameConfig cfg{n};
    auto s = play_game_scored(cfg, *g, *d);
    sum += static_cast<double>(s.correct);
    sumsq += static_cast<double>(s.correct) * static_cast<double>(s.correct);
  }
  double mean = sum / trials;
  double var = std::max(0.0, (sumsq - trials * mean * mean) / (trials - 1.0));
  return {mean, std::sqrt(var / trials)};
}

// A fixed deal order shared by serialization tests.
std::vector<card_t> fixed_deal(u32 n, u64 seed) {
  std::vector<card_t> v(n);
  for (u32 i = 0; i < n; ++i) v[i] = i + 1;
  Stream s(seed);
  shuffle(v, s);
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// Accumulator

TEST_CASE("accumulator recovers the unique missing value, every universe") {
  for (u32 w = 1; w <= 9; ++w) {
    for (u32 miss = 1; miss <= w; ++miss) {
      Accumulator a;
      a.init(w);
      for (u32 v = 1; v <= w; ++v)
        if (v != miss) a.add(v);
      CHECK(a.one_missing());
      CHECK(a.missing() == miss);
    }
  }
}

TEST_CASE("accumulator bit budget and reachable-state codes") {
  for (u32 w = 1; w <= 9; ++w) {
    Accumulator a;
    a.init(w);
    // Reachable states: empty, full, and (count in 1..w-1) x (sum in 0..w-1).
    u64 reachable = static_cast<u64>(w) * w - w + 2;
    CHECK((1ULL << a.bits()) >= reachable);

    // Every reachable state must round-trip through its code.
    std::set<u64> codes;
    for (u32 count = 0; count <= w; ++count) {
      for (u32 sum = 0; sum < w; ++sum) {
        if (count == 0 && sum != 0) continue;
        Accumulator b;
        b.init(w);
        b.count = count;
        b.sum = (count == w) ? b.total_mod : sum;
        u64 code = b.code();
        CHECK(code < (1ULL << b.bits()));
        codes.insert(code);
        Accumulator c;
        c.init(w);
        c.restore_code(code);
        CHECK(c.count == b.count);
        CHECK(c.sum == b.sum);
        if (count == w) break;  // full state has one canonical sum
      }
    }
    CHECK(codes.size() == reachable);
  }
}

TEST_CASE("accumulator bits formula") {
  Accumulator a;
  a.init(2);
  CHECK(a.bits() == 2);
  a.init(4);
  CHECK(a.bits() == 4);
  a.init(5);
  CHECK(a.bits() == 6);
  a.init(1024);
  CHECK(a.bits() == 20);
}

// ---------------------------------------------------------------------------
// Registry and factory

TEST_CASE("registry lists every strategy") {
  auto reg = guesser_registry();
  std::set<std::string> kinds(reg.begin(), reg.end());
  for (const char* k : {"memoryless", "perfect", "subset", "power_sum", "combined", "following",
                        "randomized", "amplified"})
    CHECK(kinds.count(k) == 1);
  CHECK(kinds.size() == 8);
}

TEST_CASE("factory validation") {
  auto streams = derive_streams(1, 0);
  GuesserSpec gs;
  gs.kind = "no-such-strategy";
  CHECK_THROWS_AS(
      make_guesser(gs, 64, streams.guesser_long_lived, streams.guesser_on_the_fly),
      ConfigError);
  gs.kind = "power_sum";
  gs.k = 0;
  CHECK_THROWS_AS(
      make_guesser(gs, 64, streams.guesser_long_lived, streams.guesser_on_the_fly),
      ConfigError);
}

TEST_CASE("determinism flags") {
  GuesserSpec gs;
  gs.kind = "following";
  CHECK(guesser_deterministic(gs));
  gs.kind = "memoryless";
  CHECK(guesser_deterministic(gs));
  for (const char* k : {"perfect", "subset", "randomized", "amplified", "combined"}) {
    gs.kind = k;
    CHECK_FALSE(guesser_deterministic(gs));
  }
}

// ---------------------------------------------------------------------------
// Strategy-specific layout oracles

TEST_CASE("memoryless guesser") {
  MemorylessGuesser g(16, 5);
  CHECK(g.guess(1) == 5);
  g.observe(5, 1);
  CHECK(g.guess(2) == 5);
  CHECK(g.state_bits() == 0);
  CHECK(g.serialize_state().empty());
  CHECK_THROWS_AS(MemorylessGuesser(4, 5), ConfigError);
  CHECK_THROWS_AS(MemorylessGuesser(4, 0), ConfigError);
}

TEST_CASE("perfect memory layout and behavior") {
  auto streams = derive_streams(3, 0);
  PerfectMemoryGuesser g(32, streams.guesser_on_the_fly);
  CHECK(g.state_bits() == 32);
  // After seeing all but one card, the guess is forced.
  for (card_t c = 1; c <= 31; ++c) g.observe(c, c);
  CHECK(g.guess(32) == 32);
}

TEST_CASE("subset guesser tracks exactly m sampled members") {
  auto streams = derive_streams(4, 0);
  SubsetGuesser g(256, 16, streams.guesser_long_lived, streams.guesser_on_the_fly);
  CHECK(g.state_bits() == 16);
  const auto& mem = g.members();
  REQUIRE(mem.size() == 16);
  CHECK(std::is_sorted(mem.begin(), mem.end()));
  CHECK(std::adjacent_find(mem.begin(), mem.end()) == mem.end());
  // Guesses come from the unseen members while any remain.
  std::set<card_t> members(mem.begin(), mem.end());
  CHECK(members.count(g.guess(1)) == 1);
  // m = n covers the whole deck; m > n is rejected.
  auto s2 = derive_streams(4, 1);
  SubsetGuesser whole(8, 8, s2.guesser_long_lived, s2.guesser_on_the_fly);
  CHECK(whole.members().size() == 8);
  auto s3 = derive_streams(4, 2);
  CHECK_THROWS_AS(SubsetGuesser(8, 64, s3.guesser_long_lived, s3.guesser_on_the_fly),
                  ConfigError);
}

TEST_CASE("following-subsets has the pinned 110-bit layout at n=1024") {
  FollowingSubsetsGuesser g(1024, 1.0);
  CHECK(g.state_bits() == 110);
  // Ranges double: 2, 4, ..., 1024.
  std::vector<u32> expect = {2, 4, 8, 16, 32, 64, 128, 256, 512, 1024};
  CHECK(g.range_sizes() == expect);

  // 110 bits fit a 110-bit budget but not 109 (strict serialization check).
  auto streams = derive_streams(5, 0);
  ShuffleDealer d1(1024, streams.dealer);
  GameConfig cfg{1024};
  cfg.memory_budget = 110;
  FollowingSubsetsGuesser g1(1024, 1.0);
  CHECK(memory_bound_holds(cfg, g1, d1));
  ShuffleDealer d2(1024, derive_streams(5, 1).dealer);
  cfg.memory_budget = 109;
  FollowingSubsetsGuesser g2(1024, 1.0);
  CHECK_FALSE(memory_bound_holds(cfg, g2, d2));
}

TEST_CASE("following-subsets is fully deterministic") {
  auto deal = fixed_deal(512, 99);
  std::vector<card_t> guesses1, guesses2;
  for (auto* out : {&guesses1, &guesses2}) {
    FollowingSubsetsGuesser g(512, 1.0);
    for (u32 t = 1; t <= 512; ++t) {
      out->push_back(g.guess(t));
      g.observe(deal[t - 1], t);
    }
  }
  CHECK(guesses1 == guesses2);
}

TEST_CASE("following-subsets range cap respects max_state_bits") {
  FollowingSubsetsGuesser full(1024, 1.0);
  FollowingSubsetsGuesser trimmed(1024, 1.0, 50);
  CHECK(trimmed.state_bits() <= 50);
  CHECK(trimmed.range_sizes().size() < full.range_sizes().size());
  // Trimming removes the largest ranges, keeping the smallest.
  CHECK(trimmed.range_sizes().front() == 2);
}

TEST_CASE("randomized-subsets core layout: log2^2 n - log2 n + 2") {
  auto s1 = derive_streams(6, 0);
  RandomizedSubsetsGuesser g1024(1024, s1.guesser_long_lived, s1.guesser_on_the_fly);
  CHECK(g1024.core_state_bits() == 92);  // 100 - 10 + 2
  CHECK(g1024.aux_allowance_bits() == 100);  // |A| = log2^2 n
  CHECK(g1024.state_bits() == 192);

  auto s2 = derive_streams(6, 1);
  RandomizedSubsetsGuesser g4096(4096, s2.guesser_long_lived, s2.guesser_on_the_fly);
  CHECK(g4096.core_state_bits() == 134);  // 144 - 12 + 2
  CHECK(g4096.aux_allowance_bits() == 144);
  CHECK(g4096.hash().a != 0);
}

TEST_CASE("amplified-subsets function count follows ceil(2.5 log2(1/delta))") {
  auto mk = [](double delta, u32 k) {
    auto s = derive_streams(8, 0);
    return AmplifiedSubsetsGuesser(4096, delta, k, s.guesser_long_lived, s.guesser_on_the_fly);
  };
  CHECK(mk(0.125, 24).function_count() == 8);   // ceil(2.5 * 3)
  CHECK(mk(0.25, 24).function_count() == 5);    // ceil(2.5 * 2)
  CHECK(mk(0.9, 24).function_count() == 1);     // floor to at least one
  CHECK(mk(0.125, 24).independence() == 24);
  CHECK(mk(0.125, 0).independence() == 24);     // default k = 2 log2 n
  auto g = mk(0.125, 24);
  CHECK(g.aux_allowance_bits() == 144);         // |A| = log2^2 n
  CHECK(g.state_bits() == g.bucket_state_bits() + 144);
}

TEST_CASE("combined guesser fits the largest power-sum layout in half the budget") {
  auto s = derive_streams(9, 0);
  CombinedGuesser g(65536, 256, s.guesser_long_lived, s.guesser_on_the_fly);
  // Half of 256 = 128 bits; power-sum layout k*17 + 17 <= 128 gives k = 6.
  CHECK(g.power_sum_k() == 6);
  CHECK(g.state_bits() <= 256);
}

TEST_CASE("shrunken domain formula and adapter behavior") {
  CHECK(shrunken_domain(16) == 16);   // 2^floor(sqrt(16))
  CHECK(shrunken_domain(10) == 8);    // 2^3
  CHECK(shrunken_domain(64) == 256);  // 2^8
  CHECK(shrunken_domain(1) == 2);

  // The adapter replays the inner strategy on the filtered subsequence.
  const u32 inner_n = 8;
  ShrunkenGuesser<FollowingSubsetsGuesser> wrapped(inner_n,
                                                   FollowingSubsetsGuesser(inner_n, 1.0));
  FollowingSubsetsGuesser direct(inner_n, 1.0);

  auto deal = fixed_deal(32, 17);
  u32 inner_t = 0;
  for (u32 t = 1; t <= 32; ++t) {
    card_t w = wrapped.guess(t);
    CHECK(w <= inner_n);  // never guesses outside the shrunken domain
    if (inner_t < inner_n) {
      CHECK(w == direct.guess(inner_t + 1));
    } else {
      CHECK(w == kFallbackCard);
    }
    wrapped.observe(deal[t - 1], t);
    if (deal[t - 1] <= inner_n && inner_t < inner_n) {
      direct.observe(deal[t - 1], inner_t + 1);
      ++inner_t;
    }
  }
}

TEST_CASE("factory builds the shrunken adapter and enforces its domain bound") {
  auto s = derive_streams(10, 0);
  GuesserSpec gs;
  gs.kind = "following";
  gs.shrink_m = 16;
  auto g = make_guesser(gs, 1024, s.guesser_long_lived, s.guesser_on_the_fly);
  CHECK(g->state_bits() <= 16);

  gs.shrink_m = 100;  // >= log2(n)^2 at n=1024
  CHECK_THROWS_AS(make_guesser(gs, 1024, s.guesser_long_lived, s.guesser_on_the_fly),
                  ConfigError);
}

// ---------------------------------------------------------------------------
// Serialization: restore into a fresh instance must reproduce the future.

TEST_CASE("serialization round trips preserve behavior") {
  const u32 n = 256;
  auto deal = fixed_deal(n, 1234);
  std::vector<GuesserSpec> specs;
  {
    GuesserSpec g;
    g.kind = "perfect";
    specs.push_back(g);
    g.kind = "subset";
    g.m = 16;
    specs.push_back(g);
    g.kind = "following";
    specs.push_back(g);
    g.kind = "randomized";
    specs.push_back(g);
    g.kind = "combined";
    g.m = 16;  // combined requires m <= sqrt(n)
    specs.push_back(g);
    g.kind = "power_sum";
    g.k = 3;
    specs.push_back(g);
    g.kind = "amplified";
    g.delta = 0.25;
    g.k = 0;  // default independence 2*log2(n)
    specs.push_back(g);
  }
  for (const auto& spec : specs) {
    CAPTURE(spec.kind);
    const u32 split = 100;
    auto streams = derive_streams(777, 0);
    auto a = make_guesser(spec, n, streams.guesser_long_lived, streams.guesser_on_the_fly);
    for (u32 t = 1; t <= split; ++t) {
      (void)a->guess(t);
      a->observe(deal[t - 1], t);
    }
    BitString snap = a->serialize_state();
    CHECK(snap.size() == a->state_bits());

    // Fresh instance, same long-lived randomness, restored state.
    auto streams2 = derive_streams(777, 0);
    auto b = make_guesser(spec, n, streams2.guesser_long_lived, streams2.guesser_on_the_fly);
    b->restore_state(snap);
    for (u32 t = split + 1; t <= n; ++t) {
      CHECK(a->guess(t) == b->guess(t));
      a->observe(deal[t - 1], t);
      b->observe(deal[t - 1], t);
    }
    CHECK(a->serialize_state() == b->serialize_state());
  }
}

TEST_CASE("restore rejects wrong-length states") {
  auto s = derive_streams(11, 0);
  FollowingSubsetsGuesser g(1024, 1.0);
  BitString wrong;
  wrong.append(0, 32);
  CHECK_THROWS_AS(g.restore_state(wrong), MalformedCodeword);
  SubsetGuesser sub(64, 8, s.guesser_long_lived, s.guesser_on_the_fly);
  CHECK_THROWS_AS(sub.restore_state(wrong), MalformedCodeword);
}

// ---------------------------------------------------------------------------
// Score-law oracles (statistical; generous 3-sigma bands around exact values)

TEST_CASE("perfect memory achieves the harmonic number H_n") {
  GuesserSpec gs;
  gs.kind = "perfect";
  DealerSpec ds;
  ds.kind = "shuffle";
  auto [mean, se] = mean_correct(gs, ds, 10, 100000, 2025);
  CHECK(std::abs(mean - harmonic(10)) <= 3 * se);  // H_10 = 2.9290
}

TEST_CASE("n=2 perfect memory scores exactly 1.5 in expectation") {
  GuesserSpec gs;
  gs.kind = "perfect";
  DealerSpec ds;
  ds.kind = "shuffle";
  auto [mean, se] = mean_correct(gs, ds, 2, 40000, 7);
  CHECK(std::abs(mean - 1.5) <= 3 * se);
}

TEST_CASE("subset strategy achieves H_m plus the exhausted-phase term") {
  // While members of A remain unseen, each A-draw is guessed correctly with
  // probability 1/(members left): H_m in total. Once A is exhausted the
  // strategy guesses uniformly, hitting with probability 1/n on each of the
  // E[(n-m)/(m+1)] remaining turns: (1 - m/n)/(m+1) in total.
  GuesserSpec gs;
  gs.kind = "subset";
  gs.m = 16;
  DealerSpec ds;
  ds.kind = "shuffle";
  auto [mean, se] = mean_correct(gs, ds, 64, 20000, 31);
  double expect = harmonic(16) + (1.0 - 16.0 / 64.0) / 17.0;
  CHECK(std::abs(mean - expect) <= 3 * se);
}

TEST_CASE("memoryless strategy scores exactly one against every dealer") {
  GuesserSpec gs;
  gs.kind = "memoryless";
  gs.fixed_card = 3;
  for (const char* kind : {"shuffle", "static"}) {
    DealerSpec ds;
    ds.kind = kind;
    auto [mean, se] = mean_correct(gs, ds, 32, 200, 5);
    CHECK(mean == 1.0);
    CHECK(se == 0.0);
  }
}
