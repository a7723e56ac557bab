#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "cardlab/engine.hpp"
#include "cardlab/harness.hpp"

using namespace cardlab;

namespace {

ExperimentConfig basic_config(const char* guesser, const char* dealer, u32 n,
                              u64 m, u64 trials, u64 seed) {
  ExperimentConfig cfg;
  cfg.guesser.kind = guesser;
  cfg.guesser.m = m;
  cfg.dealer.kind = dealer;
  cfg.dealer.m = m;
  cfg.dealer.target = cfg.guesser;
  cfg.n = n;
  cfg.m = m;
  cfg.trials = trials;
  cfg.master_seed = seed;
  return cfg;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

// ---------------------------------------------------------------------------
// Monte Carlo

TEST_CASE("memoryless guesser scores exactly one with zero variance") {
  StatResult r = monte_carlo(basic_config("memoryless", "shuffle", 64, 0, 50, 3));
  CHECK(r.trials == 50);
  CHECK(r.mean_correct == 1.0);
  CHECK(r.stderr_correct == 0.0);
  CHECK(r.epochs.empty());
}

TEST_CASE("results are identical for any thread count") {
  ExperimentConfig cfg = basic_config("subset", "shuffle", 256, 16, 40, 11);
  cfg.threads = 1;
  StatResult a = monte_carlo(cfg);
  cfg.threads = 4;
  StatResult b = monte_carlo(cfg);
  CHECK(a.mean_correct == b.mean_correct);
  CHECK(a.stderr_correct == b.stderr_correct);
  CHECK(a.mean_reasonable == b.mean_reasonable);
  CHECK(a.stderr_reasonable == b.stderr_reasonable);
  CHECK(a.peak_state_bits == b.peak_state_bits);
}

TEST_CASE("monte_carlo equals a hand-rolled trial loop") {
  const u32 n = 64;
  const u64 trials = 20, seed = 5;
  ExperimentConfig cfg = basic_config("subset", "shuffle", n, 8, trials, seed);
  StatResult r = monte_carlo(cfg);

  u64 sum = 0, sum_sq = 0;
  for (u64 t = 0; t < trials; ++t) {
    RandomnessStreams rs = derive_streams(seed, t);
    auto g = make_guesser(cfg.guesser, n, rs.guesser_long_lived, rs.guesser_on_the_fly);
    auto d = make_dealer(cfg.dealer, n, rs.dealer);
    GameConfig game{n};
    ScoreSummary s = play_game_scored(game, *g, *d);
    sum += s.correct;
    sum_sq += s.correct * s.correct;
  }
  const double mean = static_cast<double>(sum) / trials;
  CHECK(r.mean_correct == mean);
  const double var =
      (static_cast<double>(sum_sq) - mean * mean * trials) / (trials - 1);
  CHECK(r.stderr_correct ==
        doctest::Approx(std::sqrt(var / trials)).epsilon(1e-12));
}

TEST_CASE("strict mode reports the serialized peak") {
  ExperimentConfig cfg = basic_config("following", "shuffle", 256, 0, 5, 9);
  cfg.strict_memory = true;
  StatResult r = monte_carlo(cfg);
  RandomnessStreams rs = derive_streams(9, 0);
  auto g = make_guesser(cfg.guesser, 256, rs.guesser_long_lived, rs.guesser_on_the_fly);
  CHECK(r.peak_state_bits == g->state_bits());
}

TEST_CASE("infeasible schedules propagate out of monte_carlo") {
  CHECK_THROWS_AS(monte_carlo(basic_config("subset", "mtbe", 1u << 16, 16, 1, 1)),
                  Infeasible);
}

TEST_CASE("epoch statistics align with the dealer's schedule") {
  const u32 n = 1u << 17;
  ExperimentConfig cfg = basic_config("subset", "mtbe", n, 2, 3, 13);
  StatResult r = monte_carlo(cfg);
  MtbeSchedule sched = mtbe_params(n, 2);
  REQUIRE(r.epochs.size() == sched.epochs.size());
  for (size_t i = 0; i < r.epochs.size(); ++i) {
    CHECK(r.epochs[i].cards_left_start == sched.epochs[i].k);
    CHECK(r.epochs[i].len == sched.epochs[i].ell);
    CHECK(r.epochs[i].mean_reasonable >= 0.0);
    CHECK(r.epochs[i].mean_reasonable <= static_cast<double>(sched.epochs[i].ell));
    CHECK(r.epochs[i].mean_correct <= r.epochs[i].mean_reasonable);
  }
  CHECK(r.mean_epoch_correct_total >= 0.0);
  CHECK(r.mean_epoch_correct_total <= r.mean_correct);
}

// ---------------------------------------------------------------------------
// Theory curves

TEST_CASE("theory curve values") {
  CHECK(theory_curve("half_log", {1024, 0, 1}) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(theory_curve("quarter_ln", {1024, 0, 1}) ==
        doctest::Approx(0.25 * std::log(1024.0)).epsilon(1e-12));
  CHECK(theory_curve("subset", {4096, 64, 1}) ==
        doctest::Approx(std::log(64.0)).epsilon(1e-12));
  CHECK(theory_curve("combined", {65536, 64, 1}) ==
        doctest::Approx(2 * std::log(64.0) - std::log(16.0)).epsilon(1e-12));
  CHECK(theory_curve("static_bound", {4096, 16, 1}) ==
        doctest::Approx(2 * std::sqrt(17.0) + 2).epsilon(1e-12));
  CHECK(theory_curve("adaptive_bound", {1048576, 16, 1}) ==
        doctest::Approx(12.5366).epsilon(1e-4));
  CHECK(theory_curve("universal_bound", {4294967296.0, 0, 1}) ==
        doctest::Approx(8 * std::log(32.0)).epsilon(1e-12));
  // At delta=1 the general form collapses to half_log.
  CHECK(theory_curve("general_delta", {1024, 0, 1}) ==
        doctest::Approx(5.0).epsilon(1e-12));
  CHECK(theory_curve("general_delta", {256, 0, 3}) ==
        doctest::Approx(3.0 / (4.0 * std::log(4.0)) * std::log(256.0)).epsilon(1e-12));
  CHECK_THROWS_AS(theory_curve("no_such_curve", {64, 0, 1}), UnknownCurve);
}

TEST_CASE("default theory resolves dealer bounds before guesser curves") {
  GuesserSpec g;
  DealerSpec d;

  g.kind = "subset";
  d.kind = "mtbe";
  auto t = default_theory(g, d, 1u << 20, 16, 1.0);
  CHECK(t.first == "adaptive_bound");
  CHECK(t.second == doctest::Approx(12.5366).epsilon(1e-4));
  d.kind = "mtbe-minorder";
  CHECK(default_theory(g, d, 1u << 20, 16, 1.0).first == "adaptive_bound");
  d.kind = "universal";
  CHECK(default_theory(g, d, 1024, 16, 1.0).first == "universal_bound");
  d.kind = "static-adversarial";
  CHECK(default_theory(g, d, 1024, 16, 1.0).first == "static_bound");

  d.kind = "shuffle";
  g.kind = "following";
  CHECK(default_theory(g, d, 1024, 0, 1.0).first == "half_log");
  CHECK(default_theory(g, d, 1024, 0, 2.0).first == "general_delta");
  g.kind = "randomized";
  CHECK(default_theory(g, d, 1024, 0, 1.0).first == "quarter_ln");
  g.kind = "subset";
  CHECK(default_theory(g, d, 1024, 16, 1.0).first == "subset");
  g.kind = "combined";
  CHECK(default_theory(g, d, 65536, 16, 1.0).first == "combined");

  g.kind = "memoryless";
  auto none = default_theory(g, d, 1024, 0, 1.0);
  CHECK(none.first.empty());
  CHECK(std::isnan(none.second));
}

// ---------------------------------------------------------------------------
// Sweeps and CSV

TEST_CASE("CSV header is frozen") {
  CHECK(std::string(kSweepCsvHeader) ==
        "guesser,dealer,n,m,delta,trials,mean_correct,stderr_correct,"
        "mean_reasonable,stderr_reasonable,theory_name,theory_value,error");
}

TEST_CASE("expand_grid is guesser-major and stamps m into both specs") {
  SweepGrid grid;
  GuesserSpec g1, g2;
  g1.kind = "subset";
  g2.kind = "following";
  grid.guessers = {g1, g2};
  DealerSpec d1, d2;
  d1.kind = "shuffle";
  d2.kind = "static";
  grid.dealers = {d1, d2};
  grid.ns = {8, 16};
  grid.ms = {1, 2};
  grid.trials = 7;
  auto cells = expand_grid(grid);
  REQUIRE(cells.size() == 16);
  CHECK(cells[0].guesser.kind == "subset");
  CHECK(cells[0].dealer.kind == "shuffle");
  CHECK(cells[0].n == 8);
  CHECK(cells[0].m == 1);
  CHECK(cells[0].guesser.m == 1);
  CHECK(cells[0].dealer.m == 1);
  CHECK(cells[0].trials == 7);
  CHECK(cells[1].m == 2);        // m fastest
  CHECK(cells[2].n == 16);       // then n
  CHECK(cells[4].dealer.kind == "static");  // then dealer
  CHECK(cells[8].guesser.kind == "following");
}

TEST_CASE("sweep_row success format") {
  SweepCell cell;
  cell.guesser.kind = "subset";
  cell.guesser.m = 4;
  cell.dealer.kind = "shuffle";
  cell.n = 64;
  cell.m = 4;
  cell.trials = 10;
  std::string row = sweep_row(cell, 21, false, 1);
  auto f = split_csv(row);
  REQUIRE(f.size() == 13);
  CHECK(f[0] == "subset");
  CHECK(f[1] == "shuffle");
  CHECK(f[2] == "64");
  CHECK(f[3] == "4");
  CHECK(f[4] == "1");
  CHECK(f[5] == "10");
  CHECK(std::stod(f[6]) > 0.0);
  CHECK(f[10] == "subset");
  CHECK(std::stod(f[11]) == doctest::Approx(std::log(4.0)).epsilon(1e-9));
  CHECK(f[12].empty());
}

TEST_CASE("static dealers are labeled with their arrangement") {
  SweepCell cell;
  cell.guesser.kind = "memoryless";
  cell.dealer.kind = "static";
  cell.dealer.arrangement = "bitrev";
  cell.n = 16;
  cell.trials = 2;
  auto f = split_csv(sweep_row(cell, 1, false, 1));
  CHECK(f[1] == "static:bitrev");
}

TEST_CASE("sweep_row reports infeasible cells and keeps the stat columns empty") {
  SweepCell cell;
  cell.guesser.kind = "subset";
  cell.guesser.m = 16;
  cell.dealer.kind = "mtbe";
  cell.dealer.m = 16;
  cell.n = 1u << 16;
  cell.m = 16;
  cell.trials = 5;
  auto f = split_csv(sweep_row(cell, 1, false, 1));
  REQUIRE(f.size() == 13);
  for (int i = 6; i <= 9; ++i) CHECK(f[i].empty());
  CHECK(f[10] == "adaptive_bound");
  CHECK(f[11].empty());
  CHECK(f[12] == "infeasible");
}

TEST_CASE("sweep writes a header and continues past failures") {
  SweepGrid grid;
  GuesserSpec g;
  g.kind = "subset";
  grid.guessers = {g};
  DealerSpec shuffle_d, mtbe_d;
  shuffle_d.kind = "shuffle";
  mtbe_d.kind = "mtbe";
  grid.dealers = {mtbe_d, shuffle_d};  // infeasible cells first
  grid.ns = {1u << 16};
  grid.ms = {16};
  grid.trials = 3;
  grid.master_seed = 2;

  std::ostringstream out;
  sweep(grid, out);
  std::istringstream in(out.str());
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == kSweepCsvHeader);
  CHECK(split_csv(lines[1])[12] == "infeasible");
  CHECK(split_csv(lines[2])[12].empty());  // the later cell still ran

  // Byte-determinism of the whole emission.
  std::ostringstream again;
  sweep(grid, again);
  CHECK(out.str() == again.str());
}
