#include "cardlab/harness.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "cardlab/engine.hpp"

namespace cardlab {

namespace {

// Per-worker integer tallies; merging is addition, so totals do not depend on
// how trials are partitioned across workers.
struct Sums {
  u64 trials = 0;
  u64 correct = 0;
  u64 correct_sq = 0;
  u64 reasonable = 0;
  u64 reasonable_sq = 0;
  u64 peak_bits = 0;
  std::vector<u64> ep_r, ep_r_sq, ep_c, ep_c_sq;
  u64 ep_total = 0;
  u64 ep_total_sq = 0;

  explicit Sums(size_t epochs = 0)
      : ep_r(epochs, 0), ep_r_sq(epochs, 0), ep_c(epochs, 0), ep_c_sq(epochs, 0) {}

  void merge(const Sums& o) {
    trials += o.trials;
    correct += o.correct;
    correct_sq += o.correct_sq;
    reasonable += o.reasonable;
    reasonable_sq += o.reasonable_sq;
    peak_bits = std::max(peak_bits, o.peak_bits);
    for (size_t i = 0; i < ep_r.size(); ++i) {
      ep_r[i] += o.ep_r[i];
      ep_r_sq[i] += o.ep_r_sq[i];
      ep_c[i] += o.ep_c[i];
      ep_c_sq[i] += o.ep_c_sq[i];
    }
    ep_total += o.ep_total;
    ep_total_sq += o.ep_total_sq;
  }
};

struct EpochWindow {
  u32 first = 0;  // turn range, inclusive
  u32 last = 0;
};

// One full game with tallying; G and D are concrete types on the fast path,
// so the engine loop and both strategies inline together.
template <class G, class D>
void play_counting(const GameConfig& cfg, G& guesser, D& dealer,
                   const std::vector<EpochWindow>& windows, Sums& sums) {
  u64 correct = 0;
  u64 reasonable = 0;
  std::vector<u64> er(windows.size(), 0), ec(windows.size(), 0);
  size_t wi = 0;
  const u64 peak =
      run_game(cfg, guesser, dealer, [&](u32 t, card_t, card_t, bool r, bool c) {
        correct += c;
        reasonable += r;
        while (wi < windows.size() && t > windows[wi].last) ++wi;
        if (wi < windows.size() && t >= windows[wi].first) {
          er[wi] += r;
          ec[wi] += c;
        }
      });
  ++sums.trials;
  sums.correct += correct;
  sums.correct_sq += correct * correct;
  sums.reasonable += reasonable;
  sums.reasonable_sq += reasonable * reasonable;
  sums.peak_bits = std::max(sums.peak_bits, peak);
  u64 total = 0;
  for (size_t i = 0; i < windows.size(); ++i) {
    sums.ep_r[i] += er[i];
    sums.ep_r_sq[i] += er[i] * er[i];
    sums.ep_c[i] += ec[i];
    sums.ep_c_sq[i] += ec[i] * ec[i];
    total += ec[i];
  }
  sums.ep_total += total;
  sums.ep_total_sq += total * total;
}

// Monomorphizing dispatch: resolve the dynamic types once per trial so the
// per-turn loop runs without virtual calls for the registry's concrete
// strategies. Unknown types (custom test doubles) fall back to the virtual
// loop, which is correct but slower.
template <class F>
bool with_concrete_guesser(Guesser& g, F&& f) {
  if (auto* p = dynamic_cast<FollowingSubsetsGuesser*>(&g)) return f(*p), true;
  if (auto* p = dynamic_cast<SubsetGuesser*>(&g)) return f(*p), true;
  if (auto* p = dynamic_cast<RandomizedSubsetsGuesser*>(&g)) return f(*p), true;
  if (auto* p = dynamic_cast<AmplifiedSubsetsGuesser*>(&g)) return f(*p), true;
  if (auto* p = dynamic_cast<PerfectMemoryGuesser*>(&g)) return f(*p), true;
  if (auto* p = dynamic_cast<MemorylessGuesser*>(&g)) return f(*p), true;
  if (auto* p = dynamic_cast<PowerSumGuesser*>(&g)) return f(*p), true;
  if (auto* p = dynamic_cast<CombinedGuesser*>(&g)) return f(*p), true;
  if (auto* p = dynamic_cast<ShrunkenGuesser<FollowingSubsetsGuesser>*>(&g))
    return f(*p), true;
  if (auto* p = dynamic_cast<ShrunkenAny*>(&g)) return f(*p), true;
  return false;
}

template <class F>
bool with_concrete_dealer(Dealer& d, F&& f) {
  if (auto* p = dynamic_cast<ShuffleDealer*>(&d)) return f(*p), true;
  if (auto* p = dynamic_cast<MtbeDealer*>(&d)) return f(*p), true;
  if (auto* p = dynamic_cast<MinOrderDealer*>(&d)) return f(*p), true;
  if (auto* p = dynamic_cast<StaticDealer*>(&d)) return f(*p), true;
  return false;
}

template <class D>
void run_one_with_dealer(const GameConfig& cfg, Guesser& g, D& d,
                         const std::vector<EpochWindow>& windows, Sums& sums) {
  const bool hit = with_concrete_guesser(
      g, [&](auto& gg) { play_counting(cfg, gg, d, windows, sums); });
  if (!hit) play_counting(cfg, g, d, windows, sums);
}

void run_one(const GameConfig& cfg, Guesser& g, Dealer& d,
             const std::vector<EpochWindow>& windows, Sums& sums) {
  const bool hit = with_concrete_dealer(
      d, [&](auto& dd) { run_one_with_dealer(cfg, g, dd, windows, sums); });
  if (!hit) run_one_with_dealer(cfg, g, d, windows, sums);
}

void mean_and_stderr(u64 sum, u64 sum_sq, u64 trials, double& mean,
                     double& stderr_out) {
  mean = static_cast<double>(sum) / static_cast<double>(trials);
  stderr_out = 0.0;
  if (trials > 1) {
    const double s = static_cast<double>(sum);
    const double var =
        (static_cast<double>(sum_sq) - s * s / static_cast<double>(trials)) /
        static_cast<double>(trials - 1);
    if (var > 0) stderr_out = std::sqrt(var / static_cast<double>(trials));
  }
}

}  // namespace

StatResult monte_carlo(const ExperimentConfig& config) {
  if (config.n == 0) throw ConfigError("monte_carlo: n must be >= 1");
  if (config.trials == 0) throw ConfigError("monte_carlo: trials must be >= 1");

  // Probe build: fail fast on infeasible schedules and fix the epoch layout
  // (the schedule is configuration-determined, identical across trials).
  std::vector<EpochWindow> windows;
  std::vector<EpochView> views;
  {
    RandomnessStreams rs = derive_streams(config.master_seed, 0);
    auto probe = make_dealer(config.dealer, config.n, rs.dealer);
    views = probe->epoch_views();
    for (const EpochView& v : views) {
      EpochWindow w;
      w.first = static_cast<u32>(config.n - v.cards_left_start + 1);
      w.last = static_cast<u32>(w.first + v.len - 1);
      windows.push_back(w);
    }
  }

  GameConfig game;
  game.n = config.n;
  game.memory_budget = config.memory_budget;
  game.strict_memory = config.strict_memory;

  const u64 trials = config.trials;
  unsigned workers = config.threads
                         ? config.threads
                         : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(
      std::min<u64>(workers, trials));

  auto run_block = [&](u64 lo, u64 hi, Sums& out) {
    Sums local(windows.size());
    for (u64 trial = lo; trial < hi; ++trial) {
      RandomnessStreams rs = derive_streams(config.master_seed, trial);
      auto guesser = make_guesser(config.guesser, config.n,
                                  rs.guesser_long_lived, rs.guesser_on_the_fly);
      auto dealer = make_dealer(config.dealer, config.n, rs.dealer);
      run_one(game, *guesser, *dealer, windows, local);
    }
    out = std::move(local);
  };

  Sums total(windows.size());
  if (workers <= 1) {
    run_block(0, trials, total);
  } else {
    std::vector<Sums> parts(workers, Sums(windows.size()));
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      const u64 lo = trials * w / workers;
      const u64 hi = trials * (w + 1) / workers;
      pool.emplace_back([&, w, lo, hi]() {
        try {
          run_block(lo, hi, parts[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (const Sums& p : parts) total.merge(p);
  }

  StatResult r;
  r.trials = trials;
  mean_and_stderr(total.correct, total.correct_sq, trials, r.mean_correct,
                  r.stderr_correct);
  mean_and_stderr(total.reasonable, total.reasonable_sq, trials,
                  r.mean_reasonable, r.stderr_reasonable);
  r.peak_state_bits = total.peak_bits;
  for (size_t i = 0; i < windows.size(); ++i) {
    EpochStat e;
    e.cards_left_start = views[i].cards_left_start;
    e.len = views[i].len;
    mean_and_stderr(total.ep_r[i], total.ep_r_sq[i], trials, e.mean_reasonable,
                    e.stderr_reasonable);
    mean_and_stderr(total.ep_c[i], total.ep_c_sq[i], trials, e.mean_correct,
                    e.stderr_correct);
    r.epochs.push_back(e);
  }
  if (!windows.empty())
    mean_and_stderr(total.ep_total, total.ep_total_sq, trials,
                    r.mean_epoch_correct_total, r.stderr_epoch_correct_total);
  return r;
}

// ---------------------------------------------------------------------------
// Theory curves.

double theory_curve(const std::string& name, const TheoryParams& p) {
  const double n = p.n;
  const double m = p.m;
  const double d = p.delta;
  if (name == "half_log") return 0.5 * std::log2(n);
  if (name == "general_delta")
    return d / ((1.0 + d) * std::log1p(d)) * std::log(n);
  if (name == "quarter_ln") return 0.25 * std::log(n);
  if (name == "subset") return std::log(m);
  if (name == "combined") return 2.0 * std::log(m) - std::log(std::log2(n));
  if (name == "static_bound") return 2.0 * std::sqrt(m + 1.0) + 2.0;
  if (name == "adaptive_bound")
    return std::log(m) + 2.0 * std::log(std::log2(n)) +
           std::log(16.0) + 1.0;  // ln 16e = ln 16 + 1
  if (name == "universal_bound") return 8.0 * std::log(std::log2(n));
  throw UnknownCurve("unknown theory curve: " + name);
}

std::pair<std::string, double> default_theory(const GuesserSpec& guesser,
                                              const DealerSpec& dealer, u32 n,
                                              u64 m, double delta) {
  const TheoryParams p{static_cast<double>(n), static_cast<double>(m), delta};
  auto pick = [&](const char* name) {
    return std::make_pair(std::string(name), theory_curve(name, p));
  };
  const auto none = std::make_pair(
      std::string(), std::numeric_limits<double>::quiet_NaN());
  if (dealer.kind == "mtbe" || dealer.kind == "mtbe-minorder")
    return m > 0 ? pick("adaptive_bound") : none;
  if (dealer.kind == "universal") return pick("universal_bound");
  if (dealer.kind == "static-adversarial")
    return m > 0 ? pick("static_bound") : none;
  if (guesser.kind == "following")
    return delta == 1.0 ? pick("half_log") : pick("general_delta");
  if (guesser.kind == "randomized") return pick("quarter_ln");
  if (guesser.kind == "subset") return m > 0 ? pick("subset") : none;
  if (guesser.kind == "combined") return m > 0 ? pick("combined") : none;
  return none;
}

// ---------------------------------------------------------------------------
// Sweeps.

const char* const kSweepCsvHeader =
    "guesser,dealer,n,m,delta,trials,mean_correct,stderr_correct,"
    "mean_reasonable,stderr_reasonable,theory_name,theory_value,error";

namespace {

std::string format_double(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string dealer_label(const DealerSpec& d) {
  if (d.kind == "static") return d.kind + ":" + d.arrangement;
  return d.kind;
}

}  // namespace

std::vector<SweepCell> expand_grid(const SweepGrid& grid) {
  std::vector<SweepCell> cells;
  for (const GuesserSpec& g : grid.guessers)
    for (const DealerSpec& d : grid.dealers)
      for (u32 n : grid.ns)
        for (u64 m : grid.ms) {
          SweepCell c;
          c.guesser = g;
          c.dealer = d;
          c.n = n;
          c.m = m;
          c.trials = grid.trials;
          c.guesser.m = m;
          c.dealer.m = m;
          cells.push_back(c);
        }
  return cells;
}

std::string sweep_row(const SweepCell& cell, u64 master_seed,
                      bool strict_memory, unsigned threads) {
  std::ostringstream row;
  row << cell.guesser.kind << ',' << dealer_label(cell.dealer) << ',' << cell.n
      << ',' << cell.m << ',' << format_double(cell.guesser.delta) << ','
      << cell.trials << ',';

  ExperimentConfig cfg;
  cfg.guesser = cell.guesser;
  cfg.dealer = cell.dealer;
  cfg.n = cell.n;
  cfg.m = cell.m;
  cfg.trials = cell.trials;
  cfg.master_seed = master_seed;
  cfg.strict_memory = strict_memory;
  cfg.threads = threads;

  std::string error;
  StatResult stats;
  try {
    stats = monte_carlo(cfg);
  } catch (const Infeasible&) {
    error = "infeasible";
  } catch (const MemoryBudgetExceeded&) {
    error = "memory-exceeded";
  } catch (const ConfigError&) {
    error = "config-error";
  } catch (const Error&) {
    error = "error";
  }

  auto theory = default_theory(cell.guesser, cell.dealer, cell.n, cell.m,
                               cell.guesser.delta);
  if (!error.empty()) {
    row << ",,,," << theory.first << ",," << error;
    return row.str();
  }
  row << format_double(stats.mean_correct) << ','
      << format_double(stats.stderr_correct) << ','
      << format_double(stats.mean_reasonable) << ','
      << format_double(stats.stderr_reasonable) << ',' << theory.first << ',';
  if (!theory.first.empty()) row << format_double(theory.second);
  row << ',';
  return row.str();
}

void sweep_cells(const std::vector<SweepCell>& cells, u64 master_seed,
                 bool strict_memory, unsigned threads, std::ostream& os) {
  os << kSweepCsvHeader << '\n';
  for (const SweepCell& c : cells)
    os << sweep_row(c, master_seed, strict_memory, threads) << '\n';
}

void sweep(const SweepGrid& grid, std::ostream& os) {
  sweep_cells(expand_grid(grid), grid.master_seed, grid.strict_memory,
              grid.threads, os);
}

}  // namespace cardlab
