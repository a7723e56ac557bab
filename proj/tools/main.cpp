// Command-line front end: simulate | sweep | params | codec-roundtrip.
// Exit codes: 0 success, 1 usage error or failed round trip, 2 infeasible or
// invalid configuration.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cardlab/codec.hpp"
#include "cardlab/harness.hpp"

namespace {

using namespace cardlab;

struct CommonOptions {
  GuesserSpec guesser;
  DealerSpec dealer;
  u32 n = 1024;
  u64 m = 0;
  u64 trials = 100;
  u64 seed = 1;
  double delta = 1.0;
  bool strict = false;
  unsigned threads = 0;
};

void add_guesser_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--guesser", o.guesser.kind, "Guesser kind")
      ->check(CLI::IsMember(guesser_registry()));
  cmd->add_option("--delta", o.delta, "Range growth (following) / failure bound (amplified)");
  cmd->add_option("--k", o.guesser.k, "Tracked power sums / hash independence");
  cmd->add_option("--fixed-card", o.guesser.fixed_card, "Memoryless guesser's card");
  cmd->add_option("--shrink-m", o.guesser.shrink_m,
                  "Wrap in the shrunken-domain adapter with this bit budget");
}

void add_dealer_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--dealer", o.dealer.kind, "Dealer kind")
      ->check(CLI::IsMember(dealer_registry()));
  cmd->add_option("--arrangement", o.dealer.arrangement,
                  "Static dealer arrangement: identity|reverse|bitrev|random|file");
  cmd->add_option("--arrangement-file", o.dealer.arrangement_file,
                  "Arrangement file (one card label per line)");
}

ExperimentConfig to_config(CommonOptions& o) {
  o.guesser.delta = o.delta;
  o.guesser.m = o.m;
  o.dealer.m = o.m;
  o.dealer.target = o.guesser;
  ExperimentConfig cfg;
  cfg.guesser = o.guesser;
  cfg.dealer = o.dealer;
  cfg.n = o.n;
  cfg.m = o.m;
  cfg.trials = o.trials;
  cfg.master_seed = o.seed;
  cfg.strict_memory = o.strict;
  cfg.threads = o.threads;
  return cfg;
}

int run_simulate(CommonOptions& o, const std::string& csv_path) {
  ExperimentConfig cfg = to_config(o);
  StatResult r = monte_carlo(cfg);

  std::printf("guesser=%s dealer=%s n=%u m=%llu trials=%llu seed=%llu\n",
              cfg.guesser.kind.c_str(), cfg.dealer.kind.c_str(), cfg.n,
              static_cast<unsigned long long>(cfg.m),
              static_cast<unsigned long long>(cfg.trials),
              static_cast<unsigned long long>(cfg.master_seed));
  std::printf("%-18s %10.4f  (stderr %.4f)\n", "mean_correct", r.mean_correct,
              r.stderr_correct);
  std::printf("%-18s %10.4f  (stderr %.4f)\n", "mean_reasonable",
              r.mean_reasonable, r.stderr_reasonable);
  std::printf("%-18s %10llu\n", "peak_state_bits",
              static_cast<unsigned long long>(r.peak_state_bits));
  auto theory = default_theory(cfg.guesser, cfg.dealer, cfg.n, cfg.m, o.delta);
  if (!theory.first.empty())
    std::printf("theory[%s] = %.4f\n", theory.first.c_str(), theory.second);
  if (!r.epochs.empty()) {
    std::printf("%5s %12s %6s %16s %14s\n", "epoch", "cards_left", "len",
                "mean_reasonable", "mean_correct");
    for (size_t i = 0; i < r.epochs.size(); ++i)
      std::printf("%5zu %12llu %6llu %16.4f %14.4f\n", i + 1,
                  static_cast<unsigned long long>(r.epochs[i].cards_left_start),
                  static_cast<unsigned long long>(r.epochs[i].len),
                  r.epochs[i].mean_reasonable, r.epochs[i].mean_correct);
    std::printf("%-18s %10.4f  (stderr %.4f)\n", "epoch_correct_sum",
                r.mean_epoch_correct_total, r.stderr_epoch_correct_total);
  }

  if (!csv_path.empty()) {
    std::ofstream out(csv_path);
    if (!out) throw ConfigError("cannot write CSV file: " + csv_path);
    SweepCell cell{cfg.guesser, cfg.dealer, cfg.n, cfg.m, cfg.trials};
    sweep_cells({cell}, cfg.master_seed, cfg.strict_memory, cfg.threads, out);
  }
  return 0;
}

std::vector<SweepCell> load_grid_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open grid file: " + path);
  std::vector<SweepCell> cells;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError("grid file line " + std::to_string(lineno) + ": " +
                        e.what());
    }
    SweepCell c;
    c.guesser.kind = j.at("guesser").get<std::string>();
    c.dealer.kind = j.at("dealer").get<std::string>();
    c.n = j.at("n").get<u32>();
    c.m = j.value("m", 0ULL);
    c.guesser.delta = j.value("delta", 1.0);
    c.trials = j.value("trials", 100ULL);
    c.guesser.m = c.m;
    c.dealer.m = c.m;
    c.dealer.arrangement = j.value("arrangement", std::string("random"));
    c.dealer.target = c.guesser;
    cells.push_back(c);
  }
  return cells;
}

int run_sweep(const std::string& grid_file, std::vector<std::string>& guessers,
              std::vector<std::string>& dealers, std::vector<u32>& ns,
              std::vector<u64>& ms, u64 trials, u64 seed, double delta,
              bool strict, unsigned threads, const std::string& out_path) {
  std::vector<SweepCell> cells;
  if (!grid_file.empty()) {
    cells = load_grid_file(grid_file);
  } else {
    if (guessers.empty() || dealers.empty() || ns.empty())
      throw CLI::ValidationError(
          "sweep", "needs --grid or at least --guesser, --dealer and --n");
    SweepGrid grid;
    for (const auto& g : guessers) {
      GuesserSpec s;
      s.kind = g;
      s.delta = delta;
      grid.guessers.push_back(s);
    }
    for (const auto& d : dealers) {
      DealerSpec s;
      s.kind = d;
      grid.dealers.push_back(s);
    }
    grid.ns = ns;
    grid.ms = ms.empty() ? std::vector<u64>{0} : ms;
    grid.trials = trials;
    grid.master_seed = seed;
    grid.strict_memory = strict;
    grid.threads = threads;
    cells = expand_grid(grid);
    for (auto& c : cells) c.dealer.target = c.guesser;
  }
  if (out_path.empty()) {
    sweep_cells(cells, seed, strict, threads, std::cout);
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write CSV file: " + out_path);
    sweep_cells(cells, seed, strict, threads, out);
  }
  return 0;
}

int run_params(const std::string& dealer, u64 n, u64 m) {
  if (dealer == "mtbe" || dealer == "mtbe-minorder") {
    MtbeSchedule s = mtbe_params(n, m);
    std::printf("k1=%llu ell=%llu d=%llu cutoff=%llu\n",
                static_cast<unsigned long long>(s.k1),
                static_cast<unsigned long long>(s.ell),
                static_cast<unsigned long long>(s.d),
                static_cast<unsigned long long>(s.final_cutoff));
    for (size_t i = 0; i < s.epochs.size(); ++i)
      std::printf("epoch %zu: k=%llu ell=%llu u=%llu\n", i + 1,
                  static_cast<unsigned long long>(s.epochs[i].k),
                  static_cast<unsigned long long>(s.epochs[i].ell),
                  static_cast<unsigned long long>(s.epochs[i].u));
    return 0;
  }
  if (dealer == "universal") {
    UniversalSchedule s = universal_params(n);
    std::printf("d=%llu tail_cutoff=%llu\n",
                static_cast<unsigned long long>(s.d),
                static_cast<unsigned long long>(s.tail_cutoff));
    for (size_t i = 0; i < s.epochs.size(); ++i)
      std::printf("epoch %zu: k=%llu ell=%llu u=%llu\n", i + 1,
                  static_cast<unsigned long long>(s.epochs[i].k),
                  static_cast<unsigned long long>(s.epochs[i].ell),
                  static_cast<unsigned long long>(s.epochs[i].u));
    return 0;
  }
  throw ConfigError("params supports dealers mtbe, mtbe-minorder, universal");
}

// Toy contiguous schedule for unordered round trips: epochs of length 2 with
// move-back budget 2 starting at k1 = k.
std::vector<EpochParams> toy_schedule(u32 n, u32 k) {
  std::vector<EpochParams> epochs;
  u64 cur = k;
  while (epochs.size() < 2 && cur >= 4 && cur <= n) {
    epochs.push_back({cur, 2, 2});
    cur -= 2;
  }
  if (epochs.empty()) throw ConfigError("codec-roundtrip: k too small for the toy schedule");
  validate_schedule(epochs, n);
  return epochs;
}

int run_codec_roundtrip(const std::string& codec, u32 n, u32 k, u32 alpha,
                        u64 trials, u64 seed) {
  u64 pass = 0, fail = 0;
  std::map<u64, u64> lengths;
  for (u64 t = 0; t < trials; ++t) {
    RandomnessStreams rs = derive_streams(seed, t);
    const u64 gamma = rs.dealer.next_u64();
    if (codec == "ordered") {
      GuesserSpec spec;
      spec.kind = "perfect";
      std::vector<card_t> deck(n);
      for (u32 i = 0; i < n; ++i) deck[i] = i + 1;
      shuffle(deck, rs.dealer);
      std::vector<card_t> prefix(deck.begin(), deck.end() - k);
      std::vector<card_t> suffix(deck.end() - k, deck.end());
      BitString bits = encode_ordered(suffix, prefix, spec, gamma, alpha, n);
      ++lengths[bits.size()];
      (decode_ordered(bits, spec, gamma, alpha, k, n) == suffix) ? ++pass : ++fail;
    } else if (codec == "unordered") {
      GuesserSpec spec;
      spec.kind = "subset";
      spec.m = 2;
      std::vector<EpochParams> epochs = toy_schedule(n, k);
      const u32 epoch_index = 1 + static_cast<u32>(t % epochs.size());
      std::vector<card_t> reserved = sample_distinct_cards(n, k, rs.dealer);
      PrioritySource prio = PrioritySource::keyed(rs.dealer.next_u64());
      BitString bits =
          encode_unordered(reserved, spec, gamma, prio, alpha, epoch_index, epochs, n);
      ++lengths[bits.size()];
      (decode_unordered(bits, spec, gamma, prio, alpha, epoch_index, epochs, n) ==
       reserved)
          ? ++pass
          : ++fail;
    } else {
      throw ConfigError("codec must be ordered or unordered");
    }
  }
  std::printf("pass=%llu fail=%llu\n", static_cast<unsigned long long>(pass),
              static_cast<unsigned long long>(fail));
  for (const auto& [len, count] : lengths)
    std::printf("length %llu: %llu\n", static_cast<unsigned long long>(len),
                static_cast<unsigned long long>(count));
  return fail == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Memory-bounded card-guessing simulation laboratory"};
  app.require_subcommand(1);

  CommonOptions opt;
  std::string csv_path;

  CLI::App* sim = app.add_subcommand("simulate", "Run one Monte Carlo experiment");
  add_guesser_flags(sim, opt);
  add_dealer_flags(sim, opt);
  sim->add_option("--n", opt.n, "Deck size")->required();
  sim->add_option("--m", opt.m, "Memory parameter (bits)");
  sim->add_option("--trials", opt.trials, "Number of games");
  sim->add_option("--seed", opt.seed, "Master seed");
  sim->add_option("--threads", opt.threads, "Worker threads (0 = auto)");
  sim->add_flag("--strict", opt.strict, "Serialize and audit state every turn");
  sim->add_option("--csv", csv_path, "Also write the result as a CSV row");

  std::string grid_file, out_path;
  std::vector<std::string> sweep_guessers, sweep_dealers;
  std::vector<u32> sweep_ns;
  std::vector<u64> sweep_ms;
  u64 sweep_trials = 100, sweep_seed = 1;
  double sweep_delta = 1.0;
  bool sweep_strict = false;
  unsigned sweep_threads = 0;

  CLI::App* sw = app.add_subcommand("sweep", "Run a parameter grid, emit CSV");
  sw->add_option("--grid", grid_file, "Grid file: one JSON record per line");
  sw->add_option("--guesser", sweep_guessers, "Guesser kinds");
  sw->add_option("--dealer", sweep_dealers, "Dealer kinds");
  sw->add_option("--n", sweep_ns, "Deck sizes");
  sw->add_option("--m", sweep_ms, "Memory parameters");
  sw->add_option("--trials", sweep_trials, "Trials per cell");
  sw->add_option("--seed", sweep_seed, "Master seed");
  sw->add_option("--delta", sweep_delta, "Delta applied to every guesser");
  sw->add_flag("--strict", sweep_strict, "Strict memory audits");
  sw->add_option("--threads", sweep_threads, "Worker threads (0 = auto)");
  sw->add_option("--out", out_path, "CSV output file (default stdout)");

  std::string params_dealer = "mtbe";
  u64 params_n = 0, params_m = 0;
  CLI::App* pa = app.add_subcommand("params", "Print a dealer's epoch schedule");
  pa->add_option("--dealer", params_dealer, "mtbe | mtbe-minorder | universal");
  pa->add_option("--n", params_n, "Deck size")->required();
  pa->add_option("--m", params_m, "Targeted guesser budget (mtbe)");

  std::string codec_kind = "ordered";
  u32 codec_n = 12, codec_k = 6, codec_alpha = 2;
  u64 codec_trials = 1000, codec_seed = 1;
  CLI::App* co = app.add_subcommand("codec-roundtrip", "Exercise a codec on random instances");
  co->add_option("--codec", codec_kind, "ordered | unordered")
      ->check(CLI::IsMember({"ordered", "unordered"}));
  co->add_option("--n", codec_n, "Domain size");
  co->add_option("--k", codec_k, "Suffix / reserved-set size");
  co->add_option("--alpha", codec_alpha, "Tagged-guess count");
  co->add_option("--trials", codec_trials, "Instances");
  co->add_option("--seed", codec_seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(opt, csv_path);
    if (sw->parsed())
      return run_sweep(grid_file, sweep_guessers, sweep_dealers, sweep_ns,
                       sweep_ms, sweep_trials, sweep_seed, sweep_delta,
                       sweep_strict, sweep_threads, out_path);
    if (pa->parsed()) return run_params(params_dealer, params_n, params_m);
    if (co->parsed())
      return run_codec_roundtrip(codec_kind, codec_n, codec_k, codec_alpha,
                                 codec_trials, codec_seed);
  } catch (const Infeasible& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
