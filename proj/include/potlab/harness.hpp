#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "potlab/bayesian.hpp"
#include "potlab/dynamics.hpp"
#include "potlab/econ.hpp"
#include "potlab/game.hpp"
#include "potlab/hodge.hpp"
#include "potlab/io.hpp"
#include "potlab/operator_cache.hpp"
#include "potlab/random.hpp"

namespace potlab {

inline constexpr const char* kVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Scheduling

/// Runs fn(k) for k in [0, count) on `jobs` threads. Callers write results
/// into slot k, so output order never depends on scheduling.
inline void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t k = 0; k < count; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < count; k = next++) {
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// Statistics

inline double mean(const std::vector<double>& x) {
  if (x.empty()) return std::nan("");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

/// Unbiased sample variance.
inline double variance(const std::vector<double>& x) {
  if (x.size() < 2) return std::nan("");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return s / static_cast<double>(x.size() - 1);
}

/// Population standard deviation.
inline double stddev(const std::vector<double>& x) {
  if (x.empty()) return std::nan("");
  const double m = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - m) * (v - m);
  return std::sqrt(s / static_cast<double>(x.size()));
}

/// Ranks starting at 1, ties get their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> rank(x.size());
  for (std::size_t lo = 0; lo < order.size();) {
    std::size_t hi = lo;
    while (hi + 1 < order.size() && x[order[hi + 1]] == x[order[lo]]) ++hi;
    const double r = 0.5 * static_cast<double>(lo + hi) + 1.0;
    for (std::size_t k = lo; k <= hi; ++k) rank[order[k]] = r;
    lo = hi + 1;
  }
  return rank;
}

/// Spearman rank correlation (Pearson correlation of average ranks).
inline double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman: need two equal-length samples");
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = mean(rx), my = mean(ry);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (rx[k] - mx) * (ry[k] - my);
    sxx += (rx[k] - mx) * (rx[k] - mx);
    syy += (ry[k] - my) * (ry[k] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::nan("");
  return sxy / std::sqrt(sxx * syy);
}

/// Bin k (1-based) of the half-open interval ((k-1)/bins, k/bins]; 0 goes
/// to bin 1.
inline std::size_t potentialness_bin(double p, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("bins must be positive");
  const auto k = static_cast<long long>(std::ceil(p * static_cast<double>(bins)));
  return static_cast<std::size_t>(std::clamp<long long>(k, 1, static_cast<long long>(bins)));
}

// ---------------------------------------------------------------------------
// Configuration

struct ExperimentConfig {
  std::string experiment = "dist";
  std::vector<GameShape> settings;
  std::size_t samples_per_setting = 1000;
  std::size_t bins = 20;
  OMDConfig omd = random_game_omd();
  std::uint64_t master_seed = 20250301;
  std::size_t num_random_inits = 1;
  std::size_t jobs = 1;
  std::string out_dir = ".";

  void validate(const ShapeLimits& limits) const {
    if (bins < 1) throw std::invalid_argument("bins must be at least 1");
    if (samples_per_setting < 1) throw std::invalid_argument("samples_per_setting must be at least 1");
    if (num_random_inits < 1) throw std::invalid_argument("num_random_inits must be at least 1");
    for (const auto& s : settings) limits.check(s);
    omd.validate();
  }

  json to_json() const {
    json j;
    j["experiment"] = experiment;
    json shapes = json::array();
    for (const auto& s : settings) shapes.push_back(s.action_counts());
    j["settings"] = shapes;
    j["samples_per_setting"] = samples_per_setting;
    j["bins"] = bins;
    j["omd"] = {{"eta0", omd.eta0}, {"beta", omd.beta}, {"max_iters", omd.max_iters}, {"tolerance", omd.tolerance}};
    j["master_seed"] = master_seed;
    j["num_random_inits"] = num_random_inits;
    return j;
  }

  std::uint64_t hash() const { return hash_label(to_json().dump()); }
};

inline std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << x;
  return os.str();
}

/// Comment line that opens every CSV this library writes.
inline std::string csv_preamble(const std::string& experiment, std::uint64_t seed, std::uint64_t config_hash) {
  return "# potlab " + std::string(kVersion) + " experiment=" + experiment + " seed=" + std::to_string(seed) +
         " config_hash=" + hex64(config_hash) + "\n";
}

// ---------------------------------------------------------------------------
// Random games

struct GameRecord {
  std::string setting;
  std::size_t game_index = 0;
  std::uint64_t seed = 0;
  std::optional<double> potentialness;
  bool has_pure_ne = false;
  bool has_spne = false;
};

inline std::uint64_t game_seed(std::uint64_t master, const GameShape& shape, std::size_t index) {
  return derive_seed(master, hash_label(shape.label()), index);
}

/// Samples, scores, and classifies every game of one setting.
inline std::vector<GameRecord> sample_setting(const ExperimentConfig& cfg, const GameShape& shape,
                                              OperatorCache& cache) {
  const auto ops = cache.get(shape);
  std::vector<GameRecord> out(cfg.samples_per_setting);
  parallel_for(out.size(), cfg.jobs, [&](std::size_t k) {
    GameRecord r;
    r.setting = shape.label();
    r.game_index = k;
    r.seed = game_seed(cfg.master_seed, shape, k);
    const NormalFormGame g = sample_random_game(shape, r.seed);
    r.potentialness = potentialness(*ops, g);
    const EquilibriumReport ne = pure_equilibria(g);
    r.has_pure_ne = ne.has_pure();
    r.has_spne = ne.has_strict();
    out[k] = std::move(r);
  });
  return out;
}

struct SettingSummary {
  std::string setting;
  std::size_t n_games = 0;
  double mean = 0.0;
  double variance = 0.0;
  double pure_ne_fraction = 0.0;
  double spne_fraction = 0.0;
};

struct DistributionResult {
  std::vector<GameRecord> records;
  std::vector<SettingSummary> summaries;
};

inline SettingSummary summarize(const std::vector<GameRecord>& records) {
  SettingSummary s;
  if (records.empty()) return s;
  s.setting = records.front().setting;
  std::vector<double> p;
  std::size_t pure = 0, strict = 0;
  for (const auto& r : records) {
    if (r.potentialness) p.push_back(*r.potentialness);
    pure += r.has_pure_ne;
    strict += r.has_spne;
  }
  s.n_games = records.size();
  s.mean = mean(p);
  s.variance = variance(p);
  s.pure_ne_fraction = static_cast<double>(pure) / static_cast<double>(records.size());
  s.spne_fraction = static_cast<double>(strict) / static_cast<double>(records.size());
  return s;
}

inline DistributionResult run_distribution_experiment(const ExperimentConfig& cfg, OperatorCache& cache) {
  cfg.validate(cache.limits());
  DistributionResult result;
  for (const auto& shape : cfg.settings) {
    auto records = sample_setting(cfg, shape, cache);
    result.summaries.push_back(summarize(records));
    result.records.insert(result.records.end(), records.begin(), records.end());
  }
  return result;
}

inline std::string distribution_csv(const ExperimentConfig& cfg, const DistributionResult& r) {
  std::string out = csv_preamble("dist", cfg.master_seed, cfg.hash());
  out += "setting,game_index,seed,potentialness,has_pure_ne,has_spne\n";
  for (const auto& g : r.records) {
    out += g.setting + "," + std::to_string(g.game_index) + "," + std::to_string(g.seed) + "," +
           format_optional(g.potentialness) + "," + (g.has_pure_ne ? "1" : "0") + "," + (g.has_spne ? "1" : "0") +
           "\n";
  }
  return out;
}

inline std::string distribution_summary_csv(const ExperimentConfig& cfg, const DistributionResult& r) {
  std::string out = csv_preamble("dist-summary", cfg.master_seed, cfg.hash());
  out += "setting,n_games,mean,variance,pure_ne_fraction,spne_fraction\n";
  for (const auto& s : r.summaries) {
    out += s.setting + "," + std::to_string(s.n_games) + "," + format_csv_double(s.mean) + "," +
           format_csv_double(s.variance) + "," + format_csv_double(s.pure_ne_fraction) + "," +
           format_csv_double(s.spne_fraction) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Binned statistics

struct BinStatistics {
  std::string setting;
  std::size_t bin = 0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t n_games = 0;
  std::optional<double> spne_fraction;
  std::size_t n_spne_games = 0;
  std::optional<double> convergence_fraction;
  std::optional<double> convergence_stddev;
};

inline std::vector<BinStatistics> empty_bins(const std::string& setting, std::size_t bins) {
  std::vector<BinStatistics> out(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out[k].setting = setting;
    out[k].bin = k + 1;
    out[k].lower = static_cast<double>(k) / static_cast<double>(bins);
    out[k].upper = static_cast<double>(k + 1) / static_cast<double>(bins);
  }
  return out;
}

inline std::vector<BinStatistics> spne_bins(const std::vector<GameRecord>& records, const std::string& setting,
                                            std::size_t bins) {
  auto out = empty_bins(setting, bins);
  std::vector<std::size_t> spne(bins, 0);
  for (const auto& r : records) {
    if (!r.potentialness) continue;
    const std::size_t k = potentialness_bin(*r.potentialness, bins) - 1;
    ++out[k].n_games;
    spne[k] += r.has_spne;
  }
  for (std::size_t k = 0; k < bins; ++k) {
    out[k].n_spne_games = spne[k];
    if (out[k].n_games) out[k].spne_fraction = static_cast<double>(spne[k]) / static_cast<double>(out[k].n_games);
  }
  return out;
}

inline std::vector<BinStatistics> run_spne_experiment(const ExperimentConfig& cfg, OperatorCache& cache) {
  cfg.validate(cache.limits());
  std::vector<BinStatistics> out;
  for (const auto& shape : cfg.settings) {
    const auto records = sample_setting(cfg, shape, cache);
    const auto bins = spne_bins(records, shape.label(), cfg.bins);
    out.insert(out.end(), bins.begin(), bins.end());
  }
  return out;
}

/// Fraction of runs that converged for one game: the uniform start when
/// `num_inits` is 1, otherwise `num_inits` random starts.
inline double game_convergence_fraction(const NormalFormGame& g, const OMDConfig& omd, std::size_t num_inits,
                                        std::uint64_t init_seed) {
  if (num_inits <= 1) return run_omd(g, uniform_init(g.shape()), omd).converged ? 1.0 : 0.0;
  std::size_t hits = 0;
  for (std::size_t k = 0; k < num_inits; ++k) {
    hits += run_omd(g, random_init(g.shape(), derive_seed(init_seed, 0x696e6974, k)), omd).converged;
  }
  return static_cast<double>(hits) / static_cast<double>(num_inits);
}

struct ConvergenceRecord {
  GameRecord game;
  double convergence_fraction = 0.0;
};

/// OMD on every SPNE game of a setting.
inline std::vector<ConvergenceRecord> converge_setting(const ExperimentConfig& cfg, const GameShape& shape,
                                                       OperatorCache& cache) {
  const auto records = sample_setting(cfg, shape, cache);
  std::vector<GameRecord> spne;
  for (const auto& r : records)
    if (r.has_spne && r.potentialness) spne.push_back(r);
  std::vector<ConvergenceRecord> out(spne.size());
  parallel_for(spne.size(), cfg.jobs, [&](std::size_t k) {
    const NormalFormGame g = sample_random_game(shape, spne[k].seed);
    out[k] = {spne[k], game_convergence_fraction(g, cfg.omd, cfg.num_random_inits, mix64(spne[k].seed))};
  });
  return out;
}

inline std::vector<BinStatistics> convergence_bins(const std::vector<GameRecord>& all_games,
                                                   const std::vector<ConvergenceRecord>& runs,
                                                   const std::string& setting, std::size_t bins) {
  auto out = spne_bins(all_games, setting, bins);
  std::vector<std::vector<double>> per_bin(bins);
  for (const auto& r : runs) per_bin[potentialness_bin(*r.game.potentialness, bins) - 1].push_back(r.convergence_fraction);
  for (std::size_t k = 0; k < bins; ++k) {
    if (per_bin[k].empty()) continue;
    out[k].convergence_fraction = mean(per_bin[k]);
    out[k].convergence_stddev = stddev(per_bin[k]);
  }
  return out;
}

inline std::vector<BinStatistics> run_convergence_experiment(const ExperimentConfig& cfg, OperatorCache& cache) {
  cfg.validate(cache.limits());
  std::vector<BinStatistics> out;
  for (const auto& shape : cfg.settings) {
    const auto runs = converge_setting(cfg, shape, cache);
    const auto records = sample_setting(cfg, shape, cache);
    const auto bins = convergence_bins(records, runs, shape.label(), cfg.bins);
    out.insert(out.end(), bins.begin(), bins.end());
  }
  return out;
}

inline std::string bins_csv(const std::string& experiment, const ExperimentConfig& cfg,
                            const std::vector<BinStatistics>& rows) {
  std::string out = csv_preamble(experiment, cfg.master_seed, cfg.hash());
  out += "setting,bin,lower,upper,n_games,spne_fraction,n_spne_games,convergence_fraction,convergence_stddev\n";
  for (const auto& b : rows) {
    out += b.setting + "," + std::to_string(b.bin) + "," + format_csv_double(b.lower) + "," +
           format_csv_double(b.upper) + "," + std::to_string(b.n_games) + "," + format_optional(b.spne_fraction) +
           "," + std::to_string(b.n_spne_games) + "," + format_optional(b.convergence_fraction) + "," +
           format_optional(b.convergence_stddev) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Economic alpha sweep

struct AlphaSweepConfig {
  std::vector<EconKind> kinds{kAllEconKinds.begin(), kAllEconKinds.end()};
  std::vector<double> alphas;
  std::size_t num_inits = 100;
  std::size_t actions = 11;
  std::vector<double> valuations{1.0, 1.0};
  OMDConfig omd = econ_omd();
  std::uint64_t master_seed = 20250301;
  std::size_t jobs = 1;

  /// 0, step, 2·step, ..., 1.
  static std::vector<double> alpha_grid(double step) {
    if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("alpha step must lie in (0, 1]");
    const auto n = static_cast<std::size_t>(std::llround(1.0 / step));
    std::vector<double> a(n + 1);
    for (std::size_t k = 0; k <= n; ++k) a[k] = static_cast<double>(k) / static_cast<double>(n);
    return a;
  }

  json to_json() const {
    json j;
    std::vector<std::string> names;
    for (auto k : kinds) names.emplace_back(to_string(k));
    j["kinds"] = names;
    j["alphas"] = alphas;
    j["num_inits"] = num_inits;
    j["actions"] = actions;
    j["valuations"] = valuations;
    j["omd"] = {{"eta0", omd.eta0}, {"beta", omd.beta}, {"max_iters", omd.max_iters}, {"tolerance", omd.tolerance}};
    j["master_seed"] = master_seed;
    return j;
  }
};

struct AlphaSweepRow {
  EconKind kind = EconKind::fpsb;
  double alpha = 0.0;
  std::optional<double> potentialness;
  bool has_spne = false;
  double convergence_fraction = 0.0;
  double original_potentialness = 0.0;
};

inline std::vector<AlphaSweepRow> run_alpha_sweep(const AlphaSweepConfig& cfg, OperatorCache& cache) {
  cfg.omd.validate();
  struct Task {
    std::size_t kind_index;
    std::size_t alpha_index;
  };
  std::vector<DecompositionResult> decompositions;
  std::vector<double> originals;
  std::shared_ptr<const DecompositionOperators> ops;
  for (EconKind kind : cfg.kinds) {
    EconGameSpec spec{kind, cfg.valuations, std::vector<std::size_t>(cfg.valuations.size(), cfg.actions)};
    const NormalFormGame g = build_econ_game(spec);
    ops = cache.get(g.shape());
    decompositions.push_back(decompose_payoffs(*ops, g));
    originals.push_back(decompositions.back().potentialness.value_or(std::nan("")));
  }
  std::vector<Task> tasks;
  for (std::size_t k = 0; k < cfg.kinds.size(); ++k)
    for (std::size_t a = 0; a < cfg.alphas.size(); ++a) tasks.push_back({k, a});
  std::vector<AlphaSweepRow> rows(tasks.size());
  parallel_for(tasks.size(), cfg.jobs, [&](std::size_t t) {
    const auto [k, a] = tasks[t];
    const NormalFormGame blended = alpha_blend(decompositions[k], cfg.alphas[a]);
    AlphaSweepRow row;
    row.kind = cfg.kinds[k];
    row.alpha = cfg.alphas[a];
    row.potentialness = potentialness(*ops, blended);
    row.has_spne = pure_equilibria(blended).has_strict();
    row.original_potentialness = originals[k];
    const std::uint64_t seed =
        derive_seed(cfg.master_seed, hash_label(to_string(cfg.kinds[k])), static_cast<std::uint64_t>(a));
    std::size_t hits = 0;
    for (std::size_t r = 0; r < cfg.num_inits; ++r) {
      hits += run_omd(blended, random_init(blended.shape(), derive_seed(seed, 0x696e6974, r)), cfg.omd).converged;
    }
    row.convergence_fraction = static_cast<double>(hits) / static_cast<double>(cfg.num_inits);
    rows[t] = row;
  });
  return rows;
}

inline std::string alpha_sweep_csv(const AlphaSweepConfig& cfg, const std::vector<AlphaSweepRow>& rows) {
  std::string out = csv_preamble("alpha-sweep", cfg.master_seed, hash_label(cfg.to_json().dump()));
  out += "kind,alpha,potentialness,has_spne,convergence_fraction,original_potentialness\n";
  for (const auto& r : rows) {
    out += std::string(to_string(r.kind)) + "," + format_csv_double(r.alpha) + "," + format_optional(r.potentialness) +
           "," + (r.has_spne ? "1" : "0") + "," + format_csv_double(r.convergence_fraction) + "," +
           format_csv_double(r.original_potentialness) + "\n";
  }
  return out;
}

/// Index of the first grid point ≥ `high` in a step from ≤ `low` to ≥ `high`.
/// One transition point between the two runs may hold anything. Empty when
/// the values are not such a step or never reach `high`.
inline std::optional<std::size_t> step_threshold(const std::vector<double>& values, double low, double high) {
  for (std::size_t k = 0; k < values.size(); ++k) {
    bool ok = true;
    for (std::size_t j = 0; j < k && ok; ++j) ok = values[j] <= low;
    for (std::size_t j = k + 1; j < values.size() && ok; ++j) ok = values[j] >= high;
    if (!ok) continue;
    if (values[k] >= high) return k;
    if (k + 1 < values.size()) return k + 1;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Standard games

struct StandardGameRow {
  std::string name;
  std::string actions;
  std::optional<double> potentialness;
  bool has_pure_ne = false;
  bool omd_converged = false;
};

struct StandardGamesResult {
  std::vector<StandardGameRow> named;
  std::size_t jordan_samples = 0;
  double jordan_min = 0.0;
  double jordan_max = 0.0;
  std::size_t jordan_converged = 0;
};

inline StandardGamesResult run_standard_games(OperatorCache& cache, const OMDConfig& omd = random_game_omd(),
                                              std::uint64_t seed = 20250301, std::size_t jordan_samples = 100) {
  StandardGamesResult result;
  const std::vector<std::pair<std::string, NormalFormGame>> games = {
      {"Matching Pennies", matching_pennies()},
      {"Battle of the Sexes", battle_of_the_sexes()},
      {"Prisoners' Dilemma", prisoners_dilemma()},
      {"Shapley Game", shapley_game()},
  };
  for (const auto& [name, g] : games) {
    const auto ops = cache.get(g.shape());
    result.named.push_back({name, g.shape().label(), potentialness(*ops, g), pure_equilibria(g).has_pure(),
                            run_omd(g, uniform_init(g.shape()), omd).converged});
  }
  Rng rng(derive_seed(seed, hash_label("jordan"), 0));
  const auto ops = cache.get(GameShape({2, 2}));
  result.jordan_samples = jordan_samples;
  result.jordan_min = 1.0;
  result.jordan_max = 0.0;
  for (std::size_t k = 0; k < jordan_samples; ++k) {
    const double alpha = uniform01(rng);
    const double beta = uniform01(rng);
    const NormalFormGame g = jordan_game(alpha, beta);
    const double p = potentialness(*ops, g).value_or(std::nan(""));
    result.jordan_min = std::min(result.jordan_min, p);
    result.jordan_max = std::max(result.jordan_max, p);
    result.jordan_converged += run_omd(g, uniform_init(g.shape()), omd).converged;
  }
  return result;
}

inline std::string standard_games_csv(const StandardGamesResult& r, std::uint64_t seed) {
  std::string out = csv_preamble("standard", seed, hash_label("standard"));
  out += "game,actions,potentialness,has_pure_ne,omd_converged\n";
  for (const auto& row : r.named) {
    out += row.name + "," + row.actions + "," + format_optional(row.potentialness) + "," +
           (row.has_pure_ne ? "1" : "0") + "," + (row.omd_converged ? "1" : "0") + "\n";
  }
  out += "Jordan Game min (" + std::to_string(r.jordan_samples) + " samples),2x2," + format_csv_double(r.jordan_min) +
         ",0," + (r.jordan_converged ? "1" : "0") + "\n";
  out += "Jordan Game max (" + std::to_string(r.jordan_samples) + " samples),2x2," + format_csv_double(r.jordan_max) +
         ",0," + (r.jordan_converged ? "1" : "0") + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Runtime benchmark

struct BenchmarkRow {
  std::string setting;
  double construction_seconds = 0.0;
  double mean_potentialness_seconds = 0.0;
  std::size_t runs = 0;
};

/// Times a fresh operator build and then `runs` potentialness evaluations on
/// random games with the operators already in memory.
inline std::vector<BenchmarkRow> run_runtime_benchmark(const std::vector<GameShape>& settings, std::size_t runs,
                                                       std::uint64_t seed, const ShapeLimits& limits = {}) {
  using clock = std::chrono::steady_clock;
  std::vector<BenchmarkRow> rows;
  for (const auto& shape : settings) {
    BenchmarkRow row;
    row.setting = shape.label();
    row.runs = runs;
    const auto t0 = clock::now();
    const auto ops = DecompositionOperators::build(shape, limits);
    row.construction_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    std::vector<NormalFormGame> games;
    for (std::size_t k = 0; k < runs; ++k) games.push_back(sample_random_game(shape, game_seed(seed, shape, k)));
    double sink = 0.0;
    const auto t1 = clock::now();
    for (const auto& g : games) sink += potentialness(ops, g).value_or(0.0);
    row.mean_potentialness_seconds =
        std::chrono::duration<double>(clock::now() - t1).count() / static_cast<double>(std::max<std::size_t>(runs, 1));
    if (sink < 0.0) throw std::logic_error("unreachable");
    rows.push_back(row);
  }
  return rows;
}

inline std::string benchmark_csv(const std::vector<BenchmarkRow>& rows, std::uint64_t seed) {
  std::string out = csv_preamble("bench", seed, hash_label("bench"));
  out += "setting,construction_seconds,mean_potentialness_seconds,runs\n";
  for (const auto& r : rows) {
    out += r.setting + "," + format_csv_double(r.construction_seconds) + "," +
           format_csv_double(r.mean_potentialness_seconds) + "," + std::to_string(r.runs) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Economic and Bayesian tables

inline std::string valuations_label(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ';';
    out += format_double(v[k]);
  }
  return out;
}

inline std::string discretization_csv(EconKind kind, const std::vector<double>& valuations,
                                      const std::vector<DiscretizationRow>& rows, bool with_header = true) {
  std::string out;
  if (with_header) {
    out += csv_preamble("econ-sweep", 0, hash_label("econ-sweep"));
    out += "kind,n_actions,valuations,potentialness,n_pure_ne,n_strict_ne\n";
  }
  for (const auto& r : rows) {
    out += std::string(to_string(kind)) + "," + std::to_string(r.actions) + "," + valuations_label(valuations) + "," +
           format_csv_double(r.potentialness) + "," + std::to_string(r.pure_ne) + "," + std::to_string(r.strict_ne) +
           "\n";
  }
  return out;
}

inline std::string bayesian_csv(EconKind kind, const std::vector<BayesianSweepRow>& rows, bool with_header = true) {
  std::string out;
  if (with_header) {
    out += csv_preamble("bayesian", 0, hash_label("bayesian"));
    out += "# tullock_prize=own_type\n";
    out += "kind,n_types,n_strategies,potentialness,has_pure_bne\n";
  }
  for (const auto& r : rows) {
    out += std::string(to_string(kind)) + "," + std::to_string(r.num_types) + "," + std::to_string(r.num_strategies) +
           "," + format_csv_double(r.potentialness) + "," + (r.has_pure_bne ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace potlab
