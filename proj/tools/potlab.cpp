#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "potlab/potlab.hpp"

namespace fs = std::filesystem;
using namespace potlab;

namespace {

// JSON config files for CLI11: top-level keys are global flags, nested
// objects hold the flags of the subcommand with that name.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App* app, bool default_also, bool, std::string) const override {
    json j;
    for (const CLI::Option* opt : app->get_options({})) {
      if (opt->get_lnames().empty() || !opt->get_configurable()) continue;
      const std::string name = opt->get_lnames()[0];
      if (opt->count() > 0) {
        const auto& r = opt->results();
        j[name] = r.size() == 1 ? json(r[0]) : json(r);
      } else if (default_also && !opt->get_default_str().empty()) {
        j[name] = opt->get_default_str();
      }
    }
    for (const CLI::App* sub : app->get_subcommands({})) {
      const json child = json::parse(to_config(sub, default_also, false, ""));
      if (!child.empty()) j[sub->get_name()] = child;
    }
    return j.dump(2);
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw CLI::ConversionError("config file is not valid JSON: " + std::string(e.what()));
    }
    std::vector<CLI::ConfigItem> items;
    flatten(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void flatten(const json& j, const std::vector<std::string>& parents, std::vector<CLI::ConfigItem>& items) {
    if (!j.is_object()) throw CLI::ConversionError("config file must hold a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto next = parents;
        next.push_back(key);
        flatten(value, next, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(std::move(item));
    }
  }
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, sep);)
    if (!part.empty()) out.push_back(part);
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split(text, ',')) out.push_back(std::stod(s));
  return out;
}

/// "5:25" or "5,7,9".
std::vector<std::size_t> parse_counts(const std::string& text) {
  std::vector<std::size_t> out;
  if (const auto colon = text.find(':'); colon != std::string::npos) {
    const auto lo = std::stoull(text.substr(0, colon));
    const auto hi = std::stoull(text.substr(colon + 1));
    if (hi < lo) throw std::invalid_argument("empty range " + text);
    for (auto k = lo; k <= hi; ++k) out.push_back(k);
    return out;
  }
  for (const auto& s : split(text, ',')) out.push_back(std::stoull(s));
  return out;
}

std::vector<GameShape> parse_settings(const std::string& text) {
  std::vector<GameShape> out;
  for (const auto& s : split(text, ',')) out.push_back(GameShape::parse(s));
  return out;
}

std::vector<EconKind> parse_kinds(const std::string& text) {
  if (text == "all") return {kAllEconKinds.begin(), kAllEconKinds.end()};
  std::vector<EconKind> out;
  for (const auto& s : split(text, ',')) out.push_back(parse_econ_kind(s));
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
  std::cerr << "wrote " << path.string() << "\n";
}

/// Writes to `path`, or stdout when it is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    write_text(path, text);
}

json components_json(const PayoffComponents& c) {
  return {{"potential", c.potential.all_payoffs()},
          {"harmonic", c.harmonic.all_payoffs()},
          {"nonstrategic", c.nonstrategic.all_payoffs()}};
}

struct Globals {
  std::uint64_t seed = 20250301;
  std::string cache_dir;
  std::string out_dir = ".";
  std::size_t jobs = 1;
  std::size_t max_profiles = 0;

  ShapeLimits limits() const {
    ShapeLimits l;
    if (max_profiles) {
      // an explicit profile cap replaces the per-player action caps
      l.max_profiles = max_profiles;
      l.max_actions_3p = l.max_actions_4p = max_profiles;
    }
    return l;
  }

  OperatorCache make_cache() const {
    return OperatorCache(cache_dir.empty() ? std::nullopt : std::optional<fs::path>(cache_dir), limits());
  }
};

struct OmdFlags {
  double eta0;
  double beta = 1.0 / 20.0;
  std::size_t iters = 2000;
  double tol = 1e-8;

  explicit OmdFlags(double default_eta0) : eta0(default_eta0) {}

  void add_to(CLI::App* app) {
    app->add_option("--eta0", eta0, "Initial step size")->capture_default_str();
    app->add_option("--beta", beta, "Step-size decay exponent")->capture_default_str();
    app->add_option("--iters", iters, "Iteration budget T")->capture_default_str();
    app->add_option("--tol", tol, "Convergence tolerance")->capture_default_str();
  }

  OMDConfig config() const {
    OMDConfig c{eta0, beta, iters, tol};
    c.validate();
    return c;
  }
};

struct ExperimentFlags {
  std::string settings = "2x2,2x10,2x2x2";
  std::size_t samples = 10000;
  std::size_t bins = 20;
  std::size_t inits = 1;
  OmdFlags omd{8.0};
  std::string out;

  void add_to(CLI::App* app, const std::string& default_out, bool with_omd) {
    out = default_out;
    app->add_option("--settings", settings, "Comma-separated shapes, e.g. 2x2,2x10")->capture_default_str();
    app->add_option("--samples", samples, "Games per setting")->capture_default_str();
    app->add_option("--bins", bins, "Potentialness bins")->capture_default_str();
    app->add_option("--out", out, "Output CSV name inside --out-dir")->capture_default_str();
    if (with_omd) {
      app->add_option("--inits", inits, "1 = uniform start, n > 1 = n random starts per game")->capture_default_str();
      omd.add_to(app);
    }
  }

  ExperimentConfig config(const std::string& id, const Globals& g) const {
    ExperimentConfig c;
    c.experiment = id;
    c.settings = parse_settings(settings);
    c.samples_per_setting = samples;
    c.bins = bins;
    c.omd = omd.config();
    c.master_seed = g.seed;
    c.num_random_inits = inits;
    c.jobs = g.jobs;
    c.out_dir = g.out_dir;
    return c;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Potentialness of finite games: decomposition, learning dynamics and experiments"};
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config; top-level keys are global flags, objects hold subcommand flags");

  Globals g;
  app.add_option("--seed", g.seed, "Master seed")->capture_default_str();
  app.add_option("--cache", g.cache_dir, "Operator cache directory (disk cache off when empty)");
  app.add_option("--out-dir", g.out_dir, "Directory for experiment CSVs")->capture_default_str();
  app.add_option("--jobs", g.jobs, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--max-profiles", g.max_profiles,
                 "Raise the shape ceiling to this many profiles (memory grows with the square of the edge count)")
      ->check(CLI::PositiveNumber);

  // decompose
  auto* decompose = app.add_subcommand("decompose", "Potentialness and payoff components of a game");
  std::string game_path;
  bool with_components = false;
  decompose->add_option("--game", game_path, "Game JSON file")->required();
  decompose->add_flag("--components", with_components, "Also print the three payoff components");

  // learn
  auto* learn = app.add_subcommand("learn", "Run online mirror descent on a game");
  std::string learn_game, init_kind = "uniform", trace_path;
  OmdFlags learn_omd{8.0};
  learn->add_option("--game", learn_game, "Game JSON file")->required();
  learn_omd.add_to(learn);
  learn->add_option("--init", init_kind, "Initial profile")->check(CLI::IsMember({"uniform", "random"}))
      ->capture_default_str();
  learn->add_option("--trace", trace_path, "Write per-iteration losses to this CSV");

  // econ
  auto* econ = app.add_subcommand("econ", "Discretized auctions and contests");
  std::string econ_kind = "fpsb", econ_values = "1.0,1.0", emit_game, sweep, econ_out;
  std::size_t econ_players = 2, econ_actions = 11;
  econ->add_option("--kind", econ_kind, "fpsb|spsb|allpay|woa|tullock (sweep also accepts all or a list)")
      ->capture_default_str();
  econ->add_option("--players", econ_players, "Number of bidders")->capture_default_str();
  econ->add_option("--actions", econ_actions, "Bid grid size")->capture_default_str();
  econ->add_option("--values", econ_values, "Comma-separated valuations, one per player")->capture_default_str();
  econ->add_option("--emit-game", emit_game, "Write the game JSON to this file");
  econ->add_option("--sweep", sweep, "Grid sizes to sweep, e.g. 5:25; emits CSV");
  econ->add_option("--out", econ_out, "CSV path for --sweep (stdout when omitted)");

  // bayesian
  auto* bayes = app.add_subcommand("bayesian", "Bayesian auctions over monotone strategies");
  std::string bayes_kind = "allpay", bayes_types = "1,2,4", bayes_out;
  std::size_t bayes_actions = 4;
  bayes->add_option("--kind", bayes_kind, "Kind, list of kinds, or all")->capture_default_str();
  bayes->add_option("--actions", bayes_actions, "Bid grid size")->capture_default_str();
  bayes->add_option("--types", bayes_types, "Type counts V to sweep")->capture_default_str();
  bayes->add_option("--out", bayes_out, "CSV path (stdout when omitted)");

  // random-game experiments
  auto* dist = app.add_subcommand("dist", "Potentialness distribution of random games");
  ExperimentFlags dist_flags;
  dist_flags.add_to(dist, "dist.csv", false);
  auto* spne = app.add_subcommand("spne", "SPNE frequency per potentialness bin");
  ExperimentFlags spne_flags;
  spne_flags.add_to(spne, "spne.csv", false);
  auto* converge = app.add_subcommand("converge", "OMD convergence per potentialness bin");
  ExperimentFlags converge_flags;
  converge_flags.add_to(converge, "converge.csv", true);

  // alpha sweep
  auto* alpha = app.add_subcommand("alpha-sweep", "OMD on blends of the potential and harmonic parts of econ games");
  std::string alpha_kinds = "all", alpha_values = "1.0,1.0";
  double alpha_step = 0.05;
  std::size_t alpha_inits = 100, alpha_actions = 11;
  OmdFlags alpha_omd{256.0};
  std::string alpha_out = "alpha_sweep.csv";
  alpha->add_option("--kinds", alpha_kinds, "Kinds or all")->capture_default_str();
  alpha->add_option("--alpha-step", alpha_step, "Grid step for alpha")->capture_default_str();
  alpha->add_option("--inits", alpha_inits, "Random starts per alpha")->capture_default_str();
  alpha->add_option("--actions", alpha_actions, "Bid grid size")->capture_default_str();
  alpha->add_option("--values", alpha_values, "Valuations")->capture_default_str();
  alpha_omd.add_to(alpha);
  alpha->add_option("--out", alpha_out, "Output CSV name inside --out-dir")->capture_default_str();

  auto* standard = app.add_subcommand("standard", "Potentialness and OMD verdicts for textbook games");
  std::size_t jordan_samples = 100;
  std::string standard_out = "standard.csv";
  standard->add_option("--jordan-samples", jordan_samples, "Random Jordan games")->capture_default_str();
  standard->add_option("--out", standard_out, "Output CSV name inside --out-dir")->capture_default_str();

  auto* bench = app.add_subcommand("bench", "Operator construction and potentialness timings");
  std::string bench_settings = "2x2,2x5,2x10,3x3,3x5";
  std::size_t bench_runs = 100;
  std::string bench_out = "bench.csv";
  bench->add_option("--settings", bench_settings, "Shapes to time")->capture_default_str();
  bench->add_option("--runs", bench_runs, "Potentialness evaluations per shape")->capture_default_str();
  bench->add_option("--out", bench_out, "Output CSV name inside --out-dir")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path out_dir(g.out_dir);

    if (*decompose) {
      OperatorCache cache = g.make_cache();
      const NormalFormGame game = load_game_file(game_path);
      const auto ops = cache.get(game.shape());
      json j;
      if (with_components) {
        const DecompositionResult dec = decompose_payoffs(*ops, game);
        j["potentialness"] = dec.potentialness ? json(*dec.potentialness) : json(nullptr);
        if (dec.components) j["components"] = components_json(*dec.components);
      } else {
        const auto p = potentialness(*ops, game);
        j["potentialness"] = p ? json(*p) : json(nullptr);
      }
      std::cout << j.dump(2) << "\n";
    } else if (*learn) {
      const NormalFormGame game = load_game_file(learn_game);
      const MixedProfile init = init_kind == "uniform" ? uniform_init(game.shape()) : random_init(game.shape(), g.seed);
      const Trajectory t = run_omd(game, init, learn_omd.config());
      if (!trace_path.empty()) {
        const OMDConfig c = learn_omd.config();
        const json settings = {{"game", learn_game}, {"init", init_kind}, {"eta0", c.eta0}, {"beta", c.beta},
                               {"max_iters", c.max_iters}, {"tolerance", c.tolerance}};
        std::string csv = csv_preamble("learn", g.seed, hash_label(settings.dump())) + "iteration,max_relative_loss\n";
        for (std::size_t k = 0; k < t.loss_history.size(); ++k)
          csv += std::to_string(k + 1) + "," + format_csv_double(t.loss_history[k]) + "\n";
        write_text(trace_path, csv);
      }
      std::cout << trajectory_summary(t).dump(2) << "\n";
    } else if (*econ) {
      OperatorCache cache = g.make_cache();
      std::vector<double> values = parse_doubles(econ_values);
      if (values.size() == 1) values.assign(econ_players, values[0]);
      if (values.size() != econ_players) throw std::invalid_argument("--values needs one entry per player");
      if (!sweep.empty()) {
        std::string csv;
        bool header = true;
        for (EconKind kind : parse_kinds(econ_kind)) {
          csv += discretization_csv(kind, values, discretization_sweep(kind, values, parse_counts(sweep), cache), header);
          header = false;
        }
        emit(econ_out, csv);
      } else {
        const EconKind kind = parse_econ_kind(econ_kind);
        const NormalFormGame game =
            build_econ_game(EconGameSpec{kind, values, std::vector<std::size_t>(econ_players, econ_actions)});
        if (!emit_game.empty()) write_text(emit_game, dump_game(game) + "\n");
        const auto ops = cache.get(game.shape());
        const auto p = potentialness(*ops, game);
        const EquilibriumReport ne = pure_equilibria(game);
        json j{{"kind", to_string(kind)},       {"actions", econ_actions},
               {"valuations", values},           {"potentialness", p ? json(*p) : json(nullptr)},
               {"n_pure_ne", ne.pure_ne.size()}, {"n_strict_ne", ne.strict_pure_ne.size()}};
        std::cout << j.dump(2) << "\n";
      }
    } else if (*bayes) {
      OperatorCache cache = g.make_cache();
      std::string csv;
      bool header = true;
      for (EconKind kind : parse_kinds(bayes_kind)) {
        csv += bayesian_csv(kind, bayesian_potentialness_sweep(kind, bayes_actions, parse_counts(bayes_types), cache),
                            header);
        header = false;
      }
      emit(bayes_out, csv);
    } else if (*dist) {
      OperatorCache cache = g.make_cache();
      const ExperimentConfig cfg = dist_flags.config("dist", g);
      const DistributionResult r = run_distribution_experiment(cfg, cache);
      write_text(out_dir / dist_flags.out, distribution_csv(cfg, r));
      write_text(out_dir / (fs::path(dist_flags.out).stem().string() + "_summary.csv"),
                 distribution_summary_csv(cfg, r));
    } else if (*spne) {
      OperatorCache cache = g.make_cache();
      const ExperimentConfig cfg = spne_flags.config("spne", g);
      write_text(out_dir / spne_flags.out, bins_csv("spne", cfg, run_spne_experiment(cfg, cache)));
    } else if (*converge) {
      OperatorCache cache = g.make_cache();
      const ExperimentConfig cfg = converge_flags.config("converge", g);
      write_text(out_dir / converge_flags.out, bins_csv("converge", cfg, run_convergence_experiment(cfg, cache)));
    } else if (*alpha) {
      OperatorCache cache = g.make_cache();
      AlphaSweepConfig cfg;
      cfg.kinds = parse_kinds(alpha_kinds);
      cfg.alphas = AlphaSweepConfig::alpha_grid(alpha_step);
      cfg.num_inits = alpha_inits;
      cfg.actions = alpha_actions;
      cfg.valuations = parse_doubles(alpha_values);
      cfg.omd = alpha_omd.config();
      cfg.master_seed = g.seed;
      cfg.jobs = g.jobs;
      write_text(out_dir / alpha_out, alpha_sweep_csv(cfg, run_alpha_sweep(cfg, cache)));
    } else if (*standard) {
      OperatorCache cache = g.make_cache();
      const StandardGamesResult r = run_standard_games(cache, random_game_omd(), g.seed, jordan_samples);
      const std::string csv = standard_games_csv(r, g.seed);
      std::cout << csv;
      write_text(out_dir / standard_out, csv);
    } else if (*bench) {
      const std::string csv = benchmark_csv(run_runtime_benchmark(parse_settings(bench_settings), bench_runs, g.seed),
                                            g.seed);
      std::cout << csv;
      write_text(out_dir / bench_out, csv);
    }
  } catch (const std::exception& e) {
    std::cerr << "potlab: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
