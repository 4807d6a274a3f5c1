#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <memory>
#include <numbers>

#include "mfpt/sweep.hpp"

namespace mfpt {

namespace {

struct RawOptions {
  std::string config_file;
  std::string method = "integral";
  std::string question = "mz_not_one";
  double q = 0.0;
  std::string initial = "ground";
  std::string backend = "auto";
};

// Subcommand names paired with their modes.
const std::map<std::string, SweepMode>& subcommands() {
  static const std::map<std::string, SweepMode> table = {
      {"alpha", SweepMode::alpha_point},         {"sweep-gamma", SweepMode::alpha_gamma_sweep},
      {"sweep-tau", SweepMode::alpha_tau_sweep}, {"surface", SweepMode::alpha_surface},
      {"simulate", SweepMode::simulate},         {"critical-line", SweepMode::critical_line},
      {"validate", SweepMode::validate},
  };
  return table;
}

void add_common(CLI::App* sub, SweepConfig& cfg, RawOptions& raw) {
  sub->add_option("--config", raw.config_file, "Flat key=value file; command-line flags take precedence");
  sub->add_option("--out", cfg.output_path, "Output CSV path (default: standard output)");
  sub->add_option("--workers", cfg.workers,
                  std::string("Worker threads (default: $") + kWorkersEnv + " or hardware concurrency)");
}

void add_alpha_source(CLI::App* sub, SweepConfig& cfg, RawOptions& raw) {
  sub->add_option("--method", raw.method, "integral | finite_n | oracle")
      ->check(CLI::IsMember({"integral", "finite_n", "oracle"}));
  sub->add_option("--rel-tol", cfg.rel_tol, "Relative tolerance of the alpha integral");
}

void add_chain(CLI::App* sub, SweepConfig& cfg, RawOptions& raw) {
  sub->add_option("--n", cfg.n_sites, "Chain size N (even, 4..16 for the state-vector engine)");
  sub->add_option("--question", raw.question, "mz_not_one | mz_not_pm_one | mz_equals_q")
      ->check(CLI::IsMember({"mz_not_one", "mz_not_pm_one", "mz_equals_q"}));
  sub->add_option("--q", raw.q, "Target M_z for mz_equals_q");
  sub->add_option("--nmax", cfg.n_max, "Number of measurements");
  sub->add_option("--skip-head", cfg.skip_head, "Leading p_n excluded from the decay fit");
  sub->add_option("--initial", raw.initial, "ground | all_up | product")
      ->check(CLI::IsMember({"ground", "all_up", "product"}));
  sub->add_option("--seed", cfg.seed, "Seed of the product initial state");
  sub->add_option("--backend", raw.backend, "auto | dense | krylov")->check(CLI::IsMember({"auto", "dense", "krylov"}));
}

void add_kink(CLI::App* sub, SweepConfig& cfg) {
  sub->add_flag("--kink", cfg.report_kink, "Report the strongest slope break of the sweep");
  sub->add_option("--kink-threshold", cfg.kink_threshold, "Detection threshold (x median second difference)");
}

void add_grid(CLI::App* sub, Grid& grid, const std::string& prefix) {
  sub->add_option("--" + prefix + "from", grid.start, "Grid start")->required();
  sub->add_option("--" + prefix + "to", grid.stop, "Grid stop (inclusive)")->required();
  sub->add_option("--" + prefix + "step", grid.step, "Grid step")->required();
}

std::unique_ptr<CLI::App> make_app(SweepConfig& cfg, RawOptions& raw) {
  auto app = std::make_unique<CLI::App>("Decay constants of repeated-measurement first passage in the transverse Ising ring",
                                        "mfpt");
  app->require_subcommand(1);

  auto* alpha = app->add_subcommand("alpha", "alpha at a single (gamma, tau)");
  add_common(alpha, cfg, raw);
  add_alpha_source(alpha, cfg, raw);
  add_chain(alpha, cfg, raw);
  alpha->add_option("--gamma", cfg.gamma, "Transverse field")->required();
  alpha->add_option("--tau", cfg.tau, "Measurement interval")->required();

  auto* sg = app->add_subcommand("sweep-gamma", "alpha over a gamma grid at fixed tau");
  add_common(sg, cfg, raw);
  add_alpha_source(sg, cfg, raw);
  add_chain(sg, cfg, raw);
  add_kink(sg, cfg);
  sg->add_option("--tau", cfg.tau, "Measurement interval")->required();
  add_grid(sg, cfg.grid, "");

  auto* st = app->add_subcommand("sweep-tau", "alpha over a tau grid at fixed gamma");
  add_common(st, cfg, raw);
  add_alpha_source(st, cfg, raw);
  add_chain(st, cfg, raw);
  add_kink(st, cfg);
  st->add_option("--gamma", cfg.gamma, "Transverse field")->required();
  add_grid(st, cfg.grid, "");

  auto* surface = app->add_subcommand("surface", "alpha over a gamma x tau grid (gamma-major rows)");
  add_common(surface, cfg, raw);
  add_alpha_source(surface, cfg, raw);
  add_chain(surface, cfg, raw);
  add_grid(surface, cfg.grid, "gamma-");
  add_grid(surface, cfg.tau_grid, "tau-");

  auto* sim = app->add_subcommand("simulate", "First-occurrence curve from the exact state-vector engine");
  add_common(sim, cfg, raw);
  add_chain(sim, cfg, raw);
  sim->add_option("--gamma", cfg.gamma, "Transverse field")->required();
  sim->add_option("--tau", cfg.tau, "Measurement interval")->required();

  auto* crit = app->add_subcommand("critical-line", "Critical manifold and slope jumps over a gamma grid");
  add_common(crit, cfg, raw);
  add_grid(crit, cfg.grid, "");

  auto* val = app->add_subcommand("validate", "Compare oracle ratios with the closed-form mode products");
  add_common(val, cfg, raw);
  add_chain(val, cfg, raw);
  val->add_option("--gamma", cfg.gamma, "Transverse field")->required();
  val->add_option("--tau", cfg.tau, "Measurement interval")->required();

  return app;
}

CLI::App* chosen_subcommand(CLI::App& app) {
  for (CLI::App* sub : app.get_subcommands()) return sub;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Flat key=value file -> extra arguments for keys not already given.
std::vector<std::string> config_file_args(const std::string& path, CLI::App& sub) {
  std::ifstream in(path);
  if (!in) throw UsageError("config: cannot read '" + path + "'");
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw UsageError("config: line " + std::to_string(lineno) + " is not key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    CLI::Option* opt = key == "config" ? nullptr : sub.get_option_no_throw("--" + key);
    if (opt == nullptr) throw UsageError("config: unknown key '" + key + "'");
    if (opt->count() > 0) continue;
    if (opt->get_type_size() == 0) {
      if (value == "true" || value == "1") extra.push_back("--" + key);
      else if (value != "false" && value != "0") throw UsageError("config: key '" + key + "' expects true or false");
    } else {
      extra.push_back("--" + key);
      extra.push_back(value);
    }
  }
  return extra;
}

void parse_into(CLI::App& app, std::vector<std::string> args) {
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested(app.help());
  } catch (const CLI::Success&) {
    throw HelpRequested(app.help());
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    if (msg.empty()) msg = e.get_name();
    throw UsageError(msg);
  }
}

void finish(SweepConfig& cfg, const RawOptions& raw, const std::string& sub_name) {
  cfg.mode = subcommands().at(sub_name);
  if (raw.method == "integral") cfg.source = AlphaSource::integral;
  else if (raw.method == "finite_n") cfg.source = AlphaSource::finite_n;
  else cfg.source = AlphaSource::oracle;
  try {
    cfg.question = parse_question(raw.question, raw.q);
  } catch (const InvalidQuestionError& e) {
    throw UsageError(std::string("q: ") + e.what());
  }
  if (raw.initial == "ground") cfg.initial = InitialState::ground;
  else if (raw.initial == "all_up") cfg.initial = InitialState::all_up;
  else cfg.initial = InitialState::product;
  if (raw.backend == "dense") cfg.backend = EvolutionBackend::dense;
  else if (raw.backend == "krylov") cfg.backend = EvolutionBackend::krylov;
  else cfg.backend = EvolutionBackend::automatic;
}

}  // namespace

SweepConfig parse_config(const std::vector<std::string>& args) {
  // First pass: find the subcommand, the flags given and the config file.
  SweepConfig probe_cfg;
  RawOptions probe_raw;
  auto probe = make_app(probe_cfg, probe_raw);
  std::vector<std::string> full = args;

  bool has_config = false;
  for (const auto& a : args) has_config = has_config || a == "--config" || a.rfind("--config=", 0) == 0;
  if (has_config) {
    // Required options may live in the file, so relax them for the probe.
    for (CLI::App* sub : probe->get_subcommands([](CLI::App*) { return true; })) {
      for (CLI::Option* opt : sub->get_options()) opt->required(false);
    }
  }
  parse_into(*probe, args);
  CLI::App* sub = chosen_subcommand(*probe);
  if (sub == nullptr) throw UsageError("a subcommand is required");

  if (!probe_raw.config_file.empty()) {
    auto extra = config_file_args(probe_raw.config_file, *sub);
    full.insert(full.end(), extra.begin(), extra.end());
  }

  SweepConfig cfg;
  cfg.workers = default_workers();
  RawOptions raw;
  auto app = make_app(cfg, raw);
  parse_into(*app, full);
  finish(cfg, raw, chosen_subcommand(*app)->get_name());
  cfg.validate();
  return cfg;
}

}  // namespace mfpt
