#include "ultracoral/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "ultracoral/config.hpp"
#include "ultracoral/emit.hpp"
#include "ultracoral/growth.hpp"

namespace ultracoral {

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitSolver = 2;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string formats;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "config file path");
  cmd->add_option("--set", opts.sets, "dotted-path override, e.g. model.sigma=0.5")
      ->take_all();
  cmd->add_option("--seed", opts.seed, "growth RNG seed");
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--format", opts.formats, "comma list: csv,json,svg,lsys");
}

RunConfig load_config(const CommonOpts& opts) {
  RunConfig cfg;
  if (!opts.config_path.empty()) {
    std::ifstream in(opts.config_path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + opts.config_path);
    std::ostringstream text;
    text << in.rdbuf();
    cfg = parse_config(text.str());
  }
  for (const std::string& assignment : opts.sets) apply_override(cfg, assignment);
  if (opts.seed) cfg.growth.seed = *opts.seed;
  if (!opts.out_dir.empty()) cfg.output.directory = opts.out_dir;
  if (!opts.formats.empty()) {
    cfg.output.formats.clear();
    std::stringstream ss(opts.formats);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!item.empty()) cfg.output.formats.push_back(item);
    }
  }
  validate(cfg);
  return cfg;
}

fs::path resolve_out_dir(const RunConfig& cfg) {
  std::string dir = cfg.output.directory;
  if (dir.empty()) {
    if (const char* env = std::getenv("ULTRACORAL_OUT")) dir = env;
  }
  if (dir.empty()) dir = ".";
  fs::path path(dir);
  fs::create_directories(path);
  return path;
}

bool wants(const RunConfig& cfg, const std::string& format) {
  for (const std::string& f : cfg.output.formats)
    if (f == format) return true;
  return false;
}

long long level_size(const RunConfig& cfg, int level) {
  long long n = 1;
  for (int k = 0; k < level; ++k) n *= cfg.model.p;
  return n;
}

LevelState broadcast_initial(const RunConfig& cfg, int level) {
  std::size_t n = static_cast<std::size_t>(level_size(cfg, level));
  auto expand = [n](const std::vector<double>& xs, const char* name) {
    if (xs.size() == 1) return std::vector<double>(n, xs[0]);
    if (xs.size() == n) return xs;
    throw ConfigError(std::string("model.") + name + ": expected 1 or " +
                      std::to_string(n) + " values for this level");
  };
  LevelState state;
  state.time = 0.0;
  state.level = level;
  state.u = expand(cfg.model.u0, "u0");
  state.v = expand(cfg.model.v0, "v0");
  state.w = expand(cfg.model.w0, "w0");
  state.active.assign(n, 1);
  return state;
}

int run_coupled(const RunConfig& cfg, int level) {
  LevelState initial = broadcast_initial(cfg, level);
  DiffusionOperator op(cfg.model.p, level, cfg.model.alpha);
  SimulationResult sim =
      simulate_level(initial, cfg.model.kinetics(), op, cfg.solver,
                     cfg.growth.t_max_level, cfg.growth.log_omega_crossings);

  fs::path out = resolve_out_dir(cfg);
  write_atomic(out / "timeseries.csv",
               emit_timeseries_csv(sim.integration.trajectory, op.size()));
  write_atomic(out / "events.csv", emit_event_log_csv(sim.log));
  std::cout << "level " << level << ": " << sim.integration.steps_accepted
            << " accepted steps, " << sim.log.size() << " events, final t = "
            << fmt_double(sim.integration.t_final) << "\n";
  std::cout << "wrote " << (out / "timeseries.csv").string() << " and "
            << (out / "events.csv").string() << "\n";
  if (sim.integration.status != IntegrateStatus::kReachedEnd) {
    std::cerr << "solver: " << to_string(sim.integration.status) << " "
              << sim.integration.message << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_react(const RunConfig& cfg) {
  if (cfg.model.u0.size() != 1 || cfg.model.v0.size() != 1 || cfg.model.w0.size() != 1)
    throw ConfigError("model.u0/v0/w0: react runs a single compartment, give scalars");
  return run_coupled(cfg, 0);
}

int cmd_simulate(const RunConfig& cfg) { return run_coupled(cfg, cfg.growth.m_max); }

int cmd_grow(const RunConfig& cfg) {
  if (cfg.model.u0.size() != 1 || cfg.model.v0.size() != 1 || cfg.model.w0.size() != 1)
    throw ConfigError("model.u0/v0/w0: grow starts from one branch, give scalars");
  SpeciesState initial{cfg.model.u0[0], cfg.model.v0[0], cfg.model.w0[0]};
  CoralTree tree =
      grow(cfg.growth, cfg.model.kinetics(), cfg.model.p, cfg.model.alpha, initial);

  fs::path out = resolve_out_dir(cfg);
  if (wants(cfg, "json")) {
    TreeDocument doc = make_tree_document(tree, serialize_config(cfg), cfg.out_of_regime());
    write_atomic(out / "tree.json", tree_document_to_json(doc));
  }
  if (wants(cfg, "csv")) {
    for (std::size_t level = 0; level < tree.level_logs.size(); ++level) {
      fs::path path = out / ("events_level_" + std::to_string(level) + ".csv");
      write_atomic(path, emit_event_log_csv(tree.level_logs[level]));
    }
  }
  if (wants(cfg, "svg"))
    write_atomic(out / "coral.svg", emit_svg(tree, cfg.output.svg_angle_deg,
                                             cfg.output.svg_length_scale));
  if (wants(cfg, "lsys"))
    write_atomic(out / "coral.lsys", emit_lsystem(tree, cfg.output.svg_angle_deg));

  TreeMetrics metrics = tree_metrics(tree);
  std::cout << "levels completed: " << tree.levels_completed << ", nodes: "
            << metrics.node_count << ", leaves: " << metrics.leaf_count
            << ", depth: " << metrics.depth << "\n";
  std::cout << "lifetimes: min " << fmt_double(metrics.min_lifetime) << ", max "
            << fmt_double(metrics.max_lifetime) << ", relative range "
            << fmt_double(metrics.relative_range) << "\n";
  std::cout << "outputs in " << out.string() << "\n";
  if (tree.solver_trouble) {
    std::cerr << "solver: " << tree.message << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int cmd_matrix(const RunConfig& cfg) {
  GeneratorMatrix gen = build_generator(cfg.model.p, cfg.growth.m_max, cfg.model.alpha);
  fs::path out = resolve_out_dir(cfg);
  write_atomic(out / "matrix.csv", emit_matrix_csv(gen));
  std::cout << "generator " << gen.size << "x" << gen.size << " (p=" << gen.p
            << ", m=" << gen.m << ", alpha=" << fmt_double(gen.alpha) << ") -> "
            << (out / "matrix.csv").string() << "\n";
  return kExitOk;
}

int cmd_spectrum(const RunConfig& cfg) {
  auto checks = verify_spectrum(cfg.model.p, cfg.growth.m_max, cfg.model.alpha);
  double worst = 0.0;
  for (const SpectrumCheck& c : checks) worst = std::max(worst, c.abs_error);
  fs::path out = resolve_out_dir(cfg);
  write_atomic(out / "spectrum.csv", emit_spectrum_csv(checks));
  std::cout << checks.size() << " distinct eigenvalues, max abs error "
            << fmt_double(worst) << " -> " << (out / "spectrum.csv").string() << "\n";
  return kExitOk;
}

int cmd_analyze(const RunConfig& cfg) {
  auto eq = equilibria(cfg.model.kinetics());
  std::cout << format_equilibria_table(eq);
  if (wants(cfg, "csv")) {
    fs::path out = resolve_out_dir(cfg);
    write_atomic(out / "equilibria.csv", emit_equilibria_csv(eq));
    std::cout << "wrote " << (out / "equilibria.csv").string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"p-adic reaction-diffusion simulator of branching coral growth"};
  app.require_subcommand(1);

  CommonOpts opts;
  int (*handler)(const RunConfig&) = nullptr;

  struct Sub {
    const char* name;
    const char* help;
    int (*fn)(const RunConfig&);
  };
  const Sub subs[] = {
      {"react", "single-compartment kinetics run (no diffusion)", cmd_react},
      {"simulate", "coupled run at a fixed hierarchy level (growth.m_max)", cmd_simulate},
      {"grow", "full event-driven branching simulation", cmd_grow},
      {"matrix", "emit the diffusion generator as CSV", cmd_matrix},
      {"spectrum", "eigenvalue verification report as CSV", cmd_spectrum},
      {"analyze", "equilibria and stability table", cmd_analyze},
  };
  for (const Sub& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    add_common(cmd, opts);
    cmd->callback([&handler, fn = sub.fn] { handler = fn; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitValidation;
  }

  try {
    RunConfig cfg = load_config(opts);
    return handler(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace ultracoral
