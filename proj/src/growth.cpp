#include "ultracoral/growth.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

#include "ultracoral/rng.hpp"

namespace ultracoral {

namespace {
constexpr std::uint64_t kThetaStream = 0x74686574612d3030ull;
constexpr std::uint64_t kWeightStream = 0x77656967687420ull;
}  // namespace

void validate(const GrowthConfig& cfg) {
  if (!(cfg.theta_delta >= 0.0 && cfg.theta_delta < 0.5))
    throw std::invalid_argument("growth.theta_delta: must lie in [0, 0.5)");
  if (cfg.m_max < 0) throw std::invalid_argument("growth.m_max: must be >= 0");
  if (!(cfg.omega_threshold > 0.0))
    throw std::invalid_argument("growth.omega_threshold: must be positive");
  if (!(cfg.t_max_level > 0.0))
    throw std::invalid_argument("growth.t_max_level: must be positive");
  validate(cfg.solver);
}

double draw_theta(std::uint64_t seed, std::span<const std::uint8_t> path, double delta) {
  double u = uniform01(path_key(seed, path), kThetaStream);
  return 0.5 + delta * (2.0 * u - 1.0);
}

std::pair<SpeciesState, SpeciesState> split_state(const SpeciesState& parent, double theta) {
  SpeciesState a{theta * parent.u, theta * parent.v, 0.0};
  SpeciesState b{parent.u - a.u, parent.v - a.v, 0.0};
  return {a, b};
}

const char* to_string(EventKind k) {
  return k == EventKind::kCrossing ? "crossing" : "saturation";
}

namespace {

struct RhsScratch {
  std::vector<double> au, av;
};

// Coupled right-hand side on one level: du = A u + f, dv = d (A v) + g,
// dw = h. When a frozen mask is supplied, frozen compartments get zero
// derivatives but still enter their neighbours' diffusion sums.
RhsFn make_coupled_rhs(const DiffusionOperator& op, const KineticParams& kp,
                       const std::vector<char>* frozen) {
  std::size_t n = op.size();
  auto scratch = std::make_shared<RhsScratch>();
  scratch->au.resize(n);
  scratch->av.resize(n);
  return [&op, kp, n, scratch, frozen](double, std::span<const double> y,
                                       std::span<double> dy) {
    auto u = y.subspan(0, n);
    auto v = y.subspan(n, n);
    op.apply(u, scratch->au);
    op.apply(v, scratch->av);
    for (std::size_t i = 0; i < n; ++i) {
      if (frozen && (*frozen)[i]) {
        dy[i] = dy[n + i] = dy[2 * n + i] = 0.0;
        continue;
      }
      ReactionRates rates = reaction_rates({u[i], v[i], y[2 * n + i]}, kp);
      dy[i] = scratch->au[i] + rates.f;
      dy[n + i] = kp.d * scratch->av[i] + rates.g;
      dy[2 * n + i] = rates.h;
    }
  };
}

std::vector<double> pack_state(const LevelState& s) {
  std::vector<double> y;
  y.reserve(3 * s.u.size());
  y.insert(y.end(), s.u.begin(), s.u.end());
  y.insert(y.end(), s.v.begin(), s.v.end());
  y.insert(y.end(), s.w.begin(), s.w.end());
  return y;
}

EventSpec crossing_event(std::size_t n, std::size_t i, bool terminal) {
  return {
      [n, i](double, std::span<const double> y) { return y[n + i] - y[2 * n + i]; },
      -1, terminal, static_cast<long long>(i)};
}

EventSpec omega_event(std::size_t n, std::size_t i, double kappa_sp) {
  return {
      [n, i, kappa_sp](double, std::span<const double> y) {
        return y[i] * y[n + i] / kappa_sp - 1.0;
      },
      -1, false, static_cast<long long>(n + i)};
}

void append_trajectory(Trajectory& into, const Trajectory& piece, bool skip_first) {
  std::size_t start = skip_first && !piece.times.empty() ? 1 : 0;
  for (std::size_t k = start; k < piece.times.size(); ++k) {
    into.times.push_back(piece.times[k]);
    into.states.push_back(piece.states[k]);
  }
}

}  // namespace

LevelRunResult run_level(const LevelState& initial, const KineticParams& kp,
                         const DiffusionOperator& op, const GrowthConfig& cfg,
                         bool record_trajectory) {
  const std::size_t n = op.size();
  if (initial.u.size() != n || initial.v.size() != n || initial.w.size() != n ||
      initial.active.size() != n)
    throw std::invalid_argument("run_level: state size does not match the operator");

  LevelRunResult out;
  out.outcomes.resize(n);
  std::vector<char> frozen(n, 0);
  std::vector<char> crossed(n, 0);
  std::vector<char> omega_done(n, 0);
  RhsFn rhs = make_coupled_rhs(op, kp, &frozen);

  std::vector<double> y = pack_state(initial);
  double t = initial.time;
  const double t_end = initial.time + cfg.t_max_level;
  bool first_call = true;

  auto armed_indices = [&] {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < n; ++i)
      if (initial.active[i] && !crossed[i]) idx.push_back(i);
    return idx;
  };

  while (true) {
    auto armed = armed_indices();
    if (armed.empty() || t >= t_end) break;

    std::vector<EventSpec> events;
    for (std::size_t i : armed) events.push_back(crossing_event(n, i, true));
    if (cfg.log_omega_crossings)
      for (std::size_t i = 0; i < n; ++i)
        if (!omega_done[i]) events.push_back(omega_event(n, i, kp.kappa_sp));

    IntegrationResult res = integrate(rhs, y, t, t_end, cfg.solver, events,
                                      record_trajectory);
    if (record_trajectory) append_trajectory(out.trajectory, res.trajectory, !first_call);
    first_call = false;

    for (const EventRecord& ev : res.events) {
      if (ev.id < static_cast<long long>(n)) {
        std::size_t i = static_cast<std::size_t>(ev.id);
        SpeciesState s{ev.state[i], ev.state[n + i], ev.state[2 * n + i]};
        double omega = saturation_index(s.u, s.v, kp.kappa_sp);
        out.outcomes[i] = {static_cast<long long>(i), true, ev.degenerate, ev.time, s, omega};
        out.log.push_back({static_cast<long long>(i), EventKind::kCrossing, ev.time,
                           s.u, s.v, s.w, omega});
        crossed[i] = 1;
        frozen[i] = 1;
      } else {
        std::size_t i = static_cast<std::size_t>(ev.id) - n;
        SpeciesState s{ev.state[i], ev.state[n + i], ev.state[2 * n + i]};
        out.log.push_back({static_cast<long long>(i), EventKind::kSaturation, ev.time,
                           s.u, s.v, s.w, saturation_index(s.u, s.v, kp.kappa_sp)});
        omega_done[i] = 1;
      }
    }

    t = res.t_final;
    y = res.y_final;
    if (res.status == IntegrateStatus::kEventStop) continue;
    out.status = res.status;
    out.message = res.message;
    break;  // reached the budget end, or a solver failure with partial results
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (!initial.active[i] || crossed[i]) continue;
    SpeciesState s{y[i], y[n + i], y[2 * n + i]};
    out.outcomes[i] = {static_cast<long long>(i), false, false, t, s,
                       saturation_index(s.u, s.v, kp.kappa_sp)};
  }

  std::sort(out.log.begin(), out.log.end(), [](const EventLogRow& a, const EventLogRow& b) {
    return a.time < b.time || (a.time == b.time && a.branch < b.branch);
  });

  out.final_state.time = t;
  out.final_state.level = initial.level;
  out.final_state.active = initial.active;
  out.final_state.u.assign(y.begin(), y.begin() + n);
  out.final_state.v.assign(y.begin() + n, y.begin() + 2 * n);
  out.final_state.w.assign(y.begin() + 2 * n, y.end());
  return out;
}

SimulationResult simulate_level(const LevelState& initial, const KineticParams& kp,
                                const DiffusionOperator& op, const SolverConfig& solver,
                                double t_end, bool log_omega_crossings) {
  const std::size_t n = op.size();
  if (initial.u.size() != n || initial.v.size() != n || initial.w.size() != n)
    throw std::invalid_argument("simulate_level: state size does not match the operator");

  RhsFn rhs = make_coupled_rhs(op, kp, nullptr);
  std::vector<EventSpec> events;
  for (std::size_t i = 0; i < n; ++i) events.push_back(crossing_event(n, i, false));
  if (log_omega_crossings)
    for (std::size_t i = 0; i < n; ++i) events.push_back(omega_event(n, i, kp.kappa_sp));

  SimulationResult out;
  std::vector<double> y = pack_state(initial);
  out.integration = integrate(rhs, y, initial.time, t_end, solver, events, true);
  for (const EventRecord& ev : out.integration.events) {
    bool is_omega = ev.id >= static_cast<long long>(n);
    std::size_t i = static_cast<std::size_t>(ev.id) - (is_omega ? n : 0);
    SpeciesState s{ev.state[i], ev.state[n + i], ev.state[2 * n + i]};
    out.log.push_back({static_cast<long long>(i),
                       is_omega ? EventKind::kSaturation : EventKind::kCrossing, ev.time,
                       s.u, s.v, s.w, saturation_index(s.u, s.v, kp.kappa_sp)});
  }
  std::sort(out.log.begin(), out.log.end(), [](const EventLogRow& a, const EventLogRow& b) {
    return a.time < b.time || (a.time == b.time && a.branch < b.branch);
  });
  return out;
}

namespace {

// Children states of a bifurcating branch. p = 2 uses the theta split
// verbatim; larger p draws perturbed weights and gives the last child the
// exact remainder.
std::vector<SpeciesState> split_children(const SpeciesState& parent, long long p,
                                         std::uint64_t seed,
                                         std::span<const std::uint8_t> path, double delta) {
  if (p == 2) {
    auto [a, b] = split_state(parent, draw_theta(seed, path, delta));
    return {a, b};
  }
  std::uint64_t key = path_key(seed, path);
  std::vector<double> weights(static_cast<std::size_t>(p));
  double total = 0.0;
  for (long long c = 0; c < p; ++c) {
    double u = uniform01(key, kWeightStream + static_cast<std::uint64_t>(c));
    weights[static_cast<std::size_t>(c)] = 1.0 + 2.0 * delta * (2.0 * u - 1.0);
    total += weights[static_cast<std::size_t>(c)];
  }
  std::vector<SpeciesState> children(static_cast<std::size_t>(p));
  double used_u = 0.0, used_v = 0.0;
  for (long long c = 0; c + 1 < p; ++c) {
    double f = weights[static_cast<std::size_t>(c)] / total;
    children[static_cast<std::size_t>(c)] = {f * parent.u, f * parent.v, 0.0};
    used_u += children[static_cast<std::size_t>(c)].u;
    used_v += children[static_cast<std::size_t>(c)].v;
  }
  children[static_cast<std::size_t>(p - 1)] = {parent.u - used_u, parent.v - used_v, 0.0};
  return children;
}

// continuation slots each hold 1/p of the carried state, exact in total
std::vector<SpeciesState> continuation_parts(const SpeciesState& base, long long p) {
  std::vector<SpeciesState> parts(static_cast<std::size_t>(p));
  double pu = 0.0, pv = 0.0, pw = 0.0;
  for (long long c = 0; c + 1 < p; ++c) {
    parts[static_cast<std::size_t>(c)] = {base.u / static_cast<double>(p),
                                          base.v / static_cast<double>(p),
                                          base.w / static_cast<double>(p)};
    pu += parts[static_cast<std::size_t>(c)].u;
    pv += parts[static_cast<std::size_t>(c)].v;
    pw += parts[static_cast<std::size_t>(c)].w;
  }
  parts[static_cast<std::size_t>(p - 1)] = {base.u - pu, base.v - pv, base.w - pw};
  return parts;
}

struct Slot {
  BranchNode* node = nullptr;  // null for continuation slots
  SpeciesState state;
};

}  // namespace

CoralTree grow(const GrowthConfig& cfg, const KineticParams& kp, long long p,
               double alpha, const SpeciesState& initial) {
  validate(cfg);
  validate(kp, /*allow_nonnegative_beta=*/true);
  if (!is_prime(p)) throw std::invalid_argument("model.p: must be prime");

  CoralTree tree;
  tree.p = p;
  tree.alpha = alpha;
  tree.growth = cfg;
  tree.kinetics = kp;
  tree.root.state_at_birth = initial;

  std::vector<Slot> slots{{&tree.root, initial}};
  double t_cursor = 0.0;

  for (int level = 0;; ++level) {
    DiffusionOperator op(p, level, alpha);
    const std::size_t n = op.size();

    LevelState state;
    state.time = t_cursor;
    state.level = level;
    state.u.resize(n);
    state.v.resize(n);
    state.w.resize(n);
    state.active.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      state.u[i] = slots[i].state.u;
      state.v[i] = slots[i].state.v;
      state.w[i] = slots[i].state.w;
      state.active[i] = slots[i].node != nullptr;
    }

    LevelRunResult lr = run_level(state, kp, op, cfg);
    tree.levels_completed = level;
    tree.level_logs.push_back(lr.log);
    if (lr.status != IntegrateStatus::kReachedEnd &&
        lr.status != IntegrateStatus::kEventStop) {
      tree.solver_trouble = true;
      tree.message = lr.message;
    }
    double t_sync = lr.final_state.time;

    bool any_bifurcation = false;
    for (std::size_t i = 0; i < n; ++i) {
      BranchNode* node = slots[i].node;
      if (!node) continue;
      const BranchOutcome& outcome = lr.outcomes[i];
      node->state_at_crossing = outcome.state;
      node->degenerate = outcome.degenerate;
      if (outcome.crossed) {
        node->crossing_time = outcome.time;
        node->lifetime = outcome.time - node->birth_time;
        node->omega = outcome.omega;
        node->halted = outcome.omega < cfg.omega_threshold;
      } else {
        node->lifetime = outcome.time - node->birth_time;  // budget truncation
        node->halted = true;
      }
      if (!node->halted && level < cfg.m_max) any_bifurcation = true;
    }

    if (level == cfg.m_max || tree.solver_trouble || !any_bifurcation) break;

    std::vector<Slot> next(n * static_cast<std::size_t>(p));
    long long stride = static_cast<long long>(n);
    for (std::size_t i = 0; i < n; ++i) {
      BranchNode* node = slots[i].node;
      SpeciesState carried{lr.final_state.u[i], lr.final_state.v[i], lr.final_state.w[i]};
      if (node && !node->halted) {
        auto children = split_children(node->state_at_crossing, p, cfg.seed, node->path,
                                       cfg.theta_delta);
        node->children.resize(static_cast<std::size_t>(p));
        for (long long c = 0; c < p; ++c) {
          BranchNode& child = node->children[static_cast<std::size_t>(c)];
          child.path = node->path;
          child.path.push_back(static_cast<std::uint8_t>(c));
          child.birth_time = t_sync;
          child.state_at_birth = children[static_cast<std::size_t>(c)];
          next[i + static_cast<std::size_t>(c * stride)] = {&child,
                                                            child.state_at_birth};
        }
      } else {
        auto parts = continuation_parts(carried, p);
        for (long long c = 0; c < p; ++c)
          next[i + static_cast<std::size_t>(c * stride)] = {nullptr,
                                                            parts[static_cast<std::size_t>(c)]};
      }
    }
    slots = std::move(next);
    t_cursor = t_sync;
  }
  return tree;
}

namespace {

void walk(const BranchNode& node, int min_depth, std::vector<double>* lifetimes,
          TreeMetrics* metrics) {
  int depth = static_cast<int>(node.path.size());
  if (lifetimes && depth >= min_depth) lifetimes->push_back(node.lifetime);
  if (metrics) {
    ++metrics->node_count;
    metrics->depth = std::max(metrics->depth, depth);
    if (node.children.empty()) ++metrics->leaf_count;
  }
  for (const BranchNode& child : node.children) walk(child, min_depth, lifetimes, metrics);
}

}  // namespace

std::vector<double> collect_lifetimes(const CoralTree& tree, int min_depth) {
  std::vector<double> out;
  walk(tree.root, min_depth, &out, nullptr);
  return out;
}

TreeMetrics metrics_from_lifetimes(std::span<const double> lifetimes) {
  TreeMetrics m;
  if (lifetimes.empty()) return m;
  m.min_lifetime = lifetimes[0];
  m.max_lifetime = lifetimes[0];
  double sum = 0.0;
  for (double value : lifetimes) {
    m.min_lifetime = std::min(m.min_lifetime, value);
    m.max_lifetime = std::max(m.max_lifetime, value);
    sum += value;
  }
  m.mean_lifetime = sum / static_cast<double>(lifetimes.size());
  m.relative_range =
      m.mean_lifetime != 0.0 ? (m.max_lifetime - m.min_lifetime) / m.mean_lifetime : 0.0;
  return m;
}

TreeMetrics tree_metrics(const CoralTree& tree) {
  auto lifetimes = collect_lifetimes(tree, 0);
  TreeMetrics m = metrics_from_lifetimes(lifetimes);
  TreeMetrics shape;
  walk(tree.root, 0, nullptr, &shape);
  m.leaf_count = shape.leaf_count;
  m.depth = shape.depth;
  m.node_count = shape.node_count;
  return m;
}

}  // namespace ultracoral
