#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ultracoral/integrator.hpp"
#include "ultracoral/kinetics.hpp"
#include "ultracoral/vladimirov.hpp"

namespace ultracoral {

// Event-driven coral growth: integrate one hierarchy level at a time,
// bifurcate on the v = w crossing when the saturation index allows it,
// halt otherwise, and synchronize before descending a level.

struct GrowthConfig {
  std::uint64_t seed = 0;
  double theta_delta = 0.1;      // split fraction half-width
  int m_max = 4;                 // maximum hierarchy depth
  double omega_threshold = 1.0;  // saturation cutoff for bifurcation
  double t_max_level = 100.0;    // per-level time budget
  bool log_omega_crossings = false;
  SolverConfig solver;
};

void validate(const GrowthConfig& cfg);

// theta ~ uniform on (0.5 - delta, 0.5 + delta), a pure function of
// (seed, path)
double draw_theta(std::uint64_t seed, std::span<const std::uint8_t> path, double delta);

// Mass-conserving split: child_a takes theta of u and v, child_b the exact
// remainder (computed as parent minus child_a, so the totals reproduce the
// parent bitwise); both children start with w = 0.
std::pair<SpeciesState, SpeciesState> split_state(const SpeciesState& parent, double theta);

struct LevelState {
  double time = 0.0;
  int level = 0;
  std::vector<double> u, v, w;
  std::vector<std::uint8_t> active;  // branches still seeking a crossing
};

enum class EventKind { kCrossing, kSaturation };

const char* to_string(EventKind k);

struct BranchOutcome {
  long long index = 0;
  bool crossed = false;
  bool degenerate = false;
  double time = 0.0;    // crossing time, or the truncation time if never crossed
  SpeciesState state;   // snapshot at that time
  double omega = 0.0;   // saturation index at the snapshot
};

struct EventLogRow {
  long long branch = 0;
  EventKind kind = EventKind::kCrossing;
  double time = 0.0;
  double u = 0.0, v = 0.0, w = 0.0;
  double omega = 0.0;
};

struct LevelRunResult {
  LevelState final_state;  // at t_sync; crossed branches sit frozen at their crossing values
  std::vector<BranchOutcome> outcomes;  // one per active branch, by branch index
  std::vector<EventLogRow> log;
  Trajectory trajectory;  // filled only when record_trajectory is set
  IntegrateStatus status = IntegrateStatus::kReachedEnd;
  std::string message;
};

// Integrates the coupled 3 p^level system until every active branch has
// crossed or the level budget runs out. A branch that crosses is frozen
// (its derivatives are zeroed) until the level ends, so the final state
// holds each parent's own crossing snapshot while the remaining branches
// keep evolving and diffusing against it. Inactive (continuation) branches
// evolve for the whole level but carry no events.
LevelRunResult run_level(const LevelState& initial, const KineticParams& kp,
                         const DiffusionOperator& op, const GrowthConfig& cfg,
                         bool record_trajectory = false);

struct SimulationResult {
  IntegrationResult integration;
  std::vector<EventLogRow> log;
};

// Plain coupled run on one level: full right-hand side throughout (nothing
// freezes), crossing events recorded without stopping. Backs the `react`
// and `simulate` commands; conservation holds over the whole window.
SimulationResult simulate_level(const LevelState& initial, const KineticParams& kp,
                                const DiffusionOperator& op, const SolverConfig& solver,
                                double t_end, bool log_omega_crossings = false);

struct BranchNode {
  std::vector<std::uint8_t> path;  // p-adic address digits, root = empty
  double birth_time = 0.0;
  std::optional<double> crossing_time;
  double lifetime = 0.0;  // crossing - birth, or budget truncation
  std::optional<double> omega;
  bool halted = false;
  bool degenerate = false;
  SpeciesState state_at_birth;
  SpeciesState state_at_crossing;  // or at truncation
  std::vector<BranchNode> children;  // 0 or p
};

struct CoralTree {
  long long p = 2;
  double alpha = 2.0;
  int levels_completed = 0;  // index of the deepest level that ran
  BranchNode root;
  std::vector<std::vector<EventLogRow>> level_logs;
  GrowthConfig growth;  // config echo
  KineticParams kinetics;
  bool solver_trouble = false;  // a level ended on budget/underflow
  std::string message;
};

CoralTree grow(const GrowthConfig& cfg, const KineticParams& kp, long long p,
               double alpha, const SpeciesState& initial);

struct TreeMetrics {
  double min_lifetime = 0.0;
  double max_lifetime = 0.0;
  double mean_lifetime = 0.0;
  double relative_range = 0.0;  // (max - min) / mean
  int leaf_count = 0;
  int depth = 0;
  int node_count = 0;
};

// lifetimes of every node at depth >= min_depth
std::vector<double> collect_lifetimes(const CoralTree& tree, int min_depth = 0);

TreeMetrics metrics_from_lifetimes(std::span<const double> lifetimes);

TreeMetrics tree_metrics(const CoralTree& tree);

}  // namespace ultracoral
