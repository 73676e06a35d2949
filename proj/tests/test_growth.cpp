#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ultracoral/emit.hpp"
#include "ultracoral/growth.hpp"

using namespace ultracoral;

namespace {

GrowthConfig quick_growth(int m_max) {
  GrowthConfig cfg;
  cfg.m_max = m_max;
  cfg.t_max_level = 100.0;
  return cfg;
}

double median(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

// root crossing time of the reaction-only system at given sigma
double root_crossing(double sigma) {
  KineticParams kp;
  kp.sigma = sigma;
  DiffusionOperator op(2, 0, 2.0);
  LevelState state;
  state.u = {8.0};
  state.v = {10.0};
  state.w = {0.0};
  state.active = {1};
  GrowthConfig cfg = quick_growth(0);
  auto lr = run_level(state, kp, op, cfg);
  REQUIRE(lr.outcomes[0].crossed);
  return lr.outcomes[0].time;
}

}  // namespace

TEST_CASE("theta draws: bounds, determinism, statistics") {
  std::vector<std::uint8_t> path{0, 1, 1};
  CHECK(draw_theta(42, path, 0.0) == 0.5);
  CHECK(draw_theta(42, path, 0.1) == draw_theta(42, path, 0.1));
  CHECK(draw_theta(42, path, 0.1) != draw_theta(43, path, 0.1));
  std::vector<std::uint8_t> other{0, 1, 0};
  CHECK(draw_theta(42, path, 0.1) != draw_theta(42, other, 0.1));

  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    std::uint8_t digits[4] = {static_cast<std::uint8_t>(i & 1),
                              static_cast<std::uint8_t>((i >> 1) & 1),
                              static_cast<std::uint8_t>((i >> 2) & 1),
                              static_cast<std::uint8_t>((i >> 3) & 1)};
    double theta = draw_theta(static_cast<std::uint64_t>(i), digits, 0.1);
    CHECK(theta > 0.4);
    CHECK(theta < 0.6);
    sum += theta;
  }
  CHECK(std::fabs(sum / n - 0.5) < 0.005);
}

TEST_CASE("split conserves mass exactly") {
  auto [a, b] = split_state({10.0, 6.0, 4.0}, 0.3);
  CHECK(a.u == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(a.v == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(a.w == 0.0);
  CHECK(b.u == doctest::Approx(7.0).epsilon(1e-15));
  CHECK(b.v == doctest::Approx(4.2).epsilon(1e-15));
  CHECK(b.w == 0.0);
  CHECK(a.u + b.u == 10.0);  // bitwise conservation
  CHECK(a.v + b.v == 6.0);

  auto [ha, hb] = split_state({9.7, 3.3, 1.0}, 0.5);
  CHECK(ha.u == hb.u);
  CHECK(ha.v == hb.v);

  for (double theta : {0.41, 0.47, 0.55, 0.59}) {
    auto [x, y] = split_state({8.123456789, 10.987654321, 0.5}, theta);
    CHECK(x.u + y.u == 8.123456789);
    CHECK(x.v + y.v == 10.987654321);
  }
}

TEST_CASE("run_level at m = 0 finds the single crossing") {
  KineticParams kp;
  DiffusionOperator op(2, 0, 2.0);
  LevelState state;
  state.u = {8.0};
  state.v = {10.0};
  state.w = {0.0};
  state.active = {1};
  GrowthConfig cfg = quick_growth(0);
  auto lr = run_level(state, kp, op, cfg);
  REQUIRE(lr.outcomes.size() == 1);
  CHECK(lr.outcomes[0].crossed);
  CHECK(lr.outcomes[0].time > 0.0);
  // at the crossing v = w, and reaction-only conservation pins them to 5
  CHECK(lr.outcomes[0].state.v == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(lr.outcomes[0].state.w == doctest::Approx(5.0).epsilon(1e-6));
  CHECK(lr.outcomes[0].omega ==
        doctest::Approx(lr.outcomes[0].state.u * 5.0).epsilon(1e-5));

  // agreement with a much tighter reference run
  GrowthConfig reference = cfg;
  reference.solver.rtol = 1e-12;
  reference.solver.atol = 1e-14;
  auto ref = run_level(state, kp, op, reference);
  CHECK(std::fabs(lr.outcomes[0].time - ref.outcomes[0].time) < 1e-7);
}

TEST_CASE("two-branch level run crosses on both branches at distinct times") {
  KineticParams kp;
  DiffusionOperator op(2, 1, 2.0);
  LevelState state;
  state.level = 1;
  state.u = {10.0, 8.0};
  state.v = {15.0, 13.0};
  state.w = {0.0, 0.0};
  state.active = {1, 1};
  auto lr = run_level(state, kp, op, quick_growth(1));
  REQUIRE(lr.outcomes.size() == 2);
  CHECK(lr.outcomes[0].crossed);
  CHECK(lr.outcomes[1].crossed);
  CHECK(lr.outcomes[0].time != lr.outcomes[1].time);
  CHECK(lr.final_state.time == std::max(lr.outcomes[0].time, lr.outcomes[1].time));
  // the frozen final state holds each branch's own crossing snapshot
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(lr.final_state.v[i] == lr.outcomes[i].state.v);
    CHECK(lr.final_state.w[i] == lr.outcomes[i].state.w);
  }
  CHECK(lr.log.size() == 2);
  CHECK(lr.log[0].time <= lr.log[1].time);
}

TEST_CASE("calcification is monotone within a level run") {
  KineticParams kp;
  DiffusionOperator op(2, 2, 2.0);
  LevelState state;
  state.level = 2;
  state.u = {5.0, 4.0, 4.5, 3.5};
  state.v = {7.0, 6.0, 6.5, 5.5};
  state.w = {0.0, 0.0, 0.0, 0.0};
  state.active = {1, 1, 1, 1};
  auto lr = run_level(state, kp, op, quick_growth(2), /*record_trajectory=*/true);
  const Trajectory& traj = lr.trajectory;
  REQUIRE(traj.size() > 2);
  for (std::size_t k = 1; k < traj.size(); ++k)
    for (std::size_t i = 0; i < 4; ++i)
      CHECK(traj.states[k][8 + i] >= traj.states[k - 1][8 + i] - 1e-10);
}

TEST_CASE("eta = 0 disables calcification, every branch times out") {
  KineticParams kp;
  kp.eta = 0.0;  // bypasses config validation on purpose
  DiffusionOperator op(2, 1, 2.0);
  LevelState state;
  state.level = 1;
  state.u = {10.0, 8.0};
  state.v = {15.0, 13.0};
  state.w = {0.0, 0.0};
  state.active = {1, 1};
  GrowthConfig cfg = quick_growth(1);
  cfg.t_max_level = 5.0;
  auto lr = run_level(state, kp, op, cfg);
  CHECK(!lr.outcomes[0].crossed);
  CHECK(!lr.outcomes[1].crossed);
  CHECK(lr.outcomes[0].time == doctest::Approx(5.0));
  CHECK(lr.final_state.time == doctest::Approx(5.0));
  CHECK(lr.log.empty());
}

TEST_CASE("degenerate crossing at birth is flagged") {
  KineticParams kp;
  DiffusionOperator op(2, 0, 2.0);
  LevelState state;
  state.u = {8.0};
  state.v = {4.0};
  state.w = {5.0};  // already v < w
  state.active = {1};
  auto lr = run_level(state, kp, op, quick_growth(0));
  CHECK(lr.outcomes[0].crossed);
  CHECK(lr.outcomes[0].degenerate);
  CHECK(lr.outcomes[0].time == 0.0);
}

TEST_CASE("grow: m_max = 0 gives a single node with the root lifetime") {
  CoralTree tree = grow(quick_growth(0), KineticParams{}, 2, 2.0, {8.0, 10.0, 0.0});
  CHECK(tree.root.children.empty());
  CHECK(tree.root.crossing_time.has_value());
  CHECK(tree.root.lifetime > 0.0);
  CHECK(tree.levels_completed == 0);
  TreeMetrics m = tree_metrics(tree);
  CHECK(m.relative_range == 0.0);
  CHECK(m.leaf_count == 1);
  CHECK(m.depth == 0);
}

TEST_CASE("grow is deterministic: identical seeds give identical trees") {
  GrowthConfig cfg = quick_growth(3);
  cfg.seed = 42;
  CoralTree a = grow(cfg, KineticParams{}, 2, 2.0, {8.0, 10.0, 0.0});
  CoralTree b = grow(cfg, KineticParams{}, 2, 2.0, {8.0, 10.0, 0.0});
  TreeDocument da = make_tree_document(a, "", false);
  TreeDocument db = make_tree_document(b, "", false);
  CHECK(da == db);
  CHECK(tree_document_to_json(da) == tree_document_to_json(db));

  cfg.seed = 43;
  CoralTree c = grow(cfg, KineticParams{}, 2, 2.0, {8.0, 10.0, 0.0});
  CHECK(!(make_tree_document(c, "", false) == da));
}

TEST_CASE("grow: delta = 0 with symmetric dynamics gives equal lifetimes per level") {
  GrowthConfig cfg = quick_growth(2);
  cfg.theta_delta = 0.0;
  // push omega_threshold down so both levels bifurcate fully
  cfg.omega_threshold = 0.05;
  CoralTree tree = grow(cfg, KineticParams{}, 2, 2.0, {8.0, 10.0, 0.0});
  REQUIRE(tree.root.children.size() == 2);
  CHECK(tree.root.children[0].lifetime == tree.root.children[1].lifetime);
  REQUIRE(tree.root.children[0].children.size() == 2);
  std::vector<double> level2;
  for (const auto& child : tree.root.children)
    for (const auto& grandchild : child.children) level2.push_back(grandchild.lifetime);
  REQUIRE(level2.size() == 4);
  for (double life : level2) CHECK(life == level2[0]);
}

TEST_CASE("grow: split mass conservation holds across the whole tree") {
  GrowthConfig cfg = quick_growth(3);
  cfg.seed = 7;
  cfg.omega_threshold = 0.01;
  CoralTree tree = grow(cfg, KineticParams{}, 2, 2.0, {8.0, 10.0, 0.0});
  int splits = 0;
  auto walk = [&](auto&& self, const BranchNode& node) -> void {
    if (!node.children.empty()) {
      REQUIRE(node.children.size() == 2);
      CHECK(node.children[0].state_at_birth.u + node.children[1].state_at_birth.u ==
            node.state_at_crossing.u);
      CHECK(node.children[0].state_at_birth.v + node.children[1].state_at_birth.v ==
            node.state_at_crossing.v);
      CHECK(node.children[0].state_at_birth.w == 0.0);
      CHECK(node.children[1].state_at_birth.w == 0.0);
      ++splits;
    }
    for (const auto& child : node.children) self(self, child);
  };
  walk(walk, tree.root);
  CHECK(splits >= 3);
}

TEST_CASE("grow: lifetimes positive, children counts are 0 or p") {
  GrowthConfig cfg = quick_growth(4);
  cfg.seed = 42;
  CoralTree tree = grow(cfg, KineticParams{}, 2, 2.0, {8.0, 10.0, 0.0});
  auto walk = [&](auto&& self, const BranchNode& node) -> void {
    CHECK(node.lifetime > 0.0);
    CHECK((node.children.empty() || node.children.size() == 2));
    if (node.halted) CHECK(node.children.empty());
    for (const auto& child : node.children) self(self, child);
  };
  walk(walk, tree.root);
}

TEST_CASE("grow with p = 3 splits into three mass-conserving children") {
  GrowthConfig cfg = quick_growth(1);
  cfg.seed = 3;
  CoralTree tree = grow(cfg, KineticParams{}, 3, 2.0, {8.0, 10.0, 0.0});
  CHECK(tree.p == 3);
  REQUIRE(tree.root.children.size() == 3);
  double total_u = 0.0, total_v = 0.0;
  for (const BranchNode& child : tree.root.children) {
    CHECK(child.state_at_birth.w == 0.0);
    CHECK(child.state_at_birth.u > 0.0);
    total_u += child.state_at_birth.u;
    total_v += child.state_at_birth.v;
  }
  CHECK(total_u == doctest::Approx(tree.root.state_at_crossing.u).epsilon(1e-15));
  CHECK(total_v == doctest::Approx(tree.root.state_at_crossing.v).epsilon(1e-15));
  for (const BranchNode& child : tree.root.children)
    CHECK((child.children.empty() || child.children.size() == 3));
}

TEST_CASE("grow: a truncated level budget halts branches with capped lifetimes") {
  GrowthConfig cfg = quick_growth(2);
  cfg.t_max_level = 0.5;  // root cannot cross by then
  CoralTree tree = grow(cfg, KineticParams{}, 2, 2.0, {8.0, 10.0, 0.0});
  CHECK(tree.root.halted);
  CHECK(!tree.root.crossing_time.has_value());
  CHECK(tree.root.lifetime == doctest::Approx(0.5));
  CHECK(tree.root.children.empty());
  CHECK(tree.levels_completed == 0);
}

TEST_CASE("sigma ordering: higher sigma crosses earlier") {
  double t_half = root_crossing(0.5);
  double t_one = root_crossing(1.0);
  double t_two = root_crossing(2.0);
  CHECK(t_half > t_one);
  CHECK(t_one > t_two);
}

TEST_CASE("alpha homogenization (small ensemble smoke)") {
  auto rel_range_for = [](double alpha, std::uint64_t seed) {
    GrowthConfig cfg = quick_growth(2);
    cfg.seed = seed;
    CoralTree tree = grow(cfg, KineticParams{}, 2, alpha, {8.0, 10.0, 0.0});
    auto lifetimes = collect_lifetimes(tree, 1);
    REQUIRE(lifetimes.size() >= 2);
    return metrics_from_lifetimes(lifetimes).relative_range;
  };
  std::vector<double> spread2, spread5;
  for (std::uint64_t seed = 0; seed < 7; ++seed) {
    spread2.push_back(rel_range_for(2.0, seed));
    spread5.push_back(rel_range_for(5.0, seed));
  }
  CHECK(median(spread5) < median(spread2));
}

TEST_CASE("tree metrics arithmetic on reported lifetime pairs") {
  TreeMetrics wide = metrics_from_lifetimes(std::vector<double>{6.90514, 17.11237});
  CHECK(wide.min_lifetime == 6.90514);
  CHECK(wide.max_lifetime == 17.11237);
  CHECK(wide.relative_range == doctest::Approx(0.850).epsilon(1e-3));

  TreeMetrics narrow = metrics_from_lifetimes(std::vector<double>{16.33612, 16.76954});
  CHECK(narrow.relative_range == doctest::Approx(0.0262).epsilon(1e-2));
}

TEST_CASE("growth config validation") {
  GrowthConfig bad;
  bad.theta_delta = 0.5;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = GrowthConfig{};
  bad.m_max = -1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = GrowthConfig{};
  bad.omega_threshold = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = GrowthConfig{};
  bad.t_max_level = -2.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
