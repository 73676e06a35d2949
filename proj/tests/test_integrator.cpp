#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ultracoral/growth.hpp"
#include "ultracoral/integrator.hpp"
#include "ultracoral/kinetics.hpp"
#include "ultracoral/vladimirov.hpp"

using namespace ultracoral;

namespace {

const RhsFn kDecay = [](double, std::span<const double> y, std::span<double> dy) {
  dy[0] = -y[0];
};

SolverConfig tight() {
  SolverConfig cfg;
  cfg.rtol = 1e-8;
  cfg.atol = 1e-10;
  return cfg;
}

}  // namespace

TEST_CASE("exponential decay endpoint") {
  std::vector<double> y0{1.0};
  auto res = integrate(kDecay, y0, 0.0, 1.0, tight());
  CHECK(res.status == IntegrateStatus::kReachedEnd);
  CHECK(std::fabs(res.y_final[0] - std::exp(-1.0)) < 1e-6);
  CHECK(res.t_final == 1.0);
}

TEST_CASE("tolerance ladder shrinks the endpoint error monotonically") {
  std::vector<double> y0{1.0};
  double previous = 1.0;
  for (double rtol : {1e-5, 1e-7, 1e-9, 1e-11}) {
    SolverConfig cfg;
    cfg.rtol = rtol;
    cfg.atol = rtol * 1e-2;
    auto res = integrate(kDecay, y0, 0.0, 1.0, cfg);
    double err = std::fabs(res.y_final[0] - std::exp(-1.0));
    CHECK(err < previous);
    previous = err;
  }
}

TEST_CASE("fixed-step convergence order is at least 4") {
  // observed order from halving h on y' = -y over [0, 1]
  auto endpoint_error = [](double h) {
    std::vector<double> y{1.0};
    std::vector<double> out(1);
    int steps = static_cast<int>(std::lround(1.0 / h));
    double t = 0.0;
    for (int s = 0; s < steps; ++s) {
      dopri5_fixed_step(kDecay, t, y, h, out);
      y = out;
      t += h;
    }
    return std::fabs(y[0] - std::exp(-1.0));
  };
  double e1 = endpoint_error(0.1);
  double e2 = endpoint_error(0.05);
  double e3 = endpoint_error(0.025);
  double order12 = std::log2(e1 / e2);
  double order23 = std::log2(e2 / e3);
  CHECK(order12 >= 4.0);
  CHECK(order23 >= 4.0);
  CHECK(order12 < 7.0);  // sanity: it is a 5th-order method, not magic
}

TEST_CASE("linear event localization") {
  const RhsFn slope = [](double, std::span<const double>, std::span<double> dy) {
    dy[0] = -1.0;
  };
  std::vector<double> y0{1.0};
  std::vector<EventSpec> events;
  events.push_back({[](double, std::span<const double> y) { return y[0]; }, -1, false, 7});
  auto res = integrate(slope, y0, 0.0, 3.0, tight(), events);
  CHECK(res.status == IntegrateStatus::kReachedEnd);
  REQUIRE(res.events.size() == 1);
  CHECK(res.events[0].id == 7);
  CHECK(std::fabs(res.events[0].time - 1.0) < 1e-6);
  CHECK(!res.events[0].degenerate);

  // terminal variant stops at the crossing
  events[0].terminal = true;
  auto stop = integrate(slope, y0, 0.0, 3.0, tight(), events);
  CHECK(stop.status == IntegrateStatus::kEventStop);
  CHECK(std::fabs(stop.t_final - 1.0) < 1e-6);
  CHECK(std::fabs(stop.y_final[0]) < 1e-6);
}

TEST_CASE("degenerate event fires at the start time") {
  const RhsFn slope = [](double, std::span<const double>, std::span<double> dy) {
    dy[0] = -1.0;
  };
  std::vector<double> y0{-0.5};
  std::vector<EventSpec> events;
  events.push_back({[](double, std::span<const double> y) { return y[0]; }, -1, true, 1});
  auto res = integrate(slope, y0, 0.0, 3.0, tight(), events);
  CHECK(res.status == IntegrateStatus::kEventStop);
  REQUIRE(res.events.size() == 1);
  CHECK(res.events[0].degenerate);
  CHECK(res.events[0].time == 0.0);
  CHECK(res.t_final == 0.0);
}

TEST_CASE("no sign change, no event") {
  std::vector<double> y0{1.0};
  std::vector<EventSpec> events;
  events.push_back(
      {[](double, std::span<const double> y) { return y[0] + 2.0; }, -1, false, 0});
  auto res = integrate(kDecay, y0, 0.0, 5.0, tight(), events);
  CHECK(res.events.empty());
  CHECK(res.status == IntegrateStatus::kReachedEnd);
}

TEST_CASE("linear system matches the spectral closed form") {
  // y' = A y with the 2x2 generator: modes 0 and -24/7
  GeneratorMatrix gen = build_generator(2, 1, 2.0);
  const RhsFn rhs = [&gen](double, std::span<const double> y, std::span<double> dy) {
    auto v = apply_dense(gen, y);
    dy[0] = v[0];
    dy[1] = v[1];
  };
  std::vector<double> y0{1.0, 0.0};
  auto res = integrate(rhs, y0, 0.0, 1.0, tight());
  double decayed = std::exp(-24.0 / 7.0);
  CHECK(std::fabs(res.y_final[0] - 0.5 * (1.0 + decayed)) < 1e-6);
  CHECK(std::fabs(res.y_final[1] - 0.5 * (1.0 - decayed)) < 1e-6);
}

TEST_CASE("coupled rhs example at m = 1") {
  // u = (1, 0), v = w = 0: du/dt = A u + f must open as (-12/7 - 2.2, 12/7).
  // Probe the integrated system's first step against that hand value.
  DiffusionOperator op(2, 1, 2.0);
  KineticParams kp;
  LevelState state;
  state.level = 1;
  state.u = {1.0, 0.0};
  state.v = {0.0, 0.0};
  state.w = {0.0, 0.0};
  state.active = {1, 1};
  SolverConfig cfg = tight();
  cfg.h_init = 1e-6;
  auto sim = simulate_level(state, kp, op, cfg, 1e-6);
  const auto& traj = sim.integration.trajectory;
  REQUIRE(traj.size() >= 2);
  double h = traj.times.back() - traj.times.front();
  double du0 = (traj.states.back()[0] - 1.0) / h;
  double du1 = traj.states.back()[1] / h;
  CHECK(du0 == doctest::Approx(-12.0 / 7.0 - 2.2).epsilon(1e-4));
  CHECK(du1 == doctest::Approx(12.0 / 7.0).epsilon(1e-4));
}

TEST_CASE("m = 0 reduces to pure reaction kinetics") {
  DiffusionOperator op(2, 0, 2.0);
  KineticParams kp;
  LevelState state;
  state.u = {8.0};
  state.v = {10.0};
  state.w = {0.0};
  state.active = {1};
  // derivative at t=0 equals the raw reaction rates: force a tiny first step
  SolverConfig cfg = tight();
  cfg.h_init = 1e-6;
  auto sim = simulate_level(state, kp, op, cfg, 1.0);
  const auto& traj = sim.integration.trajectory;
  REQUIRE(traj.size() >= 2);
  double h = traj.times[1] - traj.times[0];
  REQUIRE(h == doctest::Approx(1e-6));
  ReactionRates r = reaction_rates({8.0, 10.0, 0.0}, kp);
  CHECK(traj.states[1][0] == doctest::Approx(8.0 + h * r.f).epsilon(1e-9));
  CHECK(traj.states[1][1] == doctest::Approx(10.0 + h * r.g).epsilon(1e-9));
  CHECK(traj.states[1][2] == doctest::Approx(0.0 + h * r.h).epsilon(1e-4));
}

TEST_CASE("conservation of v + w under the full coupled rhs") {
  DiffusionOperator op(2, 2, 2.0);
  KineticParams kp;
  LevelState state;
  state.level = 2;
  state.u = {10.0, 8.0, 9.0, 7.5};
  state.v = {15.0, 13.0, 14.0, 12.0};
  state.w = {0.0, 0.0, 0.0, 0.0};
  state.active = {1, 1, 1, 1};
  SolverConfig cfg = tight();
  auto sim = simulate_level(state, kp, op, cfg, 20.0);
  CHECK(sim.integration.status == IntegrateStatus::kReachedEnd);

  double total0 = 0.0;
  for (std::size_t i = 0; i < 4; ++i) total0 += state.v[i] + state.w[i];
  double state_norm = 0.0;
  for (double x : sim.integration.trajectory.states.front()) state_norm += std::fabs(x);
  double bound = 10.0 * (cfg.atol + cfg.rtol * state_norm) + 1e-10;

  double min_conc = 0.0;
  for (std::size_t row = 0; row < sim.integration.trajectory.size(); ++row) {
    const auto& y = sim.integration.trajectory.states[row];
    double total = 0.0;
    for (std::size_t i = 0; i < 4; ++i) total += y[4 + i] + y[8 + i];
    CHECK(std::fabs(total - total0) < bound);
    for (double x : y) min_conc = std::min(min_conc, x);
  }
  CHECK(min_conc >= -1e-9);
}

TEST_CASE("identical inputs give bitwise-identical trajectories") {
  DiffusionOperator op(2, 1, 2.0);
  KineticParams kp;
  LevelState state;
  state.level = 1;
  state.u = {10.0, 8.0};
  state.v = {15.0, 13.0};
  state.w = {0.0, 0.0};
  state.active = {1, 1};
  auto a = simulate_level(state, kp, op, tight(), 10.0);
  auto b = simulate_level(state, kp, op, tight(), 10.0);
  REQUIRE(a.integration.trajectory.size() == b.integration.trajectory.size());
  for (std::size_t row = 0; row < a.integration.trajectory.size(); ++row) {
    CHECK(a.integration.trajectory.times[row] == b.integration.trajectory.times[row]);
    CHECK(a.integration.trajectory.states[row] == b.integration.trajectory.states[row]);
  }
}

TEST_CASE("trajectory row count matches steps plus events plus the initial sample") {
  const RhsFn slope = [](double, std::span<const double>, std::span<double> dy) {
    dy[0] = -1.0;
  };
  std::vector<double> y0{1.0};
  std::vector<EventSpec> events;
  events.push_back({[](double, std::span<const double> y) { return y[0]; }, -1, false, 0});
  auto res = integrate(slope, y0, 0.0, 2.0, tight(), events);
  CHECK(res.trajectory.size() ==
        1 + static_cast<std::size_t>(res.steps_accepted) + res.events.size());
}

TEST_CASE("failure modes report the last valid state") {
  SolverConfig tiny = tight();
  tiny.max_steps = 5;
  std::vector<double> y0{1.0};
  auto res = integrate(kDecay, y0, 0.0, 100.0, tiny);
  CHECK(res.status == IntegrateStatus::kStepBudgetExhausted);
  CHECK(res.t_final < 100.0);
  CHECK(res.y_final.size() == 1);
  CHECK(!res.message.empty());

  // a right-hand side so wild the controller cannot shrink enough
  const RhsFn stiff = [](double t, std::span<const double> y, std::span<double> dy) {
    dy[0] = t < 0.5 ? -y[0] : -1e18 * y[0];
  };
  SolverConfig narrow = tight();
  narrow.h_min = 1e-3;
  narrow.h_init = 1e-2;
  auto res2 = integrate(stiff, y0, 0.0, 10.0, narrow);
  CHECK(res2.status == IntegrateStatus::kStepUnderflow);
}

TEST_CASE("solver config validation") {
  SolverConfig bad;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = SolverConfig{};
  bad.h_min = 0.5;
  bad.h_init = 0.1;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = SolverConfig{};
  bad.h_max = 1e-6;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
  bad = SolverConfig{};
  bad.max_steps = 0;
  CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}
