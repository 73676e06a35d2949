#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace ultracoral {

struct SolverConfig {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 1e-3;
  double h_min = 1e-12;
  double h_max = 10.0;
  long long max_steps = 1000000;  // attempted steps, accepted + rejected
  double event_tol = 1e-9;        // time bracket width for event localization
};

void validate(const SolverConfig& cfg);

using RhsFn = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;
using EventFn = std::function<double(double t, std::span<const double> y)>;

// Scalar event function watched for a sign change across accepted steps.
// direction -1 fires on positive -> non-positive, +1 on the reverse, 0 on
// any sign change. Events are one-shot. A terminal event stops the
// integration at its localized time.
struct EventSpec {
  EventFn fn;
  int direction = -1;
  bool terminal = false;
  long long id = 0;
};

enum class IntegrateStatus {
  kReachedEnd,
  kEventStop,
  kStepBudgetExhausted,
  kStepUnderflow,
};

const char* to_string(IntegrateStatus s);

struct EventRecord {
  long long id = 0;
  std::size_t event_index = 0;
  double time = 0.0;
  std::vector<double> state;
  bool degenerate = false;  // condition already satisfied at the start time
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;

  std::size_t size() const { return times.size(); }
};

struct IntegrationResult {
  IntegrateStatus status = IntegrateStatus::kReachedEnd;
  double t_final = 0.0;
  std::vector<double> y_final;
  Trajectory trajectory;  // initial sample, accepted steps, event samples
  std::vector<EventRecord> events;
  long long steps_accepted = 0;
  long long steps_rejected = 0;
  std::string message;
};

// Embedded Dormand-Prince 4(5) with PI step control. Local error per step
// is held to atol + rtol*|y|; event sign changes are bracketed within one
// accepted step and refined by bisection on the quartic interpolant until
// the time bracket is below event_tol. Budget exhaustion and step
// underflow return the last valid state. Deterministic: identical inputs
// give bitwise-identical results.
IntegrationResult integrate(const RhsFn& rhs, std::span<const double> y0, double t0,
                            double t_end, const SolverConfig& cfg,
                            std::span<const EventSpec> events = {},
                            bool record_trajectory = true);

// One embedded step at fixed h (5th-order solution), no step control;
// exposed for convergence-order measurements.
void dopri5_fixed_step(const RhsFn& rhs, double t, std::span<const double> y, double h,
                       std::span<double> y_out);

}  // namespace ultracoral
