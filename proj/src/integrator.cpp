#include "ultracoral/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ultracoral {

void validate(const SolverConfig& cfg) {
  if (!(cfg.rtol > 0.0)) throw std::invalid_argument("solver.rtol: must be positive");
  if (!(cfg.atol > 0.0)) throw std::invalid_argument("solver.atol: must be positive");
  if (!(cfg.h_min > 0.0)) throw std::invalid_argument("solver.h_min: must be positive");
  if (!(cfg.h_init >= cfg.h_min))
    throw std::invalid_argument("solver.h_init: must be >= h_min");
  if (!(cfg.h_max >= cfg.h_init))
    throw std::invalid_argument("solver.h_max: must be >= h_init");
  if (cfg.max_steps <= 0) throw std::invalid_argument("solver.max_steps: must be positive");
  if (!(cfg.event_tol > 0.0)) throw std::invalid_argument("solver.event_tol: must be positive");
}

const char* to_string(IntegrateStatus s) {
  switch (s) {
    case IntegrateStatus::kReachedEnd:
      return "reached-end";
    case IntegrateStatus::kEventStop:
      return "event-stop";
    case IntegrateStatus::kStepBudgetExhausted:
      return "step-budget-exhausted";
    case IntegrateStatus::kStepUnderflow:
      return "step-underflow";
  }
  return "unknown";
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
constexpr double kA21 = 1.0 / 5.0;
constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                 kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                 kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                 kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                 kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
// dense-output weights
constexpr double kD1 = -12715105075.0 / 11282082432.0;
constexpr double kD3 = 87487479700.0 / 32700410799.0;
constexpr double kD4 = -10690763975.0 / 1880347072.0;
constexpr double kD5 = 701980252875.0 / 199316789632.0;
constexpr double kD6 = -1453857185.0 / 822651844.0;
constexpr double kD7 = 69997945.0 / 29380423.0;

// PI controller constants (Lund stabilization)
constexpr double kBeta = 0.04;
constexpr double kExpo1 = 0.2 - kBeta * 0.75;
constexpr double kSafe = 0.9;
constexpr double kFacMin = 0.2;  // strongest shrink per step: h/5
constexpr double kFacMax = 10.0; // strongest growth per step: 10h

struct Workspace {
  std::vector<double> k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;

  explicit Workspace(std::size_t n)
      : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n) {}
};

// one embedded step; expects k1 = rhs(t, y), leaves k7 = rhs(t+h, ynew)
void step_core(const RhsFn& rhs, double t, std::span<const double> y, double h,
               Workspace& ws) {
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) ws.ytmp[i] = y[i] + h * kA21 * ws.k1[i];
  rhs(t + kC2 * h, ws.ytmp, ws.k2);
  for (std::size_t i = 0; i < n; ++i)
    ws.ytmp[i] = y[i] + h * (kA31 * ws.k1[i] + kA32 * ws.k2[i]);
  rhs(t + kC3 * h, ws.ytmp, ws.k3);
  for (std::size_t i = 0; i < n; ++i)
    ws.ytmp[i] = y[i] + h * (kA41 * ws.k1[i] + kA42 * ws.k2[i] + kA43 * ws.k3[i]);
  rhs(t + kC4 * h, ws.ytmp, ws.k4);
  for (std::size_t i = 0; i < n; ++i)
    ws.ytmp[i] = y[i] + h * (kA51 * ws.k1[i] + kA52 * ws.k2[i] + kA53 * ws.k3[i] +
                             kA54 * ws.k4[i]);
  rhs(t + kC5 * h, ws.ytmp, ws.k5);
  for (std::size_t i = 0; i < n; ++i)
    ws.ytmp[i] = y[i] + h * (kA61 * ws.k1[i] + kA62 * ws.k2[i] + kA63 * ws.k3[i] +
                             kA64 * ws.k4[i] + kA65 * ws.k5[i]);
  rhs(t + h, ws.ytmp, ws.k6);
  for (std::size_t i = 0; i < n; ++i)
    ws.ynew[i] = y[i] + h * (kB1 * ws.k1[i] + kB3 * ws.k3[i] + kB4 * ws.k4[i] +
                             kB5 * ws.k5[i] + kB6 * ws.k6[i]);
  rhs(t + h, ws.ynew, ws.k7);
  for (std::size_t i = 0; i < n; ++i)
    ws.err[i] = h * (kE1 * ws.k1[i] + kE3 * ws.k3[i] + kE4 * ws.k4[i] +
                     kE5 * ws.k5[i] + kE6 * ws.k6[i] + kE7 * ws.k7[i]);
}

// quartic interpolant over the accepted step [t, t+h]
struct DenseOutput {
  double t = 0.0, h = 1.0;
  std::vector<double> c1, c2, c3, c4, c5;

  DenseOutput(std::size_t n) : c1(n), c2(n), c3(n), c4(n), c5(n) {}

  void build(double t0, double h0, std::span<const double> y,
             const Workspace& ws) {
    t = t0;
    h = h0;
    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) {
      double ydiff = ws.ynew[i] - y[i];
      double bspl = h * ws.k1[i] - ydiff;
      c1[i] = y[i];
      c2[i] = ydiff;
      c3[i] = bspl;
      c4[i] = ydiff - h * ws.k7[i] - bspl;
      c5[i] = h * (kD1 * ws.k1[i] + kD3 * ws.k3[i] + kD4 * ws.k4[i] +
                   kD5 * ws.k5[i] + kD6 * ws.k6[i] + kD7 * ws.k7[i]);
    }
  }

  void eval(double time, std::vector<double>& out) const {
    double theta = (time - t) / h;
    double theta1 = 1.0 - theta;
    out.resize(c1.size());
    for (std::size_t i = 0; i < c1.size(); ++i)
      out[i] = c1[i] + theta * (c2[i] + theta1 * (c3[i] + theta * (c4[i] + theta1 * c5[i])));
  }
};

struct EventState {
  bool armed = true;
  double g = 0.0;
};

bool crossed(double g_from, double g_to, int direction) {
  if (direction <= 0 && g_from > 0.0 && g_to <= 0.0) return true;
  if (direction >= 0 && g_from < 0.0 && g_to >= 0.0) return true;
  return false;
}

bool at_start_condition(double g0, int direction) {
  if (direction < 0) return g0 <= 0.0;
  if (direction > 0) return g0 >= 0.0;
  return g0 == 0.0;
}

struct LocatedEvent {
  std::size_t index;
  double time;
  std::vector<double> state;
};

}  // namespace

IntegrationResult integrate(const RhsFn& rhs, std::span<const double> y0, double t0,
                            double t_end, const SolverConfig& cfg,
                            std::span<const EventSpec> events, bool record_trajectory) {
  validate(cfg);
  if (!(t_end >= t0)) throw std::invalid_argument("integrate: t_end must be >= t0");
  const std::size_t n = y0.size();

  IntegrationResult res;
  std::vector<double> y(y0.begin(), y0.end());
  double t = t0;

  auto sample = [&](double time, const std::vector<double>& state) {
    if (!record_trajectory) return;
    res.trajectory.times.push_back(time);
    res.trajectory.states.push_back(state);
  };
  auto finish = [&](IntegrateStatus status, std::string message = {}) {
    res.status = status;
    res.t_final = t;
    res.y_final = y;
    res.message = std::move(message);
    return res;
  };

  sample(t, y);

  std::vector<EventState> estate(events.size());
  bool stop_now = false;
  for (std::size_t j = 0; j < events.size(); ++j) {
    estate[j].g = events[j].fn(t, y);
    if (at_start_condition(estate[j].g, events[j].direction)) {
      estate[j].armed = false;
      res.events.push_back({events[j].id, j, t, y, true});
      if (events[j].terminal) stop_now = true;
    }
  }
  if (stop_now) return finish(IntegrateStatus::kEventStop);
  if (t_end == t0) return finish(IntegrateStatus::kReachedEnd);

  Workspace ws(n);
  DenseOutput dense(n);
  rhs(t, y, ws.k1);

  double h = std::clamp(cfg.h_init, cfg.h_min, cfg.h_max);
  if (h > t_end - t0) h = t_end - t0;  // spans below h_min still take one step
  double facold = 1e-4;
  long long attempts = 0;
  std::vector<double> ytmp_event;

  while (true) {
    if (attempts >= cfg.max_steps)
      return finish(IntegrateStatus::kStepBudgetExhausted,
                    "step budget exhausted at t = " + std::to_string(t));
    bool last = false;
    if (t + 1.01 * h >= t_end) {
      h = t_end - t;
      last = true;
    }
    ++attempts;
    step_core(rhs, t, y, h, ws);

    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double sk = cfg.atol + cfg.rtol * std::max(std::fabs(y[i]), std::fabs(ws.ynew[i]));
      double r = ws.err[i] / sk;
      err += r * r;
    }
    err = std::sqrt(err / static_cast<double>(n));

    double fac11 = std::pow(err, kExpo1);
    if (err <= 1.0) {
      ++res.steps_accepted;
      facold = std::max(err, 1e-4);
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::max(1.0 / kFacMax, std::min(1.0 / kFacMin, fac / kSafe));
      double hnew = h / fac;

      double t1 = last ? t_end : t + h;

      // event scan over the accepted step
      std::vector<LocatedEvent> fired;
      bool dense_ready = false;
      for (std::size_t j = 0; j < events.size(); ++j) {
        if (!estate[j].armed) continue;
        double g1 = events[j].fn(t1, ws.ynew);
        if (crossed(estate[j].g, g1, events[j].direction)) {
          if (!dense_ready) {
            dense.build(t, h, y, ws);
            dense_ready = true;
          }
          double a = t, b = t1;
          double ga = estate[j].g;
          while (b - a > cfg.event_tol) {
            double mid = 0.5 * (a + b);
            dense.eval(mid, ytmp_event);
            double gm = events[j].fn(mid, ytmp_event);
            if (crossed(ga, gm, events[j].direction)) {
              b = mid;
            } else {
              a = mid;
              ga = gm;
            }
          }
          dense.eval(b, ytmp_event);
          fired.push_back({j, b, ytmp_event});
        }
        estate[j].g = g1;
      }

      if (!fired.empty()) {
        std::sort(fired.begin(), fired.end(),
                  [](const LocatedEvent& a, const LocatedEvent& b) {
                    return a.time < b.time || (a.time == b.time && a.index < b.index);
                  });
        double t_stop = 0.0;
        bool terminal_hit = false;
        for (const auto& ev : fired) {
          if (events[ev.index].terminal) {
            t_stop = ev.time;
            terminal_hit = true;
            break;
          }
        }
        for (const auto& ev : fired) {
          if (terminal_hit && ev.time > t_stop) continue;  // stays armed, refires later
          estate[ev.index].armed = false;
          res.events.push_back({events[ev.index].id, ev.index, ev.time, ev.state, false});
          sample(ev.time, ev.state);
          if (terminal_hit && events[ev.index].terminal && ev.time == t_stop) {
            t = ev.time;
            y = ev.state;
            return finish(IntegrateStatus::kEventStop);
          }
        }
      }

      t = t1;
      y = ws.ynew;
      sample(t, y);
      std::swap(ws.k1, ws.k7);  // FSAL
      if (last) return finish(IntegrateStatus::kReachedEnd);
      h = std::clamp(hnew, cfg.h_min, cfg.h_max);
    } else {
      ++res.steps_rejected;
      double hnew = h / std::min(1.0 / kFacMin, fac11 / kSafe);
      if (hnew < cfg.h_min) {
        if (h <= cfg.h_min * (1.0 + 1e-12))
          return finish(IntegrateStatus::kStepUnderflow,
                        "step size underflow at t = " + std::to_string(t));
        hnew = cfg.h_min;
      }
      h = hnew;
    }
  }
}

void dopri5_fixed_step(const RhsFn& rhs, double t, std::span<const double> y, double h,
                       std::span<double> y_out) {
  Workspace ws(y.size());
  rhs(t, y, ws.k1);
  step_core(rhs, t, y, h, ws);
  std::copy(ws.ynew.begin(), ws.ynew.end(), y_out.begin());
}

}  // namespace ultracoral
