#pragma once

#include <array>
#include <vector>

namespace ultracoral {

// Dimensionless three-species calcification kinetics:
//   f(u,v) = -u (u - v + sigma - beta)        carbonate
//   g(u,v) = -eta v (v - u + beta)^2          calcium
//   h(u,v) = +eta v (v - u + beta)^2          calcium carbonate
// h = -g exactly; reaction-only trajectories conserve v + w.

struct KineticParams {
  double d = 0.1;         // diffusivity ratio d2/d1
  double eta = 1.0;       // rate ratio
  double beta = -0.2;     // initial ion imbalance, negative in regime
  double sigma = 1.0;     // initial CO2 level
  double kappa_sp = 1.0;  // saturation constant for the halting index
};

// throws std::invalid_argument with a field-path message; a non-negative
// beta is accepted only when allow_nonnegative_beta is set (out-of-regime
// exploratory runs)
void validate(const KineticParams& kp, bool allow_nonnegative_beta = false);

struct PhysicalParams {
  double k1_prime;  // rate of reaction (1) with water absorbed
  double k2;        // rate of reaction (2)
  double d1;        // carbonate diffusion coefficient
  double d2;        // calcium diffusion coefficient
  double z0;        // initial CO2 concentration
  double u0;        // initial carbonate
  double v0;        // initial calcium
};

struct SpeciesState {
  double u = 0.0;
  double v = 0.0;
  double w = 0.0;

  bool operator==(const SpeciesState&) const = default;
};

struct Nondimensional {
  KineticParams params;
  double concentration_scale;  // d1 / k1'
  double time_scale;           // 1 / d1
};

Nondimensional nondimensionalize(const PhysicalParams& phys);

struct ReactionRates {
  double f;
  double g;
  double h;
};

ReactionRates reaction_rates(const SpeciesState& s, const KineticParams& kp);

// row-major 2x2 Jacobian of (f, g) in (u, v)
std::array<double, 4> jacobian(double u, double v, const KineticParams& kp);

enum class Stability {
  kAsymptoticallyStable,
  kNonHyperbolicStable,
};

const char* to_string(Stability s);

struct Equilibrium {
  double u;
  double v;
  double lambda1;
  double lambda2;
  Stability stability;
};

// the non-negative equilibria (0,0) and (0,-beta) with closed-form
// Jacobian eigenvalues
std::vector<Equilibrium> equilibria(const KineticParams& kp);

// Omega = u v / kappa_sp
double saturation_index(double u, double v, double kappa_sp);

}  // namespace ultracoral
