#include "ultracoral/kinetics.hpp"

#include <stdexcept>

namespace ultracoral {

void validate(const KineticParams& kp, bool allow_nonnegative_beta) {
  if (!(kp.d > 0.0)) throw std::invalid_argument("model.d: must be positive");
  if (!(kp.eta > 0.0)) throw std::invalid_argument("model.eta: must be positive");
  if (!(kp.sigma > 0.0)) throw std::invalid_argument("model.sigma: must be positive");
  if (!(kp.kappa_sp > 0.0)) throw std::invalid_argument("model.kappa_sp: must be positive");
  if (!(kp.beta < 0.0) && !allow_nonnegative_beta)
    throw std::invalid_argument("model.beta: must be negative");
}

Nondimensional nondimensionalize(const PhysicalParams& phys) {
  if (!(phys.k1_prime > 0.0)) throw std::invalid_argument("k1_prime: must be positive");
  if (!(phys.k2 > 0.0)) throw std::invalid_argument("k2: must be positive");
  if (!(phys.d1 > 0.0)) throw std::invalid_argument("d1: must be positive");
  if (!(phys.d2 > 0.0)) throw std::invalid_argument("d2: must be positive");
  if (!(phys.z0 > 0.0)) throw std::invalid_argument("z0: must be positive");
  if (!(phys.u0 > 0.0)) throw std::invalid_argument("u0: must be positive");
  if (!(phys.v0 > 0.0)) throw std::invalid_argument("v0: must be positive");

  Nondimensional out;
  out.params.d = phys.d2 / phys.d1;
  out.params.eta = phys.d1 * phys.k2 / (phys.k1_prime * phys.k1_prime);
  out.params.beta = (phys.u0 - phys.v0) * phys.k1_prime / phys.d1;
  out.params.sigma = phys.z0 * phys.k1_prime / phys.d1;
  out.concentration_scale = phys.d1 / phys.k1_prime;
  out.time_scale = 1.0 / phys.d1;
  return out;
}

ReactionRates reaction_rates(const SpeciesState& s, const KineticParams& kp) {
  double f = -s.u * (s.u - s.v + kp.sigma - kp.beta);
  double q = s.v - s.u + kp.beta;
  double g = -kp.eta * s.v * q * q;
  return {f, g, -g};
}

std::array<double, 4> jacobian(double u, double v, const KineticParams& kp) {
  double q = v - u + kp.beta;
  return {
      -(u - v + kp.sigma - kp.beta) - u,
      u,
      2.0 * kp.eta * v * q,
      -kp.eta * q * q - 2.0 * kp.eta * v * q,
  };
}

const char* to_string(Stability s) {
  switch (s) {
    case Stability::kAsymptoticallyStable:
      return "asymptotically-stable";
    case Stability::kNonHyperbolicStable:
      return "non-hyperbolic-stable";
  }
  return "unknown";
}

std::vector<Equilibrium> equilibria(const KineticParams& kp) {
  std::vector<Equilibrium> out;
  out.push_back({0.0, 0.0, -(kp.sigma - kp.beta), -kp.eta * kp.beta * kp.beta,
                 Stability::kAsymptoticallyStable});
  out.push_back({0.0, -kp.beta, -kp.sigma, 0.0, Stability::kNonHyperbolicStable});
  return out;
}

double saturation_index(double u, double v, double kappa_sp) {
  if (!(kappa_sp > 0.0)) throw std::invalid_argument("kappa_sp: must be positive");
  return u * v / kappa_sp;
}

}  // namespace ultracoral
