#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ultracoral/dd.hpp"
#include "ultracoral/padic.hpp"

namespace ultracoral {

// Diffusion generator on the depth-m tree. A is dissipative: off-diagonal
// entries kappa * p^-m / |i-j|_p^(alpha+1) > 0, diagonal the negative row
// sum, so du/dt = A u drives every compartment toward the branch average.

double vladimirov_kappa(long long p, double alpha);

// spectral shift of the operator restricted to the unit ball
double vladimirov_mu(long long p, double alpha);

// p^(k*(alpha+1)); exact integer powers when alpha is integral
double level_coupling(long long p, double alpha, int k);

struct GeneratorMatrix {
  long long p = 2;
  int m = 0;
  double alpha = 2.0;
  double kappa = 0.0;
  double mu = 0.0;
  std::size_t size = 1;
  std::vector<double> entries;  // row-major size x size

  static constexpr std::size_t kDenseCap = 4096;

  double at(std::size_t i, std::size_t j) const { return entries[i * size + j]; }
};

GeneratorMatrix build_generator(long long p, int m, double alpha);

// serial dense matvec; the reference path every other kernel is tested against
std::vector<double> apply_dense(const GeneratorMatrix& gen, std::span<const double> x);

// parallel dense matvec (row-parallel, per-row order fixed); bitwise equal
// to apply_dense for any thread count
std::vector<double> apply_dense_parallel(const GeneratorMatrix& gen,
                                         std::span<const double> x);

// Hierarchical fast path, O(m p^m): level-k ball sums S_k[b] turn the
// matvec into per-index telescoping differences,
//   (Ax)_i = kappa p^-m sum_k p^(k(alpha+1)) (S_k[b_k(i)] - S_(k+1)[b_(k+1)(i)])
//            - c x_i,
// with c the same sum against x = 1 (a closed-form count). The per-index
// accumulation order is fixed, so the parallel variant is bitwise equal to
// the serial one.
std::vector<double> apply_fast(long long p, int m, double alpha,
                               std::span<const double> x, bool parallel);
std::vector<double> apply_fast(long long p, int m, double alpha,
                               std::span<const double> x);

struct SpectrumLine {
  double eigenvalue;
  long long multiplicity;
};

// {0 : 1} plus {-(p^((1-r)alpha) - mu) : (p-1) p^-r} for r = 0..-(m-1),
// ascending by eigenvalue; multiplicities sum to p^m
std::vector<SpectrumLine> expected_spectrum(long long p, int m, double alpha);

struct SpectrumCheck {
  double computed;
  double expected;
  long long multiplicity;
  double abs_error;  // max over the multiplicity cluster
};

// Numerical eigendecomposition against the closed form, one row per
// distinct expected eigenvalue. Runs in double-double precision: at alpha=5
// the generator norm reaches ~1e12 and double rounding alone already moves
// eigenvalues past useful tolerances.
std::vector<SpectrumCheck> verify_spectrum(long long p, int m, double alpha);

// Operator view used by the ODE right-hand side: dense matvec at or below
// the threshold, hierarchical fast path above it.
class DiffusionOperator {
 public:
  static constexpr std::size_t kFastThreshold = 64;

  DiffusionOperator(long long p, int m, double alpha);

  void apply(std::span<const double> x, std::span<double> y) const;
  std::size_t size() const { return n_; }
  long long p() const { return p_; }
  int m() const { return m_; }
  double alpha() const { return alpha_; }

 private:
  long long p_;
  int m_;
  double alpha_;
  std::size_t n_;
  std::vector<double> dense_;  // materialized only when n_ <= kFastThreshold
};

}  // namespace ultracoral
