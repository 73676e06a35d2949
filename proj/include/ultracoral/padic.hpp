#pragma once

#include <complex>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace ultracoral {

// Integer p-adic arithmetic on the truncated tree: indices 0..p^m-1 stand
// for the balls of radius p^-m, with digit i_k choosing the branch taken
// at level k.

inline constexpr int kValuationInfinity = std::numeric_limits<int>::max();

bool is_prime(long long p);

// largest k with p^k | n; kValuationInfinity for n = 0
int valuation(long long n, long long p);

// |x|_p held exactly as (p, valuation); value() is the float view
struct UltrametricNorm {
  long long p = 2;
  int val = 0;
  bool zero = false;

  double value() const;
  bool operator==(const UltrametricNorm&) const = default;
};

UltrametricNorm ultrametric_norm(long long i, long long j, long long p);

struct IndexLattice {
  long long p;
  int m;
  long long size;  // p^m

  static constexpr long long kMaxCompartments = 1ll << 20;

  IndexLattice(long long prime, int depth);

  std::vector<int> digits(long long index) const;
  long long from_digits(std::span<const int> digits) const;
};

// smallest digit position where i and j differ; m when i == j.
// Equivalent to |i-j|_p = p^-k for i != j.
int divergence_level(long long i, long long j, long long p, int m);

// all j in the lattice with j = center (mod p^k), ascending
std::vector<long long> ball_members(const IndexLattice& lattice, long long center, int k);

// Wavelet test vector supported on one ball of radius p^r (r <= 0), sampled
// on the lattice representatives: entry exp(2*pi*i * j * digit_{-r}(x) / p)
// inside the ball, 0 outside. The overall normalization constant is
// dropped; these are used as exact eigenvectors of the diffusion
// generator. For p = 2 the entries are real (+1/-1).
std::vector<std::complex<double>> kozyrev_vector(const IndexLattice& lattice, int r,
                                                 int j, long long ball);

}  // namespace ultracoral
