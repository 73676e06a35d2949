#include "ultracoral/padic.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ultracoral {

bool is_prime(long long p) {
  if (p < 2) return false;
  if (p < 4) return true;
  if (p % 2 == 0) return false;
  for (long long q = 3; q * q <= p; q += 2)
    if (p % q == 0) return false;
  return true;
}

int valuation(long long n, long long p) {
  if (p < 2 || !is_prime(p)) throw std::invalid_argument("valuation: p must be prime");
  if (n == 0) return kValuationInfinity;
  if (n < 0) n = -n;
  int k = 0;
  while (n % p == 0) {
    n /= p;
    ++k;
  }
  return k;
}

double UltrametricNorm::value() const {
  if (zero) return 0.0;
  return std::pow(static_cast<double>(p), -static_cast<double>(val));
}

UltrametricNorm ultrametric_norm(long long i, long long j, long long p) {
  if (i == j) return {p, 0, true};
  return {p, valuation(i - j, p), false};
}

IndexLattice::IndexLattice(long long prime, int depth) : p(prime), m(depth) {
  if (!is_prime(p)) throw std::invalid_argument("IndexLattice: p must be prime");
  if (m < 0) throw std::invalid_argument("IndexLattice: m must be >= 0");
  size = 1;
  for (int k = 0; k < m; ++k) {
    size *= p;
    if (size > kMaxCompartments)
      throw std::invalid_argument("IndexLattice: p^m exceeds the compartment cap");
  }
}

std::vector<int> IndexLattice::digits(long long index) const {
  if (index < 0 || index >= size)
    throw std::out_of_range("IndexLattice::digits: index outside [0, p^m)");
  std::vector<int> out(static_cast<std::size_t>(m));
  for (int k = 0; k < m; ++k) {
    out[static_cast<std::size_t>(k)] = static_cast<int>(index % p);
    index /= p;
  }
  return out;
}

long long IndexLattice::from_digits(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) != m)
    throw std::invalid_argument("IndexLattice::from_digits: need exactly m digits");
  long long value = 0;
  long long scale = 1;
  for (int k = 0; k < m; ++k) {
    int d = digits[static_cast<std::size_t>(k)];
    if (d < 0 || d >= p) throw std::invalid_argument("IndexLattice::from_digits: digit out of range");
    value += d * scale;
    scale *= p;
  }
  return value;
}

int divergence_level(long long i, long long j, long long p, int m) {
  if (i == j) return m;
  int v = valuation(i - j, p);
  return v < m ? v : m;
}

std::vector<long long> ball_members(const IndexLattice& lattice, long long center, int k) {
  if (k < 0 || k > lattice.m)
    throw std::out_of_range("ball_members: level k outside [0, m]");
  if (center < 0 || center >= lattice.size)
    throw std::out_of_range("ball_members: center outside the lattice");
  long long pk = 1;
  for (int l = 0; l < k; ++l) pk *= lattice.p;
  long long residue = center % pk;
  std::vector<long long> members;
  members.reserve(static_cast<std::size_t>(lattice.size / pk));
  for (long long j = residue; j < lattice.size; j += pk) members.push_back(j);
  return members;
}

std::vector<std::complex<double>> kozyrev_vector(const IndexLattice& lattice, int r,
                                                 int j, long long ball) {
  if (r > 0) throw std::invalid_argument("kozyrev_vector: r must be <= 0");
  if (1 - r > lattice.m)
    throw std::invalid_argument("kozyrev_vector: pattern not resolvable at this depth");
  if (j < 1 || j >= lattice.p)
    throw std::invalid_argument("kozyrev_vector: j must lie in [1, p-1]");
  int k = -r;  // ball level
  long long pk = 1;
  for (int l = 0; l < k; ++l) pk *= lattice.p;
  if (ball < 0 || ball >= pk)
    throw std::invalid_argument("kozyrev_vector: ball selector outside [0, p^-r)");

  std::vector<std::complex<double>> out(static_cast<std::size_t>(lattice.size));
  for (long long i = ball; i < lattice.size; i += pk) {
    long long digit_k = (i / pk) % lattice.p;
    long long t = (static_cast<long long>(j) * digit_k) % lattice.p;
    std::complex<double> value;
    if (t == 0) {
      value = {1.0, 0.0};
    } else if (2 * t == lattice.p) {
      value = {-1.0, 0.0};  // keeps p = 2 patterns exactly +/-1
    } else {
      double phase = 2.0 * std::numbers::pi * static_cast<double>(t) /
                     static_cast<double>(lattice.p);
      value = {std::cos(phase), std::sin(phase)};
    }
    out[static_cast<std::size_t>(i)] = value;
  }
  return out;
}

}  // namespace ultracoral
