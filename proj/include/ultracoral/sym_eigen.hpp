#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "ultracoral/dd.hpp"

namespace ultracoral {

// Eigenvalues of a dense symmetric matrix: Householder reduction to
// tridiagonal form followed by implicit-shift QL, no eigenvector
// accumulation. Templated so the same code runs in double and in
// double-double precision (the latter for spectrum checks at matrix
// norms where double rounding already exceeds the target tolerance).

// In-place reduction; a is n x n row-major, destroyed. On return d holds
// the diagonal and e the subdiagonal (e[0] unused).
template <class T>
void householder_tridiag(std::vector<T>& a, std::size_t n, std::vector<T>& d,
                         std::vector<T>& e) {
  using Tr = ScalarTraits<T>;
  d.assign(n, T(0.0));
  e.assign(n, T(0.0));
  if (n == 0) return;

  for (std::size_t i = n - 1; i >= 1; --i) {
    std::size_t l = i - 1;
    T h(0.0);
    T scale(0.0);
    if (l > 0) {
      for (std::size_t k = 0; k <= l; ++k) scale += Tr::abs(a[i * n + k]);
      if (scale == T(0.0)) {
        e[i] = a[i * n + l];
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          a[i * n + k] /= scale;
          h += a[i * n + k] * a[i * n + k];
        }
        T f = a[i * n + l];
        T g = f >= T(0.0) ? -Tr::sqrt(h) : Tr::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        a[i * n + l] = f - g;
        f = T(0.0);
        for (std::size_t j = 0; j <= l; ++j) {
          g = T(0.0);
          for (std::size_t k = 0; k <= j; ++k) g += a[j * n + k] * a[i * n + k];
          for (std::size_t k = j + 1; k <= l; ++k) g += a[k * n + j] * a[i * n + k];
          e[j] = g / h;
          f += e[j] * a[i * n + j];
        }
        T hh = f / (h + h);
        for (std::size_t j = 0; j <= l; ++j) {
          f = a[i * n + j];
          e[j] = g = e[j] - hh * f;
          for (std::size_t k = 0; k <= j; ++k)
            a[j * n + k] -= f * e[k] + g * a[i * n + k];
        }
      }
    } else {
      e[i] = a[i * n + l];
    }
    d[i] = h;
  }
  e[0] = T(0.0);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i * n + i];
}

template <class T>
T pythag(T a, T b) {
  using Tr = ScalarTraits<T>;
  T pa = Tr::abs(a);
  T pb = Tr::abs(b);
  if (pa > pb) {
    T r = pb / pa;
    return pa * Tr::sqrt(T(1.0) + r * r);
  }
  if (pb == T(0.0)) return T(0.0);
  T r = pa / pb;
  return pb * Tr::sqrt(T(1.0) + r * r);
}

// QL with implicit shifts on a tridiagonal matrix; d = diagonal (becomes the
// eigenvalues, unsorted), e = subdiagonal with e[0] unused.
template <class T>
void ql_implicit_shift(std::vector<T>& d, std::vector<T>& e, std::size_t n,
                       int max_iter = 60) {
  using Tr = ScalarTraits<T>;
  if (n <= 1) return;
  const T eps(Tr::epsilon());
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = T(0.0);

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        T dd = Tr::abs(d[m]) + Tr::abs(d[m + 1]);
        if (Tr::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == max_iter)
          throw std::runtime_error("ql_implicit_shift: too many iterations");
        T g = (d[l + 1] - d[l]) / (T(2.0) * e[l]);
        T r = pythag(g, T(1.0));
        g = d[m] - d[l] + e[l] / (g + Tr::copysign(r, g));
        T s(1.0), c(1.0), p(0.0);
        std::size_t i = m;
        while (i-- > l) {
          T f = s * e[i];
          T b = c * e[i];
          r = pythag(f, g);
          e[i + 1] = r;
          if (r == T(0.0)) {
            d[i + 1] -= p;
            e[m] = T(0.0);
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + T(2.0) * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == T(0.0) && i + 1 > l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = T(0.0);
      }
    } while (m != l);
  }
}

// convenience: eigenvalues of a row-major symmetric matrix, ascending
template <class T>
std::vector<T> symmetric_eigenvalues(std::vector<T> a, std::size_t n) {
  std::vector<T> d, e;
  householder_tridiag(a, n, d, e);
  ql_implicit_shift(d, e, n);
  std::sort(d.begin(), d.end());
  return d;
}

}  // namespace ultracoral
