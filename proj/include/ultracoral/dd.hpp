#pragma once

#include <cmath>

namespace ultracoral {

// Compensated double-double scalar: value = hi + lo, |lo| <= ulp(hi)/2.
// Gives ~106 bits of mantissa, which the spectrum verification needs:
// generator norms reach ~1e12 and plain doubles cannot resolve eigenvalues
// to 1e-8 absolute at that scale. Only the operations used by the
// symmetric eigensolver are provided.
struct DD {
  double hi = 0.0;
  double lo = 0.0;

  constexpr DD() = default;
  constexpr DD(double h) : hi(h), lo(0.0) {}
  constexpr DD(double h, double l) : hi(h), lo(l) {}

  double to_double() const { return hi + lo; }
};

namespace detail {

inline DD two_sum(double a, double b) {
  double s = a + b;
  double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}

// requires |a| >= |b| or a == 0
inline DD quick_two_sum(double a, double b) {
  double s = a + b;
  return {s, b - (s - a)};
}

inline DD two_prod(double a, double b) {
  double p = a * b;
  return {p, std::fma(a, b, -p)};
}

}  // namespace detail

inline DD operator-(DD a) { return {-a.hi, -a.lo}; }

inline DD operator+(DD a, DD b) {
  DD s = detail::two_sum(a.hi, b.hi);
  DD t = detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return detail::quick_two_sum(s.hi, s.lo);
}

inline DD operator-(DD a, DD b) { return a + (-b); }

inline DD operator*(DD a, DD b) {
  DD p = detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return detail::quick_two_sum(p.hi, p.lo);
}

inline DD operator/(DD a, DD b) {
  double q1 = a.hi / b.hi;
  DD r = a - b * DD(q1);
  double q2 = r.hi / b.hi;
  r = r - b * DD(q2);
  double q3 = r.hi / b.hi;
  DD q = detail::quick_two_sum(q1, q2);
  return q + DD(q3);
}

inline DD& operator+=(DD& a, DD b) { return a = a + b; }
inline DD& operator-=(DD& a, DD b) { return a = a - b; }
inline DD& operator*=(DD& a, DD b) { return a = a * b; }
inline DD& operator/=(DD& a, DD b) { return a = a / b; }

inline bool operator==(DD a, DD b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator<(DD a, DD b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(DD a, DD b) { return b < a; }
inline bool operator<=(DD a, DD b) { return !(b < a); }
inline bool operator>=(DD a, DD b) { return !(a < b); }

inline DD abs(DD a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }

// one Newton step on 1/sqrt refines a double seed to full dd accuracy
inline DD sqrt(DD a) {
  if (a.hi == 0.0 && a.lo == 0.0) return DD(0.0);
  double x = 1.0 / std::sqrt(a.hi);
  double ax = a.hi * x;
  DD axdd(ax);
  return DD(ax) + (a - axdd * axdd) * DD(x * 0.5);
}

inline DD copysign(DD a, DD s) {
  bool neg_a = a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0);
  bool neg_s = s.hi < 0.0 || (s.hi == 0.0 && s.lo < 0.0);
  return neg_a == neg_s ? a : -a;
}

// n >= 0 integer power by repeated squaring; exact while representable
inline DD dd_ipow(DD base, long long n) {
  DD result(1.0);
  DD b = base;
  while (n > 0) {
    if (n & 1) result *= b;
    b *= b;
    n >>= 1;
  }
  return result;
}

// scalar traits shared by the double and dd eigensolver instantiations
template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
  static constexpr double epsilon() { return 2.220446049250313e-16; }
  static double abs(double x) { return std::fabs(x); }
  static double sqrt(double x) { return std::sqrt(x); }
  static double copysign(double x, double s) { return std::copysign(x, s); }
};

template <>
struct ScalarTraits<DD> {
  // slightly above 2^-104; used only as a relative convergence threshold
  static constexpr double epsilon() { return 1.0e-31; }
  static DD abs(DD x) { return ultracoral::abs(x); }
  static DD sqrt(DD x) { return ultracoral::sqrt(x); }
  static DD copysign(DD x, DD s) { return ultracoral::copysign(x, s); }
};

}  // namespace ultracoral
