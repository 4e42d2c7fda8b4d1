#pragma once

#include <cmath>

namespace curvest {

/// Hyper-dual number a + b e1 + c e2 + d e1e2 with e1^2 = e2^2 = 0.
///
/// Evaluating a smooth function on (x + e1 u + e2 v) yields f, the directional
/// derivatives along u and v, and the exact mixed second derivative d^2f(u, v)
/// in the e1e2 part. Charts written as generic lambdas are instantiated with
/// this type to get second-order jets without truncation error.
struct HyperDual {
  double v = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d12 = 0.0;

  constexpr HyperDual() = default;
  constexpr HyperDual(double value) : v(value) {}  // NOLINT(google-explicit-constructor)
  constexpr HyperDual(double value, double e1, double e2, double e12)
      : v(value), d1(e1), d2(e2), d12(e12) {}

  HyperDual& operator+=(const HyperDual& o) {
    v += o.v;
    d1 += o.d1;
    d2 += o.d2;
    d12 += o.d12;
    return *this;
  }
  HyperDual& operator-=(const HyperDual& o) {
    v -= o.v;
    d1 -= o.d1;
    d2 -= o.d2;
    d12 -= o.d12;
    return *this;
  }
  HyperDual& operator*=(const HyperDual& o) { return *this = *this * o; }
  HyperDual& operator/=(const HyperDual& o) { return *this = *this / o; }

  friend HyperDual operator+(HyperDual a, const HyperDual& b) { return a += b; }
  friend HyperDual operator-(HyperDual a, const HyperDual& b) { return a -= b; }
  friend HyperDual operator-(const HyperDual& a) { return {-a.v, -a.d1, -a.d2, -a.d12}; }
  friend HyperDual operator*(const HyperDual& a, const HyperDual& b) {
    return {a.v * b.v, a.d1 * b.v + a.v * b.d1, a.d2 * b.v + a.v * b.d2,
            a.d12 * b.v + a.d1 * b.d2 + a.d2 * b.d1 + a.v * b.d12};
  }
  friend HyperDual operator/(const HyperDual& a, const HyperDual& b) {
    return a * reciprocal(b);
  }

  friend bool operator<(const HyperDual& a, const HyperDual& b) { return a.v < b.v; }
  friend bool operator>(const HyperDual& a, const HyperDual& b) { return a.v > b.v; }

 private:
  static HyperDual reciprocal(const HyperDual& b) {
    const double inv = 1.0 / b.v;
    return chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
  }

 public:
  /// Applies a scalar function with value f0, first derivative f1 and second
  /// derivative f2 evaluated at x.v.
  static HyperDual chain(const HyperDual& x, double f0, double f1, double f2) {
    return {f0, f1 * x.d1, f1 * x.d2, f1 * x.d12 + f2 * x.d1 * x.d2};
  }
};

inline double value_of(double x) { return x; }

// Double overloads so generic code inside the namespace resolves both scalar types.
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double sinh(double x) { return std::sinh(x); }
inline double cosh(double x) { return std::cosh(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double pow(double x, double p) { return std::pow(x, p); }

/// x^k by repeated multiplication (k >= 0), valid for any sign of x.
template <class S>
S ipow(const S& x, int k) {
  S r = S(1.0);
  for (int i = 0; i < k; ++i) r = r * x;
  return r;
}
inline double value_of(const HyperDual& x) { return x.v; }

inline HyperDual sin(const HyperDual& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return HyperDual::chain(x, s, c, -s);
}
inline HyperDual cos(const HyperDual& x) {
  const double s = std::sin(x.v), c = std::cos(x.v);
  return HyperDual::chain(x, c, -s, -c);
}
inline HyperDual sinh(const HyperDual& x) {
  const double s = std::sinh(x.v), c = std::cosh(x.v);
  return HyperDual::chain(x, s, c, s);
}
inline HyperDual cosh(const HyperDual& x) {
  const double s = std::sinh(x.v), c = std::cosh(x.v);
  return HyperDual::chain(x, c, s, c);
}
inline HyperDual exp(const HyperDual& x) {
  const double e = std::exp(x.v);
  return HyperDual::chain(x, e, e, e);
}
inline HyperDual log(const HyperDual& x) {
  return HyperDual::chain(x, std::log(x.v), 1.0 / x.v, -1.0 / (x.v * x.v));
}
inline HyperDual sqrt(const HyperDual& x) {
  const double s = std::sqrt(x.v);
  return HyperDual::chain(x, s, 0.5 / s, -0.25 / (s * x.v));
}
inline HyperDual pow(const HyperDual& x, double p) {
  const double f = std::pow(x.v, p);
  return HyperDual::chain(x, f, p * std::pow(x.v, p - 1.0), p * (p - 1.0) * std::pow(x.v, p - 2.0));
}

}  // namespace curvest
