#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "curvest/errors.hpp"

namespace curvest {

/// Upper end of the comparison range for curvature b: pi / (2 sqrt b) when
/// b > 0, +infinity otherwise.
inline double comparison_radius_limit(double b) {
  if (b > 0.0) return std::numbers::pi / (2.0 * std::sqrt(b));
  return std::numeric_limits<double>::infinity();
}

/// Mean curvature of the geodesic sphere of radius t in the simply connected
/// space form of curvature b:
///   sqrt(b) cot(sqrt(b) t)    b > 0
///   1 / t                     b = 0
///   sqrt(-b) coth(sqrt(-b) t) b < 0
inline double c_b(double b, double t) {
  if (!(t > 0.0)) throw DomainError("c_b: radius must be positive, got " + std::to_string(t));
  if (b > 0.0) {
    if (t >= comparison_radius_limit(b))
      throw DomainError("c_b: radius " + std::to_string(t) + " outside (0, pi/(2 sqrt b))");
    const double s = std::sqrt(b);
    return s / std::tan(s * t);
  }
  if (b == 0.0) return 1.0 / t;
  const double s = std::sqrt(-b);
  return s / std::tanh(s * t);
}

/// Lorentzian counterpart: future mean curvature of the distance level set,
/// equal to C_{-b}(t).
inline double c_hat_b(double b, double t) {
  if (b < 0.0 && t >= comparison_radius_limit(-b))
    throw DomainError("c_hat_b: radius " + std::to_string(t) + " outside (0, pi/(2 sqrt(-b)))");
  return c_b(-b, t);
}

/// Radial function solving phi'' = C_b phi' with phi(0) = 0 and phi' > 0 on
/// the comparison range. The b < 0 branch is cosh(sqrt(-b) t) - 1; coth would
/// have phi' < 0 and violate the ODE.
struct PhiB {
  double value;
  double first;
  double second;
};

inline PhiB phi_b_jet(double b, double t) {
  if (t < 0.0) throw DomainError("phi_b: t must be non-negative");
  if (b > 0.0) {
    if (t >= comparison_radius_limit(b)) throw DomainError("phi_b: t outside comparison range");
    const double s = std::sqrt(b);
    return {1.0 - std::cos(s * t), s * std::sin(s * t), b * std::cos(s * t)};
  }
  if (b == 0.0) return {t * t, 2.0 * t, 2.0};
  const double s = std::sqrt(-b);
  return {std::cosh(s * t) - 1.0, s * std::sinh(s * t), -b * std::cosh(s * t)};
}

inline double phi_b(double b, double t) { return phi_b_jet(b, t).value; }

/// phi_b'' - C_b phi_b' at t > 0.
inline double phi_ode_residual(double b, double t) {
  const PhiB j = phi_b_jet(b, t);
  return j.second - c_b(b, t) * j.first;
}

}  // namespace curvest
