#pragma once

namespace curvest::fd {

/// Central first difference.
template <class F>
double first_derivative(F&& f, double h) {
  return (f(h) - f(-h)) / (2.0 * h);
}

/// Central second difference of f at 0 with one Richardson step (h, h/2),
/// truncation O(h^4).
template <class F>
double second_derivative(F&& f, double h) {
  const double f0 = f(0.0);
  auto central = [&](double s) { return (f(s) - 2.0 * f0 + f(-s)) / (s * s); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

/// Mixed second derivative d^2 f / ds dt at (0, 0) from the four-point stencil.
template <class F>
double mixed_derivative(F&& f, double hs, double ht) {
  return (f(hs, ht) - f(hs, -ht) - f(-hs, ht) + f(-hs, -ht)) / (4.0 * hs * ht);
}

}  // namespace curvest::fd
