#pragma once

// Scalar comparison machinery behind the maximum principle: the curvature
// bound G, the Cauchy problem g'' = G^2 g, the explicit subsolution psi, the
// Sturm quotient inequality, the barrier profile phi and the constant Lambda.

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "curvest/errors.hpp"
#include "curvest/model_functions.hpp"

namespace curvest {

/// Radial curvature bound G with its derivative.
struct CurvatureBoundG {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  double operator()(double t) const { return value(t); }

  /// G(t) = c
  static CurvatureBoundG constant(double c) {
    return {"const(" + fmt(c) + ")", [c](double) { return c; }, [](double) { return 0.0; }};
  }
  /// G(t) = a + b t
  static CurvatureBoundG affine(double a, double b) {
    return {"affine(" + fmt(a) + "," + fmt(b) + ")", [a, b](double t) { return a + b * t; },
            [b](double) { return b; }};
  }
  /// G(t) = a + sqrt(1 + t)
  static CurvatureBoundG sqrt_growth(double a) {
    return {"sqrt_growth(" + fmt(a) + ")", [a](double t) { return a + std::sqrt(1.0 + t); },
            [](double t) { return 0.5 / std::sqrt(1.0 + t); }};
  }

  /// Parses "const(c)", "affine(a,b)" or "sqrt_growth(a)".
  static CurvatureBoundG parse(const std::string& spec) {
    static const std::regex re(R"(\s*([a-z_]+)\s*\(\s*([^,\)]+)\s*(?:,\s*([^,\)]+)\s*)?\)\s*)");
    std::smatch m;
    if (!std::regex_match(spec, m, re)) throw ConfigError("cannot parse G spec '" + spec + "'");
    auto num = [&](int i) {
      try {
        return std::stod(m[i].str());
      } catch (const std::exception&) {
        throw ConfigError("bad number in G spec '" + spec + "'");
      }
    };
    const std::string kind = m[1].str();
    const bool two = m[3].matched;
    if (kind == "const" && !two) return constant(num(2));
    if (kind == "affine" && two) return affine(num(2), num(3));
    if (kind == "sqrt_growth" && !two) return sqrt_growth(num(2));
    throw ConfigError("unknown G spec '" + spec + "' (expected const(c), affine(a,b), sqrt_growth(a))");
  }

 private:
  static std::string fmt(double x) {
    std::ostringstream os;
    os << x;
    return os.str();
  }
};

namespace detail {

/// Adaptive Gauss-Kronrod quadrature; long ranges away from 0 are mapped by s = e^x.
// Tolerances much below 1e-12 cannot be certified on short intervals and recurse to full depth.
inline double integrate(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  double err = 0.0;
  double r = 0.0;
  if (a > 0.0 && b / a > 100.0) {
    auto g = [&](double x) {
      const double s = std::exp(x);
      return f(s) * s;
    };
    r = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, std::log(a), std::log(b), 12, 1e-12, &err);
  } else {
    r = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-12, &err);
  }
  if (!std::isfinite(r)) throw NumericalError("quadrature failed (non-finite result)");
  return r;
}

}  // namespace detail

/// Numeric admissibility tests for G: G(0) > 0, G' >= 0, 1/G not integrable at +infinity.
///
/// The last one is a heuristic: the integral of 1/G over the decades
/// [1e3, 1e6] must be at least 3/4 of that over [1, 1e3]. Functions with
/// 1/G ~ 1/t pass with ratio ~1.1; any 1/G ~ t^{-1-e} with e >= 0.1 fails.
struct Admissibility {
  bool positive_at_zero = false;
  bool nondecreasing = false;
  bool not_integrable = false;
  double head_integral = 0.0;  // int_1^1e3 ds/G
  double tail_integral = 0.0;  // int_1e3^1e6 ds/G

  bool ok() const { return positive_at_zero && nondecreasing && not_integrable; }
};

inline Admissibility check_admissibility(const CurvatureBoundG& G) {
  Admissibility a;
  a.positive_at_zero = G(0.0) > 0.0;
  a.nondecreasing = true;
  double prev = G(0.0);
  for (int i = 0; i <= 400; ++i) {
    const double t = i == 0 ? 0.0 : std::pow(10.0, -3.0 + 9.0 * i / 400.0);
    const double v = G(t);
    if (G.derivative(t) < 0.0 || v < prev - 1e-12 * std::max(1.0, std::abs(prev))) a.nondecreasing = false;
    prev = v;
  }
  if (a.positive_at_zero && a.nondecreasing) {
    auto inv = [&](double s) { return 1.0 / G(s); };
    a.head_integral = detail::integrate(inv, 1.0, 1e3);
    a.tail_integral = detail::integrate(inv, 1e3, 1e6);
    a.not_integrable = a.tail_integral >= 0.75 * a.head_integral;
  }
  return a;
}

inline void require_admissible(const CurvatureBoundG& G) {
  const Admissibility a = check_admissibility(G);
  if (!a.positive_at_zero) throw HypothesisViolation("G(0) must be positive for " + G.name);
  if (!a.nondecreasing) throw HypothesisViolation("G must be nondecreasing for " + G.name);
  if (!a.not_integrable) throw HypothesisViolation("1/G appears integrable at infinity for " + G.name);
}

struct OdeSolution {
  std::vector<double> grid;
  std::vector<double> g;
  std::vector<double> gp;
  std::size_t steps = 0;
};

/// Solves g'' = G(t)^2 g, g(0) = 0, g'(0) = 1 on the given increasing grid
/// starting at 0, with embedded Dormand-Prince stepping (dense output).
inline OdeSolution solve_cauchy_g(const CurvatureBoundG& G, std::vector<double> grid, double rel_tol = 1e-11) {
  if (grid.empty() || grid.front() != 0.0) grid.insert(grid.begin(), 0.0);
  if (!std::is_sorted(grid.begin(), grid.end())) throw ConfigError("solve_cauchy_g: grid must be increasing");
  using State = std::array<double, 2>;
  namespace ode = boost::numeric::odeint;
  auto rhs = [&G](const State& y, State& dy, double t) {
    const double gt = G(t);
    dy[0] = y[1];
    dy[1] = gt * gt * y[0];
  };
  OdeSolution sol;
  State y{0.0, 1.0};
  auto observer = [&sol](const State& s, double t) {
    sol.grid.push_back(t);
    sol.g.push_back(s[0]);
    sol.gp.push_back(s[1]);
  };
  try {
    sol.steps = ode::integrate_times(ode::make_dense_output(1e-14, rel_tol, ode::runge_kutta_dopri5<State>()), rhs, y,
                                     grid.begin(), grid.end(), 1e-4, observer);
  } catch (const std::exception& e) {
    throw NumericalError(std::string("solve_cauchy_g: integration failed: ") + e.what());
  }
  for (std::size_t i = 1; i < sol.grid.size(); ++i)
    if (!(sol.g[i] > 0.0) || !std::isfinite(sol.g[i]))
      throw NumericalError("solve_cauchy_g: positivity lost at t = " + std::to_string(sol.grid[i]) +
                           " (inadmissible G or loose tolerance)");
  return sol;
}

inline OdeSolution solve_cauchy_g(const CurvatureBoundG& G, double T, int points = 1000) {
  if (!(T > 0.0)) throw ConfigError("solve_cauchy_g: T must be positive");
  std::vector<double> grid;
  for (int i = 0; i <= points; ++i) grid.push_back(T * i / points);
  return solve_cauchy_g(G, std::move(grid));
}

/// psi(t) = (exp(int_0^t G) - 1) / G(0) with its first two derivatives.
struct PsiValue {
  double integral;  // int_0^t G
  double value;
  double first;
  double second;

  /// psi'' - G^2 psi, non-negative for a subsolution.
  double subsolution_residual(double Gt) const { return second - Gt * Gt * value; }
  /// psi'/psi.
  double quotient() const { return first / value; }
};

inline PsiValue psi_from_integral(const CurvatureBoundG& G, double t, double integral) {
  const double g0 = G(0.0), gt = G(t), e = std::exp(integral);
  return {integral, std::expm1(integral) / g0, gt * e / g0, (G.derivative(t) + gt * gt) * e / g0};
}

inline PsiValue psi(const CurvatureBoundG& G, double t) {
  if (t < 0.0) throw DomainError("psi: t must be non-negative");
  return psi_from_integral(G, t, detail::integrate(G.value, 0.0, t));
}

struct SturmProfile {
  std::vector<double> t;
  std::vector<double> g;
  std::vector<double> gp;
  std::vector<double> psi;
  std::vector<double> psi_quotient;  // psi'/psi
  std::vector<double> g_quotient;    // g'/g
  std::vector<double> margin;        // psi'/psi - g'/g
  double min_margin = std::numeric_limits<double>::infinity();
  double argmin = 0.0;
};

/// psi'/psi - g'/g on `points` equally spaced t in (0, T].
inline SturmProfile sturm_profile(const CurvatureBoundG& G, double T, int points = 1000) {
  if (!(T > 0.0)) throw ConfigError("sturm: T must be positive");
  const OdeSolution sol = solve_cauchy_g(G, T, points);
  SturmProfile p;
  double integral = 0.0;
  for (std::size_t i = 1; i < sol.grid.size(); ++i) {
    const double t = sol.grid[i];
    integral += detail::integrate(G.value, sol.grid[i - 1], t);
    const PsiValue ps = psi_from_integral(G, t, integral);
    // psi'/psi = G / (1 - exp(-I)), stable for large I.
    const double pq = G(t) / -std::expm1(-integral);
    const double gq = sol.gp[i] / sol.g[i];
    p.t.push_back(t);
    p.g.push_back(sol.g[i]);
    p.gp.push_back(sol.gp[i]);
    p.psi.push_back(ps.value);
    p.psi_quotient.push_back(pq);
    p.g_quotient.push_back(gq);
    p.margin.push_back(pq - gq);
    if (pq - gq < p.min_margin) {
      p.min_margin = pq - gq;
      p.argmin = t;
    }
  }
  return p;
}

inline double sturm_margin(const CurvatureBoundG& G, double T, int points = 1000) {
  return sturm_profile(G, T, points).min_margin;
}

struct LambdaResult {
  double lambda = 0.0;
  double argmax = 0.0;
  /// exp(int_0^1 G), the limit of the quotient as t -> infinity, once the tail has converged.
  std::optional<double> tail_limit;
};

/// Lambda = sup_{t >= 2} exp(int_0^t G) / (exp(int_1^t G) - 1) over [2, t_max]:
/// dense grid, then golden-section refinement around the grid maximum.
inline LambdaResult lambda_sup(const CurvatureBoundG& G, double t_max = 50.0, int grid_points = 2000) {
  if (!(t_max > 2.0)) throw ConfigError("lambda: t_max must exceed 2");
  const double head = detail::integrate(G.value, 0.0, 1.0);
  auto quotient_from = [&](double tail) { return std::exp(head) / -std::expm1(-tail); };
  auto quotient = [&](double t) { return quotient_from(detail::integrate(G.value, 1.0, t)); };

  std::vector<double> ts, qs;
  double tail = detail::integrate(G.value, 1.0, 2.0);
  for (int i = 0; i <= grid_points; ++i) {
    const double t = 2.0 + (t_max - 2.0) * i / grid_points;
    if (i > 0) tail += detail::integrate(G.value, ts.back(), t);
    ts.push_back(t);
    qs.push_back(quotient_from(tail));
  }
  const auto best = static_cast<std::size_t>(std::max_element(qs.begin(), qs.end()) - qs.begin());
  double lo = ts[best == 0 ? 0 : best - 1], hi = ts[std::min(best + 1, ts.size() - 1)];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double fa = quotient(a), fb = quotient(b);
  for (int it = 0; it < 80 && hi - lo > 1e-12; ++it) {
    if (fa >= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - phi * (hi - lo);
      fa = quotient(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + phi * (hi - lo);
      fb = quotient(b);
    }
  }
  LambdaResult r;
  const double t_ref = 0.5 * (lo + hi);
  const double q_ref = quotient(t_ref);
  if (q_ref >= qs[best]) {
    r.lambda = q_ref;
    r.argmax = t_ref;
  } else {
    r.lambda = qs[best];
    r.argmax = ts[best];
  }
  if (tail > 30.0) r.tail_limit = std::exp(head);
  return r;
}

/// Barrier profile phi(t) = int_0^t ds / G(s+1), with phi' and phi''.
struct PhiGamma {
  double value;
  double first;
  double second;
};

inline PhiGamma phi_gamma(const CurvatureBoundG& G, double t) {
  if (t < 0.0) throw DomainError("phi_gamma: t must be non-negative");
  const double v = detail::integrate([&](double s) { return 1.0 / G(s + 1.0); }, 0.0, t);
  const double g1 = G(t + 1.0);
  return {v, 1.0 / g1, -G.derivative(t + 1.0) / (g1 * g1)};
}

}  // namespace curvest
