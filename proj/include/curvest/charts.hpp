#pragma once

// Parametric charts with second-order jets and the built-in chart library.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "curvest/errors.hpp"
#include "curvest/hyperdual.hpp"
#include "curvest/spaceform.hpp"

namespace curvest {

/// Axis-aligned parameter box.
struct ParameterBox {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Vec width() const { return hi - lo; }
  bool contains(const Vec& p, double tol = 1e-12) const {
    if (p.size() != lo.size()) return false;
    for (int i = 0; i < dim(); ++i) {
      const double slack = tol * std::max(1.0, hi(i) - lo(i));
      if (p(i) < lo(i) - slack || p(i) > hi(i) + slack) return false;
    }
    return true;
  }
};

/// Position with first and second parameter derivatives.
struct ChartJet {
  Vec position;                 // m
  Mat first;                    // m x n, column i = d_i x
  std::vector<Vec> second;      // n*n, entry i*n+j = d_i d_j x

  int params() const { return static_cast<int>(first.cols()); }
  const Vec& d2(int i, int j) const { return second[static_cast<std::size_t>(i * params() + j)]; }
};

enum class JetMode { analytic, finite_difference };

inline std::string_view to_string(JetMode j) { return j == JetMode::analytic ? "analytic" : "fd"; }

/// A map from a parameter box into the embedding space of an ambient model.
class Chart {
 public:
  using PositionFn = std::function<Vec(const Vec&)>;
  using JetFn = std::function<std::vector<HyperDual>(const std::vector<HyperDual>&)>;

  Chart(std::string name, ParameterBox domain, PositionFn position, JetFn hyperdual = {})
      : name_(std::move(name)), domain_(std::move(domain)), pos_(std::move(position)), hd_(std::move(hyperdual)) {}

  /// Builds a chart from a generic callable `f(const std::vector<S>&) -> std::vector<S>`;
  /// instantiating it with HyperDual gives exact jets.
  template <class F>
  static Chart generic(std::string name, ParameterBox domain, F f) {
    PositionFn pos = [f](const Vec& p) {
      const std::vector<double> in(p.data(), p.data() + p.size());
      const std::vector<double> out = f(in);
      return Vec(Eigen::Map<const Vec>(out.data(), static_cast<Eigen::Index>(out.size())));
    };
    JetFn hd = [f](const std::vector<HyperDual>& p) { return f(p); };
    return Chart(std::move(name), std::move(domain), std::move(pos), std::move(hd));
  }

  const std::string& name() const { return name_; }
  const ParameterBox& domain() const { return domain_; }
  int dim() const { return domain_.dim(); }
  bool has_analytic_jets() const { return static_cast<bool>(hd_); }

  Vec position(const Vec& p) const { return pos_(p); }

  ChartJet jet(const Vec& p, JetMode mode) const {
    return mode == JetMode::analytic && has_analytic_jets() ? analytic_jet(p) : fd_jet(p);
  }

  ChartJet analytic_jet(const Vec& p) const {
    if (!hd_) throw NumericalError("chart '" + name_ + "' has no analytic jets");
    const int n = dim();
    ChartJet j;
    j.second.resize(static_cast<std::size_t>(n * n));
    std::vector<HyperDual> x(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      for (int b = a; b < n; ++b) {
        for (int i = 0; i < n; ++i) x[i] = HyperDual(p(i), i == a ? 1.0 : 0.0, i == b ? 1.0 : 0.0, 0.0);
        const std::vector<HyperDual> y = hd_(x);
        const auto m = static_cast<Eigen::Index>(y.size());
        if (a == 0 && b == 0) {
          j.position.resize(m);
          j.first.resize(m, n);
          for (auto& v : j.second) v.resize(m);
        }
        for (Eigen::Index r = 0; r < m; ++r) {
          if (a == b) {
            j.position(r) = y[r].v;
            j.first(r, a) = y[r].d1;
          }
          j.second[a * n + b](r) = y[r].d12;
        }
        j.second[b * n + a] = j.second[a * n + b];
      }
    }
    return j;
  }

  /// Central differences with per-axis step 1e-5 * (domain width).
  ChartJet fd_jet(const Vec& p) const {
    const int n = dim();
    const Vec h = (1e-5 * domain_.width()).cwiseMax(1e-12);
    ChartJet j;
    j.position = pos_(p);
    j.first.resize(j.position.size(), n);
    j.second.assign(static_cast<std::size_t>(n * n), Vec());
    auto at = [&](int a, double sa, int b, double sb) {
      Vec q = p;
      q(a) += sa;
      q(b) += sb;
      return pos_(q);
    };
    for (int a = 0; a < n; ++a) {
      const Vec plus = at(a, h(a), a, 0.0), minus = at(a, -h(a), a, 0.0);
      j.first.col(a) = (plus - minus) / (2.0 * h(a));
      j.second[a * n + a] = (plus - 2.0 * j.position + minus) / (h(a) * h(a));
      for (int b = a + 1; b < n; ++b) {
        j.second[a * n + b] =
            (at(a, h(a), b, h(b)) - at(a, h(a), b, -h(b)) - at(a, -h(a), b, h(b)) + at(a, -h(a), b, -h(b))) /
            (4.0 * h(a) * h(b));
        j.second[b * n + a] = j.second[a * n + b];
      }
    }
    return j;
  }

 private:
  std::string name_;
  ParameterBox domain_;
  PositionFn pos_;
  JetFn hd_;
};

namespace charts {

/// Unit vector of R^{n+1} in hyperspherical coordinates (theta_1..theta_{n-1}, phi):
///   (cos t1, sin t1 cos t2, ..., sin t1..sin t_{n-1} cos phi, sin t1..sin t_{n-1} sin phi).
/// The first coordinate axis is the polar axis.
template <class S>
std::vector<S> hyperspherical(const std::vector<S>& angles) {
  const std::size_t n = angles.size();
  std::vector<S> out(n + 1);
  S prod = S(1.0);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out[i] = prod * cos(angles[i]);
    prod = prod * sin(angles[i]);
  }
  out[n - 1] = prod * cos(angles[n - 1]);
  out[n] = prod * sin(angles[n - 1]);
  return out;
}

/// Polar angles in [margin, pi - margin], azimuth in [-pi, pi].
inline ParameterBox angular_box(int n, double margin = 0.05) {
  ParameterBox box{Vec::Constant(n, margin), Vec::Constant(n, std::numbers::pi - margin)};
  box.lo(n - 1) = -std::numbers::pi;
  box.hi(n - 1) = std::numbers::pi;
  return box;
}

inline ParameterBox cube(int n, double half_width) {
  return {Vec::Constant(n, -half_width), Vec::Constant(n, half_width)};
}

/// Round sphere of the given radius about `center` in R^{n+1}.
inline Chart sphere(int n, double radius, Vec center, ParameterBox box) {
  if (center.size() != n + 1) throw ConfigError("sphere: center must have n+1 coordinates");
  return Chart::generic("sphere", std::move(box), [=](const auto& p) {
    auto u = hyperspherical(p);
    for (std::size_t i = 0; i < u.size(); ++i) u[i] = center(static_cast<Eigen::Index>(i)) + radius * u[i];
    return u;
  });
}

/// Ellipsoid sum (x_i - c_i)^2 / a_i^2 = 1 in R^{n+1}.
inline Chart ellipsoid(Vec axes, Vec center, ParameterBox box) {
  if (axes.size() != center.size()) throw ConfigError("ellipsoid: axes and center differ in length");
  return Chart::generic("ellipsoid", std::move(box), [=](const auto& p) {
    auto u = hyperspherical(p);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      u[i] = center(k) + axes(k) * u[i];
    }
    return u;
  });
}

/// Circular cylinder S^1(radius) x R^{n-1} in R^{n+1}; parameters (phi, z_1..z_{n-1}).
inline Chart cylinder(int n, double radius, double half_length) {
  ParameterBox box{Vec::Constant(n, -half_length), Vec::Constant(n, half_length)};
  box.lo(0) = -std::numbers::pi;
  box.hi(0) = std::numbers::pi;
  return Chart::generic("cylinder", std::move(box), [=](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    std::vector<S> u(p.size() + 1);
    u[0] = radius * cos(p[0]);
    u[1] = radius * sin(p[0]);
    for (std::size_t i = 1; i < p.size(); ++i) u[i + 1] = p[i];
    return u;
  });
}

/// Polynomial in n variables: sum of coef * prod y_i^e_i.
struct Polynomial {
  struct Term {
    double coef;
    std::vector<int> exponents;
  };
  std::vector<Term> terms;

  template <class S>
  S operator()(const std::vector<S>& y) const {
    S acc = S(0.0);
    for (const auto& t : terms) {
      S m = S(t.coef);
      for (std::size_t i = 0; i < t.exponents.size() && i < y.size(); ++i) m = m * ipow(y[i], t.exponents[i]);
      acc = acc + m;
    }
    return acc;
  }
};

/// Graph of a polynomial. Riemannian ambients get (y, P(y)); Lorentzian
/// (Minkowski) ambients get (P(y), y), time first.
inline Chart graph(Polynomial poly, ParameterBox box, bool time_graph) {
  return Chart::generic("graph", std::move(box), [=](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    std::vector<S> u;
    u.reserve(p.size() + 1);
    const S h = poly(p);
    if (time_graph) u.push_back(h);
    for (const auto& v : p) u.push_back(v);
    if (!time_graph) u.push_back(h);
    return u;
  });
}

/// Geodesic sphere (Riemannian) or distance level set in the chronological
/// future (Lorentzian) of radius r about o. Riemannian parameters are
/// hyperspherical angles; Lorentzian parameters y give the unit future vector
/// sqrt(1+|y|^2) e_0 + sum y_i e_i in T_o.
inline Chart geodesic_sphere(const AmbientModel& model, const Vec& o, double r, ParameterBox box) {
  model.require_point(o, "geodesic_sphere center");
  if (!(r > 0.0)) throw ConfigError("geodesic_sphere: radius must be positive");
  const std::vector<Vec> frame = model.tangent_frame(o);
  // exp_o(r v) = alpha o + beta v for unit v.
  const double lambda = model.curvature() * r * r * (model.lorentzian() ? -1.0 : 1.0);
  double alpha = 1.0, beta = r;
  if (model.embedded() && lambda > 0.0) {
    alpha = std::cos(std::sqrt(lambda));
    beta = std::sin(std::sqrt(lambda)) / std::sqrt(lambda) * r;
  } else if (model.embedded() && lambda < 0.0) {
    alpha = std::cosh(std::sqrt(-lambda));
    beta = std::sinh(std::sqrt(-lambda)) / std::sqrt(-lambda) * r;
  }
  const bool lorentz = model.lorentzian();
  const Vec origin = o;
  return Chart::generic("geodesic_sphere", std::move(box), [=](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    std::vector<S> coeff;
    if (lorentz) {
      S q = S(1.0);
      for (const auto& y : p) q = q + y * y;
      coeff.push_back(sqrt(q));
      for (const auto& y : p) coeff.push_back(y);
    } else {
      coeff = hyperspherical(p);
    }
    const auto m = origin.size();
    std::vector<S> x(static_cast<std::size_t>(m));
    for (Eigen::Index c = 0; c < m; ++c) {
      S acc = S(alpha * origin(c));
      for (std::size_t i = 0; i < coeff.size(); ++i) acc = acc + coeff[i] * (beta * frame[i](c));
      x[static_cast<std::size_t>(c)] = acc;
    }
    return x;
  });
}

/// Level set rho = r about `center` in Minkowski space as a graph over the
/// spatial coordinates: x = center + (sqrt(r^2 + |y|^2), y).
inline Chart hyperboloid(int n, double r, Vec center, ParameterBox box) {
  if (center.size() != n + 1) throw ConfigError("hyperboloid: center must have n+1 coordinates");
  return Chart::generic("hyperboloid", std::move(box), [=](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    S q = S(r * r);
    for (const auto& y : p) q = q + y * y;
    std::vector<S> x{sqrt(q) + center(0)};
    for (std::size_t i = 0; i < p.size(); ++i) x.push_back(p[i] + center(static_cast<Eigen::Index>(i + 1)));
    return x;
  });
}

/// Minkowski graph t = sqrt(r^2 + |y|^2) + eps * exp(-|y|^2) about the origin.
inline Chart perturbed_hyperboloid(int n, double r, double eps, ParameterBox box) {
  (void)n;
  return Chart::generic("perturbed_hyperboloid", std::move(box), [=](const auto& p) {
    using S = std::decay_t<decltype(p[0])>;
    S q = S(0.0);
    for (const auto& y : p) q = q + y * y;
    std::vector<S> x{sqrt(q + S(r * r)) + eps * exp(-q)};
    for (const auto& y : p) x.push_back(y);
    return x;
  });
}

}  // namespace charts
}  // namespace curvest
