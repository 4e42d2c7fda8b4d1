#pragma once

// Constant-curvature model spaces realized in a flat (pseudo-)Euclidean
// embedding space, with closed-form distance, gradient and Hessian of the
// distance to a reference point.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "curvest/errors.hpp"
#include "curvest/finite_difference.hpp"
#include "curvest/model_functions.hpp"

namespace curvest {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class Signature { riemannian, lorentzian };

enum class ModelKind { euclidean, sphere_embedded, hyperboloid_embedded, minkowski, lorentz_spaceform };

inline std::string_view to_string(Signature s) {
  return s == Signature::riemannian ? "riemannian" : "lorentzian";
}

inline std::string_view to_string(ModelKind k) {
  switch (k) {
    case ModelKind::euclidean: return "euclidean";
    case ModelKind::sphere_embedded: return "sphere_embedded";
    case ModelKind::hyperboloid_embedded: return "hyperboloid_embedded";
    case ModelKind::minkowski: return "minkowski";
    case ModelKind::lorentz_spaceform: return "lorentz_spaceform";
  }
  return "?";
}

inline Signature parse_signature(std::string_view s) {
  if (s == "riemannian") return Signature::riemannian;
  if (s == "lorentzian") return Signature::lorentzian;
  throw ConfigError("unknown signature '" + std::string(s) + "' (expected riemannian|lorentzian)");
}

inline ModelKind parse_model_kind(std::string_view s) {
  for (auto k : {ModelKind::euclidean, ModelKind::sphere_embedded, ModelKind::hyperboloid_embedded,
                 ModelKind::minkowski, ModelKind::lorentz_spaceform}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown model_kind '" + std::string(s) + "'");
}

/// A Riemannian or Lorentzian space form of curvature b and dimension n+1.
///
/// Sphere, hyperbolic space and the Lorentzian quadrics (de Sitter for b > 0,
/// anti-de Sitter for b < 0) are the quadrics <x,x> = 1/b of a flat space of
/// dimension n+2; Euclidean and Minkowski space are their own embedding. Time
/// coordinates come first in every Lorentzian-signed embedding.
class AmbientModel {
 public:
  AmbientModel(Signature signature, ModelKind kind, double curvature, int dimension)
      : signature_(signature), kind_(kind), b_(curvature), dim_(dimension) {
    if (dimension < 2) throw ConfigError("ambient dimension must be >= 2");
    const bool lorentz_kind = kind == ModelKind::minkowski || kind == ModelKind::lorentz_spaceform;
    if (lorentz_kind != (signature == Signature::lorentzian))
      throw ConfigError(std::string("model_kind ") + std::string(to_string(kind)) +
                        " is incompatible with signature " + std::string(to_string(signature)));
    switch (kind) {
      case ModelKind::euclidean:
      case ModelKind::minkowski:
        if (b_ != 0.0) throw ConfigError("flat models require curvature 0");
        break;
      case ModelKind::sphere_embedded:
        if (!(b_ > 0.0)) throw ConfigError("sphere_embedded requires curvature > 0");
        break;
      case ModelKind::hyperboloid_embedded:
        if (!(b_ < 0.0)) throw ConfigError("hyperboloid_embedded requires curvature < 0");
        break;
      case ModelKind::lorentz_spaceform:
        if (b_ == 0.0) throw ConfigError("lorentz_spaceform requires nonzero curvature (use minkowski)");
        break;
    }
    eta_ = Vec::Ones(embedding_dimension());
    if (kind == ModelKind::hyperboloid_embedded || kind == ModelKind::minkowski) eta_(0) = -1.0;
    if (kind == ModelKind::lorentz_spaceform) {
      eta_(0) = -1.0;
      if (b_ < 0.0) eta_(1) = -1.0;
    }
  }

  static AmbientModel euclidean(int dim) { return {Signature::riemannian, ModelKind::euclidean, 0.0, dim}; }
  static AmbientModel sphere(double b, int dim) {
    return {Signature::riemannian, ModelKind::sphere_embedded, b, dim};
  }
  static AmbientModel hyperbolic(double b, int dim) {
    return {Signature::riemannian, ModelKind::hyperboloid_embedded, b, dim};
  }
  static AmbientModel minkowski(int dim) { return {Signature::lorentzian, ModelKind::minkowski, 0.0, dim}; }
  static AmbientModel lorentz_spaceform(double b, int dim) {
    return {Signature::lorentzian, ModelKind::lorentz_spaceform, b, dim};
  }
  /// Riemannian space form of curvature b in its canonical model.
  static AmbientModel riemannian_space_form(double b, int dim) {
    if (b > 0.0) return sphere(b, dim);
    if (b < 0.0) return hyperbolic(b, dim);
    return euclidean(dim);
  }

  Signature signature() const { return signature_; }
  ModelKind kind() const { return kind_; }
  double curvature() const { return b_; }
  /// Manifold dimension n+1.
  int dimension() const { return dim_; }
  bool embedded() const {
    return kind_ == ModelKind::sphere_embedded || kind_ == ModelKind::hyperboloid_embedded ||
           kind_ == ModelKind::lorentz_spaceform;
  }
  int embedding_dimension() const { return embedded() ? dim_ + 1 : dim_; }
  bool lorentzian() const { return signature_ == Signature::lorentzian; }

  /// Diagonal of the flat ambient form.
  const Vec& form_signs() const { return eta_; }

  double inner(const Vec& a, const Vec& b) const { return (a.array() * eta_.array() * b.array()).sum(); }
  double norm_sq(const Vec& a) const { return inner(a, a); }
  /// Index raising: maps a covector (coordinate gradient) to the vector it represents.
  Vec raise(const Vec& covector) const { return (covector.array() * eta_.array()).matrix(); }

  bool contains(const Vec& x, double tol = 1e-9) const {
    if (x.size() != embedding_dimension()) return false;
    if (!embedded()) return true;
    const double target = 1.0 / b_;
    if (std::abs(norm_sq(x) - target) > tol * std::max(1.0, std::abs(target))) return false;
    if (kind_ == ModelKind::hyperboloid_embedded && x(0) <= 0.0) return false;
    return true;
  }

  void require_point(const Vec& x, std::string_view what = "point") const {
    if (x.size() != embedding_dimension())
      throw DomainError(std::string(what) + ": expected " + std::to_string(embedding_dimension()) +
                        " coordinates, got " + std::to_string(x.size()));
    if (!contains(x)) throw DomainError(std::string(what) + " does not lie on the model " + std::string(to_string(kind_)));
  }

  /// Orthogonal projection onto T_x.
  Vec tangent_projection(const Vec& x, const Vec& v) const {
    if (!embedded()) return v;
    return v - b_ * inner(v, x) * x;
  }

  /// Geodesic exponential map exp_x(v).
  Vec exp(const Vec& x, const Vec& v) const {
    if (!embedded()) return x + v;
    const double lambda = b_ * norm_sq(v);
    if (lambda > 1e-300) {
      const double s = std::sqrt(lambda);
      return std::cos(s) * x + (std::sin(s) / s) * v;
    }
    if (lambda < -1e-300) {
      const double s = std::sqrt(-lambda);
      return std::cosh(s) * x + (std::sinh(s) / s) * v;
    }
    return x + v;
  }

  /// Future-directed timelike tangent field defining the time orientation.
  Vec time_direction(const Vec& x) const {
    if (!lorentzian()) throw DomainError("time_direction on a Riemannian model");
    Vec t = Vec::Zero(embedding_dimension());
    if (kind_ == ModelKind::lorentz_spaceform && b_ < 0.0) {
      t(0) = -x(1);
      t(1) = x(0);
      return t;
    }
    t(0) = 1.0;
    return tangent_projection(x, t);
  }

  bool future_directed(const Vec& x, const Vec& w) const { return inner(w, time_direction(x)) < 0.0; }

  /// Orthonormal basis of T_x (n+1 vectors). In Lorentzian models the first
  /// vector is the future-directed unit timelike one.
  std::vector<Vec> tangent_frame(const Vec& x) const {
    const int m = embedding_dimension();
    std::vector<Vec> candidates;
    for (int i = 0; i < m; ++i) candidates.push_back(tangent_projection(x, Vec::Unit(m, i)));
    std::vector<Vec> basis;
    while (static_cast<int>(basis.size()) < dim_) {
      auto best = std::max_element(candidates.begin(), candidates.end(), [&](const Vec& a, const Vec& c) {
        return std::abs(norm_sq(a)) < std::abs(norm_sq(c));
      });
      const double nsq = norm_sq(*best);
      if (std::abs(nsq) < 1e-14) throw NumericalError("tangent_frame: degenerate tangent space");
      Vec e = *best / std::sqrt(std::abs(nsq));
      candidates.erase(best);
      for (auto& c : candidates) c -= (inner(c, e) / norm_sq(e)) * e;
      basis.push_back(std::move(e));
    }
    if (lorentzian()) {
      auto timelike = std::find_if(basis.begin(), basis.end(), [&](const Vec& e) { return norm_sq(e) < 0.0; });
      std::iter_swap(basis.begin(), timelike);
      if (!future_directed(x, basis.front())) basis.front() = -basis.front();
    }
    return basis;
  }

 private:
  Signature signature_;
  ModelKind kind_;
  double b_;
  int dim_;
  Vec eta_;
};

/// Geodesic (or future inner) ball about a reference point.
struct ReferenceBall {
  Vec center;
  double radius = 0.0;

  void validate(const AmbientModel& model) const {
    model.require_point(center, "ball center");
    if (!(radius > 0.0)) throw DomainError("ball radius must be positive");
    const double b = model.curvature();
    const double limit = model.lorentzian() ? comparison_radius_limit(-b) : comparison_radius_limit(b);
    if (radius >= limit)
      throw DomainError("ball radius " + std::to_string(radius) + " exceeds comparison limit " + std::to_string(limit));
  }
};

namespace detail {

/// Radial direction at o pointing to x: x - c o with c = b<x,o> on quadrics,
/// x - o in flat models. Returns (c, w).
inline std::pair<double, Vec> radial_offset(const AmbientModel& m, const Vec& o, const Vec& x) {
  if (!m.embedded()) return {1.0, x - o};
  const double c = m.curvature() * m.inner(x, o);
  return {c, x - c * o};
}

}  // namespace detail

/// Distance from o to x: Riemannian distance, or Lorentzian distance for x in
/// the chronological future of o.
inline double ambient_distance(const AmbientModel& m, const Vec& o, const Vec& x) {
  m.require_point(o, "reference point");
  m.require_point(x);
  const double b = m.curvature();
  auto [c, w] = detail::radial_offset(m, o, x);
  const double wsq = m.norm_sq(w);
  switch (m.kind()) {
    case ModelKind::euclidean: return w.norm();
    case ModelKind::sphere_embedded: {
      const double s = std::sqrt(b);
      const double rho = std::atan2(s * std::sqrt(std::max(0.0, wsq)), c) / s;
      if (rho > std::numbers::pi / s - 1e-8) throw DomainError("ambient_distance: antipodal point on the sphere");
      return rho;
    }
    case ModelKind::hyperboloid_embedded: {
      if (c < 1.0 - 1e-9) throw DomainError("ambient_distance: points on different hyperboloid sheets");
      const double s = std::sqrt(-b);
      return std::asinh(s * std::sqrt(std::max(0.0, wsq))) / s;
    }
    case ModelKind::minkowski: {
      if (w.isZero(0.0)) return 0.0;
      if (!(wsq < 0.0) || !m.future_directed(o, w))
        throw DomainError("ambient_distance: point is not in the chronological future of the reference point");
      return std::sqrt(-wsq);
    }
    case ModelKind::lorentz_spaceform: {
      if (w.isZero(0.0)) return 0.0;
      if (!(wsq < 0.0) || !m.future_directed(o, w))
        throw DomainError("ambient_distance: point is not in the chronological future of the reference point");
      if (b > 0.0) {
        const double s = std::sqrt(b);
        return std::asinh(s * std::sqrt(-wsq)) / s;
      }
      const double s = std::sqrt(-b);
      const double rho = std::atan2(s * std::sqrt(-wsq), c) / s;
      if (rho >= comparison_radius_limit(-b))
        throw DomainError("ambient_distance: Lorentzian distance beyond pi/(2 sqrt(-b))");
      return rho;
    }
  }
  return 0.0;
}

/// Unit gradient of the distance at x (past-directed unit timelike in the
/// Lorentzian case).
inline Vec distance_gradient(const AmbientModel& m, const Vec& o, const Vec& x) {
  const double rho = ambient_distance(m, o, x);
  if (rho < 1e-8) throw UndefinedGradientError("distance_gradient: x coincides with the reference point");
  const double c = m.embedded() ? m.curvature() * m.inner(x, o) : 1.0;
  const Vec w = c * x - o;
  const double wsq = m.norm_sq(w);
  if (m.lorentzian()) return -w / std::sqrt(-wsq);
  return w / std::sqrt(wsq);
}

/// Closed-form Hessian of the distance as a bilinear form on T_x:
///   Riemannian:  C_b(rho) (<X,Y> - <X,grad rho><Y,grad rho>)
///   Lorentzian: -C^_b(rho) (<X,Y> + <X,grad rho><Y,grad rho>)
/// X and Y must be tangent at x.
inline double distance_hessian(const AmbientModel& m, const Vec& o, const Vec& x, const Vec& X, const Vec& Y) {
  const double rho = ambient_distance(m, o, x);
  const Vec g = distance_gradient(m, o, x);
  const double b = m.curvature();
  if (m.lorentzian()) return -c_hat_b(b, rho) * (m.inner(X, Y) + m.inner(X, g) * m.inner(Y, g));
  return c_b(b, rho) * (m.inner(X, Y) - m.inner(X, g) * m.inner(Y, g));
}

inline double distance_hessian_quadform(const AmbientModel& m, const Vec& o, const Vec& x, const Vec& X) {
  return distance_hessian(m, o, x, X, X);
}

/// Hess rho(X, X) as the second derivative of rho along the geodesic through x
/// with velocity X (central differences with one Richardson step).
inline double fd_distance_hessian(const AmbientModel& m, const Vec& o, const Vec& x, const Vec& X) {
  const double xs = std::max(1.0, x.cwiseAbs().maxCoeff());
  const double vs = std::max(1e-12, X.cwiseAbs().maxCoeff());
  const double h = 5e-4 * xs / vs;
  return fd::second_derivative([&](double t) { return ambient_distance(m, o, m.exp(x, t * X)); }, h);
}

/// Lower (Riemannian) or two-sided (Lorentzian) comparison bound for Hess rho(X,X)
/// in an ambient with radial curvature bounded by the model curvature b.
inline double hessian_comparison_bound(const AmbientModel& m, const Vec& o, const Vec& x, const Vec& X) {
  const double rho = ambient_distance(m, o, x);
  const Vec g = distance_gradient(m, o, x);
  const double b = m.curvature();
  const double xg = m.inner(X, g);
  if (m.lorentzian()) return -c_hat_b(b, rho) * (m.norm_sq(X) + xg * xg);
  return c_b(b, rho) * (m.norm_sq(X) - xg * xg);
}

/// Hess rho(X, X) - bound with Hess rho measured along the geodesic. In a
/// space form both comparison directions apply, so the residual vanishes.
inline double hessian_comparison_residual(const AmbientModel& m, const Vec& o, const Vec& x, const Vec& X) {
  if (m.lorentzian() && !(m.norm_sq(X) > 0.0))
    throw DomainError("hessian_comparison_residual: Lorentzian comparison needs a spacelike vector");
  return fd_distance_hessian(m, o, x, X) - hessian_comparison_bound(m, o, x, X);
}

/// Point at distance t from o along the radial geodesic with unit initial
/// velocity v in T_o.
inline Vec radial_point(const AmbientModel& m, const Vec& o, const Vec& v, double t) { return m.exp(o, t * v); }

/// Canonical reference point: the origin in flat models, 1/sqrt|b| times the
/// first coordinate vector of matching causal type on quadrics.
inline Vec canonical_origin(const AmbientModel& m) {
  Vec o = Vec::Zero(m.embedding_dimension());
  if (!m.embedded()) return o;
  const bool de_sitter = m.kind() == ModelKind::lorentz_spaceform && m.curvature() > 0.0;
  o(de_sitter ? 1 : 0) = 1.0 / std::sqrt(std::abs(m.curvature()));
  return o;
}

}  // namespace curvest
