#pragma once

// Restrictions of ambient functions to hypersurface patches: intrinsic
// gradient and Hessian, the trace operators L_k, the differential inequality
// satisfied by the restricted distance, and a sampled search for q-Omori-Yau
// sequences.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "curvest/curvature.hpp"
#include "curvest/errors.hpp"
#include "curvest/immersion.hpp"
#include "curvest/model_functions.hpp"
#include "curvest/spaceform.hpp"

namespace curvest {

/// Smooth function on the ambient model with its gradient (a tangent vector)
/// and Hessian (a bilinear form on tangent vectors).
struct AmbientField {
  std::string name;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<double(const Vec&, const Vec&, const Vec&)> hessian;
};

namespace fields {

/// rho = distance to o.
inline AmbientField distance(const AmbientModel& m, const Vec& o) {
  return {"distance",
          [m, o](const Vec& x) { return ambient_distance(m, o, x); },
          [m, o](const Vec& x) { return distance_gradient(m, o, x); },
          [m, o](const Vec& x, const Vec& X, const Vec& Y) { return distance_hessian(m, o, x, X, Y); }};
}

/// phi_b(rho) with phi_b'' = C_b phi_b'.
inline AmbientField phi_distance(const AmbientModel& m, const Vec& o) {
  const double b = m.curvature();
  return {"phi_b(distance)",
          [m, o, b](const Vec& x) { return phi_b(b, ambient_distance(m, o, x)); },
          [m, o, b](const Vec& x) {
            return Vec(phi_b_jet(b, ambient_distance(m, o, x)).first * distance_gradient(m, o, x));
          },
          [m, o, b](const Vec& x, const Vec& X, const Vec& Y) {
            const PhiB j = phi_b_jet(b, ambient_distance(m, o, x));
            const Vec g = distance_gradient(m, o, x);
            return j.second * m.inner(X, g) * m.inner(Y, g) + j.first * distance_hessian(m, o, x, X, Y);
          }};
}

/// Linear height a . x (plain dot product of embedding coordinates). On a
/// quadric its Hessian is -b F <X,Y>; in flat models it vanishes.
inline AmbientField height(const AmbientModel& m, const Vec& a) {
  if (a.size() != m.embedding_dimension()) throw ConfigError("height: direction has the wrong length");
  return {"height",
          [a](const Vec& x) { return a.dot(x); },
          [m, a](const Vec& x) { return m.tangent_projection(x, m.raise(a)); },
          [m, a](const Vec& x, const Vec& X, const Vec& Y) {
            return m.embedded() ? -m.curvature() * a.dot(x) * m.inner(X, Y) : 0.0;
          }};
}

/// Constant function.
inline AmbientField constant(const AmbientModel& m, double c) {
  const int dim = m.embedding_dimension();
  return {"constant", [c](const Vec&) { return c; }, [dim](const Vec&) { return Vec(Vec::Zero(dim)); },
          [](const Vec&, const Vec&, const Vec&) { return 0.0; }};
}

}  // namespace fields

/// u = F o f at one sample, all tensors in the chart basis.
struct RestrictionSample {
  double u = 0.0;
  Vec du;                       // d_i u
  Vec grad;                     // g^{ij} d_j u
  double grad_norm_sq = 0.0;
  double normal_component = 0.0;  // <grad F, N>
  Mat hessian;                  // identity route
};

/// Identity route: Hess u(d_i, d_j) = Hess F(d_i f, d_j f) + <N,N> <grad F, N> h_ij.
inline RestrictionSample restrict_field(const AmbientModel& m, const PointFrame& f, const AmbientField& F) {
  const int n = f.n();
  RestrictionSample s;
  s.u = F.value(f.position);
  const Vec gF = F.gradient(f.position);
  s.du.resize(n);
  for (int i = 0; i < n; ++i) s.du(i) = m.inner(gF, f.tangents.col(i));
  s.grad = f.metric.ldlt().solve(s.du);
  s.grad_norm_sq = s.du.dot(s.grad);
  s.normal_component = m.inner(gF, f.normal);
  const double eps = m.lorentzian() ? -1.0 : 1.0;
  s.hessian.resize(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      s.hessian(i, j) = F.hessian(f.position, f.tangents.col(i), f.tangents.col(j)) +
                        eps * s.normal_component * f.second_form(i, j);
      s.hessian(j, i) = s.hessian(i, j);
    }
  return s;
}

/// Intrinsic Hessian by finite differences of u(p) and Christoffel symbols
/// of the induced metric, step 1e-4 * (domain width) per axis.
inline Mat intrinsic_fd_hessian(const HypersurfacePatch& patch, const Vec& p, const AmbientField& F) {
  const int n = patch.n();
  const Vec h = (1e-4 * patch.chart.domain().width()).cwiseMax(1e-10);
  const Eigen::DiagonalMatrix<double, Eigen::Dynamic> eta(patch.ambient.form_signs());
  auto u_at = [&](const Vec& q) { return F.value(patch.chart.position(q)); };
  auto metric_at = [&](const Vec& q) {
    const ChartJet j = patch.chart.jet(q, patch.effective_jets());
    return Mat(j.first.transpose() * eta * j.first);
  };
  auto shifted = [&](int a, double sa, int b, double sb) {
    Vec q = p;
    q(a) += sa;
    q(b) += sb;
    return q;
  };
  const double u0 = u_at(p);
  Vec du(n);
  Mat d2u(n, n);
  std::vector<Mat> dg(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const double up = u_at(shifted(a, h(a), a, 0.0)), um = u_at(shifted(a, -h(a), a, 0.0));
    du(a) = (up - um) / (2.0 * h(a));
    d2u(a, a) = (up - 2.0 * u0 + um) / (h(a) * h(a));
    for (int b = a + 1; b < n; ++b) {
      d2u(a, b) = (u_at(shifted(a, h(a), b, h(b))) - u_at(shifted(a, h(a), b, -h(b))) -
                   u_at(shifted(a, -h(a), b, h(b))) + u_at(shifted(a, -h(a), b, -h(b)))) /
                  (4.0 * h(a) * h(b));
      d2u(b, a) = d2u(a, b);
    }
    dg[a] = (metric_at(shifted(a, h(a), a, 0.0)) - metric_at(shifted(a, -h(a), a, 0.0))) / (2.0 * h(a));
  }
  const Mat g = metric_at(p);
  const Eigen::LDLT<Mat> ginv(g);
  Mat hess(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      // Gamma_ij^k d_k u = g^{kl} Gamma_{ij,l} d_k u with Gamma_{ij,l} = (d_i g_jl + d_j g_il - d_l g_ij)/2.
      Vec lowered(n);
      for (int l = 0; l < n; ++l) lowered(l) = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
      hess(i, j) = d2u(i, j) - ginv.solve(lowered).dot(du);
    }
  return 0.5 * (hess + hess.transpose());
}

struct RestrictionHessian {
  Mat identity;     // route (a), chart basis
  Mat intrinsic;    // route (b), chart basis
  double discrepancy = 0.0;  // max entry difference in a metric-orthonormal frame
};

inline constexpr double kRestrictionAgreement = 1e-4;
inline constexpr double kRestrictionConsistency = 1e-3;

/// Hess u computed by the identity and intrinsically; the identity route is
/// authoritative. Disagreement above 1e-3 raises a NumericalError.
inline RestrictionHessian restriction_hessian(const HypersurfacePatch& patch, const PointFrame& f,
                                              const AmbientField& F) {
  RestrictionHessian r;
  r.identity = restrict_field(patch.ambient, f, F).hessian;
  r.intrinsic = intrinsic_fd_hessian(patch, f.params, F);
  r.discrepancy = (to_orthonormal(f, r.identity) - to_orthonormal(f, r.intrinsic)).cwiseAbs().maxCoeff();
  if (r.discrepancy > kRestrictionConsistency)
    throw NumericalError("restriction_hessian: identity and intrinsic routes disagree by " +
                         std::to_string(r.discrepancy));
  return r;
}

/// Orthonormal-frame data shared by the operator evaluations at one sample.
struct OperatorFrame {
  Mat A;            // shape operator, orthonormal frame
  NewtonFamily newton;
  Vec H;
  Mat L;            // metric Cholesky factor
};

inline OperatorFrame operator_frame(const PointFrame& f, Signature sig) {
  OperatorFrame o;
  o.A = orthonormal_shape_operator(f);
  o.newton = newton_family(o.A, sig);
  o.H = higher_mean_curvatures(o.newton.kappa, sig);
  o.L = metric_factor(f);
  return o;
}

/// Orthonormal components of the gradient of u from its differential.
inline Vec orthonormal_gradient(const OperatorFrame& o, const Vec& du) {
  return o.L.triangularView<Eigen::Lower>().solve(du);
}

/// L_k u = Tr(P_k Hess u) with Hess u given in the chart basis.
inline double l_k_apply(const PointFrame& f, const OperatorFrame& o, int k, const Mat& hessian) {
  if (k < 0 || k >= f.n()) throw DomainError("l_k_apply: k out of range");
  return (o.newton.P[static_cast<std::size_t>(k)] * to_orthonormal(f, hessian)).trace();
}

inline double l_k_apply(const PointFrame& f, int k, const Mat& hessian, Signature sig) {
  return l_k_apply(f, operator_frame(f, sig), k, hessian);
}

/// Laplace-Beltrami operator in divergence form, (1/sqrt g) d_i (sqrt g g^{ij} d_j u),
/// by nested central differences. Independent check of L_0.
inline double fd_laplacian(const HypersurfacePatch& patch, const Vec& p, const AmbientField& F) {
  const int n = patch.n();
  const Vec h = (1e-4 * patch.chart.domain().width()).cwiseMax(1e-8);
  const Eigen::DiagonalMatrix<double, Eigen::Dynamic> eta(patch.ambient.form_signs());
  auto u_at = [&](const Vec& q) { return F.value(patch.chart.position(q)); };
  auto metric_at = [&](const Vec& q) {
    const ChartJet j = patch.chart.jet(q, patch.effective_jets());
    return Mat(j.first.transpose() * eta * j.first);
  };
  // Flux sqrt(g) g^{ij} d_j u at q.
  auto flux = [&](const Vec& q) {
    Vec du(n);
    for (int a = 0; a < n; ++a) {
      Vec qp = q, qm = q;
      qp(a) += h(a);
      qm(a) -= h(a);
      du(a) = (u_at(qp) - u_at(qm)) / (2.0 * h(a));
    }
    const Mat g = metric_at(q);
    return Vec(std::sqrt(g.determinant()) * g.ldlt().solve(du));
  };
  double div = 0.0;
  for (int i = 0; i < n; ++i) {
    Vec qp = p, qm = p;
    qp(i) += h(i);
    qm(i) -= h(i);
    div += (flux(qp)(i) - flux(qm)(i)) / (2.0 * h(i));
  }
  return div / std::sqrt(metric_at(p).determinant());
}

struct KeyInequality {
  double lhs = 0.0;       // L_k u
  double rhs = 0.0;       // comparison side
  double residual = 0.0;  // lhs - rhs
  double grad_form = 0.0; // <grad u, P_k grad u>
  double grad_norm_sq = 0.0;
  double normal_term = 0.0;  // <grad rho, N> or sqrt(1 + |grad u|^2)
};

/// L_k u - RHS for u = rho o f:
///   Riemannian  RHS = C_b(u)(c_k H_k - <grad u, P_k grad u>) + c_k H_{k+1} <grad rho, N>
///   Lorentzian  RHS = -C^_b(u)(c_k H_k + <grad u, P_k grad u>) + c_k H_{k+1} sqrt(1 + |grad u|^2)
/// An indefinite P_k at the sample is a hypothesis violation.
inline KeyInequality key_inequality_residual(const AmbientModel& m, const Vec& o, const PointFrame& f, int k) {
  const int n = f.n();
  if (k < 0 || k >= n) throw DomainError("key_inequality_residual: k out of range");
  const Signature sig = m.signature();
  const OperatorFrame of = operator_frame(f, sig);
  if (of.newton.definiteness[static_cast<std::size_t>(k)] == Definiteness::indefinite)
    throw HypothesisViolation("P_" + std::to_string(k) + " is indefinite at the sample");
  const RestrictionSample s = restrict_field(m, f, fields::distance(m, o));
  const Vec e = orthonormal_gradient(of, s.du);
  const Mat& P = of.newton.P[static_cast<std::size_t>(k)];
  const double ck = newton_trace_coefficient(n, k);
  const double b = m.curvature();
  KeyInequality r;
  r.lhs = l_k_apply(f, of, k, s.hessian);
  r.grad_form = e.dot(P * e);
  r.grad_norm_sq = e.squaredNorm();
  if (sig == Signature::riemannian) {
    r.normal_term = s.normal_component;
    r.rhs = c_b(b, s.u) * (ck * of.H(k) - r.grad_form) + ck * of.H(k + 1) * r.normal_term;
  } else {
    r.normal_term = std::sqrt(1.0 + r.grad_norm_sq);
    r.rhs = -c_hat_b(b, s.u) * (ck * of.H(k) + r.grad_form) + ck * of.H(k + 1) * r.normal_term;
  }
  r.residual = r.lhs - r.rhs;
  return r;
}

/// |L_k phi_b(u) - phi_b'(u)(C_b(u) <grad u, P_k grad u> + L_k u)| for u = rho o f.
inline double phi_chain_residual(const AmbientModel& m, const Vec& o, const PointFrame& f, int k) {
  const OperatorFrame of = operator_frame(f, m.signature());
  const RestrictionSample rho = restrict_field(m, f, fields::distance(m, o));
  const RestrictionSample phi = restrict_field(m, f, fields::phi_distance(m, o));
  const Vec e = orthonormal_gradient(of, rho.du);
  const double form = e.dot(of.newton.P[static_cast<std::size_t>(k)] * e);
  const double b = m.curvature();
  const double lhs = l_k_apply(f, of, k, phi.hessian);
  const double rhs = phi_b_jet(b, rho.u).first * (c_b(b, rho.u) * form + l_k_apply(f, of, k, rho.hessian));
  return std::abs(lhs - rhs);
}

struct MonotoneBound {
  double form = 0.0;   // <X, P_k X>
  double upper = 0.0;  // c_k H_k |X|^2
  double margin() const { return std::min(form, upper - form); }
};

/// 0 <= <X, P_k X> <= Tr P_k |X|^2 for X = grad u, u = rho o f.
inline MonotoneBound monotone_bound(const AmbientModel& m, const Vec& o, const PointFrame& f, int k) {
  const OperatorFrame of = operator_frame(f, m.signature());
  const Vec e = orthonormal_gradient(of, restrict_field(m, f, fields::distance(m, o)).du);
  const int n = f.n();
  return {e.dot(of.newton.P[static_cast<std::size_t>(k)] * e), newton_trace_coefficient(n, k) * of.H(k) * e.squaredNorm()};
}

// ---------------------------------------------------------------------------
// q-Omori-Yau sequence search

struct OmoriYauCandidate {
  Vec params;
  double u = 0.0;
  double grad_norm = 0.0;
  double q_lu = 0.0;
  int j = 0;
};

struct OmoriYauLevel {
  int j = 0;
  std::optional<OmoriYauCandidate> candidate;
  // Best margins over all evaluated points when no candidate exists:
  // u - (u* - 1/j), 1/j - |grad u|, 1/j - q L u.
  double best_u_margin = -std::numeric_limits<double>::infinity();
  double best_grad_margin = -std::numeric_limits<double>::infinity();
  double best_lu_margin = -std::numeric_limits<double>::infinity();
};

struct OmoriYauReport {
  double u_sup = -std::numeric_limits<double>::infinity();
  OmoriYauCandidate refined;  // end point of the local refinement
  std::vector<OmoriYauLevel> levels;
  std::size_t evaluated = 0;
  std::size_t excluded = 0;   // Tr P_k <= threshold or frame failure
  bool all_found() const {
    return std::all_of(levels.begin(), levels.end(), [](const auto& l) { return l.candidate.has_value(); });
  }
};

struct OmoriYauOptions {
  int k = 0;
  int j_max = 6;
  int resolution = 16;
  double top_quantile = 0.1;
  int refine_rounds = 24;
};

namespace detail {

struct OyPoint {
  Vec p;
  double u;
  double grad_norm;
  double q_lu;
};

inline std::optional<OyPoint> oy_evaluate(const HypersurfacePatch& patch, const AmbientField& F, int k, const Vec& p) {
  try {
    const PointFrame f = frame_at(patch, p);
    const OperatorFrame of = operator_frame(f, patch.ambient.signature());
    const double tr = of.newton.P[static_cast<std::size_t>(k)].trace();
    if (!(tr > kEllipticThreshold)) return std::nullopt;
    const RestrictionSample s = restrict_field(patch.ambient, f, F);
    return OyPoint{p, s.u, std::sqrt(std::max(0.0, s.grad_norm_sq)), l_k_apply(f, of, k, s.hessian) / tr};
  } catch (const DegeneracyError&) {
  } catch (const SignatureError&) {
  } catch (const DomainError&) {
  }
  return std::nullopt;
}

}  // namespace detail

/// Filters the near-sup set of a grid, refines around its best point by
/// repeated step halving and, for j = 1..j_max, picks a point with
/// u > u* - 1/j, |grad u| < 1/j and q L_k u < 1/j, q = 1/Tr P_k.
inline OmoriYauReport omori_yau_search(const HypersurfacePatch& patch, const AmbientField& F,
                                       const OmoriYauOptions& opt = {}) {
  const int n = patch.n();
  if (opt.k < 0 || opt.k >= n) throw DomainError("omori_yau_search: k out of range");
  OmoriYauReport rep;
  std::vector<detail::OyPoint> pts;
  for (const Vec& p : grid_points(patch.chart.domain(), std::vector<int>(static_cast<std::size_t>(n), opt.resolution))) {
    ++rep.evaluated;
    if (auto e = detail::oy_evaluate(patch, F, opt.k, p)) pts.push_back(std::move(*e));
    else ++rep.excluded;
  }
  if (pts.empty()) throw EmptySampleError("omori_yau_search: no admissible samples");

  // Near-sup set, then its smallest-gradient member as the refinement seed.
  std::vector<double> us;
  for (const auto& q : pts) us.push_back(q.u);
  std::sort(us.begin(), us.end(), std::greater<>());
  const auto cut_index = static_cast<std::size_t>(std::max(0.0, opt.top_quantile * static_cast<double>(us.size()) - 1.0));
  const double cut = us[std::min(cut_index, us.size() - 1)];
  const detail::OyPoint* seed = nullptr;
  for (const auto& q : pts)
    if (q.u >= cut && (!seed || q.grad_norm < seed->grad_norm)) seed = &q;

  const ParameterBox& box = patch.chart.domain();
  detail::OyPoint best = *seed;
  Vec step = box.width() / (opt.resolution - 1);
  auto better = [](const detail::OyPoint& a, const detail::OyPoint& b) {
    const double tie = 1e-14 * std::max(1.0, std::abs(b.u));
    if (a.u > b.u + tie) return true;
    if (a.u < b.u - tie) return false;
    return a.grad_norm < b.grad_norm;
  };
  for (int round = 0; round < opt.refine_rounds; ++round) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int a = 0; a < n; ++a)
        for (double s : {-1.0, 1.0}) {
          Vec q = best.p;
          q(a) = std::clamp(q(a) + s * step(a), box.lo(a), box.hi(a));
          ++rep.evaluated;
          auto e = detail::oy_evaluate(patch, F, opt.k, q);
          if (!e) {
            ++rep.excluded;
            continue;
          }
          pts.push_back(*e);
          if (better(*e, best)) {
            best = *e;
            moved = true;
          }
        }
    }
    step /= 2.0;
  }
  rep.refined = {best.p, best.u, best.grad_norm, best.q_lu, 0};

  for (const auto& q : pts) rep.u_sup = std::max(rep.u_sup, q.u);
  for (int j = 1; j <= opt.j_max; ++j) {
    OmoriYauLevel level;
    level.j = j;
    const double eta = 1.0 / j;
    for (const auto& q : pts) {
      const double mu = q.u - (rep.u_sup - eta), mg = eta - q.grad_norm, ml = eta - q.q_lu;
      level.best_u_margin = std::max(level.best_u_margin, mu);
      level.best_grad_margin = std::max(level.best_grad_margin, mg);
      level.best_lu_margin = std::max(level.best_lu_margin, ml);
      if (mu > 0.0 && mg > 0.0 && ml > 0.0 && (!level.candidate || q.u > level.candidate->u))
        level.candidate = OmoriYauCandidate{q.p, q.u, q.grad_norm, q.q_lu, j};
    }
    rep.levels.push_back(std::move(level));
  }
  return rep;
}

}  // namespace curvest
