#pragma once

// Symmetric functions of principal curvatures, Newton tensors and the
// identities and inequalities built on them.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "curvest/errors.hpp"
#include "curvest/immersion.hpp"
#include "curvest/spaceform.hpp"

namespace curvest {

/// Threshold for strict positivity of principal curvatures at elliptic points.
inline constexpr double kEllipticThreshold = 1e-9;

inline double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

/// c_k = (n-k) binom(n,k) = (k+1) binom(n,k+1).
inline double newton_trace_coefficient(int n, int k) { return (n - k) * binomial(n, k); }

/// S_0..S_n as the coefficients of prod (1 + t kappa_i).
inline Vec elementary_symmetric(const Vec& kappa) {
  const auto n = kappa.size();
  Vec s = Vec::Zero(n + 1);
  s(0) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = i + 1; k >= 1; --k) s(k) += kappa(i) * s(k - 1);
  return s;
}

/// H_0..H_n: binom(n,k) H_k = S_k (Riemannian) or (-1)^k S_k (Lorentzian).
inline Vec higher_mean_curvatures(const Vec& kappa, Signature sig) {
  const int n = static_cast<int>(kappa.size());
  const Vec s = elementary_symmetric(kappa);
  Vec h(n + 1);
  for (int k = 0; k <= n; ++k) {
    const double sign = (sig == Signature::lorentzian && k % 2 == 1) ? -1.0 : 1.0;
    h(k) = sign * s(k) / binomial(n, k);
  }
  return h;
}

struct CurvatureProfile {
  int n = 0;
  Vec kappa;
  Vec S;
  Vec H;
  Vec c;  // c_0..c_{n-1}
  Signature signature = Signature::riemannian;
};

inline CurvatureProfile curvature_profile(Vec kappa, Signature sig) {
  CurvatureProfile p;
  std::sort(kappa.data(), kappa.data() + kappa.size());
  p.n = static_cast<int>(kappa.size());
  p.S = elementary_symmetric(kappa);
  p.H = higher_mean_curvatures(kappa, sig);
  p.c.resize(p.n);
  for (int k = 0; k < p.n; ++k) p.c(k) = newton_trace_coefficient(p.n, k);
  p.kappa = std::move(kappa);
  p.signature = sig;
  return p;
}

inline CurvatureProfile curvature_profile(const PointFrame& f, Signature sig) {
  return curvature_profile(principal_curvatures(f), sig);
}

enum class Definiteness { positive_definite, positive_semidefinite, indefinite };

inline std::string_view to_string(Definiteness d) {
  switch (d) {
    case Definiteness::positive_definite: return "positive_definite";
    case Definiteness::positive_semidefinite: return "positive_semidefinite";
    case Definiteness::indefinite: return "indefinite";
  }
  return "?";
}

/// Eigenvalues of P_k: S_k of the curvatures with kappa_i removed, times
/// (-1)^k in the Lorentzian convention.
inline Vec newton_eigenvalues(const Vec& kappa, int k, Signature sig) {
  const auto n = kappa.size();
  Vec mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Vec rest(n - 1);
    for (Eigen::Index j = 0, r = 0; j < n; ++j)
      if (j != i) rest(r++) = kappa(j);
    mu(i) = k <= n - 1 ? elementary_symmetric(rest)(k) : 0.0;
  }
  if (sig == Signature::lorentzian && k % 2 == 1) mu = -mu;
  return mu;
}

inline Definiteness classify(const Vec& eigenvalues, double rel_tol = 1e-10) {
  const double scale = std::max(1.0, eigenvalues.cwiseAbs().maxCoeff());
  const double lo = eigenvalues.minCoeff();
  if (lo > rel_tol * scale) return Definiteness::positive_definite;
  if (lo >= -rel_tol * scale) return Definiteness::positive_semidefinite;
  return Definiteness::indefinite;
}

struct NewtonFamily {
  std::vector<Mat> P;                      // P_0..P_n
  std::vector<Definiteness> definiteness;  // for P_0..P_{n-1}
  Vec kappa;
  Signature signature = Signature::riemannian;
};

/// Newton tensors of a symmetric operator, defined by
///   Riemannian  P_0 = I, P_k = S_k I - A P_{k-1}
///   Lorentzian  P_0 = I, P_k = (-1)^k S_k I + A P_{k-1}
inline NewtonFamily newton_family(const Mat& A, Signature sig) {
  if (A.rows() != A.cols()) throw DomainError("newton_family: operator must be square");
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw DomainError("newton_family: operator is not symmetric");
  const int n = static_cast<int>(A.rows());
  // Spectral construction; the plain recursion loses several digits for n >= 7.
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (A + A.transpose()));
  if (es.info() != Eigen::Success) throw NumericalError("newton_family: eigen-solver failed");
  NewtonFamily fam;
  fam.kappa = es.eigenvalues();
  fam.signature = sig;
  const Mat& V = es.eigenvectors();
  for (int k = 0; k < n; ++k) {
    Mat Pk = V * newton_eigenvalues(fam.kappa, k, sig).asDiagonal() * V.transpose();
    fam.P.push_back(0.5 * (Pk + Pk.transpose()));
  }
  // P_n from one recursion step, so Cayley-Hamilton stays a real check.
  const double sn = elementary_symmetric(fam.kappa)(n);
  const Mat I = Mat::Identity(n, n);
  if (sig == Signature::riemannian)
    fam.P.push_back(sn * I - A * fam.P.back());
  else
    fam.P.push_back((n % 2 == 0 ? 1.0 : -1.0) * sn * I + A * fam.P.back());
  for (int k = 0; k < n; ++k) fam.definiteness.push_back(classify(newton_eigenvalues(fam.kappa, k, sig)));
  return fam;
}

/// |P_n|, which vanishes by Cayley-Hamilton.
inline double cayley_hamilton_residual(const NewtonFamily& fam) { return fam.P.back().cwiseAbs().maxCoeff(); }

struct TraceResidual {
  double trace;         // |Tr P_k - c_k H_k|
  double trace_shape;   // |Tr A P_k - (+/-) c_k H_{k+1}|
  double trace_scale;   // (n-k) S_k(|kappa|)
  double shape_scale;   // (k+1) S_{k+1}(|kappa|)

  double relative_trace() const { return trace == 0.0 ? 0.0 : trace / std::max(trace_scale, 1e-300); }
  double relative_shape() const { return trace_shape == 0.0 ? 0.0 : trace_shape / std::max(shape_scale, 1e-300); }
};

/// Residuals of Tr P_k = c_k H_k and Tr A P_k = c_k H_{k+1} (Riemannian) or
/// -c_k H_{k+1} (Lorentzian), for k = 0..n-1. Scales are sums of absolute
/// values of the monomials involved.
inline std::vector<TraceResidual> trace_identity_residuals(const Mat& A, Signature sig) {
  const NewtonFamily fam = newton_family(A, sig);
  const int n = static_cast<int>(A.rows());
  const Vec h = higher_mean_curvatures(fam.kappa, sig);
  const Vec abs_s = elementary_symmetric(fam.kappa.cwiseAbs());
  std::vector<TraceResidual> out;
  for (int k = 0; k < n; ++k) {
    const double ck = newton_trace_coefficient(n, k);
    const double shape_target = sig == Signature::riemannian ? ck * h(k + 1) : -ck * h(k + 1);
    out.push_back({std::abs(fam.P[k].trace() - ck * h(k)), std::abs((A * fam.P[k]).trace() - shape_target),
                   (n - k) * abs_s(k), (k + 1) * abs_s(k + 1)});
  }
  return out;
}

struct GardingResult {
  bool holds = false;
  Vec roots;    // H_j^{1/j}, j = 1..k+1
  Vec margins;  // H_j^{1/j} - H_{j+1}^{1/(j+1)}, j = 1..k
};

/// H_1 >= H_2^{1/2} >= ... >= H_{k+1}^{1/(k+1)} > 0 at an elliptic point.
/// A non-positive H_j means the point is not elliptic: HypothesisViolation.
inline GardingResult garding_chain(const Vec& H, int k, double rel_guard = 1e-12) {
  if (k < 0 || k + 1 >= H.size()) throw DomainError("garding_chain: k out of range");
  GardingResult r;
  r.roots.resize(k + 1);
  for (int j = 1; j <= k + 1; ++j) {
    if (!(H(j) > 0.0))
      throw HypothesisViolation("garding_chain: H_" + std::to_string(j) + " <= 0, point is not elliptic");
    r.roots(j - 1) = std::pow(H(j), 1.0 / j);
  }
  r.margins.resize(k);
  r.holds = true;
  for (int j = 0; j < k; ++j) {
    r.margins(j) = r.roots(j) - r.roots(j + 1);
    if (r.margins(j) < -rel_guard * std::max(1.0, r.roots(j))) r.holds = false;
  }
  return r;
}

/// Parameter points where every principal curvature exceeds the elliptic threshold.
inline std::vector<Vec> elliptic_point_scan(const std::vector<PointFrame>& frames, double tau = kEllipticThreshold) {
  std::vector<Vec> out;
  for (const auto& f : frames)
    if (principal_curvatures(f).minCoeff() > tau) out.push_back(f.params);
  return out;
}

struct GaussIdentities {
  double scalar = 0.0;           // n(n-1)(b + H_2)
  double normalized_scalar = 0.0;  // s = b + H_2
  double two_s2 = 0.0;           // (Tr A)^2 - Tr A^2
  double sectional_min = 0.0;    // min b + kappa_i kappa_j
  double sectional_max = 0.0;
};

/// Intrinsic curvature of a hypersurface in a Riemannian space form of
/// curvature b, from the Gauss equation K(e_i, e_j) = b + kappa_i kappa_j.
inline GaussIdentities gauss_identities(const Vec& kappa, double b) {
  const int n = static_cast<int>(kappa.size());
  if (n < 2) throw DomainError("gauss_identities: need n >= 2");
  const Vec h = higher_mean_curvatures(kappa, Signature::riemannian);
  GaussIdentities g;
  g.normalized_scalar = b + h(2);
  g.scalar = n * (n - 1) * g.normalized_scalar;
  g.two_s2 = kappa.sum() * kappa.sum() - kappa.squaredNorm();
  g.sectional_min = std::numeric_limits<double>::infinity();
  g.sectional_max = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double k = b + kappa(i) * kappa(j);
      g.sectional_min = std::min(g.sectional_min, k);
      g.sectional_max = std::max(g.sectional_max, k);
    }
  return g;
}

}  // namespace curvest
