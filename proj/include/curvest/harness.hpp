#pragma once

// Scenario verification: samples a patch, evaluates every applicable estimate
// and assembles a deterministic report.

#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "curvest/curvature.hpp"
#include "curvest/errors.hpp"
#include "curvest/immersion.hpp"
#include "curvest/model_functions.hpp"
#include "curvest/operators.hpp"
#include "curvest/scenario.hpp"
#include "curvest/spaceform.hpp"

namespace curvest {

enum class CheckStatus { pass, fail, inconclusive, hypothesis_violation, info };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
    case CheckStatus::hypothesis_violation: return "hypothesis_violation";
    case CheckStatus::info: return "info";
  }
  return "?";
}

struct CheckRecord {
  std::string id;
  std::string anchor;
  CheckStatus status = CheckStatus::info;
  double residual = 0.0;
  std::optional<Vec> worst_sample;
  std::string note;
};

struct VerificationReport {
  std::string scenario;
  std::vector<CheckRecord> checks;
  int resolution = 0;
  double tol_equality = 0.0;
  double tol_inequality = 0.0;
  JetMode jets = JetMode::analytic;
  double timing_ms = 0.0;

  const CheckRecord* find(const std::string& id) const {
    for (const auto& c : checks)
      if (c.id == id) return &c;
    return nullptr;
  }
};

/// 0 all pass, 1 some check failed or was inconclusive, 2 hypothesis violation.
inline int exit_code(const VerificationReport& r) {
  bool failed = false;
  for (const auto& c : r.checks) {
    if (c.status == CheckStatus::hypothesis_violation) return 2;
    failed |= c.status == CheckStatus::fail || c.status == CheckStatus::inconclusive;
  }
  return failed ? 1 : 0;
}

/// Per-sample quantities shared by the checks.
struct SampleEval {
  PointFrame frame;
  Vec kappa;
  Vec H;
  double u = 0.0;
  double grad_norm_sq = 0.0;
  double normal_component = 0.0;
};

struct SampledScenario {
  std::vector<SampleEval> samples;
  std::vector<GridSkip> skips;
  double u_max = 0.0;     // refined sup of u
  double u_min = 0.0;     // refined inf of u
  Vec argmax;
  Vec argmin;
};

/// Hill climb of s*F o f by repeated step halving from p.
inline std::pair<Vec, double> refine_extremum(const HypersurfacePatch& patch, const AmbientField& F, Vec p,
                                              double sign, Vec step, int rounds = 40) {
  const ParameterBox& box = patch.chart.domain();
  auto value = [&](const Vec& q) -> std::optional<double> {
    try {
      return sign * F.value(patch.chart.position(q));
    } catch (const DomainError&) {
      return std::nullopt;
    }
  };
  double best = *value(p);
  for (int round = 0; round < rounds; ++round) {
    bool moved = true;
    while (moved) {
      moved = false;
      for (int a = 0; a < box.dim(); ++a)
        for (double s : {-1.0, 1.0}) {
          Vec q = p;
          q(a) = std::clamp(q(a) + s * step(a), box.lo(a), box.hi(a));
          const auto v = value(q);
          if (v && *v > best) {
            best = *v;
            p = q;
            moved = true;
          }
        }
    }
    step /= 2.0;
  }
  return {p, sign * best};
}

inline SampledScenario sample_scenario(const Scenario& sc) {
  SampledScenario out;
  SampleSet set;
  if (sc.patch) {
    set = sample_grid(*sc.patch, sc.config.resolution);
  } else {
    set = sample_tabulated(*sc.table, sc.model, sc.orientation, sc.center);
  }
  out.skips = std::move(set.skips);
  const AmbientField rho = fields::distance(sc.model, sc.center);
  for (auto& f : set.frames) {
    SampleEval e;
    try {
      const RestrictionSample s = restrict_field(sc.model, f, rho);
      e.u = s.u;
      e.grad_norm_sq = s.grad_norm_sq;
      e.normal_component = s.normal_component;
    } catch (const DomainError& err) {
      out.skips.push_back({f.params, err.what()});
      continue;
    }
    e.kappa = principal_curvatures(f);
    e.H = higher_mean_curvatures(e.kappa, sc.model.signature());
    e.frame = std::move(f);
    out.samples.push_back(std::move(e));
  }
  if (out.samples.empty()) throw EmptySampleError("no sample admits the distance function");
  auto hi = std::max_element(out.samples.begin(), out.samples.end(), [](auto& a, auto& b) { return a.u < b.u; });
  auto lo = std::min_element(out.samples.begin(), out.samples.end(), [](auto& a, auto& b) { return a.u < b.u; });
  out.u_max = hi->u;
  out.u_min = lo->u;
  out.argmax = hi->frame.params;
  out.argmin = lo->frame.params;
  if (sc.patch) {
    const Vec step = sc.patch->chart.domain().width() / (sc.config.resolution - 1);
    auto [pmax, vmax] = refine_extremum(*sc.patch, rho, out.argmax, 1.0, step);
    auto [pmin, vmin] = refine_extremum(*sc.patch, rho, out.argmin, -1.0, step);
    if (vmax > out.u_max) {
      out.u_max = vmax;
      out.argmax = pmax;
    }
    if (vmin < out.u_min) {
      out.u_min = vmin;
      out.argmin = pmin;
    }
  }
  return out;
}

namespace detail {

inline std::string kid(const std::string& base, int k) { return base + "[k=" + std::to_string(k) + "]"; }

/// Running extremum with the sample where it occurred.
struct Extremum {
  double value;
  std::optional<Vec> where;
  bool take_max;
  explicit Extremum(bool max) : value(max ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity()), take_max(max) {}
  void offer(double v, const Vec& p) {
    if (take_max ? v > value : v < value) {
      value = v;
      where = p;
    }
  }
};

}  // namespace detail

/// Ratio sup |H_{k+1}|/H_k against C_b(r), the root bound at elliptic points
/// and the sup |H_{k+1}| >= C_b(r) inf H_k form, for each k in range.
inline void verify_riemannian_estimate(const Scenario& sc, const SampledScenario& ss, VerificationReport& rep) {
  const ScenarioConfig& c = sc.config;
  const double b = sc.model.curvature();
  const double r = ss.u_max;
  const double cb = c_b(b, r);
  for (int k = c.k_min; k <= c.k_max; ++k) {
    detail::Extremum sup_ratio(true), worst_dev(true), sup_root(true), sup_abs(true), inf_hk(false);
    detail::Extremum sup_ratio_elliptic(true);
    std::size_t excluded = 0;
    for (const auto& s : ss.samples) {
      const Vec& p = s.frame.params;
      const double hk = s.H(k), hk1 = s.H(k + 1);
      sup_abs.offer(std::abs(hk1), p);
      inf_hk.offer(hk, p);
      if (!(hk > 1e-9)) {
        ++excluded;
        continue;
      }
      const double ratio = std::abs(hk1) / hk;
      sup_ratio.offer(ratio, p);
      worst_dev.offer(std::abs(ratio - cb), p);
      if (s.kappa.minCoeff() > kEllipticThreshold) {
        sup_root.offer(std::pow(hk1, 1.0 / (k + 1)), p);
        sup_ratio_elliptic.offer(ratio, p);
      }
    }
    CheckRecord rec{detail::kid("ratio_bound", k),
                    "sup |H_{k+1}|/H_k >= C_b(r) for a hypersurface inside a closed geodesic ball of radius r",
                    CheckStatus::pass, 0.0, std::nullopt, ""};
    const double rate = static_cast<double>(excluded) / static_cast<double>(ss.samples.size());
    if (rate > 0.1) {
      rec.status = CheckStatus::inconclusive;
      rec.residual = rate;
      rec.note = "H_k <= 1e-9 at " + std::to_string(excluded) + " samples";
    } else if (c.expect == Expectation::equality) {
      rec.residual = worst_dev.value;
      rec.worst_sample = worst_dev.where;
      rec.status = worst_dev.value <= c.equality_tolerance() ? CheckStatus::pass : CheckStatus::fail;
    } else {
      rec.residual = sup_ratio.value - cb;
      rec.worst_sample = sup_ratio.where;
      rec.status = rec.residual > c.tol_inequality ? CheckStatus::pass : CheckStatus::fail;
    }
    rep.checks.push_back(rec);

    CheckRecord cor{detail::kid("ratio_bound_inf", k), "sup |H_{k+1}| >= C_b(r) inf H_k", CheckStatus::pass,
                    sup_abs.value - cb * inf_hk.value, sup_abs.where, ""};
    cor.status = cor.residual >= -c.tol_inequality ? CheckStatus::pass : CheckStatus::fail;
    rep.checks.push_back(cor);

    CheckRecord root{detail::kid("elliptic_root_bound", k),
                     "sup H_{k+1}^{1/(k+1)} >= sup H_{k+1}/H_k when f has an elliptic point", CheckStatus::pass, 0.0,
                     sup_root.where, ""};
    if (!sup_root.where) {
      root.status = CheckStatus::info;
      root.note = "no elliptic sample";
    } else {
      root.residual = sup_root.value - sup_ratio_elliptic.value;
      root.status = root.residual >= -c.tol_inequality ? CheckStatus::pass : CheckStatus::fail;
    }
    rep.checks.push_back(root);
  }

  // Intrinsic sectional curvature range from the Gauss equation; finite grids
  // certify a lower bound only on the samples themselves.
  if (c.n() >= 2) {
    detail::Extremum kmin(false);
    for (const auto& s : ss.samples) kmin.offer(gauss_identities(s.kappa, b).sectional_min, s.frame.params);
    rep.checks.push_back({"sectional_lower_bound", "K_M >= K > -infinity (sampled-only)", CheckStatus::info,
                          kmin.value, kmin.where, "sampled-only"});
  }
}

/// sup sqrt(H_2) >= sup H_2/H >= C_b(r), sup s >= b + C_b(r) inf H and the
/// P_1 eigenvalues n H - kappa_j > 0.
inline void verify_h2_corollary(const Scenario& sc, const SampledScenario& ss, VerificationReport& rep) {
  const ScenarioConfig& c = sc.config;
  const int n = c.n();
  if (n < 2) return;
  const double b = sc.model.curvature();
  const double cb = c_b(b, ss.u_max);
  detail::Extremum min_h2(false), sup_root(true), sup_ratio(true), worst_dev(true), sup_s(true), inf_h(false),
      min_mu(false);
  for (const auto& s : ss.samples) {
    const Vec& p = s.frame.params;
    min_h2.offer(s.H(2), p);
    if (!(s.H(2) > 0.0) || !(s.H(1) > 0.0)) continue;
    sup_root.offer(std::sqrt(s.H(2)), p);
    sup_ratio.offer(s.H(2) / s.H(1), p);
    worst_dev.offer(std::abs(s.H(2) / s.H(1) - cb), p);
    sup_s.offer(gauss_identities(s.kappa, b).normalized_scalar, p);
    inf_h.offer(s.H(1), p);
    for (Eigen::Index i = 0; i < s.kappa.size(); ++i) min_mu.offer(n * s.H(1) - s.kappa(i), p);
  }
  const std::string hyp_anchor = "H_2 > 0 on M";
  if (!(min_h2.value > 0.0) || !(inf_h.value > 0.0)) {
    rep.checks.push_back({"h2_positive", hyp_anchor, CheckStatus::hypothesis_violation, min_h2.value, min_h2.where,
                          "H_2 or H is not positive at some sample"});
    return;
  }
  rep.checks.push_back({"h2_positive", hyp_anchor, CheckStatus::pass, min_h2.value, min_h2.where, ""});

  CheckRecord root{"h2_root_vs_ratio", "sup sqrt(H_2) >= sup H_2/H", CheckStatus::pass,
                   sup_root.value - sup_ratio.value, sup_root.where, ""};
  root.status = root.residual >= -c.tol_inequality ? CheckStatus::pass : CheckStatus::fail;
  rep.checks.push_back(root);

  CheckRecord ratio{"h2_ratio_bound", "sup H_2/H >= C_b(r)", CheckStatus::pass, 0.0, std::nullopt, ""};
  if (c.expect == Expectation::equality) {
    ratio.residual = worst_dev.value;
    ratio.worst_sample = worst_dev.where;
    ratio.status = worst_dev.value <= c.equality_tolerance() ? CheckStatus::pass : CheckStatus::fail;
  } else {
    ratio.residual = sup_ratio.value - cb;
    ratio.worst_sample = sup_ratio.where;
    ratio.status = ratio.residual >= -c.tol_inequality ? CheckStatus::pass : CheckStatus::fail;
  }
  rep.checks.push_back(ratio);

  CheckRecord scal{"scalar_curvature_bound", "sup s >= b + C_b(r) inf H with s = b + H_2", CheckStatus::pass,
                   sup_s.value - (b + cb * inf_h.value), sup_s.where, ""};
  scal.status = scal.residual >= -c.tol_inequality ? CheckStatus::pass : CheckStatus::fail;
  rep.checks.push_back(scal);

  CheckRecord mu{"p1_ellipticity", "eigenvalues n H - kappa_j of P_1 are positive", CheckStatus::pass, min_mu.value,
                 min_mu.where, ""};
  mu.status = min_mu.value > 0.0 ? CheckStatus::pass : CheckStatus::fail;
  rep.checks.push_back(mu);
}

/// inf H_{k+1}/H_k <= C^_b(u*) <= C^_b(u_*) <= sup H_{k+1}/H_k and the
/// future outer ball radius delta = u_*.
inline void verify_lorentz_estimates(const Scenario& sc, const SampledScenario& ss, VerificationReport& rep) {
  const ScenarioConfig& c = sc.config;
  const double b = sc.model.curvature();
  const double u_sup = ss.u_max, u_inf = ss.u_min;
  for (int k = c.k_min; k <= c.k_max; ++k) {
    detail::Extremum inf_ratio(false), sup_ratio(true), worst_dev(true);
    std::optional<Vec> bad;
    for (const auto& s : ss.samples) {
      const Vec& p = s.frame.params;
      const Vec mu = newton_eigenvalues(s.kappa, k, Signature::lorentzian);
      if (classify(mu) == Definiteness::indefinite || !(mu.sum() > kEllipticThreshold) || !(s.H(k) > 0.0)) {
        bad = p;
        break;
      }
      const double ratio = s.H(k + 1) / s.H(k);
      inf_ratio.offer(ratio, p);
      sup_ratio.offer(ratio, p);
      worst_dev.offer(std::abs(ratio - c_hat_b(b, u_sup)), p);
    }
    if (bad) {
      rep.checks.push_back({detail::kid("lorentz_sandwich", k), "P_k positive semidefinite with Tr P_k > 0",
                            CheckStatus::hypothesis_violation, 0.0, bad, "P_k indefinite or H_k <= 0"});
      continue;
    }
    const double ch_sup = c_hat_b(b, u_sup), ch_inf = c_hat_b(b, u_inf);
    const double gap = std::min({ch_sup - inf_ratio.value, ch_inf - ch_sup, sup_ratio.value - ch_inf});
    CheckRecord sw{detail::kid("lorentz_sandwich", k),
                   "inf H_{k+1}/H_k <= C^_b(u*) <= C^_b(u_*) <= sup H_{k+1}/H_k for u the Lorentzian distance",
                   CheckStatus::pass, gap, std::nullopt, ""};
    sw.worst_sample = gap == ch_sup - inf_ratio.value ? inf_ratio.where : sup_ratio.where;
    sw.status = gap >= -c.tol_inequality ? CheckStatus::pass : CheckStatus::fail;
    rep.checks.push_back(sw);
    if (c.expect == Expectation::equality) {
      CheckRecord eq{detail::kid("lorentz_equality", k), "H_{k+1}/H_k = C^_b(r) on a distance level set",
                     CheckStatus::pass, worst_dev.value, worst_dev.where, ""};
      eq.status = worst_dev.value <= c.equality_tolerance() ? CheckStatus::pass : CheckStatus::fail;
      rep.checks.push_back(eq);
    }
  }
  rep.checks.push_back({"outer_ball_radius", "f(M) lies outside the future ball of radius delta = u_* > 0",
                        u_inf > 0.0 ? CheckStatus::pass : CheckStatus::fail, u_inf, ss.argmin, ""});
}

/// Decomposition of grad rho along the patch, restriction-Hessian agreement,
/// key inequality and the P_k monotone bound.
inline void verify_operators(const Scenario& sc, const SampledScenario& ss, VerificationReport& rep) {
  const ScenarioConfig& c = sc.config;
  const bool lorentz = sc.model.lorentzian();
  {
    detail::Extremum worst(true);
    for (const auto& s : ss.samples) {
      const double d = lorentz ? std::abs(s.normal_component - std::sqrt(1.0 + s.grad_norm_sq))
                               : std::abs(s.grad_norm_sq + s.normal_component * s.normal_component - 1.0);
      worst.offer(d, s.frame.params);
    }
    rep.checks.push_back({"gradient_decomposition",
                          lorentz ? "<grad rho, N> = sqrt(1 + |grad u|^2)" : "|grad u|^2 + <grad rho, N>^2 = 1",
                          worst.value <= 1e-8 ? CheckStatus::pass : CheckStatus::fail, worst.value, worst.where, ""});
  }
  if (sc.patch && c.wants("restriction_hessian")) {
    detail::Extremum worst(true);
    const AmbientField rho = fields::distance(sc.model, sc.center);
    bool inconsistent = false;
    for (const auto& s : ss.samples) {
      try {
        worst.offer(restriction_hessian(*sc.patch, s.frame, rho).discrepancy, s.frame.params);
      } catch (const NumericalError&) {
        inconsistent = true;
        worst.offer(std::numeric_limits<double>::infinity(), s.frame.params);
      } catch (const DomainError&) {
      }
    }
    rep.checks.push_back({"restriction_hessian",
                          lorentz ? "Hess u = Hess rho - sqrt(1 + |grad u|^2) <A X, Y>"
                                  : "Hess u = Hess rho + <grad rho, N> <A X, Y>",
                          !inconsistent && worst.value <= kRestrictionAgreement ? CheckStatus::pass : CheckStatus::fail,
                          worst.value, worst.where, inconsistent ? "routes disagree beyond 1e-3" : ""});
  }
  if (!c.wants("key_inequality")) return;
  for (int k = c.k_min; k <= c.k_max; ++k) {
    detail::Extremum worst_abs(true), worst_signed(false), worst_mono(false);
    std::optional<Vec> bad;
    for (const auto& s : ss.samples) {
      try {
        const KeyInequality ki = key_inequality_residual(sc.model, sc.center, s.frame, k);
        worst_abs.offer(std::abs(ki.residual), s.frame.params);
        worst_signed.offer(ki.residual, s.frame.params);
        const MonotoneBound mb = monotone_bound(sc.model, sc.center, s.frame, k);
        worst_mono.offer(mb.margin() / std::max(1.0, mb.upper), s.frame.params);
      } catch (const HypothesisViolation&) {
        bad = s.frame.params;
        break;
      }
    }
    if (bad) {
      rep.checks.push_back({detail::kid("key_inequality", k), "P_k positive semidefinite",
                            CheckStatus::hypothesis_violation, 0.0, bad, "P_k indefinite at a sample"});
      continue;
    }
    const bool ok = worst_signed.value >= -c.tol_inequality && worst_abs.value <= kRestrictionAgreement;
    rep.checks.push_back({detail::kid("key_inequality", k),
                          lorentz ? "L_k u >= -C^_b(u)(c_k H_k + <grad u, P_k grad u>) + c_k H_{k+1} sqrt(1 + |grad u|^2)"
                                  : "L_k u >= C_b(u)(c_k H_k - <grad u, P_k grad u>) + c_k H_{k+1} <grad rho, N>",
                          ok ? CheckStatus::pass : CheckStatus::fail, worst_abs.value, worst_abs.where,
                          "equality expected in a space form"});
    rep.checks.push_back({detail::kid("newton_monotone_bound", k), "0 <= <X, P_k X> <= Tr P_k |X|^2",
                          worst_mono.value >= -1e-10 ? CheckStatus::pass : CheckStatus::fail, worst_mono.value,
                          worst_mono.where, ""});
  }
}

/// Samples the scenario and runs every applicable check.
inline VerificationReport run_scenario(const ScenarioConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  const Scenario sc = build_scenario(config);
  VerificationReport rep;
  rep.scenario = config.name;
  rep.resolution = config.resolution;
  rep.tol_equality = config.equality_tolerance();
  rep.tol_inequality = config.tol_inequality;
  rep.jets = config.jets;

  const SampledScenario ss = sample_scenario(sc);
  const std::size_t total = ss.samples.size() + ss.skips.size();
  const double skip_rate = static_cast<double>(ss.skips.size()) / static_cast<double>(total);
  const bool non_spacelike = std::any_of(ss.skips.begin(), ss.skips.end(), [](const GridSkip& s) {
    return s.reason.find("spacelike") != std::string::npos || s.reason.find("chronological") != std::string::npos;
  });
  CheckRecord sampling{"sampling", "plumbing", CheckStatus::pass, skip_rate,
                       ss.skips.empty() ? std::nullopt : std::optional<Vec>(ss.skips.front().params),
                       std::to_string(ss.samples.size()) + " samples, " + std::to_string(ss.skips.size()) + " skipped"};
  if (sc.model.lorentzian() && non_spacelike) sampling.status = CheckStatus::hypothesis_violation;
  else if (skip_rate > 0.1) sampling.status = CheckStatus::inconclusive;
  rep.checks.push_back(sampling);

  if (config.radius) {
    const double excess = ss.u_max - *config.radius;
    rep.checks.push_back({"enclosing_ball", "plumbing", excess <= 1e-9 * std::max(1.0, *config.radius) ? CheckStatus::pass : CheckStatus::fail,
                          excess, ss.argmax, "max u minus declared radius"});
  }

  if (sc.model.lorentzian()) {
    if (config.wants("lorentz_estimates")) verify_lorentz_estimates(sc, ss, rep);
  } else {
    if (config.wants("riemannian_estimate")) verify_riemannian_estimate(sc, ss, rep);
    if (config.wants("h2_corollary")) verify_h2_corollary(sc, ss, rep);
  }
  verify_operators(sc, ss, rep);

  if (config.expect == Expectation::equality) {
    rep.checks.push_back({"rigidity", "plumbing", CheckStatus::info, 0.0, std::nullopt,
                          "consistency: equality measured only on round-sphere scenarios"});
  }
  rep.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

inline nlohmann::ordered_json report_json(const VerificationReport& r, bool with_timing = true) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json cj;
    cj["id"] = c.id;
    cj["anchor"] = c.anchor;
    cj["status"] = std::string(to_string(c.status));
    if (std::isfinite(c.residual)) cj["residual"] = c.residual;
    else cj["residual"] = nullptr;
    if (c.worst_sample) cj["worst_sample"] = std::vector<double>(c.worst_sample->data(), c.worst_sample->data() + c.worst_sample->size());
    else cj["worst_sample"] = nullptr;
    if (!c.note.empty()) cj["note"] = c.note;
    j["checks"].push_back(std::move(cj));
  }
  j["env"] = {{"resolution", r.resolution},
              {"tol", {{"equality", r.tol_equality}, {"inequality", r.tol_inequality}}},
              {"jets", std::string(to_string(r.jets))}};
  if (with_timing) j["timing_ms"] = r.timing_ms;
  return j;
}

inline void emit_report(const VerificationReport& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write report '" + path + "'");
  out << report_json(r).dump(2) << '\n';
}

/// One row per sample: parameters, u, |grad u|, H_0..H_n and, per k, the
/// ratio H_{k+1}/H_k, q L_k u and the key-inequality residual.
inline void emit_samples(const ScenarioConfig& config, std::ostream& out) {
  const Scenario sc = build_scenario(config);
  const SampledScenario ss = sample_scenario(sc);
  const int n = config.n();
  out << std::setprecision(17);
  for (int i = 1; i <= n; ++i) out << 'p' << i << ',';
  out << "u,grad_norm";
  for (int k = 0; k <= n; ++k) out << ",H" << k;
  for (int k = config.k_min; k <= config.k_max; ++k) out << ",ratio_" << k << ",qL" << k << "u,key_residual_" << k;
  out << '\n';
  const AmbientField rho = fields::distance(sc.model, sc.center);
  for (const auto& s : ss.samples) {
    for (int i = 0; i < n; ++i) out << s.frame.params(i) << ',';
    out << s.u << ',' << std::sqrt(std::max(0.0, s.grad_norm_sq));
    for (int k = 0; k <= n; ++k) out << ',' << s.H(k);
    const OperatorFrame of = operator_frame(s.frame, sc.model.signature());
    const RestrictionSample rs = restrict_field(sc.model, s.frame, rho);
    for (int k = config.k_min; k <= config.k_max; ++k) {
      const double tr = of.newton.P[static_cast<std::size_t>(k)].trace();
      out << ',' << s.H(k + 1) / s.H(k) << ',' << l_k_apply(s.frame, of, k, rs.hessian) / tr << ',';
      try {
        out << key_inequality_residual(sc.model, sc.center, s.frame, k).residual;
      } catch (const HypothesisViolation&) {
        out << "nan";
      }
    }
    out << '\n';
  }
}

inline void emit_samples(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write samples '" + path + "'");
  emit_samples(config, out);
}

}  // namespace curvest
