// curvest command line: scenario verification and the scalar comparison tools.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include "curvest/curvest.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitHypothesis = 2;
constexpr int kExitUsage = 3;

struct VerifyArgs {
  std::string scenario;
  std::string samples;
  std::string report;
  std::optional<int> resolution;
  std::optional<double> tol;
};

int run_verify(const VerifyArgs& a) {
  curvest::ScenarioConfig cfg = curvest::load_scenario(curvest::resolve_scenario(a.scenario));
  if (a.resolution) {
    if (*a.resolution < 8) throw curvest::ConfigError("--resolution must be >= 8");
    cfg.resolution = *a.resolution;
  }
  if (a.tol) cfg.tol_equality = *a.tol;
  const curvest::VerificationReport rep = curvest::run_scenario(cfg);
  for (const auto& c : rep.checks) {
    std::cout << std::left << std::setw(22) << curvest::to_string(c.status) << std::setw(30) << c.id
              << std::setprecision(6) << std::scientific << c.residual << std::defaultfloat;
    if (!c.note.empty()) std::cout << "  " << c.note;
    std::cout << '\n';
  }
  if (!a.report.empty()) curvest::emit_report(rep, a.report);
  if (!a.samples.empty()) curvest::emit_samples(cfg, a.samples);
  const int code = curvest::exit_code(rep);
  std::cout << rep.scenario << ": " << (code == 0 ? "PASS" : code == 2 ? "HYPOTHESIS VIOLATION" : "FAIL") << '\n';
  return code;
}

int run_sturm(const std::string& spec, double T, const std::string& csv) {
  const curvest::CurvatureBoundG G = curvest::CurvatureBoundG::parse(spec);
  curvest::require_admissible(G);
  const curvest::SturmProfile p = curvest::sturm_profile(G, T);
  std::cout << std::setprecision(10) << "G = " << G.name << "\nmin margin psi'/psi - g'/g on (0, " << T
            << "] = " << p.min_margin << " at t = " << p.argmin << '\n';
  if (!csv.empty()) {
    std::ofstream out(csv);
    if (!out) throw curvest::ConfigError("cannot write '" + csv + "'");
    out << std::setprecision(17) << "t,g,gp,psi,psi_quotient,g_quotient,margin\n";
    for (std::size_t i = 0; i < p.t.size(); ++i)
      out << p.t[i] << ',' << p.g[i] << ',' << p.gp[i] << ',' << p.psi[i] << ',' << p.psi_quotient[i] << ','
          << p.g_quotient[i] << ',' << p.margin[i] << '\n';
  }
  return p.min_margin >= -1e-6 ? kExitPass : kExitFail;
}

int run_lambda(const std::string& spec, double t_max) {
  const curvest::CurvatureBoundG G = curvest::CurvatureBoundG::parse(spec);
  curvest::require_admissible(G);
  const curvest::LambdaResult r = curvest::lambda_sup(G, t_max);
  std::cout << std::setprecision(10) << "G = " << G.name << "\nLambda = " << r.lambda << " at t = " << r.argmax
            << '\n';
  if (r.tail_limit) std::cout << "tail limit = " << *r.tail_limit << '\n';
  return std::isfinite(r.lambda) ? kExitPass : kExitFail;
}

int run_comparison(double b, double t) {
  std::cout << std::setprecision(12) << "C_b(t)   = " << curvest::c_b(b, t) << '\n';
  try {
    std::cout << "C^_b(t)  = " << curvest::c_hat_b(b, t) << '\n';
  } catch (const curvest::DomainError& e) {
    std::cout << "C^_b(t)  = undefined (" << e.what() << ")\n";
  }
  const curvest::PhiB p = curvest::phi_b_jet(b, t);
  std::cout << "phi_b(t) = " << p.value << "\nphi_b'(t) = " << p.first << "\nphi_b''(t) = " << p.second
            << "\nresidual phi_b'' - C_b phi_b' = " << curvest::phi_ode_residual(b, t) << '\n';
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order mean curvature estimates on hypersurfaces of space forms"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the checks of a scenario");
  verify->add_option("--scenario", va.scenario, "Scenario file or bundled scenario name")->required();
  verify->add_option("--emit-samples", va.samples, "Write per-sample CSV");
  verify->add_option("--emit-report", va.report, "Write the JSON report");
  verify->add_option("--resolution", va.resolution, "Grid resolution per axis (>= 8)");
  verify->add_option("--tol", va.tol, "Equality tolerance");

  std::string g_spec;
  double T = 5.0;
  std::string csv;
  auto* sturm = app.add_subcommand("sturm", "Sturm margin psi'/psi - g'/g for a curvature bound G");
  sturm->add_option("--G", g_spec, "const(c), affine(a,b) or sqrt_growth(a)")->required();
  sturm->add_option("--T", T, "Right end of the interval")->required();
  sturm->add_option("--csv", csv, "Write t, g, g', psi and margins as CSV");

  std::string l_spec;
  double t_max = 50.0;
  auto* lambda = app.add_subcommand("lambda", "Supremum Lambda of the barrier quotient");
  lambda->add_option("--G", l_spec, "const(c), affine(a,b) or sqrt_growth(a)")->required();
  lambda->add_option("--t-max", t_max, "Search interval [2, t_max]");

  double b = 0.0, t = 1.0;
  auto* comparison = app.add_subcommand("comparison", "Evaluate C_b, C^_b and phi_b");
  comparison->add_option("--b", b, "Curvature")->required();
  comparison->add_option("--t", t, "Radius")->required();

  app.add_subcommand("list-scenarios", "List bundled scenarios");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*verify) return run_verify(va);
    if (*sturm) return run_sturm(g_spec, T, csv);
    if (*lambda) return run_lambda(l_spec, t_max);
    if (*comparison) return run_comparison(b, t);
    for (const auto& name : curvest::list_scenarios()) std::cout << name << '\n';
    return kExitPass;
  } catch (const curvest::ConfigError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const curvest::HypothesisViolation& e) {
    std::cerr << "hypothesis violation: " << e.what() << '\n';
    return kExitHypothesis;
  } catch (const curvest::DomainError& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const curvest::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
}
