#include <catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "curvest/harness.hpp"

using namespace curvest;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

const char* kCli = CURVEST_CLI_PATH;

fs::path scratch_dir() {
  const fs::path d = fs::temp_directory_path() / "curvest-harness-test";
  fs::create_directories(d);
  return d;
}

nlohmann::json bundled(const std::string& name) {
  std::ifstream in(resolve_scenario(name));
  return nlohmann::json::parse(in);
}

int run_cli(const std::string& args, const std::string& out_file = "") {
  std::string cmd = std::string("\"") + kCli + "\" " + args;
  cmd += out_file.empty() ? " > /dev/null 2>&1" : " > \"" + out_file + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path write_json(const std::string& file, const nlohmann::json& j) {
  const fs::path p = scratch_dir() / file;
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_CASE("every bundled scenario verifies cleanly") {
  const auto names = list_scenarios();
  REQUIRE(names.size() >= 6);
  for (const auto& name : names) {
    INFO(name);
    const VerificationReport r = run_scenario(load_scenario(resolve_scenario(name)));
    CHECK(exit_code(r) == 0);
    CHECK(r.scenario == name);
    CHECK(r.find("sampling") != nullptr);
    for (const auto& c : r.checks) {
      INFO(c.id << ": " << c.note);
      CHECK((c.status == CheckStatus::pass || c.status == CheckStatus::info));
    }
  }
}

TEST_CASE("scenario checks carry the expected ids") {
  const VerificationReport sph = run_scenario(load_scenario(resolve_scenario("sphere-equality")));
  for (const char* id : {"ratio_bound[k=0]", "ratio_bound[k=1]", "ratio_bound_inf[k=1]", "elliptic_root_bound[k=1]",
                         "h2_positive", "h2_ratio_bound", "scalar_curvature_bound", "p1_ellipticity",
                         "gradient_decomposition", "restriction_hessian", "key_inequality[k=0]",
                         "newton_monotone_bound[k=1]", "enclosing_ball", "rigidity"})
    CHECK(sph.find(id) != nullptr);
  CHECK(sph.find("sectional_lower_bound")->status == CheckStatus::info);
  CHECK(sph.find("ratio_bound[k=0]")->residual < 1e-6);

  const VerificationReport hyp = run_scenario(load_scenario(resolve_scenario("minkowski-hyperboloid")));
  CHECK(hyp.find("lorentz_sandwich[k=1]") != nullptr);
  CHECK(hyp.find("lorentz_equality[k=0]")->residual < 1e-6);
  CHECK(hyp.find("outer_ball_radius")->residual == Approx(2.0).margin(1e-12));
  CHECK(hyp.find("ratio_bound[k=0]") == nullptr);
}

TEST_CASE("reports are reproducible apart from timing") {
  const ScenarioConfig c = load_scenario(resolve_scenario("ellipsoid"));
  const std::string a = report_json(run_scenario(c), false).dump();
  const std::string b = report_json(run_scenario(c), false).dump();
  CHECK(a == b);
}

TEST_CASE("report JSON layout") {
  const nlohmann::ordered_json j = report_json(run_scenario(load_scenario(resolve_scenario("sphere-equality"))));
  auto it = j.begin();
  CHECK(it.key() == "scenario");
  CHECK((++it).key() == "checks");
  CHECK((++it).key() == "env");
  CHECK((++it).key() == "timing_ms");
  CHECK(j["env"]["resolution"] == 12);
  CHECK(j["env"]["tol"]["equality"] == 1e-6);
  CHECK(j["env"]["tol"]["inequality"] == 1e-6);
  CHECK(j["env"]["jets"] == "analytic");
  for (const auto& c : j["checks"]) {
    CHECK(c.contains("id"));
    CHECK(c.contains("anchor"));
    CHECK(c.contains("residual"));
    CHECK(c.contains("worst_sample"));
    const std::string s = c["status"];
    CHECK((s == "pass" || s == "fail" || s == "inconclusive" || s == "hypothesis_violation" || s == "info"));
  }
  CHECK_FALSE(report_json(run_scenario(load_scenario(resolve_scenario("sphere-equality"))), false).contains("timing_ms"));
}

TEST_CASE("per-sample CSV") {
  std::ostringstream out;
  emit_samples(load_scenario(resolve_scenario("sphere-equality")), out);
  std::istringstream in(out.str());
  std::string header;
  std::getline(in, header);
  CHECK(header == "p1,p2,u,grad_norm,H0,H1,H2,ratio_0,qL0u,key_residual_0,ratio_1,qL1u,key_residual_1");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(std::count(line.begin(), line.end(), ',') == 12);
  }
  CHECK(rows == 144);
}

TEST_CASE("configuration errors name the field") {
  nlohmann::json j = bundled("sphere-equality");
  j["k"] = 2;
  try {
    parse_scenario(j);
    FAIL("k = n accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("field 'k'") != std::string::npos);
    CHECK(std::string(e.what()).find("[0, 1]") != std::string::npos);
  }
  j["k"] = nlohmann::json::array({1, 0});
  CHECK_THROWS_AS(parse_scenario(j), ConfigError);

  auto expect_field = [](nlohmann::json bad, const std::string& field) {
    try {
      parse_scenario(bad);
      FAIL("accepted bad " << field);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  nlohmann::json r = bundled("sphere-equality");
  r["resolution"] = 4;
  expect_field(r, "resolution");
  nlohmann::json e = bundled("sphere-equality");
  e["expect"] = "maybe";
  expect_field(e, "expect");
  nlohmann::json m = bundled("sphere-equality");
  m["ambient"].erase("curvature");
  expect_field(m, "curvature");
  nlohmann::json rad = bundled("sphere-equality");
  rad["radius"] = -1.0;
  expect_field(rad, "radius");
  nlohmann::json ctr = bundled("sphere-equality");
  ctr["center"] = nlohmann::json::array({0, 0});
  try {
    build_scenario(parse_scenario(ctr));
    FAIL("short center accepted");
  } catch (const ConfigError& err) {
    CHECK(std::string(err.what()).find("center") != std::string::npos);
  }
  CHECK_THROWS_AS(load_scenario(write_json("broken.json", nlohmann::json("not an object"))), ConfigError);
  CHECK_THROWS_AS(resolve_scenario("no-such-scenario"), ConfigError);
}

TEST_CASE("tabulated scenario from a lattice CSV") {
  const fs::path dir = scratch_dir() / "tabulated";
  fs::create_directories(dir);
  {
    std::ofstream csv(dir / "sphere.csv");
    csv << std::setprecision(17) << "p1,p2,x1,x2,x3\n";
    const int m = 81;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double a = 0.4 + 2.3 * i / (m - 1), b = -2.5 + 5.0 * j / (m - 1);
        csv << a << ',' << b << ',' << std::cos(a) << ',' << std::sin(a) * std::cos(b) << ','
            << std::sin(a) * std::sin(b) << '\n';
      }
  }
  nlohmann::json j = bundled("sphere-equality");
  j["name"] = "tabulated-sphere";
  j["chart"] = {{"name", "tabulated"}, {"params", {{"path", "sphere.csv"}}}};
  j["jets"] = "fd";
  j["tolerances"] = {{"equality", 5e-3}};
  const ScenarioConfig c = load_scenario(write_json("tabulated/tabulated-sphere.json", j));
  const VerificationReport r = run_scenario(c);
  CHECK(exit_code(r) == 0);
  CHECK(r.find("ratio_bound[k=1]")->residual < 5e-3);
  CHECK(r.find("restriction_hessian") == nullptr);
  CHECK(r.find("sampling")->residual < 0.1);

  j["chart"]["params"]["path"] = "missing.csv";
  CHECK_THROWS_AS(build_scenario(load_scenario(write_json("tabulated/missing.json", j))), ConfigError);
}

TEST_CASE("a cylinder violates the positivity hypotheses") {
  nlohmann::json j = bundled("sphere-equality");
  j["name"] = "cylinder";
  j.erase("radius");
  j["chart"] = {{"name", "cylinder"}, {"params", {{"radius", 1.0}, {"half_length", 1.0}}}};
  j["expect"] = "strict";
  const VerificationReport r = run_scenario(parse_scenario(j));
  CHECK(r.find("h2_positive")->status == CheckStatus::hypothesis_violation);
  CHECK(exit_code(r) == 2);
}

TEST_CASE("strict margin is stable under grid refinement") {
  nlohmann::json j = bundled("ellipsoid");
  const int base = j["resolution"];
  for (int k : {0, 1}) {
    j["resolution"] = base;
    const double coarse = run_scenario(parse_scenario(j)).find("ratio_bound[k=" + std::to_string(k) + "]")->residual;
    j["resolution"] = 2 * base;
    const double fine = run_scenario(parse_scenario(j)).find("ratio_bound[k=" + std::to_string(k) + "]")->residual;
    CHECK(coarse > 0.0);
    CHECK(fine >= coarse - 1e-4);
  }
}

TEST_CASE("hyperboloid family has ratio 1/r") {
  nlohmann::json j = bundled("minkowski-hyperboloid");
  for (double r : {1.0, 0.1, 0.01}) {
    INFO("r = " << r);
    // Patch scaled with r; a fixed half-width turns nearly null as r shrinks.
    j["radius"] = r;
    j["chart"]["params"]["half_width"] = r;
    const ScenarioConfig c = parse_scenario(j);
    const SampledScenario ss = sample_scenario(build_scenario(c));
    double sup_ratio = 0.0, inf_ratio = 1e300;
    for (const auto& s : ss.samples) {
      sup_ratio = std::max(sup_ratio, s.H(1) / s.H(0));
      inf_ratio = std::min(inf_ratio, s.H(1) / s.H(0));
    }
    CHECK(std::abs(sup_ratio - 1.0 / r) < 1e-4);
    CHECK(std::abs(inf_ratio - 1.0 / r) < 1e-4);
    CHECK(exit_code(run_scenario(c)) == 0);
  }
}

TEST_CASE("command line: verify") {
  CHECK(run_cli("verify --scenario sphere-equality") == 0);
  CHECK(run_cli("verify --scenario sphere-equality.json") == 0);
  CHECK(run_cli("verify --scenario " + resolve_scenario("ellipsoid").string()) == 0);

  nlohmann::json j = bundled("sphere-equality");
  j["k"] = 2;
  CHECK(run_cli("verify --scenario " + write_json("k-equals-n.json", j).string()) == 3);
  CHECK(run_cli("verify --scenario sphere-equality --resolution 4") == 3);
  CHECK(run_cli("verify --scenario sphere-equality --no-such-flag") == 3);
  CHECK(run_cli("verify") == 3);
  CHECK(run_cli("") == 3);
  CHECK(run_cli("verify --scenario no-such-scenario") == 3);

  nlohmann::json cyl = bundled("sphere-equality");
  cyl.erase("radius");
  cyl["chart"] = {{"name", "cylinder"}, {"params", {{"radius", 1.0}, {"half_length", 1.0}}}};
  cyl["expect"] = "strict";
  CHECK(run_cli("verify --scenario " + write_json("cylinder.json", cyl).string()) == 2);

  const fs::path samples = scratch_dir() / "samples.csv", report = scratch_dir() / "report.json",
                 stdout_file = scratch_dir() / "verify.txt";
  fs::remove(samples);
  fs::remove(report);
  CHECK(run_cli("verify --scenario sphere-equality --emit-samples " + samples.string() + " --emit-report " +
                    report.string(),
                stdout_file.string()) == 0);
  CHECK(slurp(samples).rfind("p1,p2,u,grad_norm", 0) == 0);
  const auto rep = nlohmann::json::parse(slurp(report));
  CHECK(rep["scenario"] == "sphere-equality");
  CHECK(rep["checks"].size() > 5);
  CHECK(slurp(stdout_file).find("sphere-equality: PASS") != std::string::npos);

  CHECK(run_cli("verify --scenario sphere-equality --resolution 16 --emit-report " + report.string()) == 0);
  CHECK(nlohmann::json::parse(slurp(report))["env"]["resolution"] == 16);
}

TEST_CASE("command line: comparison tools") {
  const fs::path out = scratch_dir() / "tool.txt";
  CHECK(run_cli("sturm --G 'const(1)' --T 5", out.string()) == 0);
  const fs::path csv = scratch_dir() / "sturm.csv";
  CHECK(run_cli("sturm --G 'affine(1,1)' --T 5 --csv " + csv.string()) == 0);
  const std::string table = slurp(csv);
  CHECK(std::count(table.begin(), table.end(), '\n') > 100);
  CHECK(run_cli("sturm --G 'const(-1)' --T 5") == 2);
  CHECK(run_cli("sturm --G 'cubic(1)' --T 5") == 3);

  CHECK(run_cli("lambda --G 'const(1)'", out.string()) == 0);
  CHECK(slurp(out).find("Lambda = 4.30025") != std::string::npos);
  CHECK(run_cli("lambda --G 'affine(1,1)' --t-max 20") == 0);

  CHECK(run_cli("comparison --b -1 --t 1", out.string()) == 0);
  CHECK(slurp(out).find("1.31303528") != std::string::npos);
  CHECK(run_cli("comparison --b 1 --t 2") == 3);

  CHECK(run_cli("list-scenarios", out.string()) == 0);
  const std::string listed = slurp(out);
  for (const auto& name : list_scenarios()) CHECK(listed.find(name) != std::string::npos);
}
