#include <catch_amalgamated.hpp>

#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "curvest/immersion.hpp"
#include "oracles.hpp"

using namespace curvest;
using Catch::Approx;

namespace {

Vec vec(std::initializer_list<double> v) {
  Vec out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

HypersurfacePatch unit_sphere(Orientation o = Orientation::inner, JetMode j = JetMode::analytic) {
  return {charts::sphere(2, 1.0, Vec::Zero(3), charts::angular_box(2)), AmbientModel::euclidean(3), o,
          Vec(Vec::Zero(3)), j};
}

HypersurfacePatch minkowski_hyperboloid(double r, JetMode j = JetMode::analytic) {
  return {charts::hyperboloid(2, r, Vec::Zero(3), charts::cube(2, 1.0)), AmbientModel::minkowski(3),
          Orientation::future, Vec(Vec::Zero(3)), j};
}

/// Every bundled chart kind, with its patch.
std::vector<std::pair<std::string, HypersurfacePatch>> bundled_patches(JetMode j) {
  std::vector<std::pair<std::string, HypersurfacePatch>> out;
  out.emplace_back("sphere", unit_sphere(Orientation::inner, j));
  out.emplace_back("ellipsoid", HypersurfacePatch(charts::ellipsoid(vec({1, 1, 0.6}), Vec::Zero(3), charts::angular_box(2)),
                                                  AmbientModel::euclidean(3), Orientation::inner, Vec(Vec::Zero(3)), j));
  out.emplace_back("cylinder", HypersurfacePatch(charts::cylinder(2, 1.0, 1.0), AmbientModel::euclidean(3),
                                                 Orientation::inner, Vec(Vec::Zero(3)), j));
  charts::Polynomial poly{{{1.0, {2, 0}}, {0.5, {0, 2}}, {0.2, {1, 1}}}};
  out.emplace_back("graph", HypersurfacePatch(charts::graph(poly, charts::cube(2, 0.5), false), AmbientModel::euclidean(3),
                                              Orientation::inner, vec({0, 0, 3}), j));
  for (double b : {-1.0, 0.0, 1.0}) {
    const auto m = AmbientModel::riemannian_space_form(b, 3);
    const Vec o = canonical_origin(m);
    out.emplace_back("geodesic_sphere b=" + std::to_string(b),
                     HypersurfacePatch(charts::geodesic_sphere(m, o, 0.7, charts::angular_box(2)), m, Orientation::inner,
                                       o, j));
  }
  out.emplace_back("hyperboloid", minkowski_hyperboloid(2.0, j));
  out.emplace_back("perturbed_hyperboloid",
                   HypersurfacePatch(charts::perturbed_hyperboloid(2, 2.0, 0.01, charts::cube(2, 2.0)),
                                     AmbientModel::minkowski(3), Orientation::future, Vec(Vec::Zero(3)), j));
  for (double b : {-1.0, 1.0}) {
    const auto m = AmbientModel::lorentz_spaceform(b, 3);
    const Vec o = canonical_origin(m);
    out.emplace_back("lorentz level set b=" + std::to_string(b),
                     HypersurfacePatch(charts::geodesic_sphere(m, o, 0.8, charts::cube(2, 1.0)), m, Orientation::future,
                                       o, j));
  }
  return out;
}

}  // namespace

TEST_CASE("unit sphere with inner normal has identity shape operator") {
  const auto patch = unit_sphere();
  for (const Vec& p : grid_points(patch.chart.domain(), {5, 5})) {
    const PointFrame f = frame_at(patch, p);
    CHECK((f.shape_operator - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((f.normal + f.position).norm() < 1e-12);
  }
}

TEST_CASE("cylinder with inner normal has principal curvatures 0 and 1") {
  const HypersurfacePatch patch(charts::cylinder(2, 1.0, 1.0), AmbientModel::euclidean(3), Orientation::inner,
                                Vec(Vec::Zero(3)));
  const Vec k = principal_curvatures(frame_at(patch, vec({0.4, 0.3})));
  CHECK(k(0) == Approx(0.0).margin(1e-12));
  CHECK(k(1) == Approx(1.0).margin(1e-12));
}

TEST_CASE("Minkowski hyperboloid has future normal x/r and shape operator -I/r") {
  for (double r : {0.5, 2.0}) {
    const auto patch = minkowski_hyperboloid(r);
    for (const Vec& p : grid_points(patch.chart.domain(), {4, 4})) {
      const PointFrame f = frame_at(patch, p);
      // Derived oracle: N = x / r; dN(d_i) = d_i x / r, so A = -dN = -I/r.
      CHECK((f.normal - f.position / r).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((f.shape_operator + Mat::Identity(2, 2) / r).cwiseAbs().maxCoeff() < 1e-12);
      const Vec k = principal_curvatures(f);
      CHECK(k(0) == Approx(-1.0 / r).margin(1e-12));
      CHECK(k(1) == Approx(-1.0 / r).margin(1e-12));
    }
  }
}

TEST_CASE("sphere of radius r has principal curvatures 1/r") {
  for (int n : {2, 3, 4}) {
    const HypersurfacePatch patch(charts::sphere(n, 2.5, Vec::Zero(n + 1), charts::angular_box(n)),
                                  AmbientModel::euclidean(n + 1), Orientation::inner, Vec(Vec::Zero(n + 1)));
    const Vec p = (charts::angular_box(n).lo + charts::angular_box(n).hi) / 3.0;
    const Vec k = principal_curvatures(frame_at(patch, p));
    CHECK((k.array() - 0.4).abs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ellipsoid pole curvatures equal c/a^2") {
  const double a = 1.3, c = 0.6;
  // Independent oracle: Weingarten map of the graph z = c sqrt(1 - (x^2+y^2)/a^2) at the pole.
  const double fxx = oracle::second_derivative([&](double x) { return c * std::sqrt(1.0 - x * x / (a * a)); }, 1e-3);
  const double expected = -fxx;
  CHECK(expected == Approx(c / (a * a)).margin(1e-8));
  const HypersurfacePatch patch(charts::ellipsoid(vec({a, a, c}), Vec::Zero(3), charts::angular_box(2)),
                                AmbientModel::euclidean(3), Orientation::inner, Vec(Vec::Zero(3)));
  const PointFrame f = frame_at(patch, vec({std::numbers::pi / 2, std::numbers::pi / 2}));
  REQUIRE((f.position - vec({0, 0, c})).norm() < 1e-12);
  const Vec k = principal_curvatures(f);
  CHECK(k(0) == Approx(expected).margin(1e-8));
  CHECK(k(1) == Approx(expected).margin(1e-8));
}

TEST_CASE("flipping orientation negates the shape operator") {
  for (auto& [name, patch] : bundled_patches(JetMode::analytic)) {
    if (patch.orientation == Orientation::future) continue;
    INFO(name);
    HypersurfacePatch flipped = patch;
    flipped.orientation = Orientation::outer;
    for (const Vec& p : grid_points(patch.chart.domain(), {5, 5})) {
      const PointFrame a = frame_at(patch, p), b = frame_at(flipped, p);
      CHECK((a.shape_operator + b.shape_operator).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("frames are consistent on every bundled chart") {
  for (auto& [name, patch] : bundled_patches(JetMode::analytic)) {
    INFO(name);
    const AmbientModel& m = patch.ambient;
    const SampleSet set = sample_grid(patch, 6);
    CHECK(set.skips.empty());
    for (const auto& f : set.frames) {
      const Mat gA = f.metric * f.shape_operator;
      CHECK((gA - gA.transpose()).cwiseAbs().maxCoeff() < 1e-10);
      CHECK(std::abs(m.norm_sq(f.normal) - (m.lorentzian() ? -1.0 : 1.0)) < 1e-12);
      for (int i = 0; i < f.n(); ++i) CHECK(std::abs(m.inner(f.normal, f.tangents.col(i))) < 1e-10);
      if (m.embedded()) CHECK(std::abs(m.inner(f.normal, f.position)) < 1e-10);
      if (m.lorentzian()) {
        CHECK(m.future_directed(f.position, f.normal));
        Eigen::SelfAdjointEigenSolver<Mat> es(f.metric);
        CHECK(es.eigenvalues().minCoeff() > 0.0);
      }
      const Vec k = principal_curvatures(f);
      CHECK(std::is_sorted(k.data(), k.data() + k.size()));
    }
  }
}

TEST_CASE("analytic and finite-difference jets agree on principal curvatures") {
  auto exact = bundled_patches(JetMode::analytic);
  auto approx = bundled_patches(JetMode::finite_difference);
  for (std::size_t c = 0; c < exact.size(); ++c) {
    INFO(exact[c].first);
    double worst = 0.0;
    for (const Vec& p : grid_points(exact[c].second.chart.domain(), {7, 7})) {
      const Vec a = principal_curvatures(frame_at(exact[c].second, p));
      const Vec b = principal_curvatures(frame_at(approx[c].second, p));
      worst = std::max(worst, (a - b).cwiseAbs().maxCoeff());
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("sample grid counts and skips") {
  const auto patch = unit_sphere();
  const SampleSet set = sample_grid(patch, 10);
  CHECK(set.frames.size() == 100);
  CHECK(set.skips.empty());

  // Polar angle reaching 0 and pi: the chart degenerates on exactly those rows.
  const HypersurfacePatch capped(charts::sphere(2, 1.0, Vec::Zero(3), charts::angular_box(2, 0.0)),
                                 AmbientModel::euclidean(3), Orientation::inner, Vec(Vec::Zero(3)));
  const SampleSet with_caps = sample_grid(capped, 10);
  CHECK(with_caps.frames.size() == 80);
  REQUIRE(with_caps.skips.size() == 20);
  for (const auto& s : with_caps.skips) {
    const bool on_pole = std::abs(s.params(0)) < 1e-15 || std::abs(s.params(0) - std::numbers::pi) < 1e-15;
    CHECK(on_pole);
  }
  CHECK_THROWS_AS(sample_grid(patch, 1), ConfigError);
}

TEST_CASE("frame preconditions raise typed errors") {
  CHECK_THROWS_AS(frame_at(unit_sphere(), vec({-1.0, 0.0})), DomainError);
  // A timelike plane t = 2 y in Minkowski space is not spacelike.
  const HypersurfacePatch steep(charts::graph({{{2.0, {1, 0}}}}, charts::cube(2, 1.0), true), AmbientModel::minkowski(3),
                                Orientation::future);
  CHECK_THROWS_AS(frame_at(steep, vec({0.1, 0.2})), SignatureError);
  CHECK_THROWS_AS(sample_grid(steep, 4), EmptySampleError);
  // Chart collapsing the second parameter.
  const HypersurfacePatch flat(Chart::generic("collapsed", charts::cube(2, 1.0),
                                              [](const auto& p) {
                                                using S = std::decay_t<decltype(p[0])>;
                                                return std::vector<S>{p[0], S(0.0), S(1.0)};
                                              }),
                               AmbientModel::euclidean(3), Orientation::inner, Vec(Vec::Zero(3)));
  CHECK_THROWS_AS(frame_at(flat, vec({0.1, 0.2})), DegeneracyError);
}

TEST_CASE("patch orientation must match the ambient signature") {
  const Chart c = charts::sphere(2, 1.0, Vec::Zero(3), charts::angular_box(2));
  CHECK_THROWS_AS(HypersurfacePatch(c, AmbientModel::euclidean(3), Orientation::future), ConfigError);
  CHECK_THROWS_AS(HypersurfacePatch(c, AmbientModel::euclidean(3), Orientation::inner), ConfigError);
  CHECK_THROWS_AS(HypersurfacePatch(charts::hyperboloid(2, 1.0, Vec::Zero(3), charts::cube(2, 1.0)),
                                    AmbientModel::minkowski(3), Orientation::inner, Vec(Vec::Zero(3))),
                  ConfigError);
  CHECK_THROWS_AS(HypersurfacePatch(c, AmbientModel::euclidean(4), Orientation::inner, Vec(Vec::Zero(4))), ConfigError);
  CHECK(parse_orientation("outer") == Orientation::outer);
  CHECK_THROWS_AS(parse_orientation("up"), ConfigError);
}

TEST_CASE("tabulated charts: lattice jets and explicit jets") {
  const auto patch = unit_sphere();
  const auto pts = grid_points(ParameterBox{vec({1.0, -0.5}), vec({2.0, 0.5})}, {41, 41});

  std::stringstream plain;
  plain << std::setprecision(17) << "p1,p2,x1,x2,x3\n";
  for (const Vec& p : pts) {
    const Vec x = patch.chart.position(p);
    plain << p(0) << ',' << p(1) << ',' << x(0) << ',' << x(1) << ',' << x(2) << '\n';
  }
  const SampleSet lattice = sample_tabulated(read_tabulated_chart(plain), AmbientModel::euclidean(3),
                                             Orientation::inner, Vec(Vec::Zero(3)));
  CHECK(lattice.frames.size() == 39 * 39);
  CHECK(lattice.skips.size() == 41 * 41 - 39 * 39);
  for (const auto& f : lattice.frames) CHECK((principal_curvatures(f).array() - 1.0).abs().maxCoeff() < 1e-3);

  std::stringstream jets;
  jets << std::setprecision(17) << "p1,p2,x1,x2,x3";
  for (int i = 1; i <= 2; ++i)
    for (int a = 1; a <= 3; ++a) jets << ",d" << i << "_x" << a;
  for (int i = 1; i <= 2; ++i)
    for (int j = i; j <= 2; ++j)
      for (int a = 1; a <= 3; ++a) jets << ",d" << i << j << "_x" << a;
  jets << '\n';
  for (int r = 0; r < 5; ++r) {
    const Vec p = pts[static_cast<std::size_t>(r * 97)];
    const ChartJet j = patch.chart.analytic_jet(p);
    jets << p(0) << ',' << p(1);
    for (int a = 0; a < 3; ++a) jets << ',' << j.position(a);
    for (int i = 0; i < 2; ++i)
      for (int a = 0; a < 3; ++a) jets << ',' << j.first(a, i);
    for (int i = 0; i < 2; ++i)
      for (int k = i; k < 2; ++k)
        for (int a = 0; a < 3; ++a) jets << ',' << j.d2(i, k)(a);
    jets << '\n';
  }
  const SampleSet direct = sample_tabulated(read_tabulated_chart(jets), AmbientModel::euclidean(3), Orientation::inner,
                                            Vec(Vec::Zero(3)));
  CHECK(direct.frames.size() == 5);
  for (const auto& f : direct.frames) CHECK((principal_curvatures(f).array() - 1.0).abs().maxCoeff() < 1e-12);

  std::stringstream bad("p1,p2,x1,x2,x3\n0,0,1,2\n");
  CHECK_THROWS_AS(read_tabulated_chart(bad), ConfigError);
}
