#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "curvest/spaceform.hpp"
#include "model_samples.hpp"
#include "oracles.hpp"

using namespace curvest;
using Catch::Approx;

namespace {

Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }
Vec v3(double a, double b, double c) { return (Vec(3) << a, b, c).finished(); }

}  // namespace

TEST_CASE("model invariants reject inconsistent curvature and dimension") {
  CHECK_THROWS_AS(AmbientModel(Signature::riemannian, ModelKind::sphere_embedded, -1.0, 3), ConfigError);
  CHECK_THROWS_AS(AmbientModel(Signature::riemannian, ModelKind::hyperboloid_embedded, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(AmbientModel(Signature::riemannian, ModelKind::euclidean, 0.5, 3), ConfigError);
  CHECK_THROWS_AS(AmbientModel(Signature::lorentzian, ModelKind::minkowski, 1.0, 3), ConfigError);
  CHECK_THROWS_AS(AmbientModel(Signature::riemannian, ModelKind::euclidean, 0.0, 1), ConfigError);
  CHECK_THROWS_AS(AmbientModel(Signature::riemannian, ModelKind::minkowski, 0.0, 3), ConfigError);
  CHECK(AmbientModel::sphere(1.0, 3).embedding_dimension() == 4);
  CHECK(AmbientModel::minkowski(3).embedding_dimension() == 3);
}

TEST_CASE("model kinds round-trip through their names") {
  for (auto k : {ModelKind::euclidean, ModelKind::sphere_embedded, ModelKind::hyperboloid_embedded,
                 ModelKind::minkowski, ModelKind::lorentz_spaceform})
    CHECK(parse_model_kind(to_string(k)) == k);
  CHECK_THROWS_AS(parse_model_kind("torus"), ConfigError);
  CHECK_THROWS_AS(parse_signature("euclidean"), ConfigError);
}

TEST_CASE("distance examples") {
  CHECK(ambient_distance(AmbientModel::euclidean(2), v2(0, 0), v2(3, 4)) == Approx(5.0).margin(1e-15));
  CHECK(ambient_distance(AmbientModel::minkowski(2), v2(0, 0), v2(5, 3)) == Approx(4.0).margin(1e-15));
  const auto s = AmbientModel::sphere(1.0, 2);
  CHECK(ambient_distance(s, v3(1, 0, 0), v3(std::cos(1.0), std::sin(1.0), 0)) == Approx(1.0).margin(1e-15));
}

TEST_CASE("distance domain violations are typed errors") {
  const auto s = AmbientModel::sphere(1.0, 2);
  CHECK_THROWS_AS(ambient_distance(s, v3(1, 0, 0), v3(-1, 0, 0)), DomainError);
  CHECK_THROWS_AS(ambient_distance(s, v3(1, 0, 0), v3(2, 0, 0)), DomainError);
  const auto mk = AmbientModel::minkowski(2);
  CHECK_THROWS_AS(ambient_distance(mk, v2(0, 0), v2(1, 3)), DomainError);   // spacelike separation
  CHECK_THROWS_AS(ambient_distance(mk, v2(0, 0), v2(-5, 3)), DomainError);  // past
  const auto ads = AmbientModel::lorentz_spaceform(-1.0, 2);
  const Vec o = canonical_origin(ads);
  const Vec v = ads.tangent_frame(o).front();
  CHECK_THROWS_AS(ambient_distance(ads, o, ads.exp(o, 1.6 * v)), DomainError);
  CHECK_THROWS_AS(distance_gradient(AmbientModel::euclidean(2), v2(1, 1), v2(1, 1)), UndefinedGradientError);
}

TEST_CASE("gradient examples") {
  const Vec g = distance_gradient(AmbientModel::euclidean(2), v2(0, 0), v2(0, 2));
  CHECK(g(0) == Approx(0.0).margin(1e-15));
  CHECK(g(1) == Approx(1.0).margin(1e-15));

  // Minkowski: differentiate sqrt(t^2 - x^2) numerically and raise the index.
  const auto mk = AmbientModel::minkowski(2);
  const Vec o = v2(0, 0), x = v2(5, 3);
  Vec cov(2);
  for (int i = 0; i < 2; ++i)
    cov(i) = oracle::first_derivative([&](double h) { Vec y = x; y(i) += h; return std::sqrt(y(0) * y(0) - y(1) * y(1)); }, 1e-3);
  const Vec expected = mk.raise(cov);
  const Vec got = distance_gradient(mk, o, x);
  CHECK(expected(0) == Approx(-1.25).margin(1e-9));
  CHECK(expected(1) == Approx(-0.75).margin(1e-9));
  CHECK((got - expected).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(mk.norm_sq(got) == Approx(-1.0).margin(1e-15));
  CHECK_FALSE(mk.future_directed(x, got));

  const auto s = AmbientModel::sphere(1.0, 2);
  for (double th : {0.3, 1.0, 2.0, 3.0}) {
    const Vec gs = distance_gradient(s, v3(1, 0, 0), v3(std::cos(th), std::sin(th), 0));
    CHECK(s.norm_sq(gs) == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("Hessian examples") {
  const auto e = AmbientModel::euclidean(2);
  CHECK(distance_hessian_quadform(e, v2(0, 0), v2(2, 0), v2(0, 1)) == Approx(0.5).margin(1e-15));
  const Vec g = distance_gradient(e, v2(0, 0), v2(1.2, 0.7));
  CHECK(distance_hessian_quadform(e, v2(0, 0), v2(1.2, 0.7), g) == Approx(0.0).margin(1e-15));

  // Minkowski, rho = 2 at (2, 0), unit spacelike X = (0, 1): second derivative of sqrt(t^2 - x^2).
  const auto mk = AmbientModel::minkowski(2);
  const double fd = oracle::second_derivative([](double h) { return std::sqrt(4.0 - h * h); }, 1e-3);
  CHECK(fd == Approx(-0.5).margin(1e-8));
  CHECK(distance_hessian_quadform(mk, v2(0, 0), v2(2, 0), v2(0, 1)) == Approx(fd).margin(1e-8));
}

TEST_CASE("Hessian comparison residual examples") {
  std::mt19937_64 rng(7);
  const auto e = AmbientModel::euclidean(3);
  for (int i = 0; i < 10; ++i) {
    samples::ModelCase c{"e", e, 0.3, 3.0};
    const Vec x = samples::random_point(c, Vec::Zero(3), rng);
    CHECK(std::abs(hessian_comparison_residual(e, Vec::Zero(3), x, samples::random_tangent(e, x, rng))) < 1e-6);
  }

  // Hyperboloid b = -1 at distance 1: independent FD along the geodesic through x with velocity X.
  const auto h = AmbientModel::hyperbolic(-1.0, 2);
  const Vec o = canonical_origin(h);
  const Vec x = v3(std::cosh(1.0), std::sinh(1.0), 0.0);
  const Vec X = v3(0, 0, 1);
  const double fd = oracle::second_derivative(
      [&](double t) { return std::acosh(-h.inner(o, std::cosh(t) * x + std::sinh(t) * X)); }, 1e-3);
  CHECK(fd == Approx(1.0 / std::tanh(1.0)).margin(1e-8));
  CHECK(fd == Approx(1.3130353).margin(1e-7));
  CHECK(distance_hessian_quadform(h, o, x, X) == Approx(fd).margin(1e-8));
  CHECK(std::abs(hessian_comparison_residual(h, o, x, X)) < 1e-6);

  // Minkowski at distance 1.
  const auto mk = AmbientModel::minkowski(2);
  const double fdm = oracle::second_derivative([](double s) { return std::sqrt(1.0 - s * s); }, 1e-3);
  CHECK(fdm == Approx(-1.0).margin(1e-8));
  CHECK(hessian_comparison_bound(mk, v2(0, 0), v2(1, 0), v2(0, 1)) == Approx(-c_hat_b(0.0, 1.0)).margin(1e-15));
  CHECK(std::abs(hessian_comparison_residual(mk, v2(0, 0), v2(1, 0), v2(0, 1))) < 1e-6);
  CHECK_THROWS_AS(hessian_comparison_residual(mk, v2(0, 0), v2(1, 0), v2(1, 0)), DomainError);
}

TEST_CASE("distance is arc length along radial geodesics") {
  std::mt19937_64 rng(11);
  for (const auto& c : samples::all_models(3)) {
    INFO(c.label);
    const Vec o = canonical_origin(c.model);
    for (int i = 0; i < 20; ++i) {
      const Vec v = samples::random_radial_direction(c.model, o, rng);
      for (double t : {c.t_lo, 0.5 * (c.t_lo + c.t_hi), c.t_hi}) {
        const Vec x = radial_point(c.model, o, v, t);
        REQUIRE(c.model.contains(x));
        CHECK(std::abs(ambient_distance(c.model, o, x) - t) < 1e-9);
      }
    }
  }
}

TEST_CASE("distance gradient has unit length") {
  std::mt19937_64 rng(12);
  for (const auto& c : samples::all_models(4)) {
    INFO(c.label);
    const Vec o = canonical_origin(c.model);
    for (int i = 0; i < 50; ++i) {
      const Vec x = samples::random_point(c, o, rng);
      const Vec g = distance_gradient(c.model, o, x);
      CHECK(std::abs(std::abs(c.model.norm_sq(g)) - 1.0) < 1e-12);
      CHECK(std::abs(c.model.inner(g, x) * (c.model.embedded() ? 1.0 : 0.0)) < 1e-12);
      if (c.model.lorentzian()) CHECK_FALSE(c.model.future_directed(x, g));
    }
  }
}

TEST_CASE("Hessian is a symmetric bilinear form (polarization)") {
  std::mt19937_64 rng(13);
  for (const auto& c : samples::all_models(3)) {
    INFO(c.label);
    const Vec o = canonical_origin(c.model);
    for (int i = 0; i < 30; ++i) {
      const Vec x = samples::random_point(c, o, rng);
      const Vec X = samples::random_tangent(c.model, x, rng), Y = samples::random_tangent(c.model, x, rng);
      const double q = [&](const Vec& a) { return distance_hessian_quadform(c.model, o, x, a); }(X + Y);
      const double polar = 0.5 * (q - distance_hessian_quadform(c.model, o, x, X) - distance_hessian_quadform(c.model, o, x, Y));
      CHECK(std::abs(polar - distance_hessian(c.model, o, x, X, Y)) < 1e-8);
      CHECK(std::abs(distance_hessian(c.model, o, x, X, Y) - distance_hessian(c.model, o, x, Y, X)) < 1e-12);
    }
  }
}

TEST_CASE("closed-form Hessian matches finite differences on 100 random samples per model") {
  std::mt19937_64 rng(14);
  for (const auto& c : samples::all_models(3)) {
    INFO(c.label);
    const Vec o = canonical_origin(c.model);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const Vec x = samples::random_point(c, o, rng);
      const Vec X = samples::random_tangent(c.model, x, rng);
      worst = std::max(worst, std::abs(fd_distance_hessian(c.model, o, x, X) - distance_hessian_quadform(c.model, o, x, X)));
      worst = std::max(worst, std::abs(hessian_comparison_residual(c.model, o, x, X)));
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("exponential map stays on the model and tangent frames are orthonormal") {
  std::mt19937_64 rng(15);
  for (const auto& c : samples::all_models(4)) {
    INFO(c.label);
    const Vec o = canonical_origin(c.model);
    const Vec x = samples::random_point(c, o, rng);
    const auto frame = c.model.tangent_frame(x);
    REQUIRE(static_cast<int>(frame.size()) == c.model.dimension());
    for (std::size_t i = 0; i < frame.size(); ++i) {
      for (std::size_t j = 0; j < frame.size(); ++j) {
        const double expect = i != j ? 0.0 : (c.model.lorentzian() && i == 0 ? -1.0 : 1.0);
        CHECK(std::abs(c.model.inner(frame[i], frame[j]) - expect) < 1e-12);
      }
      if (c.model.embedded()) CHECK(std::abs(c.model.inner(frame[i], x)) < 1e-12);
    }
    if (c.model.lorentzian()) CHECK(c.model.future_directed(x, frame[0]));
  }
}

TEST_CASE("reference ball radius limits") {
  const auto s = AmbientModel::sphere(1.0, 3);
  const Vec o = canonical_origin(s);
  CHECK_NOTHROW(ReferenceBall{o, 1.5}.validate(s));
  CHECK_THROWS_AS((ReferenceBall{o, std::numbers::pi / 2}.validate(s)), DomainError);
  const auto ads = AmbientModel::lorentz_spaceform(-1.0, 3);
  CHECK_THROWS_AS((ReferenceBall{canonical_origin(ads), 1.6}.validate(ads)), DomainError);
  const auto ds = AmbientModel::lorentz_spaceform(1.0, 3);
  CHECK_NOTHROW(ReferenceBall{canonical_origin(ds), 10.0}.validate(ds));
}
