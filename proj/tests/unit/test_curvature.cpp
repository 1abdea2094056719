#include "fibril/curvature.hpp"
#include "fibril/validate.hpp"

#include <doctest.h>

#include <cmath>

using namespace fibril;

namespace {

AdaptedPoint at(std::initializer_list<double> q, std::initializer_list<double> f, int nG) {
  return {vec(q), vec(f), Vec::Zero(nG)};
}

}  // namespace

TEST_SUITE("curvature") {

TEST_CASE("divergence drift on V vanishes at zero velocity") {
  auto m = builtin_planar_rotor();
  DriftBundle b = drift_bundle(*m, at({1.4, 0}, {0, 0}, 1));
  CHECK(max_abs(b.V(b.b_div)) < 1e-12);
}

TEST_CASE("rotor orbit curvature") {
  auto m = builtin_planar_rotor();
  const double r = 1.2, u = 0.3, w = -0.7, d = r * r + u * u + w * w;
  AdaptedPoint p = at({r, 0}, {u, w}, 1);
  GeometricFrame F = frame(*m, p);
  // ∇_K K = -X for a flat rotation
  Vec c = orbit_curvature_vector(*m, F) * d;
  CHECK(max_abs(c - vec({-r, 0, -u, -w})) < 1e-12);
  Vec want = vec({r, 0, u, w}) / (2 * d);
  CHECK(max_abs(j2(*m, p) - want) < 1e-12);
  CHECK(max_abs(j2_sigma_form(*m, p) - want) < 1e-12);
}

TEST_CASE("gradient norm of sigma at the unit point") {
  auto m = builtin_planar_rotor();
  DriftBundle b = drift_bundle(*m, at({1, 0}, {0, 0}, 1));
  CHECK(b.grad_sq == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("translation model has no Jacobian term") {
  auto m = make_model(std::string(FIBRIL_SOURCE_DIR) + "/models/translation.json");
  Sampler s(2);
  for (int i = 0; i < 20; ++i) {
    AdaptedPoint p = s.adapted(*m);
    DriftBundle b = drift_bundle(*m, p);
    CHECK(std::abs(b.J) < 1e-12);
    CHECK(max_abs(b.j2) < 1e-12);
  }
}

TEST_CASE("drift closure and zero sum on the built-ins") {
  for (auto m : {builtin_planar_rotor(), builtin_quaternionic()}) {
    Sampler s(13);
    for (int i = 0; i < 30; ++i) {
      AdaptedPoint p = s.adapted(*m);
      DriftBundle b = drift_bundle(*m, p);
      CHECK(max_abs(b.b_div - b.christoffel_term - b.j1 - b.j2) < 1e-7);
      CHECK(max_abs(b.j2 - b.j2_sigma) < 1e-9);
      CHECK(std::abs(b.zero_sum) < 1e-8);
      CHECK(max_abs(b.killing_sigma) < 1e-10);
      CHECK(b.J == doctest::Approx(-0.125 * (b.laplace_H + 0.25 * b.grad_sq)).epsilon(1e-12));
    }
  }
}

TEST_CASE("Jacobian integrand matches the stencil oracle") {
  for (auto m : {builtin_planar_rotor(), builtin_quaternionic()}) {
    Sampler s(17);
    for (int i = 0; i < 10; ++i) {
      AdaptedPoint p = s.adapted(*m);
      const double J = jacobian_integrand(*m, p).J;
      CHECK(std::abs(J - jacobian_integrand_oracle(*m, p)) < 1e-5 * std::max(std::abs(J), 1e-3));
    }
  }
}

TEST_CASE("finite-difference model agrees with analytic derivatives") {
  ModelOptions o;
  o.finite_difference = true;
  auto fd = builtin_planar_rotor(o);
  auto an = builtin_planar_rotor();
  Sampler s(4);
  for (int i = 0; i < 10; ++i) {
    AdaptedPoint p = s.adapted(*an);
    DriftBundle a = drift_bundle(*an, p), b = drift_bundle(*fd, p);
    CHECK(max_abs(a.b_div - b.b_div) < 1e-4);
    CHECK(std::abs(a.J - b.J) < 1e-4 * std::max(1.0, std::abs(a.J)));
  }
}

}
