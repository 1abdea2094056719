#include "fibril/errors.hpp"
#include "fibril/validate.hpp"

#include <doctest.h>

#include <cmath>

using namespace fibril;

TEST_SUITE("models") {

TEST_CASE("planar rotor identity action and Killing fields") {
  auto m = builtin_planar_rotor();
  CHECK(max_abs(m->action_P(vec({1, 0}), vec({0})) - vec({1, 0})) == 0.0);
  // rotation field (−y, x) on both factors
  Vec Q = vec({0.3, -1.2}), f = vec({0.7, 0.4});
  CHECK(max_abs(m->killing_P(Q) - Mat(vec({1.2, 0.3}))) < 1e-14);
  CHECK(max_abs(m->killing_V(f) - Mat(vec({-0.4, 0.7}))) < 1e-14);
  CHECK(max_abs(m->fd_killing_P(Q) - m->killing_P(Q)) < 1e-8);
}

TEST_CASE("planar rotor orbit metric pieces") {
  auto m = builtin_planar_rotor();
  Vec Q = vec({0.3, -1.2}), f = vec({0.7, 0.4});
  Mat K = m->killing_P(Q), KV = m->killing_V(f);
  double gamma = (K.transpose() * m->metric_P(Q) * K)(0, 0);
  double gamma_p = (KV.transpose() * m->metric_V() * KV)(0, 0);
  CHECK(gamma == doctest::Approx(0.09 + 1.44).epsilon(1e-14));
  CHECK(gamma_p == doctest::Approx(0.49 + 0.16).epsilon(1e-14));
}

TEST_CASE("quaternionic model at the identity") {
  auto m = builtin_quaternionic();
  Vec Q = vec({0.3, -0.1, 0.8, 0.5});
  CHECK(max_abs(m->action_P(Q, Vec::Zero(3)) - Q) == 0.0);
  CHECK(max_abs(m->rep_V(Vec::Zero(3)) - eye(3)) < 1e-15);
}

TEST_CASE("quaternionic commutators carry the opposite structure constants") {
  auto m = builtin_quaternionic();
  const auto& J = m->generators_V();
  const auto& c = m->structure_constants();
  // [J̄₁, J̄₂] = c̄³₁₂ J̄₃ with c̄ = −c and c³₁₂ = 2
  CHECK(c[2](0, 1) == 2.0);
  CHECK(max_abs(J[0] * J[1] - J[1] * J[0] + c[2](0, 1) * J[2]) < 1e-14);
}

TEST_CASE("validation passes for the built-ins") {
  auto r1 = validate_model(*builtin_planar_rotor(), 100, 3);
  CHECK(r1.all_passed());
  for (const auto& c : r1.checks)
    if (c.name.rfind("fd_", 0) != 0) CHECK_MESSAGE(c.residual < 1e-12, c.name);
  auto r2 = validate_model(*builtin_quaternionic(), 100, 3);
  CHECK(r2.all_passed());
  for (const auto& c : r2.checks)
    if (c.name.rfind("fd_", 0) != 0 && c.name != "rep_V_generators") CHECK_MESSAGE(c.residual < 1e-10, c.name);
}

TEST_CASE("finite-difference and analytic derivatives agree") {
  for (auto m : {builtin_planar_rotor(), builtin_quaternionic()}) {
    auto r = validate_model(*m, 50, 9);
    for (const char* name : {"fd_vs_analytic_action_jacobian", "fd_vs_analytic_gauge_grad", "fd_vs_analytic_metric_d",
                             "fd_vs_analytic_killing"})
      CHECK(r.find(name)->residual < 1e-6);
  }
}

TEST_CASE("non-invariant metric_V is rejected") {
  ModelOptions o;
  o.metric_V = Mat(2, 2);
  *o.metric_V << 1.0, 0.3, 0.3, 2.0;
  auto m = builtin_planar_rotor(o);
  try {
    validate_model(*m, 20, 1);
    FAIL("expected ActionNotIsometric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ActionNotIsometric);
  }
}

TEST_CASE("indefinite metric_V is rejected") {
  ModelOptions o;
  o.metric_V = Mat(2, 2);
  *o.metric_V << 1.0, 0.0, 0.0, -1.0;
  auto m = builtin_planar_rotor(o);
  try {
    validate_model(*m, 5, 1);
    FAIL("expected NonPositiveDefiniteMetric");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NonPositiveDefiniteMetric);
  }
}

TEST_CASE("invariant potential") {
  ModelOptions o;
  o.v0 = 0.2;
  o.vQ = -0.5;
  o.vf = 0.3;
  auto m = builtin_quaternionic(o);
  Sampler s(4);
  for (int i = 0; i < 20; ++i) {
    Vec Q = s.ambient_Q(*m), f = s.f(*m), a = s.a(*m);
    double v = m->potential(Q, f);
    CHECK(m->potential(m->action_P(Q, a), m->rep_V(m->inverse(a)) * f) == doctest::Approx(v).epsilon(1e-12));
  }
}

TEST_CASE("declarative models load") {
  auto t = make_model(std::string(FIBRIL_SOURCE_DIR) + "/models/translation.json");
  CHECK(t->nP() == 2);
  CHECK(t->gauge_linear());
  CHECK(validate_model(*t, 20, 1).all_passed());
  auto c = make_model(std::string(FIBRIL_SOURCE_DIR) + "/models/curved_rotor.json");
  CHECK(validate_model(*c, 20, 1).all_passed());
  CHECK_THROWS_AS(make_model("no-such-model"), Error);
}

TEST_CASE("adapted coordinates round trip") {
  auto m = builtin_quaternionic();
  Sampler s(12);
  for (int i = 0; i < 20; ++i) {
    Vec Q = s.ambient_Q(*m), f = s.f(*m);
    AdaptedPoint p = ambient_to_adapted(*m, Q, f);
    CHECK(max_abs(m->gauge(p.Qstar)) < 1e-12);
    Vec Q2, f2;
    adapted_to_ambient(*m, p, Q2, f2);
    CHECK(max_abs(Q2 - Q) < 1e-12);
    CHECK(max_abs(f2 - f) < 1e-12);
  }
}

}
