#include "fibril/reduction.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace fibril;

namespace {

const cplx I(0.0, 1.0);

}  // namespace

TEST_SUITE("reduction") {

TEST_CASE("single-step Girsanov weight at the unit point") {
  auto m = builtin_planar_rotor();
  SimOptions o;
  o.girsanov = true;
  o.record_states = true;
  const double dt = 1e-3;
  Trajectory T = simulate_path(*m, {}, ProcessKind::ReducedNoJ2, vec({1, 0, 0, 0}), dt, dt, 11, o);
  REQUIRE(T.dW.size() == 1);
  CHECK(T.log_girsanov == doctest::Approx(T.dW[0](0) / 2 - dt / 8).epsilon(1e-13));
  CHECK(T.log_girsanov == doctest::Approx(girsanov_log_weight_stochastic(T, *m, {})).epsilon(1e-13));
  CHECK(T.log_girsanov_closed == doctest::Approx(girsanov_log_weight_closed(T, *m, {})).epsilon(1e-13));
}

TEST_CASE("constant orbit volume gives unit weight") {
  auto m = make_model(std::string(FIBRIL_SOURCE_DIR) + "/models/translation.json");
  SimOptions o;
  o.girsanov = true;
  Trajectory T = simulate_path(*m, {}, ProcessKind::ReducedNoJ2, vec({0, 0.3, 0.1}), 0.1, 1e-3, 2, o);
  REQUIRE(!T.failed);
  CHECK(T.log_girsanov == 0.0);
  CHECK(T.log_girsanov_closed == 0.0);
}

TEST_CASE("Girsanov weight is a martingale") {
  auto m = builtin_planar_rotor();
  SimOptions o;
  o.girsanov = true;
  const int n = 4000;
  Ensemble E = simulate(*m, {}, ProcessKind::ReducedNoJ2, vec({1, 0, 0.2, 0}), 0.1, 1e-3, n, 3, o);
  std::vector<cplx> w;
  for (const auto& T : E.paths) w.push_back(std::exp(T.log_girsanov));
  EstimatorResult r = estimate_mean(w, n, 3);
  CHECK(std::abs(r.value.real() - 1.0) < 3.0 * r.stderr_);
}

TEST_CASE("Haar quadrature") {
  auto rot = builtin_planar_rotor();
  CHECK(haar_average(*rot, [](const Vec&) { return cplx(1.0); }).real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(haar_average(*rot, [](const Vec& a) { return cplx(std::cos(a(0)) * std::cos(a(0))); }).real() ==
        doctest::Approx(0.5).epsilon(1e-14));
  for (int k = -3; k <= 3; ++k)
    for (int l = -3; l <= 3; ++l) {
      IrrepSpec a = so2_charge(k), b = so2_charge(l);
      cplx v = haar_average(*rot, [&](const Vec& x) { return a.evaluate(x)(0, 0) * std::conj(b.evaluate(x)(0, 0)); });
      CHECK(std::abs(v - cplx(k == l ? 1.0 : 0.0)) < 1e-10);
    }

  auto q = builtin_quaternionic();
  IrrepSpec s = su2_spin_half();
  CHECK(haar_average(*q, [](const Vec&) { return cplx(1.0); }).real() == doctest::Approx(1.0).epsilon(1e-12));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) {
          cplx v = haar_average(*q, [&](const Vec& x) {
            CMat D = s.evaluate(x);
            return D(i, j) * std::conj(D(k, l));
          });
          CHECK(std::abs(v - cplx((i == k && j == l) ? 0.5 : 0.0)) < 1e-10);
        }
  CMat avg = haar_average_matrix(*q, 2, 2, s.evaluate);
  CHECK(avg.norm() < 1e-10);
}

TEST_CASE("spin one half is a representation") {
  auto q = builtin_quaternionic();
  IrrepSpec s = su2_spin_half();
  Vec a = vec({0.3, -0.5, 0.2}), b = vec({-0.1, 0.4, 0.7});
  CHECK((s.evaluate(a) * s.evaluate(b) - s.evaluate(q->compose(a, b))).norm() < 1e-12);
  const auto& c = q->structure_constants();
  for (int al = 0; al < 3; ++al)
    for (int be = 0; be < 3; ++be) {
      CMat comm = s.generators[al] * s.generators[be] - s.generators[be] * s.generators[al];
      CMat want = CMat::Zero(2, 2);
      for (int g = 0; g < 3; ++g) want += c[g](al, be) * s.generators[g];
      CHECK((comm - want).norm() < 1e-14);
    }
}

TEST_CASE("ordered exponentials") {
  auto m = builtin_planar_rotor();
  IrrepSpec tr = trivial_irrep(1), k1 = so2_charge(1);
  SimOptions o;
  o.record_states = true;
  o.irreps = {&tr, &k1};
  Trajectory T = simulate_path(*m, {}, ProcessKind::Reduced, vec({1, 0, 0.4, -0.2}), 0.2, 1e-3, 8, o);
  REQUIRE(!T.failed);
  CHECK(T.ordered_exp[0] == CMat::Identity(1, 1));
  CHECK(std::abs(T.ordered_exp[1](0, 0) - ordered_exponential(T, *m, {}, k1)(0, 0)) < 1e-12);

  auto q = builtin_quaternionic();
  IrrepSpec s = su2_spin_half();
  SimOptions oq;
  oq.record_states = true;
  oq.irreps = {&s};
  Trajectory Tq = simulate_path(*q, {}, ProcessKind::Reduced, vec({1, 0, 0, 0, 0.3, 0.1, 0.2}), 0.1, 1e-3, 4, oq);
  REQUIRE(!Tq.failed);
  CHECK((Tq.ordered_exp[0] - ordered_exponential(Tq, *q, {}, s)).norm() < 1e-12);
}

TEST_CASE("conjugate charges give conjugate ordered exponentials") {
  auto m = builtin_planar_rotor();
  IrrepSpec kp = so2_charge(2), km = so2_charge(-2);
  SimOptions o;
  o.irreps = {&kp, &km};
  Trajectory T = simulate_path(*m, {}, ProcessKind::Reduced, vec({0.8, 0, -0.3, 0.6}), 0.2, 1e-3, 5, o);
  REQUIRE(!T.failed);
  CHECK(std::abs(T.ordered_exp[0](0, 0) - std::conj(T.ordered_exp[1](0, 0))) < 1e-12);
}

TEST_CASE("Feynman-Kac weights") {
  ModelOptions mo;
  mo.v0 = 0.7;
  auto m = builtin_planar_rotor(mo);
  PhysicalScales s;
  s.mu2kappa = 2.0;
  s.mass = 1.5;
  SimOptions o;
  o.feynman_kac = true;
  o.record_states = true;
  Trajectory T = simulate_path(*m, s, ProcessKind::Original, vec({1, 0, 0, 0}), 0.3, 1e-3, 1, o);
  CHECK(feynman_kac_factor(T.potential_integral, s) == doctest::Approx(std::exp(0.7 * 0.3 / 3.0)).epsilon(1e-12));
  CHECK(feynman_kac_weight(T, *m, s) == doctest::Approx(std::exp(0.7 * 0.3 / 3.0)).epsilon(1e-12));
  auto free = builtin_planar_rotor();
  Trajectory U = simulate_path(*free, s, ProcessKind::Original, vec({1, 0, 0, 0}), 0.3, 1e-3, 1, o);
  CHECK(feynman_kac_weight(U, *free, s) == 1.0);
}

TEST_CASE("Feynman-Kac integral is invariant under a group shift of the path") {
  ModelOptions mo;
  mo.vQ = 0.4;
  mo.vf = -0.3;
  auto m = builtin_quaternionic(mo);
  SimOptions o;
  o.feynman_kac = true;
  o.record_states = true;
  Trajectory T = simulate_path(*m, {}, ProcessKind::Original, vec({0.9, 0.2, -0.1, 0.3, 0.5, 0.1, 0.0}), 0.1, 1e-3,
                               6, o);
  REQUIRE(!T.failed);
  Vec g = vec({0.4, -0.2, 0.9});
  double shifted = 0.0;
  for (std::size_t k = 0; k + 1 < T.states.size(); ++k) {
    auto V = [&](const Vec& x) { return m->potential(m->action_P(x.head(4), g), m->rep_V(g) * x.tail(3)); };
    shifted += 0.5 * (V(T.states[k]) + V(T.states[k + 1])) * (T.times[k + 1] - T.times[k]);
  }
  CHECK(shifted == doctest::Approx(T.potential_integral).epsilon(1e-12));
}

TEST_CASE("estimator statistics") {
  std::vector<cplx> c = {1.0, 2.0, 3.0, 4.0};
  EstimatorResult r = estimate_mean(c, 5, 0);
  CHECK(r.value.real() == doctest::Approx(2.5));
  CHECK(r.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  CHECK(r.excluded_fraction == doctest::Approx(0.2));
  CHECK(r.n_effective <= 4.0);
  CHECK(r.n_effective == doctest::Approx(100.0 / 30.0));
  std::vector<cplx> same(10, cplx(3.0));
  CHECK(estimate_mean(same, 10, 0).n_effective == doctest::Approx(10.0));
}

TEST_CASE("kernel and bandwidth") {
  const double h = 0.3;
  CHECK(gaussian_kernel(Vec::Zero(2), eye(2), h, 2) == doctest::Approx(1.0 / (2 * std::numbers::pi * h * h)));
  CHECK(silverman_factor(1, 1) == doctest::Approx(std::pow(4.0 / 3.0, 0.2)));
  // unit-normal samples: spread ≈ 1, so the bandwidth is close to the Silverman factor
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  std::vector<Vec> ys;
  for (int i = 0; i < 20000; ++i) ys.push_back(vec({nd(rng), nd(rng)}));
  CHECK(scalar_bandwidth(ys) / silverman_factor(2, 20000) == doctest::Approx(1.0).epsilon(0.03));
  CHECK(scalar_bandwidth(ys, 2.0) == doctest::Approx(2.0 * scalar_bandwidth(ys)));
}

}
