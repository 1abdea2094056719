#include "fibril/validate.hpp"

#include "fibril/errors.hpp"

#include <cmath>
#include <sstream>

namespace fibril {

bool ValidationReport::all_passed() const {
  for (const auto& c : checks)
    if (!c.passed()) return false;
  return true;
}

const Check* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

Vec Sampler::direction(int n) {
  Vec v(n);
  do {
    for (int i = 0; i < n; ++i) v(i) = normal_(rng_);
  } while (v.norm() < 1e-12);
  return v / v.norm();
}

Vec Sampler::ball(int n, double radius) {
  if (n == 0) return Vec(0);
  return direction(n) * radius * std::pow(unif_(rng_), 1.0 / n);
}

Vec Sampler::shell(int n, double r0, double r1) {
  return direction(n) * (r0 + (r1 - r0) * unif_(rng_));
}

AdaptedPoint Sampler::adapted(const Model& m) {
  Vec Q = ambient_Q(m);
  Vec ap = m.gauge_element(Q);
  AdaptedPoint p;
  p.Qstar = m.action_P(Q, ap);
  p.ftilde = f(m);
  p.a = a(m);
  return p;
}

namespace {

double rel(const Mat& a, const Mat& b) {
  return max_abs(a - b) / std::max(1.0, max_abs(b));
}

bool is_spd(const Mat& g) {
  if (max_abs(g - g.transpose()) > 1e-12 * std::max(1.0, max_abs(g))) return false;
  Eigen::LLT<Mat> llt(g);
  return llt.info() == Eigen::Success;
}

}  // namespace

ValidationReport validate_model(const Model& m, int n_samples, std::uint64_t seed, bool throw_on_error) {
  if (n_samples < 1) fail(ErrorKind::Config, "validate_model needs n_samples >= 1");
  Sampler s(seed);
  ValidationReport rep;
  rep.model = m.name();
  rep.n_samples = n_samples;
  const int nG = m.nG(), nP = m.nP(), nV = m.nV();

  double pdP = 0, pdV = is_spd(m.metric_V()) ? 0 : 1;
  double isoP = 0, isoV = 0, pot = 0, compat = 0, repcompat = 0, adj = 0;
  double fdF = 0, fdChi = 0, fdG = 0, fdK = 0;
  for (int i = 0; i < n_samples; ++i) {
    Vec Q = s.ambient_Q(m), f = s.f(m), a = s.a(m), a2 = s.a(m);
    Mat G = m.metric_P(Q);
    if (!is_spd(G)) pdP = 1;
    Vec FQ = m.action_P(Q, a);
    Mat J = m.action_P_jacobian(Q, a);
    isoP = std::max(isoP, rel(J.transpose() * m.metric_P(FQ) * J, G));
    Mat D = m.rep_V(a);
    isoV = std::max(isoV, rel(D.transpose() * m.metric_V() * D, m.metric_V()));
    double v0 = m.potential(Q, f);
    pot = std::max(pot, std::abs(m.potential(FQ, D * f) - v0) / std::max(1.0, std::abs(v0)));
    Vec c12 = m.compose(a, a2);
    compat = std::max(compat, max_abs(m.action_P(FQ, a2) - m.action_P(Q, c12)) / std::max(1.0, Q.norm()));
    repcompat = std::max(repcompat, max_abs(m.rep_V(c12) - m.rep_V(a2) * D));
    Mat rho = m.u_bar(a) * m.u_left(a).inverse();
    Mat Di = D.inverse();
    for (int al = 0; al < nG; ++al) {
      Mat lhs = Di * m.generators_V()[al] * D;
      Mat rhs = zeros(nV, nV);
      for (int be = 0; be < nG; ++be) rhs += rho(be, al) * m.generators_V()[be];
      adj = std::max(adj, max_abs(lhs - rhs));
    }
    if (!m.finite_difference()) {
      fdF = std::max(fdF, rel(m.fd_action_P_jacobian(Q, a), J));
      fdChi = std::max(fdChi, rel(m.fd_gauge_grad(Q), m.gauge_grad(Q)));
      Vec v = s.ball(nP, 1.0);
      fdG = std::max(fdG, rel(m.fd_metric_P_d(Q, v), m.metric_P_d(Q, v)));
      fdK = std::max(fdK, rel(m.fd_killing_P(Q), m.killing_P(Q)));
    }
  }
  double comm = 0, anti = 0, gen = 0;
  const auto& Jb = m.generators_V();
  const auto& c = m.structure_constants();
  for (int al = 0; al < nG; ++al) {
    for (int be = 0; be < nG; ++be) {
      Mat lhs = Jb[al] * Jb[be] - Jb[be] * Jb[al];
      Mat rhs = zeros(nV, nV);
      for (int ga = 0; ga < nG; ++ga) rhs -= c[ga](al, be) * Jb[ga];
      comm = std::max(comm, max_abs(lhs - rhs));
      for (int ga = 0; ga < nG; ++ga) anti = std::max(anti, std::abs(c[ga](al, be) + c[ga](be, al)));
    }
    Vec e = Vec::Zero(nG);
    e(al) = 1e-6;
    gen = std::max(gen, max_abs((m.rep_V(e) - m.rep_V(-e)) / 2e-6 - Jb[al]));
  }

  rep.checks = {
      {"metric_P_positive_definite", pdP, 0.0},
      {"metric_V_positive_definite", pdV, 0.0},
      {"isometry_P", isoP, 1e-9},
      {"isometry_V", isoV, 1e-9},
      {"potential_invariance", pot, 1e-9},
      {"generator_commutators", comm, 1e-10},
      {"structure_constants_antisymmetric", anti, 1e-14},
      {"action_compatibility", compat, 1e-9},
      {"rep_V_compatibility", repcompat, 1e-9},
      {"adjoint_relation", adj, 1e-8},
      {"rep_V_generators", gen, 1e-7},
  };
  if (!m.finite_difference()) {
    rep.checks.push_back({"fd_vs_analytic_action_jacobian", fdF, 1e-6});
    rep.checks.push_back({"fd_vs_analytic_gauge_grad", fdChi, 1e-6});
    rep.checks.push_back({"fd_vs_analytic_metric_d", fdG, 1e-6});
    rep.checks.push_back({"fd_vs_analytic_killing", fdK, 1e-6});
  }

  if (throw_on_error) {
    if (pdP > 0 || pdV > 0)
      fail(ErrorKind::NonPositiveDefiniteMetric, m.name() + ": metric fails Cholesky at a sampled point");
    if (isoP > 1e-9 || isoV > 1e-9) {
      std::ostringstream os;
      os.precision(3);
      os << m.name() << ": isometry residual P=" << isoP << " V=" << isoV;
      fail(ErrorKind::ActionNotIsometric, os.str());
    }
  }
  return rep;
}

}  // namespace fibril
