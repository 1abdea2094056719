#include "fibril/errors.hpp"
#include "fibril/reduction.hpp"

#include <cmath>

namespace fibril {

namespace {

void require_recorded(const Trajectory& T, bool increments) {
  if (T.states.empty()) fail(ErrorKind::MissingIncrements, "trajectory has no recorded states");
  if (increments && T.dW.size() + 1 != T.states.size())
    fail(ErrorKind::MissingIncrements, "trajectory lacks Wiener increments");
}

void require_reduced(const Trajectory& T) {
  if (T.kind != ProcessKind::Reduced && T.kind != ProcessKind::ReducedNoJ2)
    fail(ErrorKind::Config, "weight needs a reduced-process trajectory");
}

double step_of(const Trajectory& T, std::size_t k) { return T.times[k + 1] - T.times[k]; }

}  // namespace

double girsanov_log_weight_stochastic(const Trajectory& T, const Model& m, const PhysicalScales& s) {
  require_recorded(T, true);
  require_reduced(T);
  const int nP = m.nP(), nV = m.nV();
  double w = 0.0;
  for (std::size_t k = 0; k < T.dW.size(); ++k) {
    const Vec& x = T.states[k];
    ReducedCoefficients c = reduced_coefficients(m, x.head(nP), x.tail(nV), false, false);
    Vec phi = 0.25 * c.X1.transpose() * c.dsigma;
    w += s.noise() * phi.dot(T.dW[k]) - 0.5 * s.mu2kappa * phi.squaredNorm() * step_of(T, k);
  }
  return w;
}

double girsanov_log_weight_closed(const Trajectory& T, const Model& m, const PhysicalScales& s) {
  require_recorded(T, false);
  require_reduced(T);
  const int nP = m.nP(), nV = m.nV();
  const std::size_t N = T.states.size();
  if (N == 1) return 0.0;
  double integral = 0.0, J_prev = 0.0, sigma0 = 0.0, sigma1 = 0.0;
  for (std::size_t k = 0; k < N; ++k) {
    const Vec& x = T.states[k];
    ReducedCoefficients c = reduced_coefficients(m, x.head(nP), x.tail(nV), true, false);
    if (k == 0) sigma0 = c.sigma;
    else integral += 0.5 * (J_prev + c.J) * step_of(T, k - 1);
    J_prev = c.J;
    sigma1 = c.sigma;
  }
  return 0.25 * (sigma1 - sigma0) + s.mu2kappa * integral;
}

CMat ordered_exponential(const Trajectory& T, const Model& m, const PhysicalScales& s, const IrrepSpec& irrep) {
  const int D = irrep.dim, nG = m.nG(), nP = m.nP(), nV = m.nV();
  CMat out = CMat::Identity(D, D);
  if (irrep.trivial()) return out;
  require_recorded(T, true);
  require_reduced(T);
  for (std::size_t k = 0; k < T.dW.size(); ++k) {
    const Vec& x = T.states[k];
    ReducedCoefficients c = reduced_coefficients(m, x.head(nP), x.tail(nV), false, true);
    CMat A = CMat::Zero(D, D), B = CMat::Zero(D, D);
    Vec eta = c.group_noise * T.dW[k];
    for (int al = 0; al < nG; ++al) {
      A += c.group_drift(al) * irrep.generators[al];
      for (int nu = 0; nu < nG; ++nu) A += 0.5 * c.d_inv(al, nu) * irrep.generators[al] * irrep.generators[nu];
      B += eta(al) * irrep.generators[al];
    }
    // Later times multiply from the left.
    out = (CMat::Identity(D, D) + s.mu2kappa * step_of(T, k) * A + s.noise() * B) * out;
  }
  return out;
}

double feynman_kac_factor(double potential_integral, const PhysicalScales& s) {
  return std::exp(potential_integral / (s.mu2kappa * s.mass));
}

double feynman_kac_weight(const Trajectory& T, const Model& m, const PhysicalScales& s) {
  require_recorded(T, false);
  const int nP = m.nP(), nV = m.nV();
  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < T.states.size(); ++k) {
    const Vec& a = T.states[k];
    const Vec& b = T.states[k + 1];
    integral += 0.5 * (m.potential(a.head(nP), a.segment(nP, nV)) + m.potential(b.head(nP), b.segment(nP, nV))) *
                step_of(T, k);
  }
  return feynman_kac_factor(integral, s);
}

}  // namespace fibril
