#include "fibril/geometry.hpp"

#include "fibril/errors.hpp"
#include "fibril/jets.hpp"

#include <cmath>

namespace fibril {

void killing_fields(const Model& m, const Vec& Q, const Vec& f, Mat& K_P, Mat& K_V) {
  K_P = m.killing_P(Q);
  K_V = m.killing_V(f);
}

void faddeev_popov(const Model& m, const Vec& Q, Mat& FP, Mat& FP_inv) {
  FP = m.gauge_grad(Q) * m.killing_P(Q);
  FP_inv = guarded_inverse(FP, kMaxConditionFP, "Faddeev-Popov matrix is singular");
}

GeometricFrame frame(const Model& m, const Vec& Qstar, const Vec& ftilde) {
  GeometricFrame F;
  const int nP = m.nP(), nV = m.nV(), nG = m.nG(), n = nP + nV;
  F.nP = nP, F.nV = nV, F.nG = nG, F.n = n, F.m = n - nG;
  F.Q = Qstar, F.f = ftilde;

  F.G = m.metric_P(Qstar);
  F.G_inv = spd_inverse(F.G, "metric_P");
  F.GV = m.metric_V();
  F.GV_inv = spd_inverse(F.GV, "metric_V");
  F.Gt = block_diag(F.G, F.GV);
  F.Gt_inv = block_diag(F.G_inv, F.GV_inv);

  killing_fields(m, Qstar, ftilde, F.K_P, F.K_V);
  F.Kt.resize(n, nG);
  F.Kt << F.K_P, F.K_V;
  F.chi_grad = m.gauge_grad(Qstar);
  F.C = zeros(nG, n);
  F.C.leftCols(nP) = F.chi_grad;

  F.FP = F.chi_grad * F.K_P;
  F.FP_inv = guarded_inverse(F.FP, kMaxConditionFP, "Faddeev-Popov matrix is singular");
  F.Lambda = F.FP_inv * F.chi_grad;
  F.Lt = zeros(nG, n);
  F.Lt.leftCols(nP) = F.Lambda;
  F.N_PP = eye(nP) - F.K_P * F.Lambda;
  F.N_VP = -F.K_V * F.Lambda;
  F.Nt = eye(n) - F.Kt * F.Lt;

  Mat S = F.chi_grad * F.G_inv * F.chi_grad.transpose();
  F.P_bot = eye(nP) - F.G_inv * F.chi_grad.transpose() * spd_inverse(S, "gauge gradient rank") * F.chi_grad;
  F.Pt = block_diag(F.P_bot, eye(nV));

  F.gamma = F.K_P.transpose() * F.G * F.K_P;
  F.gamma_prime = F.K_V.transpose() * F.GV * F.K_V;
  F.d = F.gamma + F.gamma_prime;
  Eigen::LLT<Mat> lld(F.d);
  if (lld.info() != Eigen::Success) fail(ErrorKind::NonPositiveOrbitMetric, "orbit metric d fails Cholesky");
  F.d_inv = lld.solve(eye(nG));
  Mat L = lld.matrixL();
  double logdet = 0;
  for (int i = 0; i < nG; ++i) logdet += 2.0 * std::log(L(i, i));
  F.sigma = logdet;
  F.det_d = std::exp(logdet);
  F.gamma_inv = spd_inverse(F.gamma, "gamma");

  Mat B = F.Gt * F.Kt;
  F.A_conn = F.d_inv * B.transpose();
  F.A_gamma = F.gamma_inv * F.K_P.transpose() * F.G;
  F.GH = F.Gt - B * F.d_inv * B.transpose();
  F.Pi = eye(n) - F.Kt * F.A_conn;
  F.h = F.Nt * F.Gt_inv * F.Nt.transpose();

  F.E = null_basis(F.C);
  Mat M = F.E.transpose() * F.GH * F.E;
  F.H = M.determinant();

  F.X = cholesky_lower(F.G_inv, "inverse metric_P");
  F.XV = cholesky_lower(F.GV_inv, "inverse metric_V");
  F.X1 = F.Nt * block_diag(F.X, F.XV);
  return F;
}

Mat adapted_metric(const Model& m, const AdaptedPoint& p) {
  GeometricFrame F = frame(m, p);
  const int nP = F.nP, nV = F.nV, nG = F.nG;
  Mat u = m.u_bar(p.a);
  Mat g = zeros(nP + nV + nG, nP + nV + nG);
  g.topLeftCorner(nP, nP) = F.P_bot.transpose() * F.G * F.P_bot;
  g.block(nP, nP, nV, nV) = F.GV;
  g.block(0, nP + nV, nP, nG) = F.P_bot.transpose() * F.G * F.K_P * u;
  g.block(nP, nP + nV, nV, nG) = F.GV * F.K_V * u;
  g.block(nP + nV, 0, nG, nP) = g.block(0, nP + nV, nP, nG).transpose();
  g.block(nP + nV, nP, nG, nV) = g.block(nP, nP + nV, nV, nG).transpose();
  g.bottomRightCorner(nG, nG) = u.transpose() * F.d * u;
  return g;
}

Mat adapted_metric_connection(const Model& m, const AdaptedPoint& p) {
  GeometricFrame F = frame(m, p);
  const int nP = F.nP, nV = F.nV, nG = F.nG;
  Mat u = m.u_bar(p.a);
  Mat AP = F.A_conn.leftCols(nP), AV = F.A_conn.rightCols(nV);
  Mat g = zeros(nP + nV + nG, nP + nV + nG);
  g.topLeftCorner(nP, nP) = F.P_bot.transpose() * (F.GH_PP() + AP.transpose() * F.d * AP) * F.P_bot;
  g.block(nP, nP, nV, nV) = F.GV;
  g.block(0, nP + nV, nP, nG) = F.P_bot.transpose() * AP.transpose() * F.d * u;
  g.block(nP, nP + nV, nV, nG) = AV.transpose() * F.d * u;
  g.block(nP + nV, 0, nG, nP) = g.block(0, nP + nV, nP, nG).transpose();
  g.block(nP + nV, nP, nG, nV) = g.block(nP, nP + nV, nV, nG).transpose();
  g.bottomRightCorner(nG, nG) = u.transpose() * F.d * u;
  return g;
}

Mat adapted_pseudoinverse(const Model& m, const AdaptedPoint& p) {
  GeometricFrame F = frame(m, p);
  const int nP = F.nP, nV = F.nV, nG = F.nG;
  Mat v = m.v_bar(p.a);
  const Mat& N = F.N_PP;
  Mat GL = F.G_inv * F.Lambda.transpose();          // G^{EF} Λ^ν_F
  Mat LGL = F.Lambda * GL;                           // G^{EF} Λ^ν_E Λ^μ_F
  Mat g = zeros(nP + nV + nG, nP + nV + nG);
  g.topLeftCorner(nP, nP) = N * F.G_inv * N.transpose();
  g.block(0, nP, nP, nV) = -N * GL * F.K_V.transpose();
  g.block(0, nP + nV, nP, nG) = N * GL * v.transpose();
  g.block(nP, 0, nV, nP) = g.block(0, nP, nP, nV).transpose();
  g.block(nP, nP, nV, nV) = F.GV_inv + F.K_V * LGL * F.K_V.transpose();
  g.block(nP, nP + nV, nV, nG) = -F.K_V * LGL * v.transpose();
  g.block(nP + nV, 0, nG, nP) = g.block(0, nP + nV, nP, nG).transpose();
  g.block(nP + nV, nP, nG, nV) = g.block(nP, nP + nV, nV, nG).transpose();
  g.bottomRightCorner(nG, nG) = v * LGL * v.transpose();
  return g;
}

Mat adapted_pseudoinverse_gamma(const Model& m, const AdaptedPoint& p) {
  GeometricFrame F = frame(m, p);
  const int nP = F.nP, nV = F.nV, nG = F.nG;
  Mat v = m.v_bar(p.a);
  const Mat& N = F.N_PP;
  Mat hPP = N * F.G_inv * N.transpose();
  Mat GL = F.G_inv * F.Lambda.transpose();
  Mat LGL = F.Lambda * GL;
  Mat Ag = F.A_gamma.transpose();                    // n_P×n_G, 𝒜(γ)^μ_C as column μ
  Mat g = zeros(nP + nV + nG, nP + nV + nG);
  g.topLeftCorner(nP, nP) = hPP;
  g.block(0, nP, nP, nV) = hPP * Ag * F.K_V.transpose();
  g.block(0, nP + nV, nP, nG) = -hPP * Ag * v.transpose();
  g.block(nP, 0, nV, nP) = g.block(0, nP, nP, nV).transpose();
  g.block(nP, nP, nV, nV) = F.N_VP * F.G_inv * F.N_VP.transpose() + F.GV_inv;
  g.block(nP, nP + nV, nV, nG) = -F.K_V * LGL * v.transpose();
  g.block(nP + nV, 0, nG, nP) = g.block(0, nP + nV, nP, nG).transpose();
  g.block(nP + nV, nP, nG, nV) = g.block(nP, nP + nV, nV, nG).transpose();
  g.bottomRightCorner(nG, nG) = v * LGL * v.transpose();
  return g;
}

DetFactorization det_factorization(const Model& m, const AdaptedPoint& p) {
  GeometricFrame F = frame(m, p);
  const int nP = F.nP, nV = F.nV, nG = F.nG;
  DetFactorization r;
  // The adapted metric is evaluated at a = e unless ū is global (abelian chart).
  bool abelian = true;
  for (const auto& c : m.structure_constants())
    if (max_abs(c) != 0.0) abelian = false;
  AdaptedPoint q = p;
  if (!abelian) q.a = Vec::Zero(nG);
  Mat g = adapted_metric(m, q);
  Mat EP = null_basis(F.chi_grad);
  const int k = static_cast<int>(EP.cols());
  Mat B = zeros(nP + nV + nG, k + nV + nG);
  B.topLeftCorner(nP, k) = EP;
  B.bottomRightCorner(nV + nG, nV + nG) = eye(nV + nG);
  r.det_full = (B.transpose() * g * B).determinant();
  r.d_det = F.det_d;
  r.u_det = m.u_bar(q.a).determinant();
  Mat Hb = zeros(nP + nV, nP + nV);
  Hb.topLeftCorner(nP, nP) = F.P_bot.transpose() * F.GH_PP() * F.P_bot;
  Hb.topRightCorner(nP, nV) = F.P_bot.transpose() * F.GH_PV();
  Hb.bottomLeftCorner(nV, nP) = Hb.topRightCorner(nP, nV).transpose();
  Hb.bottomRightCorner(nV, nV) = F.GH_VV();
  Mat Bh = zeros(nP + nV, k + nV);
  Bh.topLeftCorner(nP, k) = EP;
  Bh.bottomRightCorner(nV, nV) = eye(nV);
  r.H = (Bh.transpose() * Hb * Bh).determinant();
  return r;
}

SigmaDerivatives sigma_and_derivatives(const Model& m, const AdaptedPoint& p) {
  GeometricFrame F = frame(m, p);
  FrameJet J = frame_jet(m, F, true);
  SigmaDerivatives s;
  s.nV = F.nV;
  s.sigma = F.sigma;
  s.grad = J.dsigma;
  s.hess = J.ddsigma;
  return s;
}

}  // namespace fibril
