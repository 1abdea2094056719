#include "fibril/curvature.hpp"

#include "fibril/errors.hpp"

#include <cmath>
#include <limits>

namespace fibril {

namespace {

Vec unit(int n, int k) {
  Vec v = Vec::Zero(n);
  v(k) = 1.0;
  return v;
}

// Γ_G(v, w)^A of metric_P at Q.
Vec levi_civita_P(const Model& m, const Vec& Q, const Mat& G_inv, const std::vector<Mat>& dG, const Vec& v,
                  const Vec& w) {
  const int nP = m.nP();
  Mat dGv = zeros(nP, nP), dGw = zeros(nP, nP);
  for (int k = 0; k < nP; ++k) {
    dGv += v(k) * dG[k];
    dGw += w(k) * dG[k];
  }
  Vec low = dGv * w + dGw * v;
  for (int e = 0; e < nP; ++e) low(e) -= v.dot(dG[e] * w);
  (void)Q;
  return 0.5 * G_inv * low;
}

}  // namespace

Vec orbit_curvature_vector(const Model& m, const GeometricFrame& F) {
  const int nP = F.nP, nV = F.nV, nG = F.nG;
  std::vector<Mat> dG(nP);
  for (int k = 0; k < nP; ++k) dG[k] = m.metric_P_d(F.Q, unit(nP, k));
  Vec wP = Vec::Zero(nP), wV = Vec::Zero(nV);
  const auto& Jb = m.generators_V();
  for (int al = 0; al < nG; ++al) {
    Vec Ka = F.K_P.col(al);
    Mat dK = m.killing_P_d(F.Q, Ka);
    for (int be = 0; be < nG; ++be) {
      double c = F.d_inv(al, be);
      if (c == 0.0) continue;
      Vec Kb = F.K_P.col(be);
      wP += c * (dK.col(be) + levi_civita_P(m, F.Q, F.G_inv, dG, Ka, Kb));
      wV += c * (Jb[be] * (Jb[al] * F.f));
    }
  }
  Vec w(nP + nV);
  w << wP, wV;
  return w;
}

std::vector<Mat> horizontal_christoffel_lower(const Model& m, const GeometricFrame& F, const FrameJet& J) {
  (void)m;
  const int n = F.n;
  std::vector<Mat> D(n);
  for (int b = 0; b < n; ++b) {
    D[b] = zeros(n, n);
    for (int k = 0; k < n; ++k) D[b] += F.Pt(k, b) * J.dGH[k];
  }
  std::vector<Mat> out(n, zeros(n, n));
  for (int d = 0; d < n; ++d)
    for (int b = 0; b < n; ++b)
      for (int mm = 0; mm < n; ++mm)
        out[d](b, mm) = 0.5 * (D[b](mm, d) + D[mm](b, d) - D[d](b, mm));
  return out;
}

void divergence_drifts(const Model& m, const GeometricFrame& F, const FrameJet& J, const Vec* a, Vec& b_div,
                       Vec* b_div_G, Vec* group_drift) {
  const int n = F.n, nG = F.nG;
  Vec divh = Vec::Zero(n), divhG = Vec::Zero(nG);
  for (int k = 0; k < n; ++k) {
    Vec pk = F.Pt.row(k).transpose();
    divh += J.dh[k] * pk;
    if (b_div_G || group_drift) divhG += J.dhG[k].transpose() * pk;
  }
  b_div = 0.5 * divh + 0.25 * F.h * J.dlndH;
  if (!b_div_G && !group_drift) return;
  Vec gen = 0.5 * (divhG + 0.5 * J.hG.transpose() * J.dlndH);
  if (group_drift) *group_drift = gen;
  if (!b_div_G) return;
  Mat vb = m.v_bar(*a);
  *b_div_G = vb * gen;
  Mat MlV = F.Lambda * F.G_inv * F.Lambda.transpose() * vb.transpose();
  for (int be = 0; be < nG; ++be) *b_div_G += 0.5 * m.v_bar_d(*a, unit(nG, be)) * MlV.col(be);
}

DriftBundle drift_bundle(const Model& m, const GeometricFrame& F, const FrameJet& J, const Vec& a) {
  const int nP = F.nP, nV = F.nV, nG = F.nG, n = F.n;
  DriftBundle r;
  r.nP = nP, r.nV = nV, r.nG = nG;

  divergence_drifts(m, F, J, &a, r.b_div, &r.b_div_G, nullptr);

  // ᴴΓ^Ã contracted with h, canonical representative G̃⁻¹.
  Mat hP = F.h * F.Pt.transpose();
  Vec c = Vec::Zero(n);
  Vec t(n);
  for (int k = 0; k < n; ++k) {
    c += J.dGH[k] * hP.col(k);
    t(k) = (F.h * J.dGH[k]).trace();
  }
  c -= 0.5 * F.Pt.transpose() * t;
  Vec Gup = F.Gt_inv * c;
  r.christoffel_term = -0.5 * Gup;
  Vec GupP = Gup.head(nP);

  Vec w = orbit_curvature_vector(m, F);
  Vec wP = w.head(nP), wV = w.tail(nV);
  r.j2.resize(n);
  r.j2 << -0.5 * F.N_PP * F.G_inv * F.N_PP.transpose() * F.G * wP, -0.5 * (F.N_VP * wP + wV);
  r.j2_sigma = 0.25 * F.h * J.dsigma;

  r.mean_curvature.resize(n + nG);
  Mat vb = m.v_bar(a);
  Mat PiPP = F.Pi.topLeftCorner(nP, nP), PiPV = F.Pi.topRightCorner(nP, nV);
  r.mean_curvature << 0.5 * F.N_PP * wP, 0.5 * (F.N_VP * wP + wV), 0.5 * vb * F.Lambda * (PiPP * wP + PiPV * wV);

  // j₁ from derivatives of Ñ.
  Mat hPPt = F.h_PP() * F.P_bot.transpose();
  Vec s = Vec::Zero(n);
  for (int k = 0; k < nP; ++k) s += J.dNt[k].leftCols(nP) * hPPt.col(k);
  r.j1.resize(n);
  r.j1 << 0.5 * s.head(nP) + 0.5 * (GupP - F.N_PP * GupP), 0.5 * s.tail(nV) - 0.5 * F.N_VP * GupP;

  // j₁ as (1 − N) applied to ᴴΓ plus the trace of the surface's second derivatives, using the
  // parametrization Q*(x) = Q₀ + E x + K y(x).
  Mat EP = null_basis(F.chi_grad);
  Mat hE = F.h_PP() * EP;
  Vec t2 = Vec::Zero(nG);
  for (int i = 0; i < EP.cols(); ++i) t2 += m.gauge_grad_d(F.Q, EP.col(i)) * hE.col(i);
  Vec q = -F.K_P * (F.FP_inv * t2);
  Vec g = GupP + q;
  r.j1_alt.resize(n);
  r.j1_alt << 0.5 * (g - F.N_PP * g), -0.5 * F.N_VP * g;

  r.bI = r.b_div - r.j2;

  const Vec& ds = J.dsigma;
  if (J.ddsigma.size() > 0) r.laplace_H = (F.h.array() * J.ddsigma.array()).sum() - Gup.dot(ds);
  else r.laplace_H = std::numeric_limits<double>::quiet_NaN();
  r.grad_sq = ds.dot(F.h * ds);
  r.zero_sum = 2.0 * r.j1.dot(ds);
  r.laplace_tilde = r.laplace_H + r.zero_sum;
  r.J = -0.125 * (r.laplace_H + 0.25 * r.grad_sq);
  r.killing_sigma = F.Kt.transpose() * ds;
  return r;
}

DriftBundle drift_bundle(const Model& m, const AdaptedPoint& p) {
  GeometricFrame F = frame(m, p);
  FrameJet J = frame_jet(m, F, true);
  return drift_bundle(m, F, J, p.a);
}

void drift_divergence_form(const Model& m, const AdaptedPoint& p, Vec& b_div, Vec& b_div_G) {
  GeometricFrame F = frame(m, p);
  FrameJet J = frame_jet(m, F, false);
  divergence_drifts(m, F, J, &p.a, b_div, &b_div_G, nullptr);
}

Vec orbit_mean_curvature(const Model& m, const AdaptedPoint& p) { return drift_bundle(m, p).mean_curvature; }
Vec j2(const Model& m, const AdaptedPoint& p) { return drift_bundle(m, p).j2; }
Vec j2_sigma_form(const Model& m, const AdaptedPoint& p) { return drift_bundle(m, p).j2_sigma; }
Vec j1(const Model& m, const AdaptedPoint& p) { return drift_bundle(m, p).j1; }
Vec horizontal_christoffel_contractions(const Model& m, const AdaptedPoint& p) {
  return drift_bundle(m, p).christoffel_term;
}

JacobianIntegrand jacobian_integrand(const Model& m, const AdaptedPoint& p) {
  DriftBundle b = drift_bundle(m, p);
  return {b.J, b.laplace_H, b.grad_sq};
}

double jacobian_integrand_oracle(const Model& m, const AdaptedPoint& p, double step) {
  if (!m.gauge_linear()) fail(ErrorKind::Config, "J oracle needs a linear gauge");
  const int nP = m.nP(), nV = m.nV();
  Vec X0(nP + nV);
  X0 << p.Qstar, p.ftilde;
  Mat C = zeros(m.nG(), nP + nV);
  C.leftCols(nP) = m.gauge_grad(p.Qstar);
  const Mat E0 = null_basis(C);
  const int dim = static_cast<int>(E0.cols());

  auto at = [&](const Vec& y) {
    Vec X = X0 + E0 * y;
    return frame(m, X.head(nP), X.tail(nV));
  };
  auto sigma = [&](const Vec& y) { return at(y).sigma; };
  const double w5[4] = {1.0 / 12, -8.0 / 12, 8.0 / 12, -1.0 / 12};
  const double o5[4] = {-2, -1, 1, 2};
  auto grad = [&](const Vec& y) {
    Vec gr(dim);
    for (int i = 0; i < dim; ++i) {
      double s = 0;
      for (int k = 0; k < 4; ++k) s += w5[k] * sigma(y + o5[k] * step * unit(dim, i));
      gr(i) = s / step;
    }
    return gr;
  };
  // Flux √g g^{ij} ∂_j σ at y.
  auto flux = [&](const Vec& y) {
    GeometricFrame F = at(y);
    Mat g = E0.transpose() * F.GH * E0;
    Mat gi = spd_inverse(g, "surface metric");
    return Vec(std::sqrt(g.determinant()) * gi * grad(y));
  };
  Vec y0 = Vec::Zero(dim);
  GeometricFrame F0 = at(y0);
  Mat g0 = E0.transpose() * F0.GH * E0;
  Mat gi0 = spd_inverse(g0, "surface metric");
  double div = 0;
  for (int i = 0; i < dim; ++i) {
    double s = 0;
    for (int k = 0; k < 4; ++k) s += w5[k] * flux(y0 + o5[k] * step * unit(dim, i))(i);
    div += s / step;
  }
  double lap = div / std::sqrt(g0.determinant());
  Vec g1 = grad(y0);
  double gsq = g1.dot(gi0 * g1);
  return -0.125 * (lap + 0.25 * gsq);
}

}  // namespace fibril
