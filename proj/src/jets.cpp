#include "fibril/jets.hpp"

namespace fibril {

void frame_jet(const Model& m, const GeometricFrame& F, bool hessian, FrameJet& J) {
  const int nP = F.nP, nV = F.nV, nG = F.nG, n = F.n;
  J.n = n;
  J.dh.resize(n);
  J.dGH.resize(n);
  J.dNt.resize(n);
  J.dhG.resize(n);
  J.dPt.resize(n);
  J.grad_sigma.resize(n);
  J.grad_lnH.resize(n);

  const Mat B = F.Gt * F.Kt;
  const Mat S = F.C * F.Gt_inv * F.C.transpose();
  const Mat S_inv = S.inverse();
  const Mat Cp = right_pinv(F.C);
  const Mat M = F.E.transpose() * F.GH * F.E;
  const Mat M_inv = M.inverse();
  J.hG = F.Nt * F.Gt_inv * F.Lt.transpose();

  const Mat GtiNt = F.Gt_inv * F.Nt.transpose();
  const Mat GtiLt = F.Gt_inv * F.Lt.transpose();
  const Mat dinvBt = F.d_inv * B.transpose();
  const Mat GtiCt = F.Gt_inv * F.C.transpose();
  const Mat SiC = S_inv * F.C;
  const Mat GHE = F.GH * F.E;
  const Mat MiEt = M_inv * F.E.transpose();

  std::vector<Mat> dKt(n), dGt(n);
  for (int k = 0; k < n; ++k) {
    dKt[k] = zeros(n, nG);
    dGt[k] = zeros(n, n);
    Mat dLt = zeros(nG, n);
    const bool on_P = k < nP;
    Mat dGinv, dC;
    if (on_P) {
      Vec v = Vec::Zero(nP);
      v(k) = 1.0;
      Mat dG = m.metric_P_d(F.Q, v);
      Mat dK = m.killing_P_d(F.Q, v);
      Mat dchi = m.gauge_grad_d(F.Q, v);
      dGinv = -F.G_inv * dG * F.G_inv;
      dKt[k].topRows(nP) = dK;
      dGt[k].topLeftCorner(nP, nP) = dG;
      dC = zeros(nG, n);
      dC.leftCols(nP) = dchi;
      Mat dFP = dchi * F.K_P + F.chi_grad * dK;
      Mat dL = -F.FP_inv * dFP * F.Lambda + F.FP_inv * dchi;
      dLt.leftCols(nP) = dL;
    } else {
      Vec v = Vec::Zero(nV);
      v(k - nP) = 1.0;
      dKt[k].bottomRows(nV) = m.killing_V(v);
    }
    J.dNt[k] = -dKt[k] * F.Lt - F.Kt * dLt;
    Mat X = J.dNt[k] * GtiNt;
    J.dh[k] = X + X.transpose();
    J.dhG[k] = J.dNt[k] * GtiLt + F.Nt * F.Gt_inv * dLt.transpose();
    if (on_P) {
      Mat NP = F.Nt.leftCols(nP);
      J.dh[k] += NP * dGinv * NP.transpose();
      J.dhG[k] += NP * dGinv * F.Lambda.transpose();
    }

    Mat BdK = B.transpose() * dKt[k];
    Mat dd = BdK + BdK.transpose();
    if (on_P) dd += F.Kt.transpose() * dGt[k] * F.Kt;
    J.grad_sigma(k) = (F.d_inv * dd).trace();
    Mat dB = F.Gt * dKt[k];
    if (on_P) dB += dGt[k] * F.Kt;
    Mat Y = dB * dinvBt;
    J.dGH[k] = -Y - Y.transpose() + dinvBt.transpose() * dd * dinvBt;
    if (on_P) J.dGH[k] += dGt[k];

    double tr = (MiEt * J.dGH[k] * F.E).trace();
    if (on_P) {
      if (hessian) {
        Mat dGt_inv = block_diag(dGinv, zeros(nV, nV));
        Mat dS = dC * GtiCt + F.C * dGt_inv * F.C.transpose() + GtiCt.transpose() * dC.transpose();
        Mat dS_inv = -S_inv * dS * S_inv;
        J.dPt[k] = -(dGt_inv * F.C.transpose() * SiC + F.Gt_inv * dC.transpose() * SiC +
                     GtiCt * dS_inv * F.C + GtiCt * S_inv * dC);
      }
      Mat dE = -Cp * dC * F.E;
      tr += 2.0 * (M_inv * GHE.transpose() * dE).trace();
    } else if (hessian) {
      J.dPt[k] = zeros(n, n);
    }
    J.grad_lnH(k) = tr;
  }

  J.dsigma = F.Pt.transpose() * J.grad_sigma;
  J.dlndH = F.Pt.transpose() * (J.grad_sigma + J.grad_lnH);

  if (!hessian) return;
  J.hess_sigma.resize(n, n);
  // ∂_k∂_l d = U + Uᵀ + (second-derivative terms), U built from first derivatives only.
  std::vector<Mat> Ak(n), Ck(n), Dk(n);
  for (int k = 0; k < n; ++k) {
    Ak[k] = dKt[k].transpose() * F.Gt;
    Ck[k] = dGt[k] * F.Kt;
    Mat BdK = B.transpose() * dKt[k];
    Dk[k] = F.d_inv * (BdK + BdK.transpose() + F.Kt.transpose() * Ck[k]);
  }
  const Mat dinvBt2 = F.d_inv * B.transpose();
  const Mat KdK = F.Kt * F.d_inv;
  for (int k = 0; k < n; ++k) {
    for (int l = k; l < n; ++l) {
      Mat U = Ak[k] * dKt[l] + dKt[k].transpose() * Ck[l] + dKt[l].transpose() * Ck[k];
      double v2 = 2.0 * (F.d_inv * U).trace() - (Dk[k].array() * Dk[l].transpose().array()).sum();
      if (k < nP && l < nP) {
        Vec u = Vec::Zero(nP), v = Vec::Zero(nP);
        u(k) = 1.0;
        v(l) = 1.0;
        Mat d2K = m.killing_P_dd(F.Q, u, v);
        Mat d2G = m.metric_P_dd(F.Q, u, v);
        v2 += 2.0 * (dinvBt2.leftCols(nP) * d2K).trace();
        v2 += (F.K_P.transpose() * d2G * KdK.topRows(nP)).trace();
      }
      J.hess_sigma(k, l) = v2;
      J.hess_sigma(l, k) = v2;
    }
  }
  Mat Z(n, n);
  for (int l = 0; l < n; ++l) Z.row(l) = (J.dPt[l].transpose() * J.grad_sigma).transpose();
  J.ddsigma = F.Pt.transpose() * J.hess_sigma * F.Pt + F.Pt.transpose() * Z;
}

}  // namespace fibril
