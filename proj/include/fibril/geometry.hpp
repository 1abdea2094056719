#pragma once

#include "fibril/models.hpp"

namespace fibril {

// Everything at one point (Q*, f̃) of the gauge surface. Ambient index layout is (P, V);
// a tilde means the (P, V) stacked object.
struct GeometricFrame {
  int nP = 0, nV = 0, nG = 0, n = 0, m = 0;  // m = dim of the reduced surface
  Vec Q, f;

  Mat G, G_inv, GV, GV_inv;
  Mat K_P, K_V, Kt;            // n_P×n_G, n_V×n_G, n×n_G
  Mat chi_grad, C;             // n_G×n_P, n_G×n (C = [χ′, 0])
  Mat FP, FP_inv;              // Φ^β_μ (row β), inverse
  Mat Lambda, Lt;              // n_G×n_P, n_G×n
  Mat N_PP, N_VP, Nt;          // N^A_C, N^a_B, full ambient projector Ñ
  Mat P_bot, Pt;               // G-orthogonal projector onto ker χ′, and its ambient extension
  Mat gamma, gamma_inv, gamma_prime, d, d_inv;
  double det_d = 0.0, sigma = 0.0;
  Mat Gt, Gt_inv;              // block-diagonal ambient metric and inverse
  Mat GH;                      // horizontal metric G̃^H, n×n
  Mat Pi;                      // Π̃ = 1 − K̃𝒜
  Mat A_conn;                  // 𝒜 = d⁻¹K̃ᵀG̃, n_G×n
  Mat A_gamma;                 // 𝒜(γ) = γ⁻¹KᵀG, n_G×n_P
  Mat h;                       // Ñ G̃⁻¹ Ñᵀ
  Mat E;                       // orthonormal basis of ker C, n×m
  double H = 0.0;              // det(Eᵀ G̃^H E)
  Mat X, XV, X1;               // Cholesky factors and the reduced noise matrix Ñ·blockdiag(X, XV)

  Mat GH_PP() const { return GH.topLeftCorner(nP, nP); }
  Mat GH_PV() const { return GH.topRightCorner(nP, nV); }
  Mat GH_VV() const { return GH.bottomRightCorner(nV, nV); }
  Mat h_PP() const { return h.topLeftCorner(nP, nP); }
  Mat h_PV() const { return h.topRightCorner(nP, nV); }
  Mat h_VV() const { return h.bottomRightCorner(nV, nV); }
};

constexpr double kMaxConditionFP = 1e12;

// (K_P, K_V) at an arbitrary ambient point.
void killing_fields(const Model& m, const Vec& Q, const Vec& f, Mat& K_P, Mat& K_V);
// Φ = χ′K and its inverse; SingularFaddeevPopov past the condition guard.
void faddeev_popov(const Model& m, const Vec& Q, Mat& FP, Mat& FP_inv);

GeometricFrame frame(const Model& m, const Vec& Qstar, const Vec& ftilde);
inline GeometricFrame frame(const Model& m, const AdaptedPoint& p) { return frame(m, p.Qstar, p.ftilde); }

// Full (n_P+n_V+n_G)² metric in adapted coordinates, block layout (Q*, f̃, a).
Mat adapted_metric(const Model& m, const AdaptedPoint& p);
// Same metric assembled from the mechanical connection and G̃^H.
Mat adapted_metric_connection(const Model& m, const AdaptedPoint& p);
// Pseudoinverse in the Λ-form and in the 𝒜(γ)-form.
Mat adapted_pseudoinverse(const Model& m, const AdaptedPoint& p);
Mat adapted_pseudoinverse_gamma(const Model& m, const AdaptedPoint& p);

struct DetFactorization {
  double det_full = 0.0;   // det of the adapted metric on the surface-adapted basis
  double d_det = 0.0;
  double u_det = 0.0;
  double H = 0.0;
  double product() const { return d_det * u_det * u_det * H; }
};
DetFactorization det_factorization(const Model& m, const AdaptedPoint& p);

struct SigmaDerivatives {
  double sigma = 0.0;
  Vec grad;      // ∂_Ã σ with the P⊥ rule, length n
  Mat hess;      // ∂_Ã ∂_B̃ σ, rule applied twice, not symmetrized
  Vec sigma_A() const { return grad.head(grad.size() - nV); }
  Vec sigma_a() const { return grad.tail(nV); }
  Mat sigma_AB() const { return hess.topLeftCorner(hess.rows() - nV, hess.cols() - nV); }
  Mat sigma_Ab() const { return hess.topRightCorner(hess.rows() - nV, nV); }
  Mat sigma_ab() const { return hess.bottomRightCorner(nV, nV); }
  int nV = 0;
};
SigmaDerivatives sigma_and_derivatives(const Model& m, const AdaptedPoint& p);

}  // namespace fibril
