#pragma once

#include "fibril/geometry.hpp"
#include "fibril/jets.hpp"

#include <vector>

namespace fibril {

// Drift ingredients at one point. Ambient vectors have length n = n_P + n_V, laid out (P, V).
// All drifts carry the ½ of the generator but not the μ²κ factor.
struct DriftBundle {
  int nP = 0, nV = 0, nG = 0;
  Vec b_div;            // divergence-form drift on (Q*, f̃)
  Vec b_div_G;          // group-coordinate drift
  Vec j2;               // orbit mean curvature projected to the surface
  Vec j2_sigma;         // ¼ h ∂σ
  Vec j1;               // N-derivative form
  Vec j1_alt;           // (1 − N)-projected Christoffel form
  Vec christoffel_term; // −½ h ᴴΓ
  Vec bI;               // b_div − j2
  Vec mean_curvature;   // ½ d^{αβ}∇_{K_α}K_β in the adapted basis (Q*, f̃, a)
  double laplace_H = 0.0;      // Δ^H σ
  double laplace_tilde = 0.0;  // Δ^H σ + 2 j1·∂σ
  double grad_sq = 0.0;        // ⟨∂σ, ∂σ⟩
  double J = 0.0;              // −⅛(Δ^H σ + ¼⟨∂σ,∂σ⟩); multiply by μ²κ for physical units
  double zero_sum = 0.0;       // 2 j1·∂σ
  Vec killing_sigma;           // K̃ᵀ ∂σ

  Vec P(const Vec& v) const { return v.head(nP); }
  Vec V(const Vec& v) const { return v.tail(nV); }
};

DriftBundle drift_bundle(const Model& m, const AdaptedPoint& p);
DriftBundle drift_bundle(const Model& m, const GeometricFrame& F, const FrameJet& J, const Vec& a);

// Σ_{αβ} d^{αβ} ∇_{K_α}K_β at the frame point, ambient layout.
Vec orbit_curvature_vector(const Model& m, const GeometricFrame& F);

// b_div always; the group drift v̄·gen + v̄-derivative term when b_div_G is set (needs a); the bare
// generator part gen = ½(1/√(dH))∂(√(dH) h_G) when group_drift is set.
void divergence_drifts(const Model& m, const GeometricFrame& F, const FrameJet& J, const Vec* a, Vec& b_div,
                       Vec* b_div_G, Vec* group_drift);

void drift_divergence_form(const Model& m, const AdaptedPoint& p, Vec& b_div, Vec& b_div_G);
Vec orbit_mean_curvature(const Model& m, const AdaptedPoint& p);
Vec j2(const Model& m, const AdaptedPoint& p);
Vec j2_sigma_form(const Model& m, const AdaptedPoint& p);
Vec j1(const Model& m, const AdaptedPoint& p);
Vec horizontal_christoffel_contractions(const Model& m, const AdaptedPoint& p);
// Lower-index ᴴΓ_{B̃M̃D̃} stored as out[D](B, M).
std::vector<Mat> horizontal_christoffel_lower(const Model& m, const GeometricFrame& F, const FrameJet& J);

struct JacobianIntegrand {
  double J = 0.0;
  double laplace_H = 0.0;
  double grad_sq = 0.0;
  // J is given per unit μ²κ.
  static constexpr const char* scale = "mu2kappa";
};
JacobianIntegrand jacobian_integrand(const Model& m, const AdaptedPoint& p);

// Independent check of J: Laplace-Beltrami of σ on the surface in flat coordinates y along
// an orthonormal basis of ker χ′, built from σ and G̃^H evaluated at stencil points only.
// Linear gauges only.
double jacobian_integrand_oracle(const Model& m, const AdaptedPoint& p, double step = 2e-3);

}  // namespace fibril
