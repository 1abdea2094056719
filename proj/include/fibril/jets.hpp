#pragma once

#include "fibril/geometry.hpp"

#include <vector>

namespace fibril {

// First derivatives of frame quantities along each ambient coordinate direction k
// (unprojected), plus the P⊥-rule derivatives of σ and ln(dH).
struct FrameJet {
  int n = 0;
  std::vector<Mat> dh, dGH, dNt, dhG, dPt;
  Vec grad_sigma;      // ∂_k σ
  Vec grad_lnH;        // ∂_k ln H
  Mat hess_sigma;      // ∂_k ∂_l σ (only with hessian)
  Vec dsigma;          // P̃⊥ᵀ ∇σ
  Vec dlndH;           // P̃⊥ᵀ ∇ln(dH)
  Mat ddsigma;         // rule applied twice (only with hessian)
  Mat hG;              // Ñ G̃⁻¹ Λ̃ᵀ, n×n_G
};

void frame_jet(const Model& m, const GeometricFrame& F, bool hessian, FrameJet& out);
inline FrameJet frame_jet(const Model& m, const GeometricFrame& F, bool hessian) {
  FrameJet j;
  frame_jet(m, F, hessian, j);
  return j;
}

}  // namespace fibril
