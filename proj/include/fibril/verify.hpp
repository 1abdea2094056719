#pragma once

#include "fibril/validate.hpp"

#include <cstdint>

namespace fibril {

struct VerifyOptions {
  int n_points = 200;
  int n_oracle = 50;       // points for the finite-difference J oracle
  int n_model_samples = 100;
  std::uint64_t seed = 1;
  // Multiplies every derivative-based tolerance; 0 picks 1 for analytic models and 1e4 for
  // finite-difference ones.
  double tolerance_scale = 0.0;
};

// Full identity suite: model validation, frame algebra, the Killing and horizontal-metric
// relations, pseudoinverse and determinant checks, drift decomposition, j₂ forms, zero sum,
// J against the oracle. Never throws on a failed identity; the report carries the residuals.
// When the gauge surface is not orthogonal to the orbits the σ-identities do not hold and are
// listed in `skipped` instead.
ValidationReport verify_all(const Model& m, const VerifyOptions& opt = {});

}  // namespace fibril
