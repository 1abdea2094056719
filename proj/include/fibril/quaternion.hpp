#pragma once

#include "fibril/linalg.hpp"

namespace fibril::quat {

// Quaternions are 4-vectors (w, x, y, z) = w + x i + y j + z k.
Vec mul(const Vec& p, const Vec& q);
Vec conj(const Vec& q);
// exp(a₁ i + a₂ j + a₃ k).
Vec exp3(const Vec& a);
// Inverse of exp3 on unit quaternions, |a| ≤ π.
Vec log3(const Vec& q);
// Matrix R(g) with Q·g = R(g) Q.
Mat right_mul_matrix(const Vec& g);
// [a]ₓ with [a]ₓ v = a × v.
Mat hat(const Vec& a);

}  // namespace fibril::quat
