#pragma once

#include "fibril/models.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fibril {

// An irreducible unitary representation in complex form. Generators are ∂D/∂a^β at e and
// D(a₁)D(a₂) = D(compose(a₁, a₂)).
struct IrrepSpec {
  std::string label = "trivial";
  int dim = 1;
  std::vector<CMat> generators;
  std::function<CMat(const Vec&)> evaluate;
  bool trivial() const;
};

IrrepSpec trivial_irrep(int nG);
IrrepSpec so2_charge(int k);
IrrepSpec su2_spin_half();
// "trivial", "so2:K" (any integer K), "su2:1/2".
IrrepSpec parse_irrep(const std::string& text, const Model& m);

struct HaarNode {
  Vec a;
  double w;
};
// Normalized product quadrature on the model's group: SO(2) 256-node trapezoid, SU(2) a
// 32×16×32 rule (trapezoid in the two phases, Gauss-Legendre in cos of the polar angle).
const std::vector<HaarNode>& haar_nodes(const Model& m);
cplx haar_average(const Model& m, const std::function<cplx(const Vec&)>& f);
CMat haar_average_matrix(const Model& m, int rows, int cols, const std::function<CMat(const Vec&)>& f);

}  // namespace fibril
