#pragma once

#include "fibril/models.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace fibril {

struct Check {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed() const { return residual <= tolerance; }
};

struct ValidationReport {
  std::string model;
  int n_samples = 0;
  std::vector<Check> checks;
  std::vector<std::string> skipped;
  bool all_passed() const;
  const Check* find(const std::string& name) const;
};

// Throws NonPositiveDefiniteMetric / ActionNotIsometric when those checks fail and
// throw_on_error is set; the report is filled either way.
ValidationReport validate_model(const Model& m, int n_samples, std::uint64_t seed,
                                bool throw_on_error = true);

// Random points inside the validation domain: |Q| in [0.5, 2], |f| ≤ 2, |a| ≤ 1.
class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  Vec ball(int n, double radius);
  Vec shell(int n, double r0, double r1);
  Vec ambient_Q(const Model& m) { return shell(m.nP(), 0.5, 2.0); }
  Vec f(const Model& m) { return ball(m.nV(), 2.0); }
  Vec a(const Model& m) { return ball(m.nG(), 1.0); }
  AdaptedPoint adapted(const Model& m);
  std::mt19937_64& engine() { return rng_; }

 private:
  Vec direction(int n);
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
};

}  // namespace fibril
