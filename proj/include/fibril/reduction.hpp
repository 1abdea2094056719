#pragma once

#include "fibril/irreps.hpp"
#include "fibril/sde.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fibril {

// Pathwise weights recomputed from a recorded trajectory (record_states = true). They match
// the accumulators simulate_path fills in on the fly.
double girsanov_log_weight_stochastic(const Trajectory& T, const Model& m, const PhysicalScales& s);
double girsanov_log_weight_closed(const Trajectory& T, const Model& m, const PhysicalScales& s);
CMat ordered_exponential(const Trajectory& T, const Model& m, const PhysicalScales& s, const IrrepSpec& irrep);
double feynman_kac_weight(const Trajectory& T, const Model& m, const PhysicalScales& s);
// exp(∫V du / (μ²κ m)) from an already accumulated integral.
double feynman_kac_factor(double potential_integral, const PhysicalScales& s);

struct EstimatorResult {
  cplx value = 0.0;
  double stderr_ = 0.0;
  double n_effective = 0.0;
  long n_paths = 0;
  double excluded_fraction = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;
};

// Mean and standard error over per-path contributions; failed paths are already dropped.
// n_effective = (Σ|c|)² / Σ|c|².
EstimatorResult estimate_mean(const std::vector<cplx>& contributions, long n_total, std::uint64_t seed);

// Silverman factor (4/(d+2))^{1/(d+4)} n^{−1/(d+4)}.
double silverman_factor(int dim, long n);
// Silverman factor times the geometric mean over coordinates of min(sd, IQR/1.349).
double scalar_bandwidth(const std::vector<Vec>& samples, double scale = 1.0);
// (2πh²)^{−k/2} exp(−ΔXᵀ g ΔX / 2h²), k = `dim`. A density for the Riemannian volume of g.
double gaussian_kernel(const Vec& dx, const Mat& g, double h, int dim);

struct GreensOptions {
  PhysicalScales scales;
  double t = 0.2;
  double dt = 1e-3;
  long n_paths = 200000;
  std::uint64_t seed = 1;
  double bandwidth = 0.0;       // 0: Silverman rule from the reduced-side endpoints
  double bandwidth_scale = 1.0;
  bool include_d_factors = true;  // false is the negative control
  int threads = 0;
  double min_effective = 100.0;
};

struct GreensResult {
  EstimatorResult lhs, rhs;
  double z_score = 0.0;
  // Same paths with the d factors left out (negative control).
  EstimatorResult lhs_without_d;
  double z_without_d = 0.0;
  double bandwidth = 0.0;
};

// d_b^{−1/4} d_a^{−1/4} G_Σ̃ against Vol(𝒢)·∫ G_𝒫 over the target orbit. Start and end are
// ambient points (p, v).
GreensResult greens_relation_zero_momentum(const Model& m, const Vec& pa, const Vec& va, const Vec& pb,
                                           const Vec& vb, const GreensOptions& opt);

struct MomentumResult {
  CMat lhs, rhs, lhs_err, rhs_err;
  double max_z = 0.0;
  double bandwidth = 0.0;
  double n_effective_lhs = 0.0, n_effective_rhs = 0.0;
  double excluded_fraction = 0.0;
};
MomentumResult greens_relation_momentum(const Model& m, const IrrepSpec& irrep, const Vec& pa, const Vec& va,
                                        const Vec& pb, const Vec& vb, const GreensOptions& opt);
// Several irreps evaluated on one shared set of reduced and original paths.
std::vector<MomentumResult> greens_relation_momentum(const Model& m, const std::vector<IrrepSpec>& irreps,
                                                     const Vec& pa, const Vec& va, const Vec& pb, const Vec& vb,
                                                     const GreensOptions& opt);

// Kernel density of the original process at a fixed ambient point, no weights. Used to
// calibrate the bandwidth machinery against the flat heat kernel.
EstimatorResult original_density_at(const Model& m, const Vec& start, const Vec& target, double h,
                                    const GreensOptions& opt);

}  // namespace fibril
