#pragma once

#include "fibril/geometry.hpp"
#include "fibril/irreps.hpp"
#include "fibril/jets.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fibril {

struct PhysicalScales {
  double mu2kappa = 1.0;
  double mass = 1.0;
  // κ = i continuation is analytical only; simulate() rejects it.
  bool imaginary_kappa = false;
  double noise() const;
};

enum class ProcessKind { Original, Adapted, Reduced, ReducedNoJ2 };
const char* process_name(ProcessKind k);
ProcessKind parse_process(const std::string& s);
// Length of the state vector: n for Original/Reduced*, n + n_G for Adapted.
int state_dim(const Model& m, ProcessKind k);

// Lower-triangular 𝒳 with 𝒳𝒳ᵀ = block. NonPositiveDefinite otherwise.
Mat diffusion_factor(const Mat& inverse_metric_block);

// Coefficients of the reduced processes at one surface point, without μ²κ and μ√κ.
struct ReducedCoefficients {
  Vec b_div;            // drift of the j₂-carrying process
  Vec j2;               // ¼ h ∂σ
  Mat X1;               // n×n_W noise matrix
  double sigma = 0.0;
  Vec dsigma;
  // Only with `jacobian`:
  double J = 0.0;       // −⅛(Δ̃σ + ¼⟨∂σ,∂σ⟩)
  // Only with `group`:
  Mat d_inv;            // n_G×n_G
  Vec group_drift;      // ½ (1/√(dH)) ∂(√(dH) h_G), length n_G
  Mat group_noise;      // Λ̃ Π̃ blockdiag(𝒳, 𝒳_V), n_G×n_W
};
ReducedCoefficients reduced_coefficients(const Model& m, const Vec& Qstar, const Vec& ftilde, bool jacobian,
                                         bool group);

// Euler-Maruyama steps; dW has length n_W = n and variance Δt per component.
Vec step_original(const Model& m, const PhysicalScales& s, const Vec& state, double dt, const Vec& dW);
Vec step_adapted(const Model& m, const PhysicalScales& s, const Vec& state, double dt, const Vec& dW);
Vec step_reduced(const Model& m, const PhysicalScales& s, const Vec& state, double dt, const Vec& dW,
                 bool include_j2);
// Brings a point back to χ = 0 along its orbit (Newton, ≤ 5 iterations) and returns the group shift
// applied. No-op for linear gauges.
Vec reproject(const Model& m, Vec& Q, Vec& f, double tol = 1e-10);

struct SimOptions {
  bool record_states = false;    // keep every state and dW
  bool girsanov = false;         // stochastic and closed log-weights (reduced kinds)
  bool feynman_kac = false;      // ∫V du
  std::vector<const IrrepSpec*> irreps;  // ordered exponentials (reduced kinds)
};

struct Trajectory {
  ProcessKind kind = ProcessKind::Original;
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<Vec> states;
  std::vector<Vec> dW;
  Vec start, final_state;
  double log_girsanov = 0.0;         // stochastic form
  double log_girsanov_closed = 0.0;  // boundary term plus trapezoid of μ²κ J
  double jacobian_integral = 0.0;    // the trapezoid of μ²κ J alone
  double potential_integral = 0.0;   // trapezoid of V
  std::vector<CMat> ordered_exp;     // one per requested irrep
  bool failed = false;
  std::string error;
  int fail_step = -1;
};

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index);

// One path. `start` is in the process's own coordinates. Errors are caught and recorded in
// the trajectory.
Trajectory simulate_path(const Model& m, const PhysicalScales& s, ProcessKind kind, const Vec& start,
                         double t_final, double dt, std::uint64_t seed, const SimOptions& opt = {});

int worker_count(int requested = 0);

// Runs fn(i) for i in [0, n) on the worker pool; results land in index order.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

struct PathFailure {
  int index;
  std::string error;
};
struct Ensemble {
  std::vector<Trajectory> paths;
  std::vector<PathFailure> failures;
  double excluded_fraction() const;
};
// Throws PathFailureThreshold if more than 0.1% of the paths fail.
Ensemble simulate(const Model& m, const PhysicalScales& s, ProcessKind kind, const Vec& start, double t_final,
                  double dt, int n_paths, std::uint64_t seed, const SimOptions& opt = {}, int threads = 0);
void check_failure_fraction(int failed, int total);

}  // namespace fibril
