#pragma once

#include "fibril/models.hpp"
#include "fibril/reduction.hpp"
#include "fibril/sde.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace fibril {

// Everything a subcommand needs. Only `model` has no default.
struct RunConfig {
  std::string model;
  nlohmann::json model_params = nlohmann::json::object();  // ModelOptions keys
  double mu2kappa = 1.0;
  double mass = 1.0;
  std::string process = "reduced";
  double t = 0.2;
  double dt = 1e-3;
  long n_paths = 1000;
  std::uint64_t seed = 1;
  int threads = 0;
  int dump_every = 0;
  // reduce
  std::string relation = "zero";
  std::string irrep = "trivial";
  std::vector<double> from_p, from_v, to_p, to_v;
  double bandwidth = 0.0;
  double bandwidth_scale = 1.0;
  bool include_d_factors = true;
  double min_effective = 100.0;
  // frame, simulate start: adapted point; empty vectors pick model defaults
  std::vector<double> qstar, ftilde, a;
  // verify
  int n_points = 200;
  int n_oracle = 50;
  double tolerance_scale = 0.0;
  // jacobian grid "q0:q1:nq,f0:f1:nf" along the first free Q* and f̃ directions
  std::string grid = "0.5:2:16,-1:1:16";
  std::string out;
};

nlohmann::json to_json(const RunConfig& c);
// Unknown keys are a Config error; missing keys keep their defaults.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

// Sorted-key compact JSON with shortest round-trip doubles.
std::string canonical(const RunConfig& c);
// 16 hex digits of FNV-1a 64 over the canonical text.
std::string config_digest(const RunConfig& c);
std::uint64_t fnv1a64(const std::string& s);

ModelPtr model_of(const RunConfig& c);
PhysicalScales scales_of(const RunConfig& c);
GreensOptions greens_options_of(const RunConfig& c);

struct Manifest {
  std::string subcommand;
  RunConfig config;
  std::vector<std::uint64_t> seeds;
  double wall_seconds = 0.0;
  nlohmann::json residuals = nlohmann::json::object();
  std::vector<std::string> outputs;
};
nlohmann::json manifest_json(const Manifest& m);
std::string write_manifest(const Manifest& m, const std::string& path);

// Shortest decimal that parses back to the same double.
std::string format_double(double x);

}  // namespace fibril
