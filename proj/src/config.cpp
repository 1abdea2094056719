#include "fibril/config.hpp"

#include "fibril/errors.hpp"

#include <charconv>
#include <fstream>
#include <cstdio>

namespace fibril {

using nlohmann::json;

json to_json(const RunConfig& c) {
  return json{{"model", c.model},
              {"model_params", c.model_params},
              {"mu2kappa", c.mu2kappa},
              {"mass", c.mass},
              {"process", c.process},
              {"t", c.t},
              {"dt", c.dt},
              {"n_paths", c.n_paths},
              {"seed", c.seed},
              {"threads", c.threads},
              {"dump_every", c.dump_every},
              {"relation", c.relation},
              {"irrep", c.irrep},
              {"from_p", c.from_p},
              {"from_v", c.from_v},
              {"to_p", c.to_p},
              {"to_v", c.to_v},
              {"bandwidth", c.bandwidth},
              {"bandwidth_scale", c.bandwidth_scale},
              {"include_d_factors", c.include_d_factors},
              {"min_effective", c.min_effective},
              {"qstar", c.qstar},
              {"ftilde", c.ftilde},
              {"a", c.a},
              {"n_points", c.n_points},
              {"n_oracle", c.n_oracle},
              {"tolerance_scale", c.tolerance_scale},
              {"grid", c.grid},
              {"out", c.out}};
}

RunConfig config_from_json(const json& j) {
  if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
  RunConfig c;
  const json known = to_json(c);
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.contains(it.key())) fail(ErrorKind::Config, "unknown config key '" + it.key() + "'");
  try {
    auto get = [&](const char* k, auto& field) {
      if (j.contains(k)) j.at(k).get_to(field);
    };
    get("model", c.model);
    if (j.contains("model_params")) c.model_params = j.at("model_params");
    get("mu2kappa", c.mu2kappa);
    get("mass", c.mass);
    get("process", c.process);
    get("t", c.t);
    get("dt", c.dt);
    get("n_paths", c.n_paths);
    get("seed", c.seed);
    get("threads", c.threads);
    get("dump_every", c.dump_every);
    get("relation", c.relation);
    get("irrep", c.irrep);
    get("from_p", c.from_p);
    get("from_v", c.from_v);
    get("to_p", c.to_p);
    get("to_v", c.to_v);
    get("bandwidth", c.bandwidth);
    get("bandwidth_scale", c.bandwidth_scale);
    get("include_d_factors", c.include_d_factors);
    get("min_effective", c.min_effective);
    get("qstar", c.qstar);
    get("ftilde", c.ftilde);
    get("a", c.a);
    get("n_points", c.n_points);
    get("n_oracle", c.n_oracle);
    get("tolerance_scale", c.tolerance_scale);
    get("grid", c.grid);
    get("out", c.out);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("config: ") + e.what());
  }
  if (!c.model_params.is_object()) fail(ErrorKind::Config, "model_params must be an object");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open config " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
  return config_from_json(j);
}

std::string canonical(const RunConfig& c) { return to_json(c).dump(); }

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_digest(const RunConfig& c) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical(c))));
  return buf;
}

ModelPtr model_of(const RunConfig& c) {
  if (c.model.empty()) fail(ErrorKind::Config, "no model given");
  ModelOptions o;
  try {
    o = model_options_from_json(c.model_params);
  } catch (const json::exception& e) {
    fail(ErrorKind::Config, std::string("model_params: ") + e.what());
  }
  return make_model(c.model, o);
}

PhysicalScales scales_of(const RunConfig& c) {
  if (!(c.mu2kappa > 0)) fail(ErrorKind::Config, "mu2kappa must be positive");
  if (!(c.mass > 0)) fail(ErrorKind::Config, "mass must be positive");
  PhysicalScales s;
  s.mu2kappa = c.mu2kappa;
  s.mass = c.mass;
  return s;
}

GreensOptions greens_options_of(const RunConfig& c) {
  GreensOptions g;
  g.scales = scales_of(c);
  g.t = c.t;
  g.dt = c.dt;
  g.n_paths = c.n_paths;
  g.seed = c.seed;
  g.bandwidth = c.bandwidth;
  g.bandwidth_scale = c.bandwidth_scale;
  g.include_d_factors = c.include_d_factors;
  g.threads = c.threads;
  g.min_effective = c.min_effective;
  return g;
}

std::string format_double(double x) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

json manifest_json(const Manifest& m) {
  return json{{"tool", "fibril"},
              {"version", FIBRIL_VERSION},
              {"subcommand", m.subcommand},
              {"config", to_json(m.config)},
              {"config_digest", config_digest(m.config)},
              {"seeds", m.seeds},
              {"timings", {{"wall_seconds", m.wall_seconds}}},
              {"residuals", m.residuals},
              {"outputs", m.outputs}};
}

std::string write_manifest(const Manifest& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write manifest " + path);
  out << manifest_json(m).dump(2) << "\n";
  if (!out) fail(ErrorKind::Io, "error writing manifest " + path);
  return path;
}

}  // namespace fibril
