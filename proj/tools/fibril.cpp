#include "fibril/config.hpp"
#include "fibril/curvature.hpp"
#include "fibril/errors.hpp"
#include "fibril/irreps.hpp"
#include "fibril/reduction.hpp"
#include "fibril/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

using namespace fibril;
using nlohmann::json;

namespace {

json mat_json(const Mat& a) {
  json rows = json::array();
  for (int i = 0; i < a.rows(); ++i) {
    json r = json::array();
    for (int k = 0; k < a.cols(); ++k) r.push_back(a(i, k));
    rows.push_back(r);
  }
  return rows;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Complex entries as [re, im].
json cmat_json(const CMat& a) {
  json rows = json::array();
  for (int i = 0; i < a.rows(); ++i) {
    json r = json::array();
    for (int k = 0; k < a.cols(); ++k) r.push_back({a(i, k).real(), a(i, k).imag()});
    rows.push_back(r);
  }
  return rows;
}

Vec to_vec(const std::vector<double>& x) { return Eigen::Map<const Vec>(x.data(), x.size()); }

Vec unit(int n, double s) {
  Vec v = Vec::Zero(n);
  if (n > 0) v(0) = s;
  return v;
}

Vec pick(const std::vector<double>& given, const Vec& fallback, int n, const char* what) {
  if (given.empty()) return fallback;
  if (static_cast<int>(given.size()) != n)
    fail(ErrorKind::Config, std::string(what) + " needs " + std::to_string(n) + " components");
  return to_vec(given);
}

AdaptedPoint point_of(const Model& m, const RunConfig& c) {
  AdaptedPoint p;
  if (c.qstar.empty()) {
    // Surface point over the default start.
    p = ambient_to_adapted(m, pick(c.from_p, unit(m.nP(), 1.0), m.nP(), "from_p"),
                           pick(c.from_v, unit(m.nV(), 0.5), m.nV(), "from_v"));
  } else {
    p.Qstar = pick(c.qstar, Vec(), m.nP(), "qstar");
    p.ftilde = pick(c.ftilde, Vec::Zero(m.nV()), m.nV(), "ftilde");
  }
  p.a = pick(c.a, Vec::Zero(m.nG()), m.nG(), "a");
  if (max_abs(m.gauge(p.Qstar)) > 1e-10) fail(ErrorKind::Config, "qstar is not on the gauge surface");
  return p;
}

std::ostream& open_out(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) fail(ErrorKind::Io, "cannot write " + path);
  return file;
}

void finish(const Manifest& man, const std::string& out) {
  if (out.empty() || out == "-") return;
  write_manifest(man, out + ".manifest.json");
}

json report_json(const ValidationReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"name", c.name}, {"residual", c.residual}, {"tolerance", c.tolerance}, {"passed", c.passed()}});
  return {{"model", r.model}, {"n_samples", r.n_samples}, {"all_passed", r.all_passed()},
          {"checks", checks}, {"skipped", r.skipped}};
}

json residual_summary(const ValidationReport& r) {
  json j = json::object();
  for (const auto& c : r.checks) j[c.name] = c.residual;
  return j;
}

int print_report(const ValidationReport& r, const RunConfig& c, const char* sub, double secs) {
  std::ofstream f;
  open_out(c.out, f) << report_json(r).dump(2) << "\n";
  Manifest man{sub, c, {c.seed}, secs, residual_summary(r), {c.out}};
  finish(man, c.out);
  for (const auto& ch : r.checks)
    if (!ch.passed())
      std::cerr << "FAIL " << ch.name << " residual " << format_double(ch.residual) << " > "
                << format_double(ch.tolerance) << "\n";
  return r.all_passed() ? kExitOk : kExitIdentityFailure;
}

int cmd_validate(const RunConfig& c, double& secs) {
  auto t0 = std::chrono::steady_clock::now();
  ModelPtr m = model_of(c);
  ValidationReport r = validate_model(*m, c.n_points, c.seed, false);
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return print_report(r, c, "validate", secs);
}

int cmd_verify(const RunConfig& c, double& secs) {
  auto t0 = std::chrono::steady_clock::now();
  ModelPtr m = model_of(c);
  VerifyOptions o;
  o.n_points = c.n_points;
  o.n_oracle = c.n_oracle;
  o.seed = c.seed;
  o.tolerance_scale = c.tolerance_scale;
  ValidationReport r = verify_all(*m, o);
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return print_report(r, c, "verify", secs);
}

int cmd_frame(const RunConfig& c, double& secs) {
  auto t0 = std::chrono::steady_clock::now();
  ModelPtr m = model_of(c);
  AdaptedPoint p = point_of(*m, c);
  GeometricFrame F = frame(*m, p);
  SigmaDerivatives sd = sigma_and_derivatives(*m, p);
  DetFactorization df = det_factorization(*m, p);
  DriftBundle b = drift_bundle(*m, p);
  json j = {{"model", m->name()},
            {"Qstar", vec_json(p.Qstar)},
            {"ftilde", vec_json(p.ftilde)},
            {"a", vec_json(p.a)},
            {"K_P", mat_json(F.K_P)},
            {"K_V", mat_json(F.K_V)},
            {"chi_grad", mat_json(F.chi_grad)},
            {"FP", mat_json(F.FP)},
            {"FP_inv", mat_json(F.FP_inv)},
            {"Lambda", mat_json(F.Lambda)},
            {"N_PP", mat_json(F.N_PP)},
            {"N_VP", mat_json(F.N_VP)},
            {"P_bot", mat_json(F.P_bot)},
            {"gamma", mat_json(F.gamma)},
            {"gamma_inv", mat_json(F.gamma_inv)},
            {"gamma_prime", mat_json(F.gamma_prime)},
            {"d", mat_json(F.d)},
            {"d_inv", mat_json(F.d_inv)},
            {"det_d", F.det_d},
            {"GH_PP", mat_json(F.GH_PP())},
            {"GH_PV", mat_json(F.GH_PV())},
            {"GH_VV", mat_json(F.GH_VV())},
            {"Pi_tilde", mat_json(F.Pi)},
            {"A_conn", mat_json(F.A_conn)},
            {"A_gamma", mat_json(F.A_gamma)},
            {"H", F.H},
            {"h_PP", mat_json(F.h_PP())},
            {"h_PV", mat_json(F.h_PV())},
            {"h_VV", mat_json(F.h_VV())},
            {"sigma", sd.sigma},
            {"sigma_grad", vec_json(sd.grad)},
            {"sigma_hess", mat_json(sd.hess)},
            {"det_full", df.det_full},
            {"det_u", df.u_det},
            {"adapted_metric", mat_json(adapted_metric(*m, p))},
            {"adapted_pseudoinverse", mat_json(adapted_pseudoinverse(*m, p))},
            {"b_div", vec_json(b.b_div)},
            {"b_div_G", vec_json(b.b_div_G)},
            {"j1", vec_json(b.j1)},
            {"j2", vec_json(b.j2)},
            {"christoffel_term", vec_json(b.christoffel_term)},
            {"J", b.J}};
  std::ofstream f;
  open_out(c.out, f) << j.dump(2) << "\n";
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  finish({"frame", c, {}, secs, json::object(), {c.out}}, c.out);
  return kExitOk;
}

struct Axis {
  double lo, hi;
  int n;
};

std::vector<Axis> parse_grid(const std::string& spec) {
  std::vector<Axis> axes;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    Axis a{};
    char c1 = 0, c2 = 0;
    std::stringstream ps(part);
    if (!(ps >> a.lo >> c1 >> a.hi >> c2 >> a.n) || c1 != ':' || c2 != ':' || a.n < 1)
      fail(ErrorKind::Config, "grid axis must look like lo:hi:n, got '" + part + "'");
    axes.push_back(a);
  }
  if (axes.size() != 2) fail(ErrorKind::Config, "grid needs two axes (Q and f)");
  return axes;
}

double node(const Axis& a, int i) { return a.n == 1 ? a.lo : a.lo + (a.hi - a.lo) * i / (a.n - 1); }

// J over ambient Q = base + s e₀, f = base + u e₀, each pushed to the surface.
int cmd_jacobian(const RunConfig& c, double& secs) {
  auto t0 = std::chrono::steady_clock::now();
  ModelPtr m = model_of(c);
  auto axes = parse_grid(c.grid);
  const int nP = m->nP(), nV = m->nV();
  Vec q0 = pick(c.from_p, Vec::Zero(nP), nP, "from_p"), f0 = pick(c.from_v, Vec::Zero(nV), nV, "from_v");
  std::ofstream file;
  std::ostream& out = open_out(c.out, file);
  out << "s_q,s_f";
  for (int i = 0; i < nP; ++i) out << ",Qstar" << i;
  for (int i = 0; i < nV; ++i) out << ",ftilde" << i;
  out << ",sigma,laplace_H,grad_sq,J\n";
  for (int i = 0; i < axes[0].n; ++i) {
    for (int k = 0; k < axes[1].n; ++k) {
      const double sq = node(axes[0], i), sf = node(axes[1], k);
      AdaptedPoint p = ambient_to_adapted(*m, q0 + unit(nP, sq), f0 + unit(nV, sf));
      GeometricFrame F = frame(*m, p);
      JacobianIntegrand J = jacobian_integrand(*m, p);
      out << format_double(sq) << "," << format_double(sf);
      for (int r = 0; r < nP; ++r) out << "," << format_double(p.Qstar(r));
      for (int r = 0; r < nV; ++r) out << "," << format_double(p.ftilde(r));
      out << "," << format_double(F.sigma) << "," << format_double(J.laplace_H) << ","
          << format_double(J.grad_sq) << "," << format_double(J.J) << "\n";
    }
  }
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  finish({"jacobian", c, {}, secs, json::object(), {c.out}}, c.out);
  return kExitOk;
}

Vec start_of(const Model& m, const RunConfig& c, ProcessKind kind) {
  Vec p = pick(c.from_p, unit(m.nP(), 1.0), m.nP(), "from_p");
  Vec v = pick(c.from_v, unit(m.nV(), 0.5), m.nV(), "from_v");
  Vec x(state_dim(m, kind));
  if (kind == ProcessKind::Original) {
    x << p, v;
  } else {
    AdaptedPoint a = ambient_to_adapted(m, p, v);
    if (kind == ProcessKind::Adapted) x << a.Qstar, a.ftilde, a.a;
    else x << a.Qstar, a.ftilde;
  }
  return x;
}

int cmd_simulate(const RunConfig& c, double& secs) {
  auto t0 = std::chrono::steady_clock::now();
  ModelPtr m = model_of(c);
  ProcessKind kind = parse_process(c.process);
  PhysicalScales s = scales_of(c);
  if (c.n_paths < 1) fail(ErrorKind::Config, "paths must be at least 1");
  if (c.dump_every < 0) fail(ErrorKind::Config, "dump-every must be ≥ 0");
  IrrepSpec irrep = parse_irrep(c.irrep, *m);
  SimOptions so;
  so.record_states = c.dump_every > 0;
  so.girsanov = kind == ProcessKind::Reduced || kind == ProcessKind::ReducedNoJ2;
  so.feynman_kac = true;
  if (!irrep.trivial()) so.irreps.push_back(&irrep);
  Vec x0 = start_of(*m, c, kind);
  Ensemble E = simulate(*m, s, kind, x0, c.t, c.dt, static_cast<int>(c.n_paths), c.seed, so, c.threads);
  std::ofstream file;
  std::ostream& out = open_out(c.out, file);
  for (std::size_t i = 0; i < E.paths.size(); ++i) {
    const Trajectory& T = E.paths[i];
    json r = {{"index", i}, {"seed", T.seed}, {"failed", T.failed}};
    if (T.failed) {
      r["error"] = T.error;
      r["fail_step"] = T.fail_step;
    } else {
      r["final_state"] = vec_json(T.final_state);
      r["log_girsanov"] = T.log_girsanov;
      r["log_girsanov_closed"] = T.log_girsanov_closed;
      r["jacobian_integral"] = T.jacobian_integral;
      r["feynman_kac"] = feynman_kac_factor(T.potential_integral, s);
      if (!T.ordered_exp.empty()) r["ordered_exp"] = cmat_json(T.ordered_exp[0]);
    }
    if (c.dump_every > 0) {
      json ts = json::array(), xs = json::array();
      for (std::size_t k = 0; k < T.states.size(); k += c.dump_every) {
        ts.push_back(T.times[k]);
        xs.push_back(vec_json(T.states[k]));
      }
      r["times"] = ts;
      r["states"] = xs;
    }
    out << r.dump() << "\n";
  }
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Manifest man{"simulate", c, {c.seed}, secs, {{"excluded_fraction", E.excluded_fraction()}}, {c.out}};
  finish(man, c.out);
  return kExitOk;
}

json estimate_json(const EstimatorResult& e) {
  return {{"value", e.value.real()}, {"stderr", e.stderr_}, {"n_effective", e.n_effective},
          {"n_paths", e.n_paths}, {"excluded_fraction", e.excluded_fraction}, {"seed", e.seed}};
}

int cmd_reduce(const RunConfig& c, double& secs) {
  auto t0 = std::chrono::steady_clock::now();
  ModelPtr m = model_of(c);
  GreensOptions g = greens_options_of(c);
  const int nP = m->nP(), nV = m->nV();
  Vec pa = pick(c.from_p, unit(nP, 1.0), nP, "from_p"), va = pick(c.from_v, unit(nV, 0.5), nV, "from_v");
  Vec pb = pick(c.to_p, unit(nP, 1.1), nP, "to_p"), vb = pick(c.to_v, unit(nV, 0.4), nV, "to_v");
  json j = {{"model", m->name()}, {"relation", c.relation}, {"config", to_json(c)},
            {"config_digest", config_digest(c)}};
  double z = 0.0;
  json residuals;
  if (c.relation == "zero") {
    GreensResult r = greens_relation_zero_momentum(*m, pa, va, pb, vb, g);
    z = r.z_score;
    j["lhs"] = estimate_json(r.lhs);
    j["rhs"] = estimate_json(r.rhs);
    j["z_score"] = r.z_score;
    j["lhs_without_d_factors"] = estimate_json(r.lhs_without_d);
    j["z_score_without_d_factors"] = r.z_without_d;
    j["bandwidth"] = r.bandwidth;
    j["excluded_fraction"] = std::max(r.lhs.excluded_fraction, r.rhs.excluded_fraction);
    residuals = {{"z_score", r.z_score}};
  } else if (c.relation == "momentum") {
    IrrepSpec irrep = parse_irrep(c.irrep, *m);
    MomentumResult r = greens_relation_momentum(*m, irrep, pa, va, pb, vb, g);
    z = r.max_z;
    j["irrep"] = irrep.label;
    j["lhs"] = cmat_json(r.lhs);
    j["rhs"] = cmat_json(r.rhs);
    j["lhs_stderr"] = mat_json(Mat(r.lhs_err.real()));
    j["rhs_stderr"] = mat_json(Mat(r.rhs_err.real()));
    j["max_z"] = r.max_z;
    j["bandwidth"] = r.bandwidth;
    j["n_effective_lhs"] = r.n_effective_lhs;
    j["n_effective_rhs"] = r.n_effective_rhs;
    j["excluded_fraction"] = r.excluded_fraction;
    residuals = {{"max_z", r.max_z}};
  } else {
    fail(ErrorKind::Config, "relation must be zero or momentum");
  }
  j["consistent"] = z < 3.0;
  std::ofstream f;
  open_out(c.out, f) << j.dump(2) << "\n";
  secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  finish({"reduce", c, {c.seed}, secs, residuals, {c.out}}, c.out);
  return z < 3.0 ? kExitOk : kExitIdentityFailure;
}

// Flags land in `flags`; after parsing, those actually given are copied over the config file.
struct Binder {
  RunConfig flags;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> given;

  template <class T>
  CLI::Option* add(CLI::App* app, const std::string& name, T RunConfig::*field, const std::string& help) {
    CLI::Option* o = app->add_option(name, flags.*field, help);
    given.push_back({o, [this, field](RunConfig& c) { c.*field = flags.*field; }});
    return o;
  }
  CLI::Option* flag(CLI::App* app, const std::string& name, bool RunConfig::*field, bool value,
                    const std::string& help) {
    CLI::Option* o = app->add_flag(name, help);
    given.push_back({o, [field, value](RunConfig& c) { c.*field = value; }});
    return o;
  }
  void apply(RunConfig& c) const {
    for (const auto& [o, set] : given)
      if (o->count() > 0) set(c);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Path-integral reduction engine: geometry, SDEs and Green's-function checks"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FIBRIL_VERSION);

  std::string config_path;
  std::vector<std::string> params;
  bool fd = false;
  Binder b;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file; flags override it");
    b.add(sub, "--model", &RunConfig::model, "planar-rotor, quaternionic-adjoint or a model JSON file");
    sub->add_option("--model-param", params, "model option as key=value (value is JSON)");
    sub->add_flag("--fd", fd, "finite-difference derivatives");
    b.add(sub, "--seed", &RunConfig::seed, "master seed");
    b.add(sub, "--out", &RunConfig::out, "output file (stdout if omitted)");
    b.add(sub, "--threads", &RunConfig::threads, "worker count (FIBRIL_THREADS if 0)");
  };
  auto physics = [&](CLI::App* sub) {
    b.add(sub, "--mu2kappa", &RunConfig::mu2kappa, "μ²κ");
    b.add(sub, "--mass", &RunConfig::mass, "mass m");
    b.add(sub, "--t", &RunConfig::t, "horizon");
    b.add(sub, "--dt", &RunConfig::dt, "time step");
    b.add(sub, "--paths", &RunConfig::n_paths, "number of paths");
    b.add(sub, "--from-p", &RunConfig::from_p, "start point p_a")->expected(1, 64);
    b.add(sub, "--from-v", &RunConfig::from_v, "start point v_a")->expected(1, 64);
  };

  auto* validate = app.add_subcommand("validate", "check the model's own invariants");
  common(validate);
  b.add(validate, "--samples", &RunConfig::n_points, "random samples");

  auto* frame_cmd = app.add_subcommand("frame", "dump every frame tensor at one surface point");
  common(frame_cmd);
  std::string point_file;
  frame_cmd->add_option("--point", point_file, "JSON with qstar/ftilde/a or from_p/from_v");
  b.add(frame_cmd, "--qstar", &RunConfig::qstar, "surface point Q*")->expected(1, 64);
  b.add(frame_cmd, "--ftilde", &RunConfig::ftilde, "f̃")->expected(1, 64);
  b.add(frame_cmd, "--a", &RunConfig::a, "group coordinates")->expected(1, 64);

  auto* jac = app.add_subcommand("jacobian", "tabulate J on a grid (CSV)");
  common(jac);
  b.add(jac, "--grid", &RunConfig::grid, "lo:hi:n,lo:hi:n along the first Q and f coordinates");

  auto* sim = app.add_subcommand("simulate", "simulate an ensemble (JSON lines)");
  common(sim);
  physics(sim);
  b.add(sim, "--process", &RunConfig::process, "original|adapted|reduced|reduced-noj2");
  b.add(sim, "--dump-every", &RunConfig::dump_every, "write every K-th state");
  b.add(sim, "--irrep", &RunConfig::irrep, "ordered exponential for this irrep");

  auto* red = app.add_subcommand("reduce", "Green's-function relation (JSON report)");
  common(red);
  physics(red);
  b.add(red, "--relation", &RunConfig::relation, "zero|momentum");
  b.add(red, "--irrep", &RunConfig::irrep, "trivial, so2:K or su2:1/2");
  b.add(red, "--to-p", &RunConfig::to_p, "end point p_b")->expected(1, 64);
  b.add(red, "--to-v", &RunConfig::to_v, "end point v_b")->expected(1, 64);
  b.add(red, "--bandwidth", &RunConfig::bandwidth, "kernel bandwidth (0: Silverman)");
  b.add(red, "--bandwidth-scale", &RunConfig::bandwidth_scale, "factor on the Silverman bandwidth");
  b.flag(red, "--omit-d-factors", &RunConfig::include_d_factors, false, "negative control");

  auto* ver = app.add_subcommand("verify", "run the identity suite");
  common(ver);
  b.add(ver, "--points", &RunConfig::n_points, "random surface points");
  b.add(ver, "--oracle-points", &RunConfig::n_oracle, "points for the J oracle");
  b.add(ver, "--tolerance-scale", &RunConfig::tolerance_scale, "multiply derivative tolerances");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  double secs = 0.0;
  try {
    RunConfig c = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (!point_file.empty()) {
      std::ifstream in(point_file);
      if (!in) fail(ErrorKind::Io, "cannot open point file " + point_file);
      json pj;
      in >> pj;
      RunConfig pc = config_from_json(pj);
      c.qstar = pc.qstar;
      c.ftilde = pc.ftilde;
      c.a = pc.a;
      c.from_p = pc.from_p;
      c.from_v = pc.from_v;
    }
    b.apply(c);
    if (fd) c.model_params["finite_difference"] = true;
    for (const auto& kv : params) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) fail(ErrorKind::Config, "--model-param needs key=value");
      c.model_params[kv.substr(0, eq)] = json::parse(kv.substr(eq + 1));
    }
    CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "validate") return cmd_validate(c, secs);
    if (name == "verify") return cmd_verify(c, secs);
    if (name == "frame") return cmd_frame(c, secs);
    if (name == "jacobian") return cmd_jacobian(c, secs);
    if (name == "simulate") return cmd_simulate(c, secs);
    if (name == "reduce") return cmd_reduce(c, secs);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    std::cerr << "ConfigError: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}
