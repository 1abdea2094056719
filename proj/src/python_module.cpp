#include "fibril/config.hpp"
#include "fibril/curvature.hpp"
#include "fibril/errors.hpp"
#include "fibril/irreps.hpp"
#include "fibril/reduction.hpp"
#include "fibril/verify.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>

namespace py = pybind11;
using namespace fibril;

namespace {

py::dict report_dict(const ValidationReport& r) {
  py::list checks;
  for (const auto& c : r.checks) {
    py::dict d;
    d["name"] = c.name;
    d["residual"] = c.residual;
    d["tolerance"] = c.tolerance;
    d["passed"] = c.passed();
    checks.append(d);
  }
  py::dict out;
  out["model"] = r.model;
  out["all_passed"] = r.all_passed();
  out["checks"] = checks;
  out["skipped"] = r.skipped;
  return out;
}

AdaptedPoint point(const Model& m, const Vec& q, const Vec& f, std::optional<Vec> a) {
  AdaptedPoint p{q, f, a ? *a : Vec(Vec::Zero(m.nG()))};
  if (q.size() != m.nP() || f.size() != m.nV() || p.a.size() != m.nG())
    fail(ErrorKind::Config, "point has the wrong dimensions");
  return p;
}

py::dict estimate_dict(const EstimatorResult& e) {
  py::dict d;
  d["value"] = e.value.real();
  d["stderr"] = e.stderr_;
  d["n_effective"] = e.n_effective;
  d["n_paths"] = e.n_paths;
  d["excluded_fraction"] = e.excluded_fraction;
  return d;
}

GreensOptions greens(double mu2kappa, double t, double dt, long n_paths, std::uint64_t seed, double bandwidth,
                     bool include_d_factors, int threads) {
  GreensOptions g;
  g.scales.mu2kappa = mu2kappa;
  g.t = t;
  g.dt = dt;
  g.n_paths = n_paths;
  g.seed = seed;
  g.bandwidth = bandwidth;
  g.include_d_factors = include_d_factors;
  g.threads = threads;
  return g;
}

}  // namespace

PYBIND11_MODULE(_fibril, mod) {
  mod.doc() = "Geometry, drifts, SDEs and Green's-function estimators for path-integral reduction";
  mod.attr("__version__") = FIBRIL_VERSION;

  py::register_exception<Error>(mod, "FibrilError");

  // pybind11 holders cannot be pointer-to-const; the model is never mutated through Python.
  py::class_<Model, std::shared_ptr<Model>>(mod, "Model")
      .def_property_readonly("name", &Model::name)
      .def_property_readonly("n_P", &Model::nP)
      .def_property_readonly("n_V", &Model::nV)
      .def_property_readonly("n_G", &Model::nG)
      .def_property_readonly("gauge_linear", &Model::gauge_linear)
      .def("metric_P", &Model::metric_P)
      .def("action_P", &Model::action_P)
      .def("rep_V", &Model::rep_V)
      .def("gauge", &Model::gauge)
      .def("potential", &Model::potential)
      .def("to_surface",
           [](const Model& m, const Vec& p, const Vec& v) {
             AdaptedPoint a = ambient_to_adapted(m, p, v);
             return py::make_tuple(a.Qstar, a.ftilde, a.a);
           },
           py::arg("p"), py::arg("v"));

  mod.def("make_model",
          [](const std::string& name, const std::string& params) {
            return std::const_pointer_cast<Model>(make_model(name, model_options_from_json(nlohmann::json::parse(params))));
          },
          py::arg("name"), py::arg("params") = "{}");

  mod.def("validate_model",
          [](const Model& m, int n, std::uint64_t seed) { return report_dict(validate_model(m, n, seed, false)); },
          py::arg("model"), py::arg("n_samples") = 100, py::arg("seed") = 1);

  mod.def("verify_all",
          [](const Model& m, int n, int n_oracle, std::uint64_t seed) {
            VerifyOptions o;
            o.n_points = n;
            o.n_oracle = n_oracle;
            o.seed = seed;
            return report_dict(verify_all(m, o));
          },
          py::arg("model"), py::arg("n_points") = 200, py::arg("n_oracle") = 50, py::arg("seed") = 1);

  mod.def("frame",
          [](const Model& m, const Vec& q, const Vec& f) {
            GeometricFrame F = frame(m, q, f);
            py::dict d;
            d["K_P"] = F.K_P;
            d["K_V"] = F.K_V;
            d["FP"] = F.FP;
            d["Lambda"] = F.Lambda;
            d["N_PP"] = F.N_PP;
            d["N_VP"] = F.N_VP;
            d["P_bot"] = F.P_bot;
            d["d"] = F.d;
            d["det_d"] = F.det_d;
            d["sigma"] = F.sigma;
            d["GH"] = F.GH;
            d["Pi"] = F.Pi;
            d["h"] = F.h;
            d["H"] = F.H;
            d["X1"] = F.X1;
            return d;
          },
          py::arg("model"), py::arg("qstar"), py::arg("ftilde"));

  mod.def("drifts",
          [](const Model& m, const Vec& q, const Vec& f, std::optional<Vec> a) {
            DriftBundle b = drift_bundle(m, point(m, q, f, a));
            py::dict d;
            d["b_div"] = b.b_div;
            d["b_div_G"] = b.b_div_G;
            d["j1"] = b.j1;
            d["j2"] = b.j2;
            d["j2_sigma"] = b.j2_sigma;
            d["christoffel_term"] = b.christoffel_term;
            d["zero_sum"] = b.zero_sum;
            d["J"] = b.J;
            return d;
          },
          py::arg("model"), py::arg("qstar"), py::arg("ftilde"), py::arg("a") = py::none());

  mod.def("jacobian_integrand",
          [](const Model& m, const Vec& q, const Vec& f) { return jacobian_integrand(m, point(m, q, f, {})).J; },
          py::arg("model"), py::arg("qstar"), py::arg("ftilde"));
  mod.def("jacobian_integrand_oracle",
          [](const Model& m, const Vec& q, const Vec& f) { return jacobian_integrand_oracle(m, point(m, q, f, {})); },
          py::arg("model"), py::arg("qstar"), py::arg("ftilde"));

  mod.def("simulate",
          [](const Model& m, const std::string& process, const Vec& start, double t, double dt, int n_paths,
             std::uint64_t seed, double mu2kappa, int threads) {
            PhysicalScales s;
            s.mu2kappa = mu2kappa;
            ProcessKind kind = parse_process(process);
            SimOptions so;
            so.girsanov = kind == ProcessKind::Reduced || kind == ProcessKind::ReducedNoJ2;
            so.feynman_kac = true;
            Ensemble E;
            {
              py::gil_scoped_release nogil;
              E = simulate(m, s, kind, start, t, dt, n_paths, seed, so, threads);
            }
            Eigen::MatrixXd finals(n_paths, start.size());
            Eigen::VectorXd lg(n_paths), lc(n_paths);
            std::vector<bool> failed(n_paths);
            for (int i = 0; i < n_paths; ++i) {
              const Trajectory& T = E.paths[i];
              failed[i] = T.failed;
              finals.row(i) = T.failed ? Vec(Vec::Constant(start.size(), NAN)) : T.final_state;
              lg(i) = T.log_girsanov;
              lc(i) = T.log_girsanov_closed;
            }
            py::dict d;
            d["final_states"] = finals;
            d["log_girsanov"] = lg;
            d["log_girsanov_closed"] = lc;
            d["failed"] = failed;
            d["excluded_fraction"] = E.excluded_fraction();
            return d;
          },
          py::arg("model"), py::arg("process"), py::arg("start"), py::arg("t"), py::arg("dt"), py::arg("n_paths"),
          py::arg("seed") = 1, py::arg("mu2kappa") = 1.0, py::arg("threads") = 0);

  mod.def("haar_average_of_irrep",
          [](const Model& m, const std::string& irrep) {
            IrrepSpec ir = parse_irrep(irrep, m);
            return CMat(haar_average_matrix(m, ir.dim, ir.dim, ir.evaluate));
          },
          py::arg("model"), py::arg("irrep"));

  mod.def("greens_zero_momentum",
          [](const Model& m, const Vec& pa, const Vec& va, const Vec& pb, const Vec& vb, double mu2kappa, double t,
             double dt, long n_paths, std::uint64_t seed, double bandwidth, bool include_d_factors, int threads) {
            GreensResult r;
            {
              py::gil_scoped_release nogil;
              r = greens_relation_zero_momentum(
                  m, pa, va, pb, vb, greens(mu2kappa, t, dt, n_paths, seed, bandwidth, include_d_factors, threads));
            }
            py::dict d;
            d["lhs"] = estimate_dict(r.lhs);
            d["rhs"] = estimate_dict(r.rhs);
            d["z_score"] = r.z_score;
            d["lhs_without_d_factors"] = estimate_dict(r.lhs_without_d);
            d["z_score_without_d_factors"] = r.z_without_d;
            d["bandwidth"] = r.bandwidth;
            return d;
          },
          py::arg("model"), py::arg("p_a"), py::arg("v_a"), py::arg("p_b"), py::arg("v_b"), py::arg("mu2kappa") = 1.0,
          py::arg("t") = 0.2, py::arg("dt") = 1e-3, py::arg("n_paths") = 10000, py::arg("seed") = 1,
          py::arg("bandwidth") = 0.0, py::arg("include_d_factors") = true, py::arg("threads") = 0);
}
