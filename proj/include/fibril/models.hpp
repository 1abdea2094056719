#pragma once

#include "fibril/linalg.hpp"

#include <json.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace fibril {

// Knobs shared by every model. Most exist for negative controls and unit conventions.
struct ModelOptions {
  bool finite_difference = false;
  double fd_rel = 1e-5;
  double fd_floor = 1e-8;
  std::optional<Mat> metric_V;          // replaces the built-in G_ab (breaks invariance on purpose)
  double structure_constant_scale = 1.0;
  // Invariant potential V = v0 + vQ |Q|² + vf fᵀ G_V f.
  double v0 = 0.0, vQ = 0.0, vf = 0.0;
  double chart_radius = 1e-3;  // |Q| below this is outside the chart
};

ModelOptions model_options_from_json(const nlohmann::json& j);

// A manifold P×V with a free right action of a compact group, a gauge surface χ = 0 and an
// invariant potential. Group elements are exponential coordinates a.
class Model {
 public:
  Model(std::string name, int nP, int nV, int nG, ModelOptions opt);
  virtual ~Model() = default;

  const std::string& name() const { return name_; }
  int nP() const { return nP_; }
  int nV() const { return nV_; }
  int nG() const { return nG_; }
  int n() const { return nP_ + nV_; }
  const ModelOptions& options() const { return opt_; }
  bool finite_difference() const { return opt_.finite_difference; }
  bool gauge_linear() const { return gauge_linear_; }
  // Total mass of the group in the chart normalization where ū(e) = 1. Zero if not compact.
  double group_volume() const { return group_volume_; }

  virtual Mat metric_P(const Vec& Q) const = 0;
  Mat metric_P_d(const Vec& Q, const Vec& v) const;
  Mat metric_P_dd(const Vec& Q, const Vec& u, const Vec& v) const;
  const Mat& metric_V() const { return GV_; }

  virtual Vec action_P(const Vec& Q, const Vec& a) const = 0;
  // Row B, column A: ∂F^B/∂Q^A.
  Mat action_P_jacobian(const Vec& Q, const Vec& a) const;
  virtual Mat rep_V(const Vec& a) const = 0;
  const std::vector<Mat>& generators_V() const { return Jbar_; }
  // c^γ_{αβ} stored as c[γ](α, β).
  const std::vector<Mat>& structure_constants() const { return c_; }

  // Columns K_α.
  Mat killing_P(const Vec& Q) const;
  Mat killing_P_d(const Vec& Q, const Vec& v) const;
  Mat killing_P_dd(const Vec& Q, const Vec& u, const Vec& v) const;
  Mat killing_V(const Vec& f) const;

  virtual Vec gauge(const Vec& Q) const = 0;
  // Row μ, column C: ∂χ^μ/∂Q^C.
  Mat gauge_grad(const Vec& Q) const;
  Mat gauge_grad_d(const Vec& Q, const Vec& v) const;

  virtual double potential(const Vec& Q, const Vec& f) const;

  virtual Mat u_bar(const Vec& a) const = 0;
  virtual Mat u_left(const Vec& a) const = 0;
  Mat v_bar(const Vec& a) const;
  Mat rho(const Vec& a) const;
  // Directional derivative of v̄ along a group-coordinate direction.
  Mat v_bar_d(const Vec& a, const Vec& dir) const;
  // Coordinates of g(a1)·g(a2), so that F(F(Q,a1),a2) = F(Q, compose(a1,a2)).
  virtual Vec compose(const Vec& a1, const Vec& a2) const = 0;
  virtual Vec inverse(const Vec& a) const { return -a; }
  // Group element a' with χ(F(Q, a')) = 0 on the chart's branch.
  virtual Vec gauge_element(const Vec& Q) const;
  virtual bool in_chart(const Vec& Q) const;

  // Central-difference versions, always available.
  Mat fd_metric_P_d(const Vec& Q, const Vec& v) const;
  Mat fd_metric_P_dd(const Vec& Q, const Vec& u, const Vec& v) const;
  Mat fd_action_P_jacobian(const Vec& Q, const Vec& a) const;
  Mat fd_killing_P(const Vec& Q) const;
  Mat fd_killing_P_d(const Vec& Q, const Vec& v) const;
  Mat fd_killing_P_dd(const Vec& Q, const Vec& u, const Vec& v) const;
  Mat fd_gauge_grad(const Vec& Q) const;
  Mat fd_gauge_grad_d(const Vec& Q, const Vec& v) const;

 protected:
  virtual Mat metric_P_d_impl(const Vec& Q, const Vec& v) const { return fd_metric_P_d(Q, v); }
  virtual Mat metric_P_dd_impl(const Vec& Q, const Vec& u, const Vec& v) const {
    return fd_metric_P_dd(Q, u, v);
  }
  virtual Mat action_P_jacobian_impl(const Vec& Q, const Vec& a) const {
    return fd_action_P_jacobian(Q, a);
  }
  virtual Mat killing_P_impl(const Vec& Q) const { return fd_killing_P(Q); }
  virtual Mat killing_P_d_impl(const Vec& Q, const Vec& v) const { return fd_killing_P_d(Q, v); }
  virtual Mat killing_P_dd_impl(const Vec& Q, const Vec& u, const Vec& v) const {
    return fd_killing_P_dd(Q, u, v);
  }
  virtual Mat gauge_grad_impl(const Vec& Q) const { return fd_gauge_grad(Q); }
  virtual Mat gauge_grad_d_impl(const Vec& Q, const Vec& v) const { return fd_gauge_grad_d(Q, v); }

  double fd_step(const Vec& x, const Vec& dir) const;

  std::string name_;
  int nP_, nV_, nG_;
  ModelOptions opt_;
  bool gauge_linear_ = true;
  double group_volume_ = 0.0;
  Mat GV_;
  std::vector<Mat> Jbar_;
  std::vector<Mat> c_;
};

using ModelPtr = std::shared_ptr<const Model>;

ModelPtr builtin_planar_rotor(const ModelOptions& opt = {});
ModelPtr builtin_quaternionic(const ModelOptions& opt = {});
// Polynomial metric/gauge model read from a coefficient file (see README for the schema).
ModelPtr load_declarative_model(const nlohmann::json& spec, const ModelOptions& opt = {});
ModelPtr load_declarative_model_file(const std::string& path, const ModelOptions& opt = {});

// "planar-rotor", "quaternionic-adjoint", or a path to a declarative JSON file.
ModelPtr make_model(const std::string& name, const ModelOptions& opt = {});

struct AdaptedPoint {
  Vec Qstar;
  Vec ftilde;
  Vec a;
};

// Ambient point (Q, f) for an adapted point: φ̃(Q*, f̃, a) = (F(Q*, a), D̄(a) f̃).
void adapted_to_ambient(const Model& m, const AdaptedPoint& p, Vec& Q, Vec& f);
AdaptedPoint ambient_to_adapted(const Model& m, const Vec& Q, const Vec& f);

}  // namespace fibril
