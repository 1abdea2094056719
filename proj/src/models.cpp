#include "fibril/models.hpp"

#include "fibril/errors.hpp"
#include "fibril/quaternion.hpp"

#include <cmath>
#include <filesystem>

namespace fibril {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

Mat rot2(double t) {
  Mat r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}
}  // namespace

ModelOptions model_options_from_json(const nlohmann::json& j) {
  ModelOptions o;
  if (!j.is_object()) return o;
  o.finite_difference = j.value("finite_difference", o.finite_difference);
  o.fd_rel = j.value("fd_rel", o.fd_rel);
  o.fd_floor = j.value("fd_floor", o.fd_floor);
  o.structure_constant_scale = j.value("structure_constant_scale", o.structure_constant_scale);
  o.v0 = j.value("v0", o.v0);
  o.vQ = j.value("vQ", o.vQ);
  o.vf = j.value("vf", o.vf);
  o.chart_radius = j.value("chart_radius", o.chart_radius);
  if (j.contains("metric_V")) {
    const auto& rows = j.at("metric_V");
    Mat g(rows.size(), rows.size());
    for (size_t r = 0; r < rows.size(); ++r)
      for (size_t c = 0; c < rows[r].size(); ++c) g(r, c) = rows[r][c].get<double>();
    o.metric_V = g;
  }
  return o;
}

Model::Model(std::string name, int nP, int nV, int nG, ModelOptions opt)
    : name_(std::move(name)), nP_(nP), nV_(nV), nG_(nG), opt_(std::move(opt)) {
  if (nP + nV > kMaxDim || nP + nV + nG > kMaxDim)
    fail(ErrorKind::Config, "model dimensions exceed capacity " + std::to_string(kMaxDim));
}

double Model::fd_step(const Vec& x, const Vec& dir) const {
  double scale = x.size() ? x.cwiseAbs().maxCoeff() : 0.0;
  double h = std::max(opt_.fd_rel * scale, opt_.fd_floor);
  double dn = dir.cwiseAbs().maxCoeff();
  return dn > 0 ? h / dn : h;
}

Mat Model::metric_P_d(const Vec& Q, const Vec& v) const {
  return opt_.finite_difference ? fd_metric_P_d(Q, v) : metric_P_d_impl(Q, v);
}
Mat Model::metric_P_dd(const Vec& Q, const Vec& u, const Vec& v) const {
  return opt_.finite_difference ? fd_metric_P_dd(Q, u, v) : metric_P_dd_impl(Q, u, v);
}
Mat Model::action_P_jacobian(const Vec& Q, const Vec& a) const {
  return opt_.finite_difference ? fd_action_P_jacobian(Q, a) : action_P_jacobian_impl(Q, a);
}
Mat Model::killing_P(const Vec& Q) const {
  return opt_.finite_difference ? fd_killing_P(Q) : killing_P_impl(Q);
}
Mat Model::killing_P_d(const Vec& Q, const Vec& v) const {
  return opt_.finite_difference ? fd_killing_P_d(Q, v) : killing_P_d_impl(Q, v);
}
Mat Model::killing_P_dd(const Vec& Q, const Vec& u, const Vec& v) const {
  return opt_.finite_difference ? fd_killing_P_dd(Q, u, v) : killing_P_dd_impl(Q, u, v);
}
Mat Model::gauge_grad(const Vec& Q) const {
  return opt_.finite_difference ? fd_gauge_grad(Q) : gauge_grad_impl(Q);
}
Mat Model::gauge_grad_d(const Vec& Q, const Vec& v) const {
  return opt_.finite_difference ? fd_gauge_grad_d(Q, v) : gauge_grad_d_impl(Q, v);
}

Mat Model::killing_V(const Vec& f) const {
  Mat k(nV_, nG_);
  for (int a = 0; a < nG_; ++a) k.col(a) = Jbar_[a] * f;
  return k;
}

double Model::potential(const Vec& Q, const Vec& f) const {
  return opt_.v0 + opt_.vQ * Q.squaredNorm() + opt_.vf * f.dot(GV_ * f);
}

Mat Model::v_bar(const Vec& a) const { return u_bar(a).inverse(); }
Mat Model::rho(const Vec& a) const { return u_bar(a) * u_left(a).inverse(); }

Mat Model::v_bar_d(const Vec& a, const Vec& dir) const {
  double h = 1e-5 / std::max(dir.cwiseAbs().maxCoeff(), 1e-300);
  return (v_bar(a + h * dir) - v_bar(a - h * dir)) / (2 * h);
}

bool Model::in_chart(const Vec& Q) const {
  return opt_.chart_radius <= 0.0 || Q.norm() > opt_.chart_radius;
}

Vec Model::gauge_element(const Vec& Q) const {
  Vec a = Vec::Zero(nG_);
  for (int it = 0; it < 60; ++it) {
    Vec Fq = action_P(Q, a);
    Vec r = gauge(Fq);
    if (r.cwiseAbs().maxCoeff() < 1e-14) break;
    Mat dF(nP_, nG_);
    for (int k = 0; k < nG_; ++k) {
      Vec e = Vec::Zero(nG_);
      e(k) = 1e-6;
      dF.col(k) = (action_P(Q, a + e) - action_P(Q, a - e)) / 2e-6;
    }
    Mat jac = gauge_grad(Fq) * dF;
    a -= jac.partialPivLu().solve(r);
  }
  return a;
}

Mat Model::fd_metric_P_d(const Vec& Q, const Vec& v) const {
  double h = fd_step(Q, v);
  return (metric_P(Q + h * v) - metric_P(Q - h * v)) / (2 * h);
}

Mat Model::fd_metric_P_dd(const Vec& Q, const Vec& u, const Vec& v) const {
  double h = fd_step(Q, u);
  auto d = [&](const Vec& x) {
    return opt_.finite_difference ? fd_metric_P_d(x, v) : metric_P_d_impl(x, v);
  };
  return (d(Q + h * u) - d(Q - h * u)) / (2 * h);
}

Mat Model::fd_action_P_jacobian(const Vec& Q, const Vec& a) const {
  Mat J(nP_, nP_);
  for (int k = 0; k < nP_; ++k) {
    Vec e = Vec::Zero(nP_);
    e(k) = 1.0;
    double h = fd_step(Q, e);
    J.col(k) = (action_P(Q + h * e, a) - action_P(Q - h * e, a)) / (2 * h);
  }
  return J;
}

Mat Model::fd_killing_P(const Vec& Q) const {
  Mat K(nP_, nG_);
  for (int k = 0; k < nG_; ++k) {
    Vec e = Vec::Zero(nG_);
    e(k) = 1.0;
    double h = std::max(opt_.fd_rel, opt_.fd_floor);
    K.col(k) = (action_P(Q, h * e) - action_P(Q, -h * e)) / (2 * h);
  }
  return K;
}

Mat Model::fd_killing_P_d(const Vec& Q, const Vec& v) const {
  double h = fd_step(Q, v);
  return (killing_P(Q + h * v) - killing_P(Q - h * v)) / (2 * h);
}

Mat Model::fd_killing_P_dd(const Vec& Q, const Vec& u, const Vec& v) const {
  double h = fd_step(Q, u);
  return (killing_P_d(Q + h * u, v) - killing_P_d(Q - h * u, v)) / (2 * h);
}

Mat Model::fd_gauge_grad(const Vec& Q) const {
  Mat g(nG_, nP_);
  for (int k = 0; k < nP_; ++k) {
    Vec e = Vec::Zero(nP_);
    e(k) = 1.0;
    double h = fd_step(Q, e);
    g.col(k) = (gauge(Q + h * e) - gauge(Q - h * e)) / (2 * h);
  }
  return g;
}

Mat Model::fd_gauge_grad_d(const Vec& Q, const Vec& v) const {
  double h = fd_step(Q, v);
  return (gauge_grad(Q + h * v) - gauge_grad(Q - h * v)) / (2 * h);
}

// ---------------------------------------------------------------------------------------------
// SO(2) rotating a point of the punctured plane and a vector of R².

namespace {

class PlanarRotor final : public Model {
 public:
  explicit PlanarRotor(const ModelOptions& opt) : Model("planar-rotor", 2, 2, 1, opt) {
    GV_ = opt.metric_V ? *opt.metric_V : eye(2);
    Mat j(2, 2);
    j << 0, -1, 1, 0;
    Jbar_ = {j};
    c_ = {zeros(1, 1)};
    group_volume_ = 2.0 * kPi;
    gauge_linear_ = true;
  }

  Mat metric_P(const Vec&) const override { return eye(2); }
  Vec action_P(const Vec& Q, const Vec& a) const override { return rot2(a(0)) * Q; }
  Mat rep_V(const Vec& a) const override { return rot2(a(0)); }
  Vec gauge(const Vec& Q) const override { return vec({Q(1)}); }
  Mat u_bar(const Vec&) const override { return eye(1); }
  Mat u_left(const Vec&) const override { return eye(1); }
  Vec compose(const Vec& a1, const Vec& a2) const override {
    return vec({wrap_angle(a1(0) + a2(0))});
  }
  Vec inverse(const Vec& a) const override { return vec({wrap_angle(-a(0))}); }
  Vec gauge_element(const Vec& Q) const override { return vec({-std::atan2(Q(1), Q(0))}); }

 protected:
  Mat metric_P_d_impl(const Vec&, const Vec&) const override { return zeros(2, 2); }
  Mat metric_P_dd_impl(const Vec&, const Vec&, const Vec&) const override { return zeros(2, 2); }
  Mat action_P_jacobian_impl(const Vec&, const Vec& a) const override { return rot2(a(0)); }
  Mat killing_P_impl(const Vec& Q) const override { return Jbar_[0] * Q; }
  Mat killing_P_d_impl(const Vec&, const Vec& v) const override { return Jbar_[0] * v; }
  Mat killing_P_dd_impl(const Vec&, const Vec&, const Vec&) const override { return zeros(2, 1); }
  Mat gauge_grad_impl(const Vec&) const override {
    Mat g(1, 2);
    g << 0, 1;
    return g;
  }
  Mat gauge_grad_d_impl(const Vec&, const Vec&) const override { return zeros(1, 2); }
};

}  // namespace

ModelPtr builtin_planar_rotor(const ModelOptions& opt) { return std::make_shared<PlanarRotor>(opt); }

ModelPtr make_model(const std::string& name, const ModelOptions& opt) {
  if (name == "planar-rotor") return builtin_planar_rotor(opt);
  if (name == "quaternionic-adjoint" || name == "quaternionic") return builtin_quaternionic(opt);
  if (std::filesystem::exists(name)) return load_declarative_model_file(name, opt);
  fail(ErrorKind::Config, "unknown model '" + name + "'");
}

void adapted_to_ambient(const Model& m, const AdaptedPoint& p, Vec& Q, Vec& f) {
  Q = m.action_P(p.Qstar, p.a);
  f = m.rep_V(p.a) * p.ftilde;
}

AdaptedPoint ambient_to_adapted(const Model& m, const Vec& Q, const Vec& f) {
  Vec ap = m.gauge_element(Q);
  AdaptedPoint p;
  p.Qstar = m.action_P(Q, ap);
  p.ftilde = m.rep_V(ap) * f;
  p.a = m.inverse(ap);
  return p;
}

}  // namespace fibril
