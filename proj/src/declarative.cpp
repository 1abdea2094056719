#include "fibril/errors.hpp"
#include "fibril/models.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <fstream>

namespace fibril {

namespace {

// Sum of c · Π x_k^{p_k}.
struct Poly {
  struct Term {
    double c;
    std::vector<int> p;
  };
  std::vector<Term> terms;
  int nvar = 0;

  static Poly parse(const nlohmann::json& j, int nvar) {
    Poly q;
    q.nvar = nvar;
    if (j.is_number()) {
      q.terms.push_back({j.get<double>(), std::vector<int>(nvar, 0)});
      return q;
    }
    if (!j.is_array()) fail(ErrorKind::Config, "polynomial must be a number or a list of terms");
    for (const auto& t : j) {
      if (!t.is_array() || t.size() != 2 || !t[1].is_array() || t[1].size() != size_t(nvar))
        fail(ErrorKind::Config, "polynomial term must be [coef, [exponents x" + std::to_string(nvar) + "]]");
      Term term{t[0].get<double>(), t[1].get<std::vector<int>>()};
      for (int e : term.p)
        if (e < 0) fail(ErrorKind::Config, "negative exponent in polynomial");
      q.terms.push_back(term);
    }
    return q;
  }

  int degree() const {
    int d = 0;
    for (const auto& t : terms) {
      int s = 0;
      for (int e : t.p) s += e;
      if (t.c != 0.0) d = std::max(d, s);
    }
    return d;
  }

  // ∂^{k1}_{i} ∂^{k2}_{j} of one term evaluated at x.
  static double mono(const Term& t, const Vec& x, int i, int j) {
    double v = t.c;
    std::vector<int> p = t.p;
    for (int idx : {i, j}) {
      if (idx < 0) continue;
      if (p[idx] == 0) return 0.0;
      v *= p[idx];
      p[idx] -= 1;
    }
    for (size_t k = 0; k < p.size(); ++k)
      if (p[k]) v *= std::pow(x(k), p[k]);
    return v;
  }

  double eval(const Vec& x) const {
    double s = 0;
    for (const auto& t : terms) s += mono(t, x, -1, -1);
    return s;
  }
  double d(const Vec& x, const Vec& v) const {
    double s = 0;
    for (int i = 0; i < nvar; ++i)
      if (v(i) != 0.0)
        for (const auto& t : terms) s += v(i) * mono(t, x, i, -1);
    return s;
  }
  double dd(const Vec& x, const Vec& u, const Vec& v) const {
    double s = 0;
    for (int i = 0; i < nvar; ++i)
      for (int j = 0; j < nvar; ++j)
        if (u(i) != 0.0 && v(j) != 0.0)
          for (const auto& t : terms) s += u(i) * v(j) * mono(t, x, i, j);
    return s;
  }
};

Mat parse_matrix(const nlohmann::json& j, int r, int c, const char* what) {
  if (!j.is_array() || j.size() != size_t(r)) fail(ErrorKind::Config, std::string(what) + ": wrong row count");
  Mat m(r, c);
  for (int i = 0; i < r; ++i) {
    if (!j[i].is_array() || j[i].size() != size_t(c))
      fail(ErrorKind::Config, std::string(what) + ": wrong column count");
    for (int k = 0; k < c; ++k) m(i, k) = j[i][k].get<double>();
  }
  return m;
}

// Affine action F(Q, a) = [exp(a·T) (Q, 1)]_{1..n_P} with homogeneous generators T, and
// D̄(a) = exp(a·J̄). The group law is read off the combined matrix representation.
class Declarative final : public Model {
 public:
  Declarative(const nlohmann::json& s, const ModelOptions& opt)
      : Model(s.value("name", std::string("declarative")), s.at("n_P").get<int>(), s.at("n_V").get<int>(),
              s.at("n_G").get<int>(), opt) {
    const int np = nP_, nv = nV_, ng = nG_;
    const auto& tp = s.at("generators_P");
    const auto& tv = s.at("generators_V");
    if (tp.size() != size_t(ng) || tv.size() != size_t(ng))
      fail(ErrorKind::Config, "need one P and one V generator per group dimension");
    for (int a = 0; a < ng; ++a) {
      Mat t = parse_matrix(tp[a], np + 1, np + 1, "generators_P");
      if (t.row(np).cwiseAbs().maxCoeff() != 0.0)
        fail(ErrorKind::Config, "generators_P: last row of a homogeneous generator must vanish");
      T_.push_back(t);
      Jbar_.push_back(parse_matrix(tv[a], nv, nv, "generators_V"));
    }
    const auto& cs = s.at("structure_constants");
    if (cs.size() != size_t(ng)) fail(ErrorKind::Config, "structure_constants: need n_G slices");
    for (int g = 0; g < ng; ++g) c_.push_back(opt.structure_constant_scale * parse_matrix(cs[g], ng, ng, "structure_constants"));
    GV_ = opt.metric_V ? *opt.metric_V : parse_matrix(s.at("metric_V"), nv, nv, "metric_V");
    const auto& gp = s.at("metric_P");
    if (gp.size() != size_t(np)) fail(ErrorKind::Config, "metric_P: wrong row count");
    G_.resize(np * np);
    for (int i = 0; i < np; ++i)
      for (int k = 0; k < np; ++k) G_[i * np + k] = Poly::parse(gp[i].at(k), np);
    const auto& gg = s.at("gauge");
    if (gg.size() != size_t(ng)) fail(ErrorKind::Config, "gauge: need n_G components");
    gauge_linear_ = true;
    for (int a = 0; a < ng; ++a) {
      chi_.push_back(Poly::parse(gg[a], np));
      if (chi_.back().degree() > 1) gauge_linear_ = false;
    }
    group_volume_ = s.value("group_volume", 0.0);
    if (s.contains("chart_radius")) opt_.chart_radius = s.at("chart_radius").get<double>();
    const int big = np + 1 + nv;
    basis_.resize(big * big, ng);
    for (int a = 0; a < ng; ++a) {
      Eigen::MatrixXd b = Eigen::MatrixXd::Zero(big, big);
      b.topLeftCorner(np + 1, np + 1) = T_[a];
      b.bottomRightCorner(nv, nv) = Jbar_[a];
      basis_.col(a) = Eigen::Map<Eigen::VectorXd>(b.data(), big * big);
    }
  }

  Mat metric_P(const Vec& Q) const override {
    Mat g(nP_, nP_);
    for (int i = 0; i < nP_; ++i)
      for (int k = 0; k < nP_; ++k) g(i, k) = G_[i * nP_ + k].eval(Q);
    return g;
  }
  Vec action_P(const Vec& Q, const Vec& a) const override {
    Eigen::MatrixXd m = hom(a);
    Eigen::VectorXd q(nP_ + 1);
    q.head(nP_) = Q;
    q(nP_) = 1.0;
    return (m * q).head(nP_);
  }
  Mat rep_V(const Vec& a) const override {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(nV_, nV_);
    for (int k = 0; k < nG_; ++k) x += a(k) * Jbar_[k];
    return Mat(x.exp());
  }
  Vec gauge(const Vec& Q) const override {
    Vec r(nG_);
    for (int a = 0; a < nG_; ++a) r(a) = chi_[a].eval(Q);
    return r;
  }
  Mat u_bar(const Vec& a) const override { return frame(a, false); }
  Mat u_left(const Vec& a) const override { return frame(a, true); }
  Vec compose(const Vec& a1, const Vec& a2) const override {
    Eigen::MatrixXd prod = big(a2) * big(a1);
    return decompose(prod.log());
  }

 protected:
  Mat metric_P_d_impl(const Vec& Q, const Vec& v) const override {
    Mat g(nP_, nP_);
    for (int i = 0; i < nP_; ++i)
      for (int k = 0; k < nP_; ++k) g(i, k) = G_[i * nP_ + k].d(Q, v);
    return g;
  }
  Mat metric_P_dd_impl(const Vec& Q, const Vec& u, const Vec& v) const override {
    Mat g(nP_, nP_);
    for (int i = 0; i < nP_; ++i)
      for (int k = 0; k < nP_; ++k) g(i, k) = G_[i * nP_ + k].dd(Q, u, v);
    return g;
  }
  Mat action_P_jacobian_impl(const Vec&, const Vec& a) const override {
    return Mat(hom(a).topLeftCorner(nP_, nP_));
  }
  Mat killing_P_impl(const Vec& Q) const override {
    Mat k(nP_, nG_);
    for (int a = 0; a < nG_; ++a)
      k.col(a) = T_[a].topLeftCorner(nP_, nP_) * Q + T_[a].col(nP_).head(nP_);
    return k;
  }
  Mat killing_P_d_impl(const Vec&, const Vec& v) const override {
    Mat k(nP_, nG_);
    for (int a = 0; a < nG_; ++a) k.col(a) = T_[a].topLeftCorner(nP_, nP_) * v;
    return k;
  }
  Mat killing_P_dd_impl(const Vec&, const Vec&, const Vec&) const override { return zeros(nP_, nG_); }
  Mat gauge_grad_impl(const Vec& Q) const override {
    Mat g(nG_, nP_);
    for (int a = 0; a < nG_; ++a)
      for (int k = 0; k < nP_; ++k) {
        Vec e = Vec::Zero(nP_);
        e(k) = 1.0;
        g(a, k) = chi_[a].d(Q, e);
      }
    return g;
  }
  Mat gauge_grad_d_impl(const Vec& Q, const Vec& v) const override {
    Mat g(nG_, nP_);
    for (int a = 0; a < nG_; ++a)
      for (int k = 0; k < nP_; ++k) {
        Vec e = Vec::Zero(nP_);
        e(k) = 1.0;
        g(a, k) = chi_[a].dd(Q, e, v);
      }
    return g;
  }

 private:
  Eigen::MatrixXd hom(const Vec& a) const {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(nP_ + 1, nP_ + 1);
    for (int k = 0; k < nG_; ++k) x += a(k) * T_[k];
    return x.exp();
  }
  Eigen::MatrixXd big(const Vec& a) const {
    const int n = nP_ + 1 + nV_;
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
    b.topLeftCorner(nP_ + 1, nP_ + 1) = hom(a);
    b.bottomRightCorner(nV_, nV_) = rep_V(a);
    return b;
  }
  Vec decompose(const Eigen::MatrixXd& x) const {
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(x.data(), x.size());
    Eigen::VectorXd c = basis_.colPivHouseholderQr().solve(v);
    return Vec(c);
  }
  // Columns μ of M⁻¹∂_μM (right frame) or ∂_μM M⁻¹ (left frame) in generator coordinates.
  Mat frame(const Vec& a, bool left) const {
    Mat u(nG_, nG_);
    Eigen::MatrixXd m = big(a);
    Eigen::MatrixXd mi = m.inverse();
    for (int mu = 0; mu < nG_; ++mu) {
      Vec e = Vec::Zero(nG_);
      const double h = 1e-5;
      e(mu) = h;
      Eigen::MatrixXd dm = (big(a + e) - big(a - e)) / (2 * h);
      u.col(mu) = decompose(left ? Eigen::MatrixXd(dm * mi) : Eigen::MatrixXd(mi * dm));
    }
    return u;
  }

  std::vector<Mat> T_;
  std::vector<Poly> G_;
  std::vector<Poly> chi_;
  Eigen::MatrixXd basis_;
};

}  // namespace

ModelPtr load_declarative_model(const nlohmann::json& spec, const ModelOptions& opt) {
  try {
    return std::make_shared<Declarative>(spec, opt);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("declarative model: ") + e.what());
  }
}

ModelPtr load_declarative_model_file(const std::string& path, const ModelOptions& opt) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open model file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, path + ": " + e.what());
  }
  return load_declarative_model(j, opt);
}

}  // namespace fibril
