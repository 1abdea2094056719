#include "fibril/quaternion.hpp"

#include "fibril/models.hpp"

#include <cmath>

namespace fibril {

namespace quat {

Vec mul(const Vec& p, const Vec& q) {
  Vec r(4);
  r(0) = p(0) * q(0) - p(1) * q(1) - p(2) * q(2) - p(3) * q(3);
  r(1) = p(0) * q(1) + p(1) * q(0) + p(2) * q(3) - p(3) * q(2);
  r(2) = p(0) * q(2) - p(1) * q(3) + p(2) * q(0) + p(3) * q(1);
  r(3) = p(0) * q(3) + p(1) * q(2) - p(2) * q(1) + p(3) * q(0);
  return r;
}

Vec conj(const Vec& q) { return vec({q(0), -q(1), -q(2), -q(3)}); }

Vec exp3(const Vec& a) {
  double t = a.norm();
  double s = t < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
  return vec({std::cos(t), s * a(0), s * a(1), s * a(2)});
}

Vec log3(const Vec& q) {
  Vec v = q.tail(3);
  double vn = v.norm();
  double t = std::atan2(vn, q(0));
  double k = vn < 1e-14 ? 1.0 / q(0) : t / vn;
  return k * v;
}

Mat right_mul_matrix(const Vec& g) {
  Mat r(4, 4);
  r << g(0), -g(1), -g(2), -g(3),
       g(1), g(0), g(3), -g(2),
       g(2), -g(3), g(0), g(1),
       g(3), g(2), -g(1), g(0);
  return r;
}

Mat hat(const Vec& a) {
  Mat h(3, 3);
  h << 0, -a(2), a(1), a(2), 0, -a(0), -a(1), a(0), 0;
  return h;
}

}  // namespace quat

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Coeffs {
  double s, c1, c2;  // sinθ/θ, (1-cosθ)/θ², (θ-sinθ)/θ³
};

Coeffs series(double t) {
  double t2 = t * t;
  if (t < 1e-4) return {1.0 - t2 / 6.0, 0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0};
  return {std::sin(t) / t, (1.0 - std::cos(t)) / t2, (t - std::sin(t)) / (t2 * t)};
}

// SU(2) acting on R⁴ = H by right multiplication, adjoint action on R³ = Im H.
// Generators e_α = (i, j, k) give [e₁, e₂] = 2e₃, so c^γ_{αβ} = 2ε_{αβγ}.
class Quaternionic final : public Model {
 public:
  explicit Quaternionic(const ModelOptions& opt) : Model("quaternionic-adjoint", 4, 3, 3, opt) {
    GV_ = opt.metric_V ? *opt.metric_V : Mat(0.25 * eye(3));
    for (int al = 0; al < 3; ++al) {
      Mat j(3, 3);
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) j(b, c) = 2.0 * levi_civita(al, b, c);
      Jbar_.push_back(j);
      Vec e = Vec::Zero(4);
      e(al + 1) = 1.0;
      gen_.push_back(quat::right_mul_matrix(e));
    }
    for (int g = 0; g < 3; ++g) {
      Mat c(3, 3);
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) c(a, b) = 2.0 * opt.structure_constant_scale * levi_civita(a, b, g);
      c_.push_back(c);
    }
    group_volume_ = 2.0 * kPi * kPi;
    gauge_linear_ = true;
  }

  Mat metric_P(const Vec&) const override { return eye(4); }
  Vec action_P(const Vec& Q, const Vec& a) const override { return quat::mul(Q, quat::exp3(a)); }
  Mat rep_V(const Vec& a) const override {
    Mat A = 2.0 * quat::hat(a);
    Coeffs k = series(2.0 * a.norm());
    return eye(3) - k.s * A + k.c1 * A * A;
  }
  Vec gauge(const Vec& Q) const override { return Q.tail(3); }
  Mat u_bar(const Vec& a) const override {
    Mat A = 2.0 * quat::hat(a);
    Coeffs k = series(2.0 * a.norm());
    return eye(3) + k.c1 * A + k.c2 * A * A;
  }
  Mat u_left(const Vec& a) const override {
    Mat A = 2.0 * quat::hat(a);
    Coeffs k = series(2.0 * a.norm());
    return eye(3) - k.c1 * A + k.c2 * A * A;
  }
  Vec compose(const Vec& a1, const Vec& a2) const override {
    return quat::log3(quat::mul(quat::exp3(a1), quat::exp3(a2)));
  }
  Vec gauge_element(const Vec& Q) const override { return quat::log3(quat::conj(Q) / Q.norm()); }

 protected:
  Mat metric_P_d_impl(const Vec&, const Vec&) const override { return zeros(4, 4); }
  Mat metric_P_dd_impl(const Vec&, const Vec&, const Vec&) const override { return zeros(4, 4); }
  Mat action_P_jacobian_impl(const Vec&, const Vec& a) const override {
    return quat::right_mul_matrix(quat::exp3(a));
  }
  Mat killing_P_impl(const Vec& Q) const override { return killing_P_d_impl(Q, Q); }
  Mat killing_P_d_impl(const Vec&, const Vec& v) const override {
    Mat k(4, 3);
    for (int al = 0; al < 3; ++al) k.col(al) = gen_[al] * v;
    return k;
  }
  Mat killing_P_dd_impl(const Vec&, const Vec&, const Vec&) const override { return zeros(4, 3); }
  Mat gauge_grad_impl(const Vec&) const override {
    Mat g = zeros(3, 4);
    g.rightCols(3) = eye(3);
    return g;
  }
  Mat gauge_grad_d_impl(const Vec&, const Vec&) const override { return zeros(3, 4); }

 private:
  std::vector<Mat> gen_;
};

}  // namespace

ModelPtr builtin_quaternionic(const ModelOptions& opt) { return std::make_shared<Quaternionic>(opt); }

}  // namespace fibril
