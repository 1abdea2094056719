#include "fibril/irreps.hpp"

#include "fibril/errors.hpp"
#include "fibril/quaternion.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <numbers>

namespace fibril {

bool IrrepSpec::trivial() const {
  if (dim != 1) return false;
  for (const auto& g : generators)
    if (g.norm() != 0.0) return false;
  return true;
}

IrrepSpec trivial_irrep(int nG) {
  IrrepSpec r;
  r.label = "trivial";
  r.dim = 1;
  r.generators.assign(nG, CMat::Zero(1, 1));
  r.evaluate = [](const Vec&) { return CMat::Identity(1, 1); };
  return r;
}

IrrepSpec so2_charge(int k) {
  IrrepSpec r;
  r.label = "so2:" + std::to_string(k);
  r.dim = 1;
  r.generators = {CMat::Constant(1, 1, cplx(0.0, k))};
  r.evaluate = [k](const Vec& a) { return CMat::Constant(1, 1, std::exp(cplx(0.0, k * a(0)))); };
  return r;
}

IrrepSpec su2_spin_half() {
  // Quaternion units i, j, k map to −iσ₁, −iσ₂, −iσ₃.
  const cplx I(0.0, 1.0);
  CMat s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -I, I, 0;
  s3 << 1, 0, 0, -1;
  IrrepSpec r;
  r.label = "su2:1/2";
  r.dim = 2;
  r.generators = {-I * s1, -I * s2, -I * s3};
  auto gens = r.generators;
  r.evaluate = [gens](const Vec& a) {
    double t = a.norm();
    CMat A = a(0) * gens[0] + a(1) * gens[1] + a(2) * gens[2];
    double s = t < 1e-12 ? 1.0 - t * t / 6.0 : std::sin(t) / t;
    return CMat(std::cos(t) * CMat::Identity(2, 2) + s * A);
  };
  return r;
}

IrrepSpec parse_irrep(const std::string& text, const Model& m) {
  if (text.empty() || text == "trivial") return trivial_irrep(m.nG());
  if (text.rfind("so2:", 0) == 0) {
    if (m.nG() != 1) fail(ErrorKind::Config, "irrep " + text + " needs a one-dimensional group");
    try {
      return so2_charge(std::stoi(text.substr(4)));
    } catch (const std::logic_error&) {
      fail(ErrorKind::Config, "bad SO(2) charge in '" + text + "'");
    }
  }
  if (text == "su2:1/2") {
    if (m.nG() != 3) fail(ErrorKind::Config, "irrep su2:1/2 needs a three-dimensional group");
    return su2_spin_half();
  }
  fail(ErrorKind::Config, "unknown irrep '" + text + "'");
}

namespace {

std::vector<HaarNode> so2_nodes() {
  const int K = 256;
  std::vector<HaarNode> out;
  out.reserve(K);
  for (int i = 0; i < K; ++i) out.push_back({vec({2.0 * std::numbers::pi * i / K}), 1.0 / K});
  return out;
}

// Unit quaternion (cos η cos ξ₁, cos η sin ξ₁, sin η cos ξ₂, sin η sin ξ₂); the Haar density is
// uniform in u = cos 2η and in both phases.
std::vector<HaarNode> su2_nodes() {
  const int n1 = 32, n2 = 32;
  using GL = boost::math::quadrature::gauss<double, 16>;
  std::vector<double> u, wu;
  for (std::size_t i = 0; i < GL::abscissa().size(); ++i) {
    double x = GL::abscissa()[i], w = GL::weights()[i];
    u.push_back(x);
    wu.push_back(w);
    if (x != 0.0) {
      u.push_back(-x);
      wu.push_back(w);
    }
  }
  std::vector<HaarNode> out;
  out.reserve(u.size() * n1 * n2);
  for (std::size_t k = 0; k < u.size(); ++k) {
    double eta = 0.5 * std::acos(u[k]);
    for (int i = 0; i < n1; ++i) {
      double x1 = 2.0 * std::numbers::pi * (i + 0.5) / n1;
      for (int j = 0; j < n2; ++j) {
        double x2 = 2.0 * std::numbers::pi * (j + 0.5) / n2;
        Vec q = vec({std::cos(eta) * std::cos(x1), std::cos(eta) * std::sin(x1), std::sin(eta) * std::cos(x2),
                     std::sin(eta) * std::sin(x2)});
        out.push_back({quat::log3(q), 0.5 * wu[k] / (n1 * n2)});
      }
    }
  }
  return out;
}

}  // namespace

const std::vector<HaarNode>& haar_nodes(const Model& m) {
  static const std::vector<HaarNode> so2 = so2_nodes();
  static const std::vector<HaarNode> su2 = su2_nodes();
  if (m.group_volume() <= 0.0) fail(ErrorKind::Config, "model '" + m.name() + "' has no compact group");
  if (m.nG() == 1) return so2;
  if (m.nG() == 3) return su2;
  fail(ErrorKind::Config, "no Haar quadrature for a group of dimension " + std::to_string(m.nG()));
}

cplx haar_average(const Model& m, const std::function<cplx(const Vec&)>& f) {
  cplx s = 0.0;
  for (const auto& nd : haar_nodes(m)) s += nd.w * f(nd.a);
  return s;
}

CMat haar_average_matrix(const Model& m, int rows, int cols, const std::function<CMat(const Vec&)>& f) {
  CMat s = CMat::Zero(rows, cols);
  for (const auto& nd : haar_nodes(m)) s += nd.w * f(nd.a);
  return s;
}

}  // namespace fibril
