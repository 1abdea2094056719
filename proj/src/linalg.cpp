#include "fibril/linalg.hpp"

#include "fibril/errors.hpp"

#include <cmath>

namespace fibril {

Vec vec(std::initializer_list<double> xs) {
  Vec v(static_cast<int>(xs.size()));
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

Mat zeros(int r, int c) { return Mat::Zero(r, c); }
Mat eye(int n) { return Mat::Identity(n, n); }

Mat spd_inverse(const Mat& a, const char* what) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) fail(ErrorKind::NonPositiveDefinite, what);
  return llt.solve(Mat::Identity(a.rows(), a.cols()));
}

Mat cholesky_lower(const Mat& a, const char* what) {
  Eigen::LLT<Mat> llt(a);
  if (llt.info() != Eigen::Success) fail(ErrorKind::NonPositiveDefinite, what);
  return llt.matrixL();
}

double condition_number(const Mat& a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<Mat> svd(a);
  const auto& s = svd.singularValues();
  double lo = s(s.size() - 1);
  if (lo <= 0.0) return INFINITY;
  return s(0) / lo;
}

Mat guarded_inverse(const Mat& a, double max_cond, const char* what) {
  if (a.rows() == 1) {
    if (std::abs(a(0, 0)) < 1.0 / max_cond) fail(ErrorKind::SingularFaddeevPopov, what);
    Mat r(1, 1);
    r(0, 0) = 1.0 / a(0, 0);
    return r;
  }
  if (!(condition_number(a) <= max_cond)) fail(ErrorKind::SingularFaddeevPopov, what);
  return a.partialPivLu().inverse();
}

Mat null_basis(const Mat& c) {
  const int n = static_cast<int>(c.cols());
  const int r = static_cast<int>(c.rows());
  if (r == 0) return eye(n);
  Eigen::JacobiSVD<Mat> svd(c, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(n - r);
}

Mat right_pinv(const Mat& c) {
  Mat cct = c * c.transpose();
  return c.transpose() * cct.llt().solve(Mat::Identity(c.rows(), c.rows()));
}

Mat block_diag(const Mat& a, const Mat& b) {
  Mat r = Mat::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  r.topLeftCorner(a.rows(), a.cols()) = a;
  r.bottomRightCorner(b.rows(), b.cols()) = b;
  return r;
}

Mat sym(const Mat& a) { return 0.5 * (a + a.transpose()); }

double max_abs(const Mat& a) { return a.size() ? a.cwiseAbs().maxCoeff() : 0.0; }

double levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0.0;
  return ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
}

}  // namespace fibril
