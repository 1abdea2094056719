#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace fibril {

// Every ambient dimension in this code is small, so matrices carry a compile-time
// capacity and never touch the heap.
constexpr int kMaxDim = 16;

using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

Vec vec(std::initializer_list<double> xs);
Mat zeros(int r, int c);
Mat eye(int n);

// Cholesky inverse of a symmetric positive-definite matrix. Throws NonPositiveDefinite.
Mat spd_inverse(const Mat& a, const char* what);
// Lower Cholesky factor L with L Lᵀ = a.
Mat cholesky_lower(const Mat& a, const char* what);
// Inverse via partial-pivot LU after a condition-number guard; throws SingularFaddeevPopov-style
// errors through the callback name.
Mat guarded_inverse(const Mat& a, double max_cond, const char* what);
double condition_number(const Mat& a);

// Orthonormal basis of ker(c), as columns.
Mat null_basis(const Mat& c);
// Moore-Penrose right inverse cᵀ(c cᵀ)⁻¹ of a full-row-rank matrix.
Mat right_pinv(const Mat& c);

Mat block_diag(const Mat& a, const Mat& b);
Mat sym(const Mat& a);
double max_abs(const Mat& a);

// Levi-Civita symbol on three indices (0-based).
double levi_civita(int i, int j, int k);

}  // namespace fibril
