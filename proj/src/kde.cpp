#include "fibril/errors.hpp"
#include "fibril/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fibril {

EstimatorResult estimate_mean(const std::vector<cplx>& c, long n_total, std::uint64_t seed) {
  EstimatorResult r;
  r.n_paths = n_total;
  r.seed = seed;
  const long n = static_cast<long>(c.size());
  r.excluded_fraction = n_total > 0 ? 1.0 - static_cast<double>(n) / n_total : 0.0;
  if (n == 0) return r;
  cplx sum = 0.0;
  double sabs = 0.0, sabs2 = 0.0;
  for (const auto& v : c) {
    sum += v;
    sabs += std::abs(v);
    sabs2 += std::norm(v);
  }
  r.value = sum / static_cast<double>(n);
  double var = 0.0;
  for (const auto& v : c) var += std::norm(v - r.value);
  r.stderr_ = n > 1 ? std::sqrt(var / (static_cast<double>(n) * (n - 1))) : 0.0;
  r.n_effective = sabs2 > 0.0 ? sabs * sabs / sabs2 : 0.0;
  return r;
}

double silverman_factor(int dim, long n) {
  return std::pow(4.0 / (dim + 2.0), 1.0 / (dim + 4.0)) * std::pow(static_cast<double>(n), -1.0 / (dim + 4.0));
}

double scalar_bandwidth(const std::vector<Vec>& samples, double scale) {
  if (samples.size() < 2) fail(ErrorKind::InsufficientSamples, "bandwidth needs at least two samples");
  const int dim = static_cast<int>(samples.front().size());
  const std::size_t n = samples.size();
  double log_gm = 0.0;
  std::vector<double> col(n);
  for (int i = 0; i < dim; ++i) {
    double mean = 0.0;
    for (std::size_t k = 0; k < n; ++k) mean += (col[k] = samples[k](i));
    mean /= n;
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / (n - 1.0));
    auto q = [&](double p) {
      auto it = col.begin() + static_cast<long>(p * (n - 1));
      std::nth_element(col.begin(), it, col.end());
      return *it;
    };
    double iqr = q(0.75) - q(0.25);
    double spread = iqr > 0.0 ? std::min(sd, iqr / 1.349) : sd;
    log_gm += std::log(spread);
  }
  return scale * silverman_factor(dim, static_cast<long>(n)) * std::exp(log_gm / dim);
}

double gaussian_kernel(const Vec& dx, const Mat& g, double h, int dim) {
  double q = dx.dot(g * dx);
  return std::pow(2.0 * std::numbers::pi * h * h, -0.5 * dim) * std::exp(-0.5 * q / (h * h));
}

}  // namespace fibril
