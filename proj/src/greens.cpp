#include "fibril/errors.hpp"
#include "fibril/reduction.hpp"

#include <cmath>

namespace fibril {

namespace {

struct SurfaceTarget {
  AdaptedPoint a, b;
  Vec Yb;          // (Q*_b, f̃_b)
  Mat GH;          // G̃^H at the target
  Mat whiten;      // m×n, maps ΔX to orthonormal surface coordinates
  int dim = 0;
  double d_a = 0.0, d_b = 0.0;
};

SurfaceTarget surface_target(const Model& m, const Vec& pa, const Vec& va, const Vec& pb, const Vec& vb) {
  SurfaceTarget s;
  s.a = ambient_to_adapted(m, pa, va);
  s.b = ambient_to_adapted(m, pb, vb);
  GeometricFrame Fa = frame(m, s.a), Fb = frame(m, s.b);
  s.d_a = Fa.det_d;
  s.d_b = Fb.det_d;
  s.Yb.resize(m.n());
  s.Yb << s.b.Qstar, s.b.ftilde;
  s.GH = Fb.GH;
  s.dim = Fb.m;
  Mat g = Fb.E.transpose() * Fb.GH * Fb.E;
  s.whiten = cholesky_lower(g, "surface metric").transpose() * Fb.E.transpose();
  return s;
}

struct OrbitTarget {
  std::vector<Vec> X;
  std::vector<Mat> G;
  std::vector<double> w;
  std::vector<Vec> a;
};

OrbitTarget orbit_target(const Model& m, const Vec& pb, const Vec& vb) {
  OrbitTarget o;
  const auto& nodes = haar_nodes(m);
  for (const auto& nd : nodes) {
    Vec Q = m.action_P(pb, nd.a), f = m.rep_V(nd.a) * vb;
    Vec X(m.n());
    X << Q, f;
    o.X.push_back(X);
    o.G.push_back(block_diag(m.metric_P(Q), m.metric_V()));
    o.w.push_back(nd.w);
    o.a.push_back(nd.a);
  }
  return o;
}

std::uint64_t rhs_seed(std::uint64_t seed) { return path_seed(seed, 0xa5a5a5a5a5a5a5a5ULL); }

struct PathEnd {
  bool ok = false;
  Vec X;
  double weight = 1.0;
  std::vector<CMat> O;
};

std::vector<PathEnd> run(const Model& m, ProcessKind kind, const Vec& start, std::uint64_t seed,
                         const GreensOptions& opt, const SimOptions& so) {
  std::vector<PathEnd> out(opt.n_paths);
  simulate_path(m, opt.scales, kind, start, 0.0, opt.dt, 0, {});
  parallel_for(static_cast<int>(opt.n_paths), worker_count(opt.threads), [&](int i) {
    Trajectory T = simulate_path(m, opt.scales, kind, start, opt.t, opt.dt, path_seed(seed, i), so);
    PathEnd& e = out[i];
    if (T.failed) return;
    e.ok = true;
    e.X = T.final_state;
    double logw = T.potential_integral / (opt.scales.mu2kappa * opt.scales.mass);
    if (so.girsanov) logw += T.jacobian_integral;
    e.weight = std::exp(logw);
    e.O = T.ordered_exp;
  });
  long failed = 0;
  for (const auto& e : out) failed += !e.ok;
  check_failure_fraction(static_cast<int>(failed), static_cast<int>(opt.n_paths));
  return out;
}

double pick_bandwidth(const std::vector<PathEnd>& ends, const SurfaceTarget& s, const GreensOptions& opt) {
  if (opt.bandwidth > 0.0) return opt.bandwidth;
  std::vector<Vec> y;
  y.reserve(ends.size());
  for (const auto& e : ends)
    if (e.ok) y.push_back(s.whiten * (e.X - s.Yb));
  return scalar_bandwidth(y, opt.bandwidth_scale);
}

void require_effective(const EstimatorResult& r, const GreensOptions& opt, const char* side) {
  if (r.n_effective < opt.min_effective)
    fail(ErrorKind::InsufficientSamples, std::string(side) + " kernel-density effective count " +
                                             std::to_string(r.n_effective) + " < " +
                                             std::to_string(opt.min_effective));
}

Vec start_of(const SurfaceTarget& s) {
  Vec x(s.Yb.size());
  x << s.a.Qstar, s.a.ftilde;
  return x;
}

}  // namespace

GreensResult greens_relation_zero_momentum(const Model& m, const Vec& pa, const Vec& va, const Vec& pb,
                                           const Vec& vb, const GreensOptions& opt) {
  const SurfaceTarget s = surface_target(m, pa, va, pb, vb);
  const OrbitTarget o = orbit_target(m, pb, vb);
  const double vol = m.group_volume();
  const int n = m.n();

  SimOptions lo;
  lo.girsanov = true;
  lo.feynman_kac = true;
  auto L = run(m, ProcessKind::ReducedNoJ2, start_of(s), opt.seed, opt, lo);
  GreensResult r;
  r.bandwidth = pick_bandwidth(L, s, opt);
  const double h = r.bandwidth;
  const double pref = opt.include_d_factors ? std::pow(s.d_a * s.d_b, -0.25) : 1.0;
  std::vector<cplx> cl, cc;
  for (const auto& e : L) {
    if (!e.ok) continue;
    double k = e.weight * gaussian_kernel(e.X - s.Yb, s.GH, h, s.dim);
    cl.push_back(pref * k);
    cc.push_back(k);
  }
  r.lhs = estimate_mean(cl, opt.n_paths, opt.seed);
  r.lhs_without_d = estimate_mean(cc, opt.n_paths, opt.seed);

  Vec xa(n);
  xa << pa, va;
  SimOptions ro;
  ro.feynman_kac = true;
  auto R = run(m, ProcessKind::Original, xa, rhs_seed(opt.seed), opt, ro);
  std::vector<cplx> cr;
  for (const auto& e : R) {
    if (!e.ok) continue;
    double acc = 0.0;
    for (std::size_t k = 0; k < o.X.size(); ++k) acc += o.w[k] * gaussian_kernel(e.X - o.X[k], o.G[k], h, n);
    cr.push_back(vol * e.weight * acc);
  }
  r.rhs = estimate_mean(cr, opt.n_paths, rhs_seed(opt.seed));
  require_effective(r.lhs, opt, "reduced-side");
  require_effective(r.rhs, opt, "original-side");
  r.z_score = std::abs(r.lhs.value - r.rhs.value) / std::hypot(r.lhs.stderr_, r.rhs.stderr_);
  r.z_without_d = std::abs(r.lhs_without_d.value - r.rhs.value) / std::hypot(r.lhs_without_d.stderr_, r.rhs.stderr_);
  return r;
}

std::vector<MomentumResult> greens_relation_momentum(const Model& m, const std::vector<IrrepSpec>& irreps,
                                                     const Vec& pa, const Vec& va, const Vec& pb, const Vec& vb,
                                                     const GreensOptions& opt) {
  const SurfaceTarget s = surface_target(m, pa, va, pb, vb);
  const OrbitTarget o = orbit_target(m, pb, vb);
  const double vol = m.group_volume();
  const int n = m.n();

  SimOptions lo;
  lo.feynman_kac = true;
  for (const auto& ir : irreps) lo.irreps.push_back(&ir);
  auto L = run(m, ProcessKind::Reduced, start_of(s), opt.seed, opt, lo);
  const double h = pick_bandwidth(L, s, opt);
  const double pref = opt.include_d_factors ? std::pow(s.d_b, -0.5) : 1.0;

  Vec xa(n);
  xa << pa, va;
  SimOptions ro;
  ro.feynman_kac = true;
  auto R = run(m, ProcessKind::Original, xa, rhs_seed(opt.seed), opt, ro);

  std::vector<double> kl, kr_w;
  std::vector<std::vector<double>> kr;  // per path, per orbit node
  for (const auto& e : L)
    if (e.ok) kl.push_back(pref * e.weight * gaussian_kernel(e.X - s.Yb, s.GH, h, s.dim));
  for (const auto& e : R) {
    if (!e.ok) continue;
    std::vector<double> row(o.X.size());
    for (std::size_t k = 0; k < o.X.size(); ++k) row[k] = o.w[k] * gaussian_kernel(e.X - o.X[k], o.G[k], h, n);
    kr.push_back(std::move(row));
    kr_w.push_back(vol * e.weight);
  }

  std::vector<MomentumResult> out;
  for (std::size_t ir = 0; ir < irreps.size(); ++ir) {
    const IrrepSpec& irrep = irreps[ir];
    const int D = irrep.dim;
    std::vector<CMat> Dn;
    for (const auto& a : o.a) Dn.push_back(irrep.evaluate(a));
    std::vector<CMat> cl, cr;
    std::size_t j = 0;
    for (const auto& e : L)
      if (e.ok) cl.push_back(kl[j++] * e.O[ir]);
    for (std::size_t i = 0; i < kr.size(); ++i) {
      CMat acc = CMat::Zero(D, D);
      for (std::size_t k = 0; k < o.X.size(); ++k) acc += kr[i][k] * Dn[k];
      cr.push_back(kr_w[i] * acc);
    }
    MomentumResult r;
    r.bandwidth = h;
    r.lhs = r.rhs = r.lhs_err = r.rhs_err = CMat::Zero(D, D);
    r.excluded_fraction = 1.0 - static_cast<double>(cl.size() + cr.size()) / (2.0 * opt.n_paths);
    for (int p = 0; p < D; ++p) {
      for (int q = 0; q < D; ++q) {
        std::vector<cplx> a, b;
        for (const auto& c : cl) a.push_back(c(p, q));
        for (const auto& c : cr) b.push_back(c(p, q));
        EstimatorResult el = estimate_mean(a, opt.n_paths, opt.seed);
        EstimatorResult er = estimate_mean(b, opt.n_paths, rhs_seed(opt.seed));
        r.lhs(p, q) = el.value;
        r.rhs(p, q) = er.value;
        r.lhs_err(p, q) = el.stderr_;
        r.rhs_err(p, q) = er.stderr_;
        double se = std::hypot(el.stderr_, er.stderr_);
        if (se > 0) r.max_z = std::max(r.max_z, std::abs(el.value - er.value) / se);
        if (p == 0 && q == 0) {
          r.n_effective_lhs = el.n_effective;
          r.n_effective_rhs = er.n_effective;
        }
      }
    }
    out.push_back(r);
  }
  // Effective counts come from the kernel weights alone, shared by every irrep.
  EstimatorResult el = estimate_mean(std::vector<cplx>(kl.begin(), kl.end()), opt.n_paths, opt.seed);
  std::vector<cplx> rr;
  for (std::size_t i = 0; i < kr.size(); ++i) {
    double acc = 0.0;
    for (double v : kr[i]) acc += v;
    rr.push_back(kr_w[i] * acc);
  }
  EstimatorResult er = estimate_mean(rr, opt.n_paths, opt.seed);
  require_effective(el, opt, "reduced-side");
  require_effective(er, opt, "original-side");
  return out;
}

MomentumResult greens_relation_momentum(const Model& m, const IrrepSpec& irrep, const Vec& pa, const Vec& va,
                                        const Vec& pb, const Vec& vb, const GreensOptions& opt) {
  return greens_relation_momentum(m, std::vector<IrrepSpec>{irrep}, pa, va, pb, vb, opt).front();
}

EstimatorResult original_density_at(const Model& m, const Vec& start, const Vec& target, double h,
                                    const GreensOptions& opt) {
  auto R = run(m, ProcessKind::Original, start, opt.seed, opt, SimOptions{});
  const int n = m.n();
  Mat G = block_diag(m.metric_P(target.head(m.nP())), m.metric_V());
  std::vector<cplx> c;
  for (const auto& e : R)
    if (e.ok) c.push_back(gaussian_kernel(e.X - target, G, h, n));
  return estimate_mean(c, opt.n_paths, opt.seed);
}

}  // namespace fibril
