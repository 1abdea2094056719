#include "fibril/sde.hpp"

#include "fibril/curvature.hpp"
#include "fibril/errors.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <random>
#include <thread>

namespace fibril {

double PhysicalScales::noise() const { return std::sqrt(mu2kappa); }

const char* process_name(ProcessKind k) {
  switch (k) {
    case ProcessKind::Original: return "original";
    case ProcessKind::Adapted: return "adapted";
    case ProcessKind::Reduced: return "reduced";
    case ProcessKind::ReducedNoJ2: return "reduced-noj2";
  }
  return "?";
}

ProcessKind parse_process(const std::string& s) {
  if (s == "original") return ProcessKind::Original;
  if (s == "adapted") return ProcessKind::Adapted;
  if (s == "reduced") return ProcessKind::Reduced;
  if (s == "reduced-noj2") return ProcessKind::ReducedNoJ2;
  fail(ErrorKind::Config, "unknown process '" + s + "'");
}

int state_dim(const Model& m, ProcessKind k) { return k == ProcessKind::Adapted ? m.n() + m.nG() : m.n(); }

Mat diffusion_factor(const Mat& block) { return cholesky_lower(block, "inverse metric block"); }

ReducedCoefficients reduced_coefficients(const Model& m, const Vec& Qstar, const Vec& ftilde, bool jacobian,
                                         bool group) {
  GeometricFrame F = frame(m, Qstar, ftilde);
  FrameJet J;
  frame_jet(m, F, jacobian, J);
  ReducedCoefficients c;
  Vec gen;
  divergence_drifts(m, F, J, nullptr, c.b_div, nullptr, group ? &gen : nullptr);
  c.j2 = 0.25 * F.h * J.dsigma;
  c.X1 = F.X1;
  c.sigma = F.sigma;
  c.dsigma = J.dsigma;
  if (jacobian) {
    double lap = (F.h.array() * J.ddsigma.array()).sum() + 2.0 * (c.b_div - c.j2).dot(J.dsigma);
    c.J = -0.125 * (lap + 0.25 * J.dsigma.dot(F.h * J.dsigma));
  }
  if (group) {
    c.d_inv = F.d_inv;
    c.group_drift = gen;
    c.group_noise = F.Lt * F.Pi * block_diag(F.X, F.XV);
  }
  return c;
}

namespace {

void check_chart(const Model& m, const Vec& Q) {
  if (!m.in_chart(Q)) fail(ErrorKind::ChartExit, "state left the model chart");
}

Vec original_drift(const Model& m, const Vec& Q) {
  const int nP = m.nP();
  Mat G_inv = spd_inverse(m.metric_P(Q), "metric_P");
  Vec b = Vec::Zero(nP);
  for (int k = 0; k < nP; ++k) {
    Vec e = Vec::Zero(nP);
    e(k) = 1.0;
    Mat dG = m.metric_P_d(Q, e);
    Mat dGinv = -G_inv * dG * G_inv;
    b += dGinv.col(k);
    b += 0.5 * (G_inv * dG).trace() * G_inv.col(k);
  }
  return 0.5 * b;
}

}  // namespace

Vec step_original(const Model& m, const PhysicalScales& s, const Vec& state, double dt, const Vec& dW) {
  const int nP = m.nP(), nV = m.nV();
  Vec Q = state.head(nP), f = state.tail(nV);
  check_chart(m, Q);
  Mat X = diffusion_factor(spd_inverse(m.metric_P(Q), "metric_P"));
  Mat XV = diffusion_factor(spd_inverse(m.metric_V(), "metric_V"));
  Vec out(nP + nV);
  out << Q + s.mu2kappa * original_drift(m, Q) * dt + s.noise() * X * dW.head(nP),
      f + s.noise() * XV * dW.tail(nV);
  check_chart(m, out.head(nP));
  return out;
}

Vec reproject(const Model& m, Vec& Q, Vec& f, double tol) {
  Vec total = Vec::Zero(m.nG());
  if (m.gauge_linear()) return total;
  Vec Q0 = Q;
  for (int it = 0; it < 5; ++it) {
    Vec chi = m.gauge(Q);
    if (chi.lpNorm<Eigen::Infinity>() <= tol) break;
    Mat FP, FP_inv;
    faddeev_popov(m, Q, FP, FP_inv);
    total = m.compose(total, -FP_inv * chi);
    Q = m.action_P(Q0, total);
  }
  if (m.gauge(Q).lpNorm<Eigen::Infinity>() > tol)
    fail(ErrorKind::SurfaceDrift, "re-projection onto the gauge surface did not converge");
  f = m.rep_V(total) * f;
  return total;
}

Vec step_adapted(const Model& m, const PhysicalScales& s, const Vec& state, double dt, const Vec& dW) {
  const int nP = m.nP(), nV = m.nV(), nG = m.nG(), n = nP + nV;
  Vec Q = state.head(nP), f = state.segment(nP, nV), a = state.tail(nG);
  check_chart(m, Q);
  GeometricFrame F = frame(m, Q, f);
  FrameJet J;
  frame_jet(m, F, false, J);
  Vec b, bG;
  divergence_drifts(m, F, J, &a, b, &bG, nullptr);
  Vec xdw = F.X * dW.head(nP);
  Vec x = Vec(n);
  x << Q, f;
  x += s.mu2kappa * b * dt + s.noise() * F.X1 * dW;
  Vec a1 = a + s.mu2kappa * bG * dt + s.noise() * m.v_bar(a) * F.Lambda * xdw;
  Vec Q1 = x.head(nP), f1 = x.tail(nV);
  if (!m.gauge_linear()) {
    // The shift moves along the orbit; compensate in a so the ambient point is unchanged.
    Vec shift = reproject(m, Q1, f1);
    a1 = m.compose(m.inverse(shift), a1);
  }
  check_chart(m, Q1);
  Vec out(n + nG);
  out << Q1, f1, a1;
  return out;
}

Vec step_reduced(const Model& m, const PhysicalScales& s, const Vec& state, double dt, const Vec& dW,
                 bool include_j2) {
  const int nP = m.nP(), nV = m.nV();
  Vec Q = state.head(nP), f = state.tail(nV);
  check_chart(m, Q);
  ReducedCoefficients c = reduced_coefficients(m, Q, f, false, false);
  Vec drift = include_j2 ? c.b_div : Vec(c.b_div - c.j2);
  Vec x = state + s.mu2kappa * drift * dt + s.noise() * c.X1 * dW;
  Vec Q1 = x.head(nP), f1 = x.tail(nV);
  reproject(m, Q1, f1);
  check_chart(m, Q1);
  x << Q1, f1;
  return x;
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ mix(index + 0x632be59bd9b4e019ULL));
}

Trajectory simulate_path(const Model& m, const PhysicalScales& s, ProcessKind kind, const Vec& start,
                         double t_final, double dt, std::uint64_t seed, const SimOptions& opt) {
  if (s.imaginary_kappa) fail(ErrorKind::Config, "imaginary κ cannot be simulated");
  if (!(s.mu2kappa > 0.0) || !(s.mass > 0.0)) fail(ErrorKind::Config, "μ²κ and m must be positive");
  if (!(t_final >= 0.0) || !(dt > 0.0)) fail(ErrorKind::Config, "need t ≥ 0 and Δt > 0");
  const long steps = std::lround(t_final / dt);
  if (std::abs(steps * dt - t_final) > 1e-9 * std::max(1.0, t_final))
    fail(ErrorKind::Config, "Δt must divide the horizon");
  if (start.size() != state_dim(m, kind)) fail(ErrorKind::Config, "start point has the wrong dimension");

  const int nP = m.nP(), nV = m.nV(), n = nP + nV;
  const bool reduced = kind == ProcessKind::Reduced || kind == ProcessKind::ReducedNoJ2;
  const bool with_j2 = kind == ProcessKind::Reduced;
  bool group = false;
  for (const auto* ir : opt.irreps) group = group || (reduced && !ir->trivial());
  const bool girs = reduced && opt.girsanov;

  Trajectory T;
  T.kind = kind;
  T.seed = seed;
  T.start = start;
  for (const auto* ir : opt.irreps) T.ordered_exp.push_back(CMat::Identity(ir->dim, ir->dim));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sdt = std::sqrt(dt);

  auto potential_at = [&](const Vec& x) { return m.potential(x.head(nP), x.segment(nP, nV)); };

  Vec x = start;
  int k = 0;
  try {
    if (reduced) {
      Vec Q = x.head(nP), f = x.tail(nV);
      reproject(m, Q, f);
      x << Q, f;
    }
    if (opt.record_states) {
      T.times.reserve(steps + 1);
      T.states.reserve(steps + 1);
      T.dW.reserve(steps);
      T.times.push_back(0.0);
      T.states.push_back(x);
    }
    double V_prev = opt.feynman_kac ? potential_at(x) : 0.0;
    double J_prev = 0.0, sigma0 = 0.0;
    ReducedCoefficients c;
    bool have_c = false;
    if (reduced) {
      c = reduced_coefficients(m, x.head(nP), x.tail(nV), girs, group);
      have_c = true;
      sigma0 = c.sigma;
      J_prev = c.J;
    }
    Vec dW(n);
    for (k = 0; k < steps; ++k) {
      for (int i = 0; i < n; ++i) dW(i) = sdt * normal(rng);
      Vec next;
      if (reduced) {
        if (!have_c) c = reduced_coefficients(m, x.head(nP), x.tail(nV), girs, group);
        check_chart(m, x.head(nP));
        Vec drift = with_j2 ? c.b_div : Vec(c.b_div - c.j2);
        next = x + s.mu2kappa * drift * dt + s.noise() * c.X1 * dW;
        if (girs) {
          Vec phi = 0.25 * c.X1.transpose() * c.dsigma;
          T.log_girsanov += s.noise() * phi.dot(dW) - 0.5 * s.mu2kappa * phi.squaredNorm() * dt;
        }
        if (group) {
          const int nG = m.nG();
          Vec eta = c.group_noise * dW;
          for (std::size_t r = 0; r < opt.irreps.size(); ++r) {
            const IrrepSpec& ir = *opt.irreps[r];
            if (ir.trivial()) continue;
            const int D = ir.dim;
            CMat A = CMat::Zero(D, D), B = CMat::Zero(D, D);
            for (int al = 0; al < nG; ++al) {
              A += c.group_drift(al) * ir.generators[al];
              for (int nu = 0; nu < nG; ++nu) A += 0.5 * c.d_inv(al, nu) * ir.generators[al] * ir.generators[nu];
              B += eta(al) * ir.generators[al];
            }
            // Later times multiply from the left.
            T.ordered_exp[r] = (CMat::Identity(D, D) + s.mu2kappa * dt * A + s.noise() * B) * T.ordered_exp[r];
          }
        }
        Vec Q1 = next.head(nP), f1 = next.tail(nV);
        reproject(m, Q1, f1);
        next << Q1, f1;
        check_chart(m, Q1);
        have_c = false;
      } else if (kind == ProcessKind::Original) {
        next = step_original(m, s, x, dt, dW);
      } else {
        next = step_adapted(m, s, x, dt, dW);
      }
      if (opt.record_states) {
        T.dW.push_back(dW);
        T.times.push_back((k + 1) * dt);
        T.states.push_back(next);
      }
      x = next;
      if (reduced && (girs || k + 1 < steps)) {
        c = reduced_coefficients(m, x.head(nP), x.tail(nV), girs, group);
        have_c = true;
        if (girs) {
          T.jacobian_integral += 0.5 * s.mu2kappa * (J_prev + c.J) * dt;
          J_prev = c.J;
        }
      }
      if (opt.feynman_kac) {
        double V = potential_at(x);
        T.potential_integral += 0.5 * (V_prev + V) * dt;
        V_prev = V;
      }
    }
    if (girs) {
      double sigma1 = have_c ? c.sigma : frame(m, x.head(nP), x.tail(nV)).sigma;
      T.log_girsanov_closed = 0.25 * (sigma1 - sigma0) + T.jacobian_integral;
    }
  } catch (const Error& e) {
    T.failed = true;
    T.error = e.what();
    T.fail_step = k;
  }
  T.final_state = x;
  return T;
}

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("FIBRIL_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr err;
  std::atomic<bool> has_err{false};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          if (!has_err.exchange(true)) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

double Ensemble::excluded_fraction() const {
  return paths.empty() ? 0.0 : static_cast<double>(failures.size()) / paths.size();
}

void check_failure_fraction(int failed, int total) {
  if (total > 0 && failed > 0.001 * total)
    fail(ErrorKind::PathFailureThreshold,
         std::to_string(failed) + " of " + std::to_string(total) + " paths failed (limit 0.1%)");
}

Ensemble simulate(const Model& m, const PhysicalScales& s, ProcessKind kind, const Vec& start, double t_final,
                  double dt, int n_paths, std::uint64_t seed, const SimOptions& opt, int threads) {
  if (n_paths < 1) fail(ErrorKind::Config, "need at least one path");
  Ensemble E;
  E.paths.resize(n_paths);
  // Validates the configuration once before fanning out.
  simulate_path(m, s, kind, start, 0.0, dt, 0, {});
  parallel_for(n_paths, worker_count(threads), [&](int i) {
    E.paths[i] = simulate_path(m, s, kind, start, t_final, dt, path_seed(seed, i), opt);
  });
  for (int i = 0; i < n_paths; ++i)
    if (E.paths[i].failed) E.failures.push_back({i, E.paths[i].error});
  check_failure_fraction(static_cast<int>(E.failures.size()), n_paths);
  return E;
}

}  // namespace fibril
