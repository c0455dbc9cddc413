// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/count.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace speccount {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Distinct streams for the Lanczos starting vectors so they never collide
// with the estimator's sample streams (which use the raw seed).
constexpr std::uint64_t kBoundsSalt = 0x5fb7d64c3a21e804ULL;
constexpr std::uint64_t kBoundsSaltLow = 0x2d99787926d46932ULL;
constexpr std::uint64_t kBoundsSaltHigh = 0x6c62272e07bb0142ULL;

void require_poly_compatible(const SparseMatrix& A) {
  if (!A.is_real() || A.symmetry != SymmetryKind::symmetric)
    throw std::invalid_argument(
        "polynomial path needs real symmetric storage; hermitian or general "
        "matrices go through the rational path");
}

/// v^T psi(Op_mapped) v as a streaming sum over the Chebyshev recurrence:
/// p operator applications, three work vectors, one dot per term.
double filter_quadratic_form(const ChebFilter& f, const RealOp& op, std::span<const double> v) {
  const std::size_t n = op.dim;
  const double c = f.map.center;
  const double h = f.map.half_span;
  std::vector<double> wm1(v.begin(), v.end()), wk(n), tmp(n);
  auto dot_v = [&v, n](const std::vector<double>& w) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * w[i];
    return s;
  };
  auto mapped_apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    op.apply(x, tmp);
    for (std::size_t i = 0; i < n; ++i) y[i] = (tmp[i] - c * x[i]) / h;
  };
  double acc = f.damped[0] * dot_v(wm1);
  if (f.degree == 0) return acc;
  mapped_apply(wm1, wk);
  acc += f.damped[1] * dot_v(wk);
  for (std::size_t j = 2; j <= f.degree; ++j) {
    mapped_apply(wk, tmp);  // tmp = Op_mapped w_k; recurrence finishes in place
    double dj = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 2.0 * tmp[i] - wm1[i];
      dj += v[i] * w;
      wm1[i] = wk[i];
      wk[i] = w;
    }
    acc += f.damped[j] * dj;
  }
  return acc;
}

}  // namespace

CountReport count_poly_standard(const SparseMatrix& A, double a, double b, std::size_t p,
                                Damping damping, const RunConfig& cfg,
                                std::optional<SpectralBounds> given) {
  const auto t0 = Clock::now();
  A.validate();
  require_poly_compatible(A);
  if (!(a < b)) throw std::invalid_argument("count_poly_standard: need a < b");
  const RealOp op = make_op(A);
  const SpectralBounds bounds =
      given ? *given
            : lanczos_bounds(op, std::min(cfg.bounds_steps, A.n), cfg.samples.seed ^ kBoundsSalt,
                             cfg.bounds_margin);
  const ChebFilter filter = make_midpass_filter(a, b, bounds, p, damping);

  auto qform = [&](std::size_t, std::span<const double> v) {
    return cplx(filter_quadratic_form(filter, op, v), 0.0);
  };
  CountReport rep;
  rep.run = rq_estimate(A.n, qform, cfg.samples, cfg.threads);
  rep.estimate = rep.run.estimate();
  rep.rounded = std::llround(rep.estimate);
  rep.method = "poly";
  rep.bounds = bounds;
  rep.degree = p;
  rep.damping = damping;
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

CountReport count_poly_generalized(const Pencil& P, double a, double b, std::size_t p,
                                   Damping damping, const RunConfig& cfg,
                                   std::optional<SpectralBounds> bounds_a,
                                   std::optional<SpectralBounds> bounds_b) {
  const auto t0 = Clock::now();
  P.validate();
  require_poly_compatible(P.A);
  if (P.B) require_poly_compatible(*P.B);
  if (!(a < b)) throw std::invalid_argument("count_poly_generalized: need a < b");
  const std::size_t n = P.dim();

  // Counting lambda in [a, b] for B-definite pencils reduces to the inertia
  // difference of the shifted operators: eigenvalues of x -> Ax - sigma Bx
  // above zero are exactly the pencil eigenvalues above sigma.
  const RealOp op_a = make_shift_op(P, a);
  const RealOp op_b = make_shift_op(P, b);
  const std::size_t steps = std::min(cfg.bounds_steps, n);
  const SpectralBounds ba =
      bounds_a ? *bounds_a
               : lanczos_bounds(op_a, steps, cfg.samples.seed ^ kBoundsSaltLow, cfg.bounds_margin);
  const SpectralBounds bb =
      bounds_b ? *bounds_b
               : lanczos_bounds(op_b, steps, cfg.samples.seed ^ kBoundsSaltHigh, cfg.bounds_margin);
  const ChebFilter fa = make_highpass_filter(0.0, ba, p, damping);
  const ChebFilter fb = make_highpass_filter(0.0, bb, p, damping);

  // Side trails per threshold, indexed by sample so parallel blocks stay
  // race-free; truncated to the samples actually consumed afterwards.
  std::vector<double> trail_a(cfg.samples.n_v_max), trail_b(cfg.samples.n_v_max);
  const double dim = static_cast<double>(n);
  auto qform = [&](std::size_t k, std::span<const double> v) {
    double nv2 = 0.0;
    for (double x : v) nv2 += x * x;
    const double qa = filter_quadratic_form(fa, op_a, v);
    const double qb = filter_quadratic_form(fb, op_b, v);
    trail_a[k] = dim * qa / nv2;
    trail_b[k] = dim * qb / nv2;
    return cplx(qa - qb, 0.0);
  };

  CountReport rep;
  rep.run = rq_estimate(n, qform, cfg.samples, cfg.threads);
  rep.estimate = rep.run.estimate();
  rep.rounded = std::llround(rep.estimate);
  rep.method = "poly-gen";
  rep.bounds_low = ba;
  rep.bounds_high = bb;
  rep.degree = p;
  rep.damping = damping;

  const std::size_t used = rep.run.n_used();
  rep.threshold_runs.resize(2);
  for (std::size_t side = 0; side < 2; ++side) {
    const auto& trail = side == 0 ? trail_a : trail_b;
    TraceRun& tr = rep.threshold_runs[side];
    tr.quotients.assign(trail.begin(), trail.begin() + static_cast<std::ptrdiff_t>(used));
    tr.running_mean.resize(used);
    double sum = 0.0;
    for (std::size_t i = 0; i < used; ++i) {
      sum += tr.quotients[i];
      tr.running_mean[i] = sum / static_cast<double>(i + 1);
    }
  }
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

namespace {

void require_rational_compatible(const Pencil& P) {
  const SymmetryKind sa = P.A.symmetry;
  const bool a_ok = (P.A.is_real() && sa == SymmetryKind::symmetric) ||
                    (!P.A.is_real() && sa == SymmetryKind::hermitian);
  if (!a_ok)
    throw std::invalid_argument(
        "interval contour count needs a symmetric or hermitian matrix; disks "
        "around complex centers go through the non-symmetric path");
  if (P.B && !(P.B->is_real() && P.B->symmetry == SymmetryKind::symmetric))
    throw std::invalid_argument("interval contour count needs a real symmetric B");
}

/// Shared engine behind count_rational and count_rational_swapped. The
/// per-(sample, pole) contribution
///
///   c_{k j} = 2 Re( omega_j * v_k^T y_{k j} ),   (A - z_j B) y = B v_k
///
/// is a pure function of (k, j), so both loop orders produce identical
/// doubles; the raw quotient of sample k is the j-ascending sum of row k
/// either way, which makes the two estimates bitwise equal.
CountReport rational_core(const Pencil& P, double a, double b, std::size_t m,
                          const RunConfig& cfg, bool swapped) {
  const auto t0 = Clock::now();
  P.validate();
  require_rational_compatible(P);
  if (!(a < b)) throw std::invalid_argument("count_rational: need a < b");
  if (m == 0) throw std::invalid_argument("count_rational: need at least one pole");
  const std::size_t n = P.dim();
  const ContourQuadrature quad = build_halfcircle_quadrature(a, b, m);
  const SparseMatrix* Bp = P.B ? &*P.B : nullptr;

  const bool dense = cfg.solver.method == SolverMethod::dense_lu;
  std::vector<DenseLu> factors;
  if (dense) {
    factors.reserve(m);
    for (std::size_t j = 0; j < m; ++j)
      factors.emplace_back(P.A, Bp, quad.poles[j], cfg.solver.dense_cap);
  }

  auto solve_pole = [&](std::size_t j, std::span<const cplx> rhs, std::span<cplx> y) {
    if (dense) {
      factors[j].solve(rhs, y);
      return;
    }
    const ComplexOp op = make_shifted_op(P.A, Bp, quad.poles[j]);
    const GmresResult r = gmres(op, rhs, y, cfg.solver);
    if (r.achieved > 1e-1)
      throw std::runtime_error(
          "count_rational: linear solve stalled above the 1e-1 residual floor; "
          "counts from such solves are unreliable, increase the iteration "
          "budget or loosen the pole layout");
  };

  // c[k*m + j], filled on demand (sample-major) or upfront (pole-major).
  std::vector<double> contrib(cfg.samples.n_v_max * m, 0.0);
  auto contribution = [&](std::span<const cplx> rhs, std::span<const double> v, std::size_t j,
                          std::span<cplx> y) {
    solve_pole(j, rhs, y);
    cplx s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i] * y[i];
    return 2.0 * (quad.weights[j] * s).real();
  };
  auto make_rhs = [&](std::span<const double> v, std::vector<cplx>& rhs) {
    if (Bp) {
      std::vector<cplx> vz(v.begin(), v.end());
      matvec(*Bp, vz, std::span<cplx>(rhs));
    } else {
      for (std::size_t i = 0; i < n; ++i) rhs[i] = v[i];
    }
  };

  if (swapped) {
    // Pole-major sweep: factorization j serves every sample before moving
    // on. The price is that samples cannot stop early, so all n_v_max rows
    // are filled; the replay below still honors the convergence monitor.
    std::vector<double> v(n);
    std::vector<cplx> rhs(n), y(n);
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < cfg.samples.n_v_max; ++k) {
        sample_vector(cfg.samples, k, std::span<double>(v));
        make_rhs(v, rhs);
        contrib[k * m + j] = contribution(rhs, v, j, y);
      }
  }

  auto qform = [&](std::size_t k, std::span<const double> v) {
    if (!swapped) {
      std::vector<cplx> rhs(n), y(n);
      make_rhs(v, rhs);
      for (std::size_t j = 0; j < m; ++j) contrib[k * m + j] = contribution(rhs, v, j, y);
    }
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += contrib[k * m + j];
    return cplx(acc, 0.0);
  };

  CountReport rep;
  rep.run = rq_estimate(n, qform, cfg.samples, swapped ? 1 : cfg.threads);
  rep.estimate = rep.run.estimate();
  rep.rounded = std::llround(rep.estimate);
  rep.method = swapped ? "rational-swapped" : "rational";
  rep.poles_upper = m;
  rep.poles_total = 2 * m;

  // Per-pole partial traces over the samples actually used; their sum
  // reproduces the estimate up to reassociation.
  const std::size_t used = rep.run.n_used();
  rep.pole_partials.assign(m, 0.0);
  {
    std::vector<double> v(n);
    for (std::size_t k = 0; k < used; ++k) {
      sample_vector(cfg.samples, k, std::span<double>(v));
      double nv2 = 0.0;
      for (double x : v) nv2 += x * x;
      const double scale = static_cast<double>(n) / nv2;
      for (std::size_t j = 0; j < m; ++j) rep.pole_partials[j] += scale * contrib[k * m + j];
    }
    for (std::size_t j = 0; j < m; ++j) rep.pole_partials[j] /= static_cast<double>(used);
  }
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

}  // namespace

CountReport count_rational(const Pencil& P, double a, double b, std::size_t m,
                           const RunConfig& cfg) {
  return rational_core(P, a, b, m, cfg, /*swapped=*/false);
}

CountReport count_rational(const SparseMatrix& A, double a, double b, std::size_t m,
                           const RunConfig& cfg) {
  return rational_core(Pencil{A, std::nullopt}, a, b, m, cfg, /*swapped=*/false);
}

CountReport count_rational_swapped(const Pencil& P, double a, double b, std::size_t m,
                                   const RunConfig& cfg) {
  return rational_core(P, a, b, m, cfg, /*swapped=*/true);
}

CountReport count_rational_nonsymmetric(const SparseMatrix& A, cplx center, double radius,
                                        std::size_t m, const RunConfig& cfg) {
  const auto t0 = Clock::now();
  A.validate();
  if (radius <= 0.0)
    throw std::invalid_argument("count_rational_nonsymmetric: radius must be positive");
  const std::size_t n = A.n;
  const ContourQuadrature quad = build_fullcircle_quadrature(center, radius, m);

  const bool dense = cfg.solver.method == SolverMethod::dense_lu;
  std::vector<DenseLu> factors;
  if (dense) {
    factors.reserve(m);
    for (std::size_t j = 0; j < m; ++j)
      factors.emplace_back(A, nullptr, quad.poles[j], cfg.solver.dense_cap);
  }

  SampleConfig samples = cfg.samples;
  samples.kind = SampleKind::complex_rademacher;  // the only unbiased family here
  auto qform = [&](std::size_t, std::span<const cplx> v) {
    std::vector<cplx> y(n);
    cplx acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (dense) {
        factors[j].solve(v, y);
      } else {
        const ComplexOp op = make_shifted_op(A, nullptr, quad.poles[j]);
        const GmresResult r = gmres(op, v, y, cfg.solver);
        if (r.achieved > 1e-1)
          throw std::runtime_error(
              "count_rational_nonsymmetric: linear solve stalled above the "
              "1e-1 residual floor");
      }
      cplx s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += std::conj(v[i]) * y[i];
      acc += quad.weights[j] * s;
    }
    return acc;
  };

  CountReport rep;
  rep.run = rq_estimate_complex(n, qform, samples, cfg.threads);
  rep.estimate = rep.run.estimate();
  rep.rounded = std::llround(rep.estimate);
  rep.method = "rational-nonsym";
  rep.poles_upper = m;
  rep.poles_total = m;
  rep.wall_ms = elapsed_ms(t0);
  return rep;
}

std::size_t suggest_subspace_size(const SparseMatrix& A, double a, double b, std::size_t p,
                                  Damping damping, const RunConfig& cfg) {
  A.validate();
  require_poly_compatible(A);
  if (!(a < b)) throw std::invalid_argument("suggest_subspace_size: need a < b");
  const RealOp op = make_op(A);
  const SpectralBounds bounds = lanczos_bounds(op, std::min(cfg.bounds_steps, A.n),
                                               cfg.samples.seed ^ kBoundsSalt, cfg.bounds_margin);
  const double alpha = (b - a) / 4.0;
  const double ae = std::max(a - alpha, bounds.lmin);
  const double be = std::min(b + alpha, bounds.lmax);
  const ChebFilter inner = make_midpass_filter(a, b, bounds, p, damping);
  const ChebFilter outer = make_midpass_filter(ae, be, bounds, p, damping);

  // One pass, both quadratic forms from the same recurrence stream: the two
  // filters share the operator map, only the coefficients differ.
  std::vector<double> inner_trail(cfg.samples.n_v_max);
  const std::size_t n = A.n;
  const double dim = static_cast<double>(n);
  auto qform = [&](std::size_t k, std::span<const double> v) {
    const double c = outer.map.center;
    const double h = outer.map.half_span;
    std::vector<double> wm1(v.begin(), v.end()), wk(n), tmp(n);
    auto dot_v = [&v, n](const std::vector<double>& w) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += v[i] * w[i];
      return s;
    };
    double nv2 = 0.0;
    for (double x : v) nv2 += x * x;
    double d0 = dot_v(wm1);
    double acc_in = inner.damped[0] * d0, acc_out = outer.damped[0] * d0;
    if (p > 0) {
      op.apply(wm1, tmp);
      for (std::size_t i = 0; i < n; ++i) wk[i] = (tmp[i] - c * wm1[i]) / h;
      const double d1 = dot_v(wk);
      acc_in += inner.damped[1] * d1;
      acc_out += outer.damped[1] * d1;
      for (std::size_t j = 2; j <= p; ++j) {
        op.apply(wk, tmp);
        double dj = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double w = 2.0 * (tmp[i] - c * wk[i]) / h - wm1[i];
          dj += v[i] * w;
          wm1[i] = wk[i];
          wk[i] = w;
        }
        acc_in += inner.damped[j] * dj;
        acc_out += outer.damped[j] * dj;
      }
    }
    inner_trail[k] = dim * acc_in / nv2;
    return cplx(acc_out, 0.0);
  };

  const TraceRun run = rq_estimate(n, qform, cfg.samples, cfg.threads);
  const std::size_t used = run.n_used();
  double inner_mean = 0.0;
  for (std::size_t k = 0; k < used; ++k) inner_mean += inner_trail[k];
  inner_mean /= static_cast<double>(used);

  const long long enlarged = std::llround(run.estimate());
  const long long plain = std::llround(inner_mean);
  const long long m0 = std::max(enlarged, plain);
  return m0 > 0 ? static_cast<std::size_t>(m0) : 0;
}

std::size_t suggest_subspace_size_rational(const SparseMatrix& A, double a, double b,
                                           std::size_t m, const RunConfig& cfg) {
  if (!(a < b)) throw std::invalid_argument("suggest_subspace_size_rational: need a < b");
  const double alpha = (b - a) / 4.0;
  const CountReport outer = count_rational(A, a - alpha, b + alpha, m, cfg);

  // Replay the interior interval over exactly the samples the outer run
  // consumed so both counts share every vector.
  RunConfig replay = cfg;
  replay.samples.n_v_max = outer.run.n_used();
  replay.samples.increment_tol = 0.0;
  const CountReport inner = count_rational(A, a, b, m, replay);

  const long long m0 =
      std::max(std::llround(outer.estimate), std::llround(inner.estimate));
  return m0 > 0 ? static_cast<std::size_t>(m0) : 0;
}

}  // namespace speccount
