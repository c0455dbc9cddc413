// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/trace.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "speccount/detail/rng.hpp"

namespace speccount {

void sample_vector(const SampleConfig& cfg, std::size_t k, std::span<double> out) {
  switch (cfg.kind) {
    case SampleKind::rademacher:
      for (std::size_t i = 0; i < out.size(); ++i) out[i] = detail::rademacher(cfg.seed, k, i);
      return;
    case SampleKind::gaussian_normalized: {
      double nv2 = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = detail::gauss(cfg.seed, k, i);
        nv2 += out[i] * out[i];
      }
      const double nv = std::sqrt(nv2);
      if (nv == 0.0) throw std::runtime_error("sample_vector: zero gaussian draw");
      for (double& x : out) x /= nv;
      return;
    }
    case SampleKind::complex_rademacher:
      throw std::invalid_argument("sample_vector: complex family requested into a real vector");
  }
  throw std::invalid_argument("sample_vector: unknown sample kind");
}

void sample_vector(const SampleConfig& cfg, std::size_t k, std::span<cplx> out) {
  if (cfg.kind != SampleKind::complex_rademacher)
    throw std::invalid_argument("sample_vector: complex vectors are drawn from complex_rademacher");
  for (std::size_t i = 0; i < out.size(); ++i) {
    const std::uint64_t bits = detail::cell(cfg.seed, k, i);
    out[i] = cplx((bits >> 63) ? 1.0 : -1.0, ((bits >> 62) & 1u) ? 1.0 : -1.0);
  }
}

std::optional<std::size_t> convergence_monitor(std::span<const double> running_mean,
                                               std::size_t window, double increment_tol) {
  if (window < 2) throw std::invalid_argument("convergence_monitor: window must be >= 2");
  if (increment_tol <= 0.0) return std::nullopt;
  const double step_tol = increment_tol / static_cast<double>(window);
  for (std::size_t m = window; m <= running_mean.size(); ++m) {
    bool ok = std::abs(running_mean[m - 1] - running_mean[m - window]) < increment_tol;
    for (std::size_t i = m - window + 1; ok && i < m; ++i)
      ok = std::abs(running_mean[i] - running_mean[i - 1]) < step_tol;
    if (ok) return m;
  }
  return std::nullopt;
}

std::optional<std::size_t> oscillation_band_below(std::span<const double> running_mean,
                                                  std::size_t window, double level) {
  if (window < 1) throw std::invalid_argument("oscillation_band_below: window must be >= 1");
  for (std::size_t m = window; m <= running_mean.size(); ++m) {
    double lo = running_mean[m - window], hi = lo;
    for (std::size_t i = m - window + 1; i < m; ++i) {
      lo = std::min(lo, running_mean[i]);
      hi = std::max(hi, running_mean[i]);
    }
    if (hi - lo < level) return m;
  }
  return std::nullopt;
}

namespace {

struct Quotient {
  double re = 0.0;
  double im = 0.0;
};

/// Shared driver: `one_sample(k)` must be a pure function of k (and the
/// config), which is what makes the blockwise parallel schedule bitwise
/// identical to the serial one; samples past an early stop are discarded.
TraceRun drive(const SampleConfig& cfg, unsigned threads, bool track_imag,
               const std::function<Quotient(std::size_t)>& one_sample) {
  if (cfg.n_v_max == 0) throw std::invalid_argument("rq_estimate: n_v_max must be positive");
  if (cfg.window < 2) throw std::invalid_argument("rq_estimate: window must be >= 2");
  TraceRun run;
  run.quotients.reserve(cfg.n_v_max);
  run.running_mean.reserve(cfg.n_v_max);

  double sum = 0.0;
  std::size_t k = 0;
  std::vector<Quotient> block;
  while (k < cfg.n_v_max && !run.converged_at) {
    const std::size_t block_size =
        threads <= 1 ? 1
                     : std::min<std::size_t>(cfg.n_v_max - k,
                                             std::max<std::size_t>(threads, 4) * 2);
    block.assign(block_size, Quotient{});
    if (threads <= 1 || block_size == 1) {
      for (std::size_t j = 0; j < block_size; ++j) block[j] = one_sample(k + j);
    } else {
      std::vector<std::thread> pool;
      const unsigned used = std::min<unsigned>(threads, static_cast<unsigned>(block_size));
      pool.reserve(used);
      for (unsigned t = 0; t < used; ++t)
        pool.emplace_back([&, t]() {
          for (std::size_t j = t; j < block_size; j += used) block[j] = one_sample(k + j);
        });
      for (auto& th : pool) th.join();
    }
    for (std::size_t j = 0; j < block_size && !run.converged_at; ++j) {
      const Quotient q = block[j];
      if (!std::isfinite(q.re) || (track_imag && !std::isfinite(q.im)))
        throw std::runtime_error("rq_estimate: sample " + std::to_string(k + j) +
                                 " produced a non-finite quotient");
      run.quotients.push_back(q.re);
      if (track_imag) run.imag_parts.push_back(q.im);
      sum += q.re;
      run.running_mean.push_back(sum / static_cast<double>(run.quotients.size()));
      if (run.quotients.size() >= cfg.window && cfg.increment_tol > 0.0) {
        const std::size_t m = run.quotients.size();
        const auto& rm = run.running_mean;
        bool ok = std::abs(rm[m - 1] - rm[m - cfg.window]) < cfg.increment_tol;
        const double step_tol = cfg.increment_tol / static_cast<double>(cfg.window);
        for (std::size_t i = m - cfg.window + 1; ok && i < m; ++i)
          ok = std::abs(rm[i] - rm[i - 1]) < step_tol;
        if (ok) run.converged_at = m;
      }
    }
    k += block_size;
  }
  return run;
}

}  // namespace

TraceRun rq_estimate(std::size_t dim,
                     const std::function<cplx(std::size_t, std::span<const double>)>& qform,
                     const SampleConfig& cfg, unsigned threads) {
  if (dim == 0) throw std::invalid_argument("rq_estimate: empty operator");
  if (cfg.kind == SampleKind::complex_rademacher)
    throw std::invalid_argument("rq_estimate: complex sampling needs rq_estimate_complex");
  const double dimd = static_cast<double>(dim);
  auto one = [&](std::size_t k) {
    std::vector<double> v(dim);
    sample_vector(cfg, k, std::span<double>(v));
    double nv2 = 0.0;
    for (double x : v) nv2 += x * x;
    const cplx raw = qform(k, std::span<const double>(v));
    return Quotient{dimd * raw.real() / nv2, 0.0};
  };
  return drive(cfg, threads, /*track_imag=*/false, one);
}

TraceRun rq_estimate_complex(
    std::size_t dim, const std::function<cplx(std::size_t, std::span<const cplx>)>& qform,
    const SampleConfig& cfg, unsigned threads) {
  if (dim == 0) throw std::invalid_argument("rq_estimate_complex: empty operator");
  if (cfg.kind != SampleKind::complex_rademacher)
    throw std::invalid_argument("rq_estimate_complex: sample kind must be complex_rademacher");
  const double dimd = static_cast<double>(dim);
  auto one = [&](std::size_t k) {
    std::vector<cplx> v(dim);
    sample_vector(cfg, k, std::span<cplx>(v));
    double nv2 = 0.0;
    for (const cplx& x : v) nv2 += std::norm(x);
    const cplx raw = qform(k, std::span<const cplx>(v));
    return Quotient{dimd * raw.real() / nv2, dimd * raw.imag() / nv2};
  };
  return drive(cfg, threads, /*track_imag=*/true, one);
}

std::size_t hutchinson_min_samples(double trace_estimate, double delta) {
  if (!(trace_estimate > 0.0))
    throw std::invalid_argument("hutchinson_min_samples: trace estimate must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("hutchinson_min_samples: delta must lie in (0, 1)");
  return static_cast<std::size_t>(std::ceil(16.0 * trace_estimate * std::log(2.0 / delta)));
}

}  // namespace speccount
