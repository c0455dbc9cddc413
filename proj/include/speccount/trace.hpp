// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_TRACE_HPP
#define SPECCOUNT_TRACE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "speccount/operators.hpp"

namespace speccount {

/// Sample vector family for the stochastic trace estimator.
///  - rademacher:          entries +-1, quotients v^T M v averaged with 1/n_v
///  - gaussian_normalized: unit-norm Gaussian directions, quotients scaled by
///                         n (the Rayleigh-quotient estimator; preferred
///                         default, it avoids rare oversized quotients)
///  - complex_rademacher:  entries +-1 +- i, for non-Hermitian contours
enum class SampleKind { rademacher, gaussian_normalized, complex_rademacher };

struct SampleConfig {
  SampleKind kind = SampleKind::gaussian_normalized;
  std::size_t n_v_max = 200;
  std::uint64_t seed = 42;
  std::size_t window = 10;     ///< trailing window of the convergence monitor
  double increment_tol = 1.0;  ///< monitor tolerance; <= 0 disables early stop
};

/// Per-sample trail of one estimation run. All quotients carry the estimator
/// scaling already (see rq_estimate), so running_mean.back() is the estimate.
struct TraceRun {
  std::vector<double> quotients;
  std::vector<double> running_mean;
  std::vector<double> imag_parts;  ///< complex sampling only, same scaling
  std::optional<std::size_t> converged_at;  ///< 1-based sample count, if early

  double estimate() const { return running_mean.empty() ? 0.0 : running_mean.back(); }
  std::size_t n_used() const { return quotients.size(); }
};

/// Draws sample k of the configured family into `out`. Entry i is a pure
/// function of (seed, k, i) through a counter-based generator, so any sample
/// can be produced independently of the others; parallel and sequential
/// drivers see identical vectors. gaussian_normalized output has unit norm.
void sample_vector(const SampleConfig& cfg, std::size_t k, std::span<double> out);
void sample_vector(const SampleConfig& cfg, std::size_t k, std::span<cplx> out);

/// First 1-based m >= window at which the running mean has settled: every
/// one-step increment across the trailing window is below tol/window and the
/// total drift across the window is below tol. Returns nullopt if that never
/// happens (always, when tol <= 0).
std::optional<std::size_t> convergence_monitor(std::span<const double> running_mean,
                                               std::size_t window, double increment_tol);

/// First 1-based k >= window at which (max - min) of the running mean over
/// the trailing `window` entries drops below `level`.
std::optional<std::size_t> oscillation_band_below(std::span<const double> running_mean,
                                                  std::size_t window, double level);

/// Stochastic trace estimate of the operator behind `qform`, which is handed
/// the sample index and vector and must return the raw quadratic form
/// v* M v. Quotient k is stored as dim * Re(qform(k, v_k)) / ||v_k||^2, which
/// reproduces the plain Hutchinson average for rademacher vectors
/// (||v||^2 = dim), the n/n_v Rayleigh-quotient scaling for unit Gaussians,
/// and keeps the complex_rademacher family unbiased (||v||^2 = 2 dim).
/// Stops early when the convergence monitor fires, else at n_v_max. A
/// non-finite quotient aborts with a diagnostic. With `threads` > 1
/// quotients are computed in parallel blocks (`qform` must then be
/// thread-safe); results are bitwise identical to the serial run.
TraceRun rq_estimate(std::size_t dim,
                     const std::function<cplx(std::size_t, std::span<const double>)>& qform,
                     const SampleConfig& cfg, unsigned threads = 1);

/// complex_rademacher variant; also logs the imaginary parts, which should
/// fluctuate around zero for a well-posed count.
TraceRun rq_estimate_complex(
    std::size_t dim, const std::function<cplx(std::size_t, std::span<const cplx>)>& qform,
    const SampleConfig& cfg, unsigned threads = 1);

/// Sample-count bound from the Hutchinson tail inequality: with
/// n_v >= 16 tr(P) ln(2/delta) the rounded estimate of a projector trace is
/// exact with probability at least 1 - delta. Returns the ceiling.
std::size_t hutchinson_min_samples(double trace_estimate, double delta);

}  // namespace speccount

#endif  // SPECCOUNT_TRACE_HPP
