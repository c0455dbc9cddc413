// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_COUNT_HPP
#define SPECCOUNT_COUNT_HPP

#include <optional>
#include <string>

#include "speccount/bounds.hpp"
#include "speccount/cheb.hpp"
#include "speccount/contour.hpp"
#include "speccount/solvers.hpp"
#include "speccount/sparse.hpp"
#include "speccount/trace.hpp"

namespace speccount {

/// Everything a counting run needs besides the problem itself.
struct RunConfig {
  SampleConfig samples;
  SolverConfig solver;
  std::size_t bounds_steps = 60;   ///< Lanczos budget, clipped to the dimension
  double bounds_margin = 0.005;
  unsigned threads = 1;
};

/// Result of one eigenvalue-count estimation.
struct CountReport {
  double estimate = 0.0;
  long long rounded = 0;
  TraceRun run;
  std::string method;  ///< "poly", "poly-gen", "rational", "rational-swapped",
                       ///< "rational-nonsym"

  // Polynomial metadata.
  std::optional<SpectralBounds> bounds;        ///< standard problem
  std::optional<SpectralBounds> bounds_low;    ///< generalized: A - aB
  std::optional<SpectralBounds> bounds_high;   ///< generalized: A - bB
  std::size_t degree = 0;
  Damping damping = Damping::none;
  std::vector<TraceRun> threshold_runs;  ///< generalized: per-threshold trails

  // Rational metadata.
  std::size_t poles_upper = 0;  ///< distinct solves per sample
  std::size_t poles_total = 0;  ///< poles on the whole contour
  std::vector<double> pole_partials;  ///< per-pole contribution to the estimate

  double wall_ms = 0.0;
};

/// Chebyshev-filtered stochastic count of eigenvalues of A in [a, b].
/// Bounds are taken from `given` or estimated by Lanczos; the interval is
/// then mapped, the mid-pass filter built, and each quotient evaluated as a
/// streaming sum over the vector recurrence (p matvecs, no stored basis).
CountReport count_poly_standard(const SparseMatrix& A, double a, double b,
                                std::size_t p, Damping damping, const RunConfig& cfg,
                                std::optional<SpectralBounds> given = {});

/// Generalized count for a definite pencil without factorizing B: the count
/// over [a, b] is the difference of two high-pass traces at thresholds a and
/// b, each evaluated through the shifted operator x -> Ax - sigma Bx. Both
/// traces consume the same sample vectors, which cancels most of the
/// sampling noise of the difference.
CountReport count_poly_generalized(const Pencil& P, double a, double b,
                                   std::size_t p, Damping damping, const RunConfig& cfg,
                                   std::optional<SpectralBounds> bounds_a = {},
                                   std::optional<SpectralBounds> bounds_b = {});

/// Rational (contour) count over [a, b] for a symmetric matrix or definite
/// pencil. Only the m upper poles are solved; the conjugate half enters as
/// 2 Re(...). Pencils apply B to the sample vector before each solve. With
/// the dense solver each pole is factorized once upfront; with gmres an
/// achieved residual worse than the 1e-1 floor aborts the run, since counts
/// below that accuracy are silently wrong.
CountReport count_rational(const Pencil& P, double a, double b, std::size_t m,
                           const RunConfig& cfg);
CountReport count_rational(const SparseMatrix& A, double a, double b, std::size_t m,
                           const RunConfig& cfg);

/// Same estimator with the loops exchanged: poles outermost, samples inner.
/// Per-(sample, pole) contributions are identical numbers, accumulated in
/// the same order per sample, so the final estimate matches count_rational
/// exactly; the report additionally carries per-pole partial traces. This is
/// the arrangement that amortizes one factorization per pole naturally.
CountReport count_rational_swapped(const Pencil& P, double a, double b, std::size_t m,
                                   const RunConfig& cfg);

/// Non-Hermitian count over a closed disk: full-circle contour with m poles
/// total, complex Rademacher samples, quotient v* y with the real part as
/// the estimate and the imaginary part logged.
CountReport count_rational_nonsymmetric(const SparseMatrix& A, cplx center,
                                        double radius, std::size_t m,
                                        const RunConfig& cfg);

/// Search-subspace size for contour eigensolvers: the count over [a, b]
/// enlarged by alpha = (b-a)/4 per side (clipped to the spectrum bounds),
/// never smaller than the count over [a, b] itself; both counts come from
/// the same sample vectors.
std::size_t suggest_subspace_size(const SparseMatrix& A, double a, double b,
                                  std::size_t p, Damping damping, const RunConfig& cfg);

/// Rational-filter variant: the enlarged interval is counted first, then the
/// plain interval is recounted over exactly the samples the first run
/// consumed (same seed, early stop disabled), and the larger rounded value
/// wins. No bounds estimate is needed; the contour may poke past the
/// spectrum harmlessly.
std::size_t suggest_subspace_size_rational(const SparseMatrix& A, double a, double b,
                                           std::size_t m, const RunConfig& cfg);

}  // namespace speccount

#endif  // SPECCOUNT_COUNT_HPP
