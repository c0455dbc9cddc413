// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_BOUNDS_HPP
#define SPECCOUNT_BOUNDS_HPP

#include <cstdint>

#include "speccount/operators.hpp"

namespace speccount {

/// Enclosing interval [lmin, lmax] for the spectrum of a symmetric operator.
struct SpectralBounds {
  double lmin = -1.0;
  double lmax = 1.0;
  double margin = 0.0;  ///< relative widening that was applied per side
};

/// Affine change of variable between [lmin, lmax] and the Chebyshev
/// reference interval [-1, 1].
struct AffineMap {
  double center = 0.0;
  double half_span = 1.0;

  double map(double t) const { return (t - center) / half_span; }
  double unmap(double s) const { return center + s * half_span; }
};

AffineMap make_map(const SpectralBounds& b);

/// Estimates enclosing spectral bounds with `steps` Lanczos iterations using
/// full reorthogonalization, then widens each side by margin*span plus the
/// residual bound of the corresponding extreme Ritz pair. A zero beta before
/// the step budget is exhausted means an invariant subspace was hit: the Ritz
/// values found so far are kept and the iteration restarts from a fresh
/// seeded vector (at most 3 restarts). The returned interval never collapses:
/// a minimum span of 1e-8*max(1, |lmax|) is enforced.
SpectralBounds lanczos_bounds(const RealOp& op, std::size_t steps, std::uint64_t seed,
                              double margin = 0.005);

}  // namespace speccount

#endif  // SPECCOUNT_BOUNDS_HPP
