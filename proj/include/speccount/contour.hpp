// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_CONTOUR_HPP
#define SPECCOUNT_CONTOUR_HPP

#include <cstddef>
#include <vector>

#include "speccount/operators.hpp"

namespace speccount {

/// Gauss-Legendre rule on [-1, 1], nodes ascending. Computed by Newton
/// iteration on the Legendre recurrence; weights sum to 2. m is capped at 64,
/// far past the pole counts that make sense for a contour.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussLegendre gauss_legendre(std::size_t m);

enum class ContourKind {
  halfcircle_conjugate,  ///< real-axis interval; lower half is the mirror image
  fullcircle             ///< complex disk; no conjugate symmetry assumed
};

/**
 * Discretized Cauchy-integral projector
 *
 *   chi(lambda) = sum_j omega_j / (lambda - z_j) ~ indicator of the contour
 *
 * obtained from P = -(1/2 pi i) contour-integral of the resolvent over the
 * circle centred at `center` with the given radius. Poles are stored upper
 * half first (`upper_count` of them), mirrored poles after.
 */
struct ContourQuadrature {
  ContourKind kind = ContourKind::halfcircle_conjugate;
  cplx center{0.0, 0.0};
  double radius = 0.0;
  std::vector<cplx> poles;
  std::vector<cplx> weights;
  std::size_t upper_count = 0;
};

/// Circle with diameter [a, b]. Parametrizing the upper half by
/// theta_k = (pi/2)(1 - t_k) over the m Gauss-Legendre nodes t_k gives
///   z_k = c + r e^{i theta_k},  omega_k = -(w_k r / 4) e^{i theta_k},
/// and the lower half is the conjugate pair set. For real symmetric (or
/// complex hermitian) problems only the m upper solves are needed:
/// chi(lambda) = 2 Re sum_upper omega_j/(lambda - z_j) for real lambda.
/// The center identity sum_j omega_j/(c - z_j) = 1 holds to roundoff.
ContourQuadrature build_halfcircle_quadrature(double a, double b, std::size_t m);

/// Circle around a complex center: the same node/weight construction placed
/// on both half-arcs (m/2 each, m even), with no conjugate interpretation;
/// callers solve all m poles. This is the contour for non-Hermitian counts.
ContourQuadrature build_fullcircle_quadrature(cplx center, double radius, std::size_t m);

/// chi(lambda) over all stored poles. Throws if lambda sits within
/// 1e-14*radius of a pole.
cplx rational_eval(const ContourQuadrature& q, cplx lambda);

/// Real-axis convenience for conjugate-symmetric quadratures; checks that the
/// imaginary part cancels to roundoff and returns the real part.
double rational_eval_real(const ContourQuadrature& q, double lambda);

}  // namespace speccount

#endif  // SPECCOUNT_CONTOUR_HPP
