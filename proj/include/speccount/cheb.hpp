// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_CHEB_HPP
#define SPECCOUNT_CHEB_HPP

#include <cstddef>
#include <vector>

#include "speccount/bounds.hpp"
#include "speccount/operators.hpp"

namespace speccount {

/**
 * Damping applied to a truncated Chebyshev expansion.
 *
 * The raw degree-p truncation of the interval indicator carries Gibbs
 * oscillations. Jackson coefficients suppress them at the price of a wider
 * transition; Lanczos sigma factors sin(j*theta)/(j*theta) are a softer
 * compromise. In the Chebyshev-weighted L2 norm the undamped truncation is
 * optimal among all three at equal degree.
 */
enum class Damping { none, jackson, lanczos_sigma };

enum class FilterKind { mid_pass, high_pass, low_pass };

/**
 * Degree-p Chebyshev approximation psi_p(t) = sum_j d_j gamma_j T_j(t) of a
 * step function on [-1, 1], together with the affine spectrum map it was
 * built with. `a_hat`/`b_hat` hold the mapped plateau: [a_hat, b_hat] for a
 * mid-pass, [a_hat, 1] for a high-pass, [-1, b_hat] for a low-pass.
 */
struct ChebFilter {
  FilterKind kind = FilterKind::mid_pass;
  std::size_t degree = 0;
  double a_hat = -1.0;
  double b_hat = 1.0;
  Damping damping = Damping::none;
  std::vector<double> gamma;   ///< raw expansion coefficients, size degree+1
  std::vector<double> damped;  ///< gamma with damping factors applied
  AffineMap map;               ///< operator map used at construction
};

/**
 * Expansion coefficients of the indicator of [a_hat, b_hat] in Chebyshev
 * polynomials of the first kind:
 *
 *   gamma_0 = (acos(a_hat) - acos(b_hat)) / pi
 *   gamma_j = (2/pi) (sin(j acos(a_hat)) - sin(j acos(b_hat))) / j,  j >= 1
 *
 * Requires -1 <= a_hat < b_hat <= 1.
 */
std::vector<double> cheb_coeffs(double a_hat, double b_hat, std::size_t p);

/// Jackson damping factors g_j^p for j = 0..p, with alpha_p = pi/(p+2):
///   g_j^p = sin((j+1) alpha_p) / ((p+2) sin alpha_p)
///         + (1 - (j+1)/(p+2)) cos(j alpha_p).
/// g_0^p = 1 and g_p^p = 2 sin^2(alpha_p)/(p+2).
std::vector<double> jackson_coeffs(std::size_t p);

/// Lanczos sigma factors sigma_j^p = sin(j theta_p)/(j theta_p) with
/// theta_p = pi/(p+1) and sigma_0^p = 1.
std::vector<double> lanczos_sigma_coeffs(std::size_t p);

/// Build a filter for the interval [a, b] inside the spectrum bounds. The
/// endpoints are mapped to [-1, 1]; values that land outside due to roundoff
/// or a user interval poking past the bounds are clamped to
/// +-(1 - 1e-12). Throws if the mapped interval is empty.
ChebFilter make_midpass_filter(double a, double b, const SpectralBounds& bounds,
                               std::size_t p, Damping damping);

/// High-pass: indicator of [sigma, +inf) restricted to the bounds, i.e. the
/// coefficients of the indicator of [sigma_hat, 1]. Used by the generalized
/// path where counts are differences of two high-pass traces.
ChebFilter make_highpass_filter(double sigma, const SpectralBounds& bounds,
                                std::size_t p, Damping damping);

/// Low-pass counterpart: indicator of (-inf, sigma] mapped to [-1, sigma_hat].
ChebFilter make_lowpass_filter(double sigma, const SpectralBounds& bounds,
                               std::size_t p, Damping damping);

/// psi_p at a mapped point, by the forward three-term recurrence
/// T_{j+1}(t) = 2 t T_j(t) - T_{j-1}(t). `t_hat` may exceed [-1, 1] by at
/// most 1e-12 (it is clamped); beyond that the call throws.
double filter_eval(const ChebFilter& f, double t_hat);

/// out = psi_p(Op_mapped) * v with Op_mapped x = (Op x - center x)/half_span,
/// via the vector three-term recurrence
///   w_0 = v, w_1 = Op_mapped v, w_{j+1} = 2 Op_mapped w_j - w_{j-1};
/// exactly p operator applications, three work vectors, coefficients
/// accumulated on the fly.
void filter_apply(const ChebFilter& f, const RealOp& op, std::span<const double> v,
                  std::span<double> out);

/// Chebyshev-weighted L2 tail bound for the undamped truncation:
/// ||psi_p - h||^2 <= 4 pi / (3 (p+1)).
double l2_error_bound(std::size_t p);

/// Truncated tail (pi/2) sum_{j=p+1}^{J} gamma_j^2 of the same quantity,
/// summed directly from the coefficient formula.
double cheb_tail_sum(double a_hat, double b_hat, std::size_t p,
                     std::size_t tail_terms = 1'000'000);

/// Chebyshev-weighted squared L2 error of an arbitrary coefficient vector
/// against the indicator of [a_hat, b_hat],
///   integral (psi(t) - h(t))^2 / sqrt(1 - t^2) dt.
/// Computed in theta space where the weight is flat, split at the two jump
/// points so each piece integrates a smooth trigonometric polynomial;
/// `nodes` Gauss-Legendre points are distributed over the pieces by length.
double weighted_l2_sq_error(const std::vector<double>& coeffs, double a_hat,
                            double b_hat, std::size_t nodes = 4096);

/// Worst pointwise deviation |psi - h| split into three bands: the plateau
/// interior, a transition collar of halfwidth 2% of the reference span
/// around each edge, and the exterior beyond the collars. Needs grid >= 16.
struct TailReport {
  double inside_max = 0.0;
  double near_edge_max = 0.0;
  double outside_max = 0.0;
  double collar_halfwidth = 0.0;
};

TailReport tail_report(const ChebFilter& f, std::size_t grid_points = 2001);

}  // namespace speccount

#endif  // SPECCOUNT_CHEB_HPP
