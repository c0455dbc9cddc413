// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_ORACLE_HPP
#define SPECCOUNT_ORACLE_HPP

#include "speccount/cheb.hpp"
#include "speccount/contour.hpp"
#include "speccount/sparse.hpp"

namespace speccount {

/// Full dense spectrum, the ground truth the estimators are checked against.
/// Hermitian problems and definite pencils produce the ascending real
/// eigenvalue list; general matrices fill the complex list instead.
struct DenseSpectrum {
  std::vector<double> eigenvalues;
  std::vector<cplx> eigenvalues_complex;

  bool is_real() const { return eigenvalues_complex.empty(); }
  std::size_t size() const {
    return is_real() ? eigenvalues.size() : eigenvalues_complex.size();
  }
};

/// Dense eigendecomposition (O(n^3), guarded by `cap`). Dispatches on the
/// matrix symmetry claim: symmetric/hermitian inputs go through the
/// selfadjoint solver, everything else through the general complex one.
DenseSpectrum dense_spectrum(const SparseMatrix& A, std::size_t cap = 2000);

/// Definite pencil: eigenvalues of (A, B) with B symmetric positive
/// definite; throws if the Cholesky factorization of B fails. Congruence
/// keeps these equal to the spectrum of L^-1 A L^-T for B = L L^T.
DenseSpectrum dense_spectrum(const Pencil& P, std::size_t cap = 2000);

/// Eigenvalues in the closed interval [a, b] (real spectra only).
std::size_t exact_count(const DenseSpectrum& s, double a, double b);
/// Eigenvalues in the closed disk around `center` (complex or real spectra).
std::size_t exact_count(const DenseSpectrum& s, cplx center, double radius);

/// Noise-free filter trace sum_i psi_p(map(lambda_i)): what the stochastic
/// estimate converges to as n_v grows. `bounds` must be the bounds the
/// filter was built with; eigenvalues mapping outside [-1, 1] by more than
/// 1e-12 throw.
double exact_filter_trace(const DenseSpectrum& s, const ChebFilter& f,
                          const SpectralBounds& bounds);

/// Rational counterpart sum_i Re chi(lambda_i); accepts complex spectra.
double exact_filter_trace(const DenseSpectrum& s, const ContourQuadrature& q);

}  // namespace speccount

#endif  // SPECCOUNT_ORACLE_HPP
