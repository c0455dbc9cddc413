// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace speccount {

namespace {

Eigen::MatrixXd densify_real(const SparseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.n);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m.col[k])) += m.val_re[k];
  return d;
}

Eigen::MatrixXcd densify_complex(const SparseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.n);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m.col[k])) +=
          m.is_real() ? cplx(m.val_re[k], 0.0) : m.val_z[k];
  return d;
}

}  // namespace

DenseSpectrum dense_spectrum(const SparseMatrix& A, std::size_t cap) {
  A.validate();
  if (A.n > cap) throw std::invalid_argument("dense_spectrum: dimension exceeds cap");
  DenseSpectrum s;
  if (A.is_real() && A.symmetry == SymmetryKind::symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(densify_real(A), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: solver failed");
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  } else if (!A.is_real() && A.symmetry == SymmetryKind::hermitian) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(densify_complex(A), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: solver failed");
    s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  } else {
    // Everything else, including complex symmetric, has no real-spectrum
    // guarantee and goes through the general solver.
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(densify_complex(A), false);
    if (es.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: solver failed");
    s.eigenvalues_complex.assign(es.eigenvalues().data(),
                                 es.eigenvalues().data() + es.eigenvalues().size());
  }
  return s;
}

DenseSpectrum dense_spectrum(const Pencil& P, std::size_t cap) {
  P.validate();
  if (!P.B) return dense_spectrum(P.A, cap);
  if (P.dim() > cap) throw std::invalid_argument("dense_spectrum: dimension exceeds cap");
  if (!P.A.is_real() || P.A.symmetry != SymmetryKind::symmetric ||
      P.B->symmetry != SymmetryKind::symmetric)
    throw std::invalid_argument("dense_spectrum: pencil oracle needs a real symmetric pair");
  const Eigen::MatrixXd a = densify_real(P.A);
  const Eigen::MatrixXd b = densify_real(*P.B);
  Eigen::LLT<Eigen::MatrixXd> llt(b);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("dense_spectrum: B is not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense_spectrum: pencil solver failed");
  DenseSpectrum s;
  s.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  return s;
}

std::size_t exact_count(const DenseSpectrum& s, double a, double b) {
  if (!s.is_real()) throw std::invalid_argument("exact_count: interval count needs a real spectrum");
  if (!(a <= b)) throw std::invalid_argument("exact_count: need a <= b");
  std::size_t c = 0;
  for (double l : s.eigenvalues)
    if (l >= a && l <= b) ++c;
  return c;
}

std::size_t exact_count(const DenseSpectrum& s, cplx center, double radius) {
  if (radius < 0.0) throw std::invalid_argument("exact_count: negative radius");
  std::size_t c = 0;
  if (s.is_real()) {
    for (double l : s.eigenvalues)
      if (std::abs(cplx(l, 0.0) - center) <= radius) ++c;
  } else {
    for (const cplx& l : s.eigenvalues_complex)
      if (std::abs(l - center) <= radius) ++c;
  }
  return c;
}

double exact_filter_trace(const DenseSpectrum& s, const ChebFilter& f,
                          const SpectralBounds& bounds) {
  if (!s.is_real())
    throw std::invalid_argument("exact_filter_trace: polynomial filter needs a real spectrum");
  const AffineMap map = make_map(bounds);
  double acc = 0.0;
  for (double l : s.eigenvalues) {
    const double t = map.map(l);
    if (std::abs(t) > 1.0 + 1e-12)
      throw std::invalid_argument("exact_filter_trace: eigenvalue escapes the bounds");
    acc += filter_eval(f, t);
  }
  return acc;
}

double exact_filter_trace(const DenseSpectrum& s, const ContourQuadrature& q) {
  double acc = 0.0;
  if (s.is_real()) {
    for (double l : s.eigenvalues) acc += rational_eval(q, cplx(l, 0.0)).real();
  } else {
    for (const cplx& l : s.eigenvalues_complex) acc += rational_eval(q, l).real();
  }
  return acc;
}

}  // namespace speccount
