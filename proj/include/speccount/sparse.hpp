// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_SPARSE_HPP
#define SPECCOUNT_SPARSE_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "speccount/operators.hpp"

namespace speccount {

enum class ScalarKind { real, complex_ };
enum class SymmetryKind { general, symmetric, hermitian };

/// Square sparse matrix in CSR form. Storage is always the full pattern;
/// symmetric/hermitian inputs are expanded on load and `symmetry` only
/// records the structural claim so downstream code may pick cheaper paths
/// (real arithmetic, conjugate-pair shortcuts).
///
/// Exactly one of `val_re` / `val_z` is populated, selected by `scalar`.
/// The polynomial path never promotes a real matrix to complex storage.
struct SparseMatrix {
  std::size_t n = 0;
  std::vector<std::size_t> row_ptr;  ///< size n+1, nondecreasing
  std::vector<std::size_t> col;      ///< ascending inside each row
  std::vector<double> val_re;
  std::vector<cplx> val_z;
  ScalarKind scalar = ScalarKind::real;
  SymmetryKind symmetry = SymmetryKind::general;

  std::size_t nnz() const { return col.size(); }
  bool is_real() const { return scalar == ScalarKind::real; }

  /// Structural sanity check; throws std::invalid_argument on violation.
  void validate() const;
};

/// Generalized pencil (A, B); B absent means the identity (standard problem).
struct Pencil {
  SparseMatrix A;
  std::optional<SparseMatrix> B;

  std::size_t dim() const { return A.n; }
  void validate() const;
};

/// y = A*x, real path. Requires a real matrix.
void matvec(const SparseMatrix& A, std::span<const double> x, std::span<double> y);
/// y = A*x, complex vectors; works for both scalar kinds.
void matvec(const SparseMatrix& A, std::span<const cplx> x, std::span<cplx> y);

/// y = A*x - sigma*(B*x); the generalized filters run on this operator,
/// never on an explicitly formed A - sigma*B.
void pencil_shift_apply(const Pencil& P, double sigma, std::span<const double> x,
                        std::span<double> y);
void pencil_shift_apply(const Pencil& P, cplx sigma, std::span<const cplx> x,
                        std::span<cplx> y);

/// Matrix-free views. The returned operator references `A` (or `P`); the
/// caller keeps the matrix alive for the operator's lifetime.
RealOp make_op(const SparseMatrix& A);
RealOp make_shift_op(const Pencil& P, double sigma);

/// Finite-difference negative Laplacian on a regular grid with Dirichlet
/// boundaries, 3-point stencil along every extent > 1. The diagonal is 2d
/// where d is the number of active dimensions. Throws if nx*ny*nz exceeds
/// `cap` or is zero.
SparseMatrix gen_laplacian(std::size_t nx, std::size_t ny, std::size_t nz = 1,
                           std::size_t cap = 2'000'000);

/// One engineered eigenvalue group: `count` points evenly spaced across
/// [center - width/2, center + width/2] (a single point sits at the center).
struct Cluster {
  double center = 0.0;
  double width = 0.0;
  std::size_t count = 0;
};

/// Recipe for a diagonal test matrix with a controlled spectrum: `total`
/// eigenvalues on [lo, hi], of which the clusters claim their counts and the
/// remainder is spread evenly (endpoints included) over the base interval.
/// `d_lambda` records the intended relative in-cluster gap |l_{i+1}-l_i|/|l_i|
/// for reporting; placement itself is by the even-spacing rule above.
struct ClusterSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t total = 0;
  std::vector<Cluster> clusters;
  double d_lambda = 0.0;

  /// Smallest relative gap between consecutive points inside any cluster.
  double min_relative_gap() const;
};

/// Diagonal matrix whose diagonal is the sorted spectrum described by `spec`.
/// Placement is fully deterministic (an even-spacing formula), so the seed
/// currently has no effect on the values; it is kept so callers can thread a
/// seed through without an interface change if jitter is ever wanted.
SparseMatrix gen_diag_spectrum(const ClusterSpec& spec, std::uint64_t seed = 0);

}  // namespace speccount

#endif  // SPECCOUNT_SPARSE_HPP
