// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_SOLVERS_HPP
#define SPECCOUNT_SOLVERS_HPP

#include <memory>

#include "speccount/sparse.hpp"

namespace speccount {

enum class SolverMethod { dense_lu, gmres };

struct SolverConfig {
  SolverMethod method = SolverMethod::dense_lu;
  double tol = 1e-8;            ///< gmres relative residual target
  std::size_t restart = 20;     ///< gmres restart length
  std::size_t max_iters = 200;  ///< total gmres iteration budget
  std::size_t dense_cap = 8000; ///< refuse to densify above this dimension
};

/// x -> A x - z (B x); B = nullptr means the identity. The matrices must
/// outlive the operator.
ComplexOp make_shifted_op(const SparseMatrix& A, const SparseMatrix* B, cplx z);

/// One LU factorization of the dense A - zB, reused across solves. The
/// factorization cost is cubic and memory quadratic, which is what the
/// dense_cap guards; with the customary pole-major reuse one factorization
/// serves every sample vector.
class DenseLu {
 public:
  DenseLu(const SparseMatrix& A, const SparseMatrix* B, cplx z, std::size_t cap = 8000);
  ~DenseLu();
  DenseLu(DenseLu&&) noexcept;
  DenseLu& operator=(DenseLu&&) noexcept;

  void solve(std::span<const cplx> rhs, std::span<cplx> out) const;
  std::size_t dim() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct GmresResult {
  std::size_t iterations = 0;
  double achieved = 0.0;  ///< explicitly recomputed true relative residual
  bool converged = false;
};

/// Restarted GMRES with modified Gram-Schmidt, zero initial guess, stopping
/// on relative residual reduction ||b - A x|| / ||b|| <= tol. A fixed
/// iteration count is deliberately not offered: below a minimum solve
/// accuracy the count degrades sharply, so the only honest knob is the
/// residual target. The reported `achieved` is recomputed from the returned
/// x, not from the Arnoldi recurrence.
GmresResult gmres(const ComplexOp& op, std::span<const cplx> rhs, std::span<cplx> x,
                  const SolverConfig& cfg);

}  // namespace speccount

#endif  // SPECCOUNT_SOLVERS_HPP
