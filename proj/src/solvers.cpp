// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/solvers.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace speccount {

namespace {

Eigen::MatrixXcd densify(const SparseMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.n);
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m.col[k])) +=
          m.is_real() ? cplx(m.val_re[k], 0.0) : m.val_z[k];
  return d;
}

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& x : v) s += std::norm(x);
  return std::sqrt(s);
}

}  // namespace

ComplexOp make_shifted_op(const SparseMatrix& A, const SparseMatrix* B, cplx z) {
  A.validate();
  if (B) {
    B->validate();
    if (B->n != A.n) throw std::invalid_argument("make_shifted_op: dimension mismatch");
  }
  const std::size_t n = A.n;
  return ComplexOp{n, [&A, B, z, n](std::span<const cplx> x, std::span<cplx> y) {
                     matvec(A, x, y);
                     if (B) {
                       std::vector<cplx> bx(n);
                       matvec(*B, x, std::span<cplx>(bx));
                       for (std::size_t i = 0; i < n; ++i) y[i] -= z * bx[i];
                     } else {
                       for (std::size_t i = 0; i < n; ++i) y[i] -= z * x[i];
                     }
                   }};
}

struct DenseLu::Impl {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
  std::size_t n = 0;
};

DenseLu::DenseLu(const SparseMatrix& A, const SparseMatrix* B, cplx z, std::size_t cap) {
  A.validate();
  if (A.n > cap) throw std::invalid_argument("DenseLu: dimension exceeds the dense cap");
  if (B) {
    B->validate();
    if (B->n != A.n) throw std::invalid_argument("DenseLu: dimension mismatch");
  }
  Eigen::MatrixXcd M = densify(A);
  if (B)
    M -= z * densify(*B);
  else
    M -= z * Eigen::MatrixXcd::Identity(M.rows(), M.cols());
  impl_ = std::make_unique<Impl>();
  impl_->n = A.n;
  impl_->lu.compute(M);
}

DenseLu::~DenseLu() = default;
DenseLu::DenseLu(DenseLu&&) noexcept = default;
DenseLu& DenseLu::operator=(DenseLu&&) noexcept = default;

std::size_t DenseLu::dim() const { return impl_->n; }

void DenseLu::solve(std::span<const cplx> rhs, std::span<cplx> out) const {
  if (rhs.size() != impl_->n || out.size() != impl_->n)
    throw std::invalid_argument("DenseLu::solve: size mismatch");
  Eigen::Map<const Eigen::VectorXcd> b(rhs.data(), static_cast<Eigen::Index>(rhs.size()));
  Eigen::Map<Eigen::VectorXcd> x(out.data(), static_cast<Eigen::Index>(out.size()));
  x = impl_->lu.solve(b);
}

GmresResult gmres(const ComplexOp& op, std::span<const cplx> rhs, std::span<cplx> x,
                  const SolverConfig& cfg) {
  const std::size_t n = op.dim;
  if (rhs.size() != n || x.size() != n) throw std::invalid_argument("gmres: size mismatch");
  if (cfg.restart == 0 || cfg.max_iters == 0)
    throw std::invalid_argument("gmres: restart and max_iters must be positive");

  GmresResult res;
  std::fill(x.begin(), x.end(), cplx(0.0));
  const double bnorm = norm2(rhs);
  if (bnorm == 0.0) {
    res.converged = true;
    return res;
  }

  const std::size_t restart = std::min(cfg.restart, n);
  std::vector<std::vector<cplx>> V(restart + 1, std::vector<cplx>(n));
  // Hessenberg columns after the Givens updates; H[j] holds column j
  // (entries 0..j used for the triangular solve).
  std::vector<std::vector<cplx>> H(restart, std::vector<cplx>(restart + 1));
  std::vector<cplx> cs(restart), sn(restart), g(restart + 1);
  std::vector<cplx> r(n), w(n);

  while (res.iterations < cfg.max_iters) {
    // r = b - A x (x == 0 on the first pass).
    op.apply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    const double rnorm = norm2(r);
    res.achieved = rnorm / bnorm;
    if (res.achieved <= cfg.tol) {
      res.converged = true;
      return res;
    }
    for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / rnorm;
    std::fill(g.begin(), g.end(), cplx(0.0));
    g[0] = rnorm;

    std::size_t j = 0;
    for (; j < restart && res.iterations < cfg.max_iters; ++j) {
      ++res.iterations;
      op.apply(V[j], w);
      // Modified Gram-Schmidt against the basis built so far.
      for (std::size_t i = 0; i <= j; ++i) {
        cplx h = 0.0;
        for (std::size_t l = 0; l < n; ++l) h += std::conj(V[i][l]) * w[l];
        H[j][i] = h;
        for (std::size_t l = 0; l < n; ++l) w[l] -= h * V[i][l];
      }
      const double hnext = norm2(w);
      H[j][j + 1] = hnext;
      if (!std::isfinite(hnext)) throw std::runtime_error("gmres: breakdown to non-finite values");

      // Apply the accumulated rotations to the new column, then form the
      // rotation that annihilates the subdiagonal.
      for (std::size_t i = 0; i < j; ++i) {
        const cplx t = cs[i] * H[j][i] + sn[i] * H[j][i + 1];
        H[j][i + 1] = -std::conj(sn[i]) * H[j][i] + std::conj(cs[i]) * H[j][i + 1];
        H[j][i] = t;
      }
      const double denom = std::sqrt(std::norm(H[j][j]) + std::norm(H[j][j + 1]));
      if (denom == 0.0) {
        cs[j] = 1.0;
        sn[j] = 0.0;
      } else {
        cs[j] = std::conj(H[j][j]) / denom;
        sn[j] = std::conj(H[j][j + 1]) / denom;
      }
      H[j][j] = cs[j] * H[j][j] + sn[j] * H[j][j + 1];
      H[j][j + 1] = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];

      const double est = std::abs(g[j + 1]) / bnorm;
      if (hnext <= 1e-300 || est <= cfg.tol) {
        ++j;
        break;
      }
      for (std::size_t l = 0; l < n; ++l) V[j + 1][l] = w[l] / hnext;
    }

    // Back substitution R y = g, then x += V y.
    std::vector<cplx> y(j);
    for (std::size_t ii = j; ii-- > 0;) {
      cplx s = g[ii];
      for (std::size_t l = ii + 1; l < j; ++l) s -= H[l][ii] * y[l];
      y[ii] = s / H[ii][ii];
    }
    for (std::size_t ii = 0; ii < j; ++ii)
      for (std::size_t l = 0; l < n; ++l) x[l] += y[ii] * V[ii][l];
  }

  op.apply(x, r);
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
  res.achieved = norm2(r) / bnorm;
  res.converged = res.achieved <= cfg.tol;
  return res;
}

}  // namespace speccount
