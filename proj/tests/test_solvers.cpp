// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "speccount/solvers.hpp"
#include "speccount/sparse.hpp"

using namespace speccount;

namespace {

double rel_residual(const ComplexOp& op, std::span<const cplx> rhs, std::span<const cplx> x) {
  std::vector<cplx> r(rhs.size());
  op.apply(x, r);
  double rn = 0.0, bn = 0.0;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    rn += std::norm(rhs[i] - r[i]);
    bn += std::norm(rhs[i]);
  }
  return std::sqrt(rn / bn);
}

std::vector<cplx> test_rhs(std::size_t n) {
  std::vector<cplx> b(n);
  for (std::size_t i = 0; i < n; ++i)
    b[i] = cplx(std::sin(0.7 * static_cast<double>(i) + 0.1),
                std::cos(1.3 * static_cast<double>(i)));
  return b;
}

}  // namespace

TEST_CASE("dense LU solves a shifted system to near machine precision") {
  const auto a = gen_laplacian(8, 8);
  const cplx z{0.5, 0.8};
  const DenseLu lu(a, nullptr, z);
  CHECK(lu.dim() == 64);
  const auto b = test_rhs(64);
  std::vector<cplx> x(64);
  lu.solve(b, x);
  CHECK(rel_residual(make_shifted_op(a, nullptr, z), b, x) < 1e-12);
}

TEST_CASE("dense LU with an explicit B matches the shifted operator") {
  const auto a = gen_laplacian(5, 5);
  SparseMatrix bm;
  bm.n = 25;
  bm.symmetry = SymmetryKind::symmetric;
  bm.row_ptr.resize(26);
  bm.col.resize(25);
  bm.val_re.resize(25);
  for (std::size_t i = 0; i <= 25; ++i) bm.row_ptr[i] = i;
  for (std::size_t i = 0; i < 25; ++i) {
    bm.col[i] = i;
    bm.val_re[i] = 1.0 + 0.05 * static_cast<double>(i);
  }
  const cplx z{0.2, 1.1};
  const DenseLu lu(a, &bm, z);
  const auto rhs = test_rhs(25);
  std::vector<cplx> x(25);
  lu.solve(rhs, x);
  CHECK(rel_residual(make_shifted_op(a, &bm, z), rhs, x) < 1e-12);
}

TEST_CASE("dense cap refuses oversized problems") {
  const auto a = gen_laplacian(30, 30);
  CHECK_THROWS_AS(DenseLu(a, nullptr, cplx(0, 1), 100), std::invalid_argument);
}

TEST_CASE("gmres reaches the requested residual and reports it honestly") {
  const auto a = gen_laplacian(12, 12);
  const cplx z{0.4, 0.6};  // complex shift keeps the system far from singular
  const ComplexOp op = make_shifted_op(a, nullptr, z);
  const auto b = test_rhs(144);
  std::vector<cplx> x(144);
  SolverConfig cfg;
  cfg.method = SolverMethod::gmres;
  cfg.tol = 1e-9;
  cfg.restart = 25;
  cfg.max_iters = 600;
  const GmresResult r = gmres(op, b, x, cfg);
  CHECK(r.converged);
  CHECK(r.achieved <= 1e-9);
  // The reported residual is recomputed from x, not the Arnoldi estimate.
  CHECK(r.achieved == doctest::Approx(rel_residual(op, b, x)).epsilon(1e-10));
  CHECK(r.iterations > 0);
  CHECK(r.iterations <= 600);
}

TEST_CASE("gmres agrees with the dense factorization") {
  const auto a = gen_laplacian(9, 9);
  const cplx z{0.3, 0.5};
  const auto b = test_rhs(81);
  std::vector<cplx> xd(81), xg(81);
  DenseLu(a, nullptr, z).solve(b, xd);
  SolverConfig cfg;
  cfg.method = SolverMethod::gmres;
  cfg.tol = 1e-12;
  cfg.max_iters = 2000;
  gmres(make_shifted_op(a, nullptr, z), b, xg, cfg);
  double diff = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < 81; ++i) {
    diff += std::norm(xd[i] - xg[i]);
    ref += std::norm(xd[i]);
  }
  CHECK(std::sqrt(diff / ref) < 1e-9);
}

TEST_CASE("gmres on a zero right-hand side returns zero immediately") {
  const auto a = gen_laplacian(4, 4);
  const ComplexOp op = make_shifted_op(a, nullptr, cplx(0, 1));
  std::vector<cplx> b(16, cplx(0, 0)), x(16, cplx(9, 9));
  SolverConfig cfg;
  const GmresResult r = gmres(op, b, x, cfg);
  CHECK(r.converged);
  CHECK(r.iterations == 0);
  for (const cplx& xi : x) CHECK(xi == cplx(0, 0));
}

TEST_CASE("gmres reports failure when the budget is too small") {
  const auto a = gen_laplacian(16, 16);
  const ComplexOp op = make_shifted_op(a, nullptr, cplx(1.0, 1e-4));
  const auto b = test_rhs(256);
  std::vector<cplx> x(256);
  SolverConfig cfg;
  cfg.method = SolverMethod::gmres;
  cfg.tol = 1e-12;
  cfg.restart = 5;
  cfg.max_iters = 8;
  const GmresResult r = gmres(op, b, x, cfg);
  CHECK(!r.converged);
  CHECK(r.achieved > 1e-12);
  CHECK(r.achieved == doctest::Approx(rel_residual(op, b, x)).epsilon(1e-10));
}

TEST_CASE("solver guards") {
  const auto a = gen_laplacian(3, 3);
  const ComplexOp op = make_shifted_op(a, nullptr, cplx(0, 1));
  std::vector<cplx> b(9), x(8);
  CHECK_THROWS_AS(gmres(op, b, x, SolverConfig{}), std::invalid_argument);
  SparseMatrix wrong = gen_laplacian(2, 2);
  CHECK_THROWS_AS(make_shifted_op(a, &wrong, cplx(0, 1)), std::invalid_argument);
}
