// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <vector>

#include "speccount/sparse.hpp"

using namespace speccount;

namespace {

// [[2, -1, 0], [-1, 2, -1], [0, -1, 2]]
SparseMatrix tridiag3() {
  SparseMatrix m;
  m.n = 3;
  m.symmetry = SymmetryKind::symmetric;
  m.row_ptr = {0, 2, 5, 7};
  m.col = {0, 1, 0, 1, 2, 1, 2};
  m.val_re = {2, -1, -1, 2, -1, -1, 2};
  return m;
}

}  // namespace

TEST_CASE("csr validation accepts a well-formed matrix") {
  CHECK_NOTHROW(tridiag3().validate());
}

TEST_CASE("csr validation rejects structural defects") {
  auto m = tridiag3();
  m.row_ptr[1] = 9;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = tridiag3();
  m.col[1] = 5;
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = tridiag3();
  std::swap(m.col[0], m.col[1]);  // descending inside the row
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = tridiag3();
  m.val_z.resize(m.val_re.size());  // both value arrays populated
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);

  m = SparseMatrix{};
  CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("real matvec matches the dense product") {
  const auto m = tridiag3();
  const std::vector<double> x = {1.0, 2.0, 3.0};
  std::vector<double> y(3);
  matvec(m, x, y);
  CHECK(y[0] == doctest::Approx(0.0));
  CHECK(y[1] == doctest::Approx(0.0));
  CHECK(y[2] == doctest::Approx(4.0));
}

TEST_CASE("complex matvec agrees with the real kernel on real data") {
  const auto m = tridiag3();
  const std::vector<double> xr = {0.5, -1.0, 2.0};
  std::vector<double> yr(3);
  matvec(m, xr, yr);
  const std::vector<cplx> xc = {cplx(0.5, 1.0), cplx(-1.0, 0.0), cplx(2.0, -2.0)};
  std::vector<cplx> yc(3);
  matvec(m, xc, yc);
  for (std::size_t i = 0; i < 3; ++i) {
    // Real parts act on Re(x) independently of Im(x) for a real matrix.
    std::vector<double> xi = {1.0, 0.0, -2.0};
    std::vector<double> yi(3);
    matvec(m, xi, yi);
    CHECK(yc[i].real() == doctest::Approx(yr[i]).epsilon(1e-14));
    CHECK(yc[i].imag() == doctest::Approx(yi[i]).epsilon(1e-14));
  }
}

TEST_CASE("pencil shift apply: absent B means identity") {
  Pencil p{tridiag3(), std::nullopt};
  const std::vector<double> x = {1.0, 1.0, 1.0};
  std::vector<double> y(3);
  pencil_shift_apply(p, 0.5, x, y);
  CHECK(y[0] == doctest::Approx(0.5));
  CHECK(y[1] == doctest::Approx(-0.5));
  CHECK(y[2] == doctest::Approx(0.5));

  const RealOp op = make_shift_op(p, 0.5);
  std::vector<double> y2(3);
  op.apply(x, y2);
  for (std::size_t i = 0; i < 3; ++i) CHECK(y2[i] == y[i]);
}

TEST_CASE("pencil shift apply with an explicit B") {
  SparseMatrix b;
  b.n = 3;
  b.symmetry = SymmetryKind::symmetric;
  b.row_ptr = {0, 1, 2, 3};
  b.col = {0, 1, 2};
  b.val_re = {1.0, 2.0, 4.0};
  Pencil p{tridiag3(), b};
  const std::vector<double> x = {1.0, 0.0, -1.0};
  std::vector<double> y(3);
  pencil_shift_apply(p, 2.0, x, y);
  // A x = [2, 0, -2]; B x = [1, 0, -4]; y = A x - 2 B x.
  CHECK(y[0] == doctest::Approx(0.0));
  CHECK(y[1] == doctest::Approx(0.0));
  CHECK(y[2] == doctest::Approx(6.0));
}

TEST_CASE("laplacian structure on a 4x3 grid") {
  const auto m = gen_laplacian(4, 3);
  m.validate();
  CHECK(m.n == 12);
  CHECK(m.symmetry == SymmetryKind::symmetric);
  // Every diagonal entry is 2 * (active dims) = 4.
  for (std::size_t i = 0; i < m.n; ++i) {
    bool found = false;
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      if (m.col[k] == i) {
        found = true;
        CHECK(m.val_re[k] == doctest::Approx(4.0));
      }
    CHECK(found);
  }
  // Corner row 0 couples to exactly two neighbors.
  CHECK(m.row_ptr[1] - m.row_ptr[0] == 3);
  // nnz of the 2-d 5-point stencil: 5*nx*ny - 2*(nx + ny).
  CHECK(m.nnz() == 5 * 12 - 2 * (4 + 3));
}

TEST_CASE("laplacian guards") {
  CHECK_THROWS_AS(gen_laplacian(0, 3), std::invalid_argument);
  CHECK_THROWS_AS(gen_laplacian(100, 100, 100, 10000), std::invalid_argument);
}

TEST_CASE("diagonal spectrum generator places bulk and clusters") {
  ClusterSpec spec;
  spec.lo = 0.0;
  spec.hi = 1.0;
  spec.total = 10;
  spec.clusters = {Cluster{0.5, 0.1, 4}};
  const auto m = gen_diag_spectrum(spec);
  m.validate();
  CHECK(m.n == 10);
  // Bulk of 6 points spans [0, 1] endpoints inclusive.
  CHECK(m.val_re.front() == doctest::Approx(0.0));
  CHECK(m.val_re.back() == doctest::Approx(1.0));
  std::size_t inside = 0;
  for (double v : m.val_re)
    if (v >= 0.45 - 1e-12 && v <= 0.55 + 1e-12) ++inside;
  // 4 cluster points plus the bulk point at 0.6 is outside; bulk 0.4 outside;
  // no bulk point falls in [0.45, 0.55].
  CHECK(inside == 4);
  // Sorted ascending.
  for (std::size_t i = 1; i < m.n; ++i) CHECK(m.val_re[i] >= m.val_re[i - 1]);
}

TEST_CASE("diagonal spectrum generator rejects bad recipes") {
  ClusterSpec spec;
  spec.lo = 0.0;
  spec.hi = 1.0;
  spec.total = 5;
  spec.clusters = {Cluster{0.5, 0.1, 9}};
  CHECK_THROWS_AS(gen_diag_spectrum(spec), std::invalid_argument);
  spec.clusters = {Cluster{1.2, 0.1, 2}};
  CHECK_THROWS_AS(gen_diag_spectrum(spec), std::invalid_argument);
  spec.clusters.clear();
  spec.hi = spec.lo;
  CHECK_THROWS_AS(gen_diag_spectrum(spec), std::invalid_argument);
}

TEST_CASE("single point cluster sits at its center") {
  ClusterSpec spec;
  spec.lo = -1.0;
  spec.hi = 1.0;
  spec.total = 3;
  spec.clusters = {Cluster{0.25, 0.0, 1}};
  const auto m = gen_diag_spectrum(spec);
  CHECK(m.val_re[1] == doctest::Approx(0.25));
}
