// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "speccount/oracle.hpp"

using namespace speccount;

namespace {

SparseMatrix diag_matrix(const std::vector<double>& d) {
  SparseMatrix m;
  m.n = d.size();
  m.symmetry = SymmetryKind::symmetric;
  m.row_ptr.resize(d.size() + 1);
  m.col.resize(d.size());
  m.val_re = d;
  for (std::size_t i = 0; i <= d.size(); ++i) m.row_ptr[i] = i;
  for (std::size_t i = 0; i < d.size(); ++i) m.col[i] = i;
  return m;
}

}  // namespace

TEST_CASE("laplacian spectrum matches the sine closed form") {
  const auto a = gen_laplacian(50, 1);
  const auto s = dense_spectrum(a);
  REQUIRE(s.is_real());
  REQUIRE(s.size() == 50);
  const double pi = std::numbers::pi;
  for (std::size_t k = 1; k <= 50; ++k) {
    const double exact = 2.0 - 2.0 * std::cos(static_cast<double>(k) * pi / 51.0);
    CHECK(std::abs((s.eigenvalues[k - 1]) - (exact)) <= 1e-10);
  }
}

TEST_CASE("diagonal matrix returns its sorted diagonal") {
  const auto s = dense_spectrum(diag_matrix({3.0, -1.0, 2.0, -1.0}));
  REQUIRE(s.size() == 4);
  CHECK(s.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues[3] == doctest::Approx(3.0));
}

TEST_CASE("complex hermitian 2x2 closed form") {
  SparseMatrix m;
  m.n = 2;
  m.scalar = ScalarKind::complex_;
  m.symmetry = SymmetryKind::hermitian;
  m.row_ptr = {0, 2, 4};
  m.col = {0, 1, 0, 1};
  m.val_z = {cplx(1, 0), cplx(0, 1), cplx(0, -1), cplx(1, 0)};
  const auto s = dense_spectrum(m);
  REQUIRE(s.is_real());
  CHECK(std::abs((s.eigenvalues[0]) - (0.0)) <= 1e-12);
  CHECK(s.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("general matrices produce complex spectra") {
  SparseMatrix m;  // [[0, 1], [-1, 0]] has eigenvalues +-i
  m.n = 2;
  m.symmetry = SymmetryKind::general;
  m.row_ptr = {0, 1, 2};
  m.col = {1, 0};
  m.val_re = {1.0, -1.0};
  const auto s = dense_spectrum(m);
  REQUIRE(!s.is_real());
  REQUIRE(s.size() == 2);
  double imags[2] = {s.eigenvalues_complex[0].imag(), s.eigenvalues_complex[1].imag()};
  if (imags[0] > imags[1]) std::swap(imags[0], imags[1]);
  CHECK(imags[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(imags[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("pencil spectrum against a hand-solved 2x2") {
  SparseMatrix a;
  a.n = 2;
  a.symmetry = SymmetryKind::symmetric;
  a.row_ptr = {0, 2, 4};
  a.col = {0, 1, 0, 1};
  a.val_re = {2, 1, 1, 2};
  const auto b = diag_matrix({2.0, 1.0});
  const auto s = dense_spectrum(Pencil{a, b});
  // det(A - l B) = 0: 2 l^2 - 6 l + 3 = 0, l = (3 +- sqrt(3)) / 2.
  REQUIRE(s.size() == 2);
  CHECK(s.eigenvalues[0] == doctest::Approx((3.0 - std::sqrt(3.0)) / 2.0).epsilon(1e-12));
  CHECK(s.eigenvalues[1] == doctest::Approx((3.0 + std::sqrt(3.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("pencil oracle rejects an indefinite B") {
  const auto a = diag_matrix({1.0, 2.0});
  const auto b = diag_matrix({1.0, -1.0});
  CHECK_THROWS_AS(dense_spectrum(Pencil{a, b}), std::invalid_argument);
}

TEST_CASE("oracle cap guards the cubic cost") {
  const auto a = gen_laplacian(40, 40);
  CHECK_THROWS_AS(dense_spectrum(a, 100), std::invalid_argument);
}

TEST_CASE("interval and disk counts use closed boundaries") {
  const auto s = dense_spectrum(diag_matrix({-1.0, 0.0, 0.5, 1.0, 2.0}));
  CHECK(exact_count(s, 0.0, 1.0) == 3);
  CHECK(exact_count(s, -1.0, 2.0) == 5);
  CHECK(exact_count(s, 0.6, 0.9) == 0);
  CHECK(exact_count(s, cplx(0.0, 0.0), 1.0) == 4);
  CHECK_THROWS_AS(exact_count(s, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("exact polynomial filter trace sums pointwise evaluations") {
  const auto d = diag_matrix({-0.8, -0.2, 0.1, 0.4, 0.9});
  const auto s = dense_spectrum(d);
  const SpectralBounds bounds{-1.0, 1.0, 0.0};
  const ChebFilter f = make_midpass_filter(-0.3, 0.5, bounds, 200, Damping::jackson);
  const double tr = exact_filter_trace(s, f, bounds);
  // Three eigenvalues sit well inside, two well outside; a degree-200
  // Jackson filter resolves that to much better than a half count.
  CHECK(std::abs((tr) - (3.0)) <= 0.05);
  // Eigenvalues escaping the stated bounds are an error, not a clamp.
  const SpectralBounds tight{-0.5, 1.0, 0.0};
  const ChebFilter g = make_midpass_filter(-0.3, 0.5, tight, 50, Damping::none);
  CHECK_THROWS_AS(exact_filter_trace(s, g, tight), std::invalid_argument);
}

TEST_CASE("exact rational filter trace approximates the disk count") {
  const auto d = diag_matrix({-0.9, -0.4, 0.0, 0.3, 0.8, 1.7});
  const auto s = dense_spectrum(d);
  const auto q = build_halfcircle_quadrature(-0.5, 0.5, 12);
  // The eigenvalue at -0.4 sits at 80% of the contour radius, where the
  // quadrature error dominates the sum at the 1e-5 scale.
  CHECK(std::abs((exact_filter_trace(s, q)) - (3.0)) <= 1e-4);
}
