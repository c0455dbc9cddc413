// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/bounds.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "speccount/detail/rng.hpp"

namespace speccount {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct RitzExtremes {
  double theta_min = std::numeric_limits<double>::infinity();
  double theta_max = -std::numeric_limits<double>::infinity();
  double eta_min = 0.0;  ///< residual bound attached to theta_min
  double eta_max = 0.0;
  bool any = false;

  void absorb(double tmin, double emin, double tmax, double emax) {
    if (tmin < theta_min) {
      theta_min = tmin;
      eta_min = emin;
    }
    if (tmax > theta_max) {
      theta_max = tmax;
      eta_max = emax;
    }
    any = true;
  }
};

}  // namespace

AffineMap make_map(const SpectralBounds& b) {
  return AffineMap{0.5 * (b.lmax + b.lmin), 0.5 * (b.lmax - b.lmin)};
}

SpectralBounds lanczos_bounds(const RealOp& op, std::size_t steps, std::uint64_t seed,
                              double margin) {
  const std::size_t n = op.dim;
  if (n == 0) throw std::invalid_argument("lanczos_bounds: empty operator");
  if (steps == 0) throw std::invalid_argument("lanczos_bounds: zero steps");
  steps = std::min(steps, n);

  RitzExtremes ext;
  constexpr unsigned kMaxStarts = 4;  // initial run plus up to 3 restarts
  for (unsigned attempt = 0; attempt < kMaxStarts; ++attempt) {
    // Seeded gaussian start vector, normalized.
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = detail::gauss(seed, 0x10b0 + attempt, i);
    double nv = std::sqrt(dot(v, v));
    if (nv == 0.0) continue;
    for (double& x : v) x /= nv;

    std::vector<std::vector<double>> basis;
    basis.push_back(v);
    std::vector<double> alpha, beta;
    std::vector<double> w(n);
    double scale = 1.0;  // running magnitude for the breakdown test
    bool breakdown = false;
    double beta_exit = 0.0;

    for (std::size_t j = 0; j < steps; ++j) {
      op.apply(basis[j], w);
      const double a = dot(w, basis[j]);
      alpha.push_back(a);
      scale = std::max({scale, std::abs(a), j > 0 ? beta[j - 1] : 0.0});
      for (std::size_t i = 0; i < n; ++i) w[i] -= a * basis[j][i];
      if (j > 0)
        for (std::size_t i = 0; i < n; ++i) w[i] -= beta[j - 1] * basis[j - 1][i];
      // Full reorthogonalization, one extra sweep over the whole basis.
      for (const auto& q : basis) {
        const double c = dot(w, q);
        for (std::size_t i = 0; i < n; ++i) w[i] -= c * q[i];
      }
      const double b = std::sqrt(dot(w, w));
      beta_exit = b;
      if (b <= 1e-12 * scale || basis.size() == n) {
        breakdown = true;
        break;
      }
      if (j + 1 == steps) break;
      beta.push_back(b);
      std::vector<double> next(n);
      for (std::size_t i = 0; i < n; ++i) next[i] = w[i] / b;
      basis.push_back(std::move(next));
    }

    const std::size_t m = alpha.size();
    if (m == 0) continue;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m),
                                              static_cast<Eigen::Index>(m));
    for (std::size_t j = 0; j < m; ++j) {
      T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) = alpha[j];
      if (j + 1 < m) {
        T(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j + 1)) = beta[j];
        T(static_cast<Eigen::Index>(j + 1), static_cast<Eigen::Index>(j)) = beta[j];
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    if (es.info() != Eigen::Success) throw std::runtime_error("lanczos_bounds: tridiagonal solve failed");
    const auto& theta = es.eigenvalues();  // ascending
    const auto& s = es.eigenvectors();
    const double residual_scale = breakdown ? 0.0 : beta_exit;
    const auto last = static_cast<Eigen::Index>(m) - 1;
    const double e_lo = residual_scale * std::abs(s(last, 0));
    const double e_hi = residual_scale * std::abs(s(last, last));
    ext.absorb(theta(0), e_lo, theta(last), e_hi);

    // A clean run (or exhaustion of the whole space) needs no restart; an
    // early invariant subspace does, to look at the orthogonal complement.
    if (!breakdown || m == n || m == steps) break;
  }
  if (!ext.any) throw std::runtime_error("lanczos_bounds: no Ritz values produced");

  double lmin = ext.theta_min;
  double lmax = ext.theta_max;
  const double span = lmax - lmin;
  lmin -= margin * span + ext.eta_min;
  lmax += margin * span + ext.eta_max;
  const double min_span = 1e-8 * std::max(1.0, std::abs(lmax));
  if (lmax - lmin < min_span) {
    // Widen by a few ulp of the midpoint past the floor so rounding cannot
    // land the realized span short of it.
    const double mid = 0.5 * (lmax + lmin);
    const double half = 0.5 * min_span +
                        4.0 * std::numeric_limits<double>::epsilon() *
                            std::max(1.0, std::abs(mid));
    lmin = mid - half;
    lmax = mid + half;
  }
  return SpectralBounds{lmin, lmax, margin};
}

}  // namespace speccount
