// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/contour.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace speccount {

namespace {

constexpr double kPi = std::numbers::pi;

/// P_m(x) and P'_m(x) by the Legendre three-term recurrence.
void legendre(std::size_t m, double x, double& p, double& dp) {
  double pm1 = 1.0, pk = x;
  for (std::size_t j = 2; j <= m; ++j) {
    const double jd = static_cast<double>(j);
    const double pk1 = ((2.0 * jd - 1.0) * x * pk - (jd - 1.0) * pm1) / jd;
    pm1 = pk;
    pk = pk1;
  }
  p = pk;
  dp = static_cast<double>(m) * (x * pk - pm1) / (x * x - 1.0);
}

}  // namespace

GaussLegendre gauss_legendre(std::size_t m) {
  if (m == 0 || m > 64) throw std::invalid_argument("gauss_legendre: m must be in [1, 64]");
  GaussLegendre rule;
  rule.nodes.resize(m);
  rule.weights.resize(m);
  if (m == 1) {
    rule.nodes[0] = 0.0;
    rule.weights[0] = 2.0;
    return rule;
  }
  for (std::size_t k = 0; k < m; ++k) {
    // Chebyshev-angle initial guess, then Newton on P_m.
    double x = std::cos(kPi * (static_cast<double>(k) + 0.75) / (static_cast<double>(m) + 0.5));
    double p = 0.0, dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      legendre(m, x, p, dp);
      const double step = p / dp;
      x -= step;
      if (std::abs(step) < 1e-15) break;
    }
    legendre(m, x, p, dp);
    // The cosine guess walks the roots largest-first; store them ascending.
    rule.nodes[m - 1 - k] = x;
    rule.weights[m - 1 - k] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

ContourQuadrature build_halfcircle_quadrature(double a, double b, std::size_t m) {
  if (!(a < b)) throw std::invalid_argument("build_halfcircle_quadrature: need a < b");
  const GaussLegendre rule = gauss_legendre(m);
  ContourQuadrature q;
  q.kind = ContourKind::halfcircle_conjugate;
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  q.center = cplx(c, 0.0);
  q.radius = r;
  q.upper_count = m;
  q.poles.reserve(2 * m);
  q.weights.reserve(2 * m);
  for (std::size_t k = 0; k < m; ++k) {
    const double theta = 0.5 * kPi * (1.0 - rule.nodes[k]);
    const cplx e = std::polar(1.0, theta);
    q.poles.push_back(c + r * e);
    q.weights.push_back(-(rule.weights[k] * r / 4.0) * e);
  }
  for (std::size_t k = 0; k < m; ++k) {
    q.poles.push_back(std::conj(q.poles[k]));
    q.weights.push_back(std::conj(q.weights[k]));
  }
  return q;
}

ContourQuadrature build_fullcircle_quadrature(cplx center, double radius, std::size_t m) {
  if (radius <= 0.0) throw std::invalid_argument("build_fullcircle_quadrature: radius must be positive");
  if (m < 2 || m % 2 != 0)
    throw std::invalid_argument("build_fullcircle_quadrature: pole count must be even and >= 2");
  const std::size_t mh = m / 2;
  const GaussLegendre rule = gauss_legendre(mh);
  ContourQuadrature q;
  q.kind = ContourKind::fullcircle;
  q.center = center;
  q.radius = radius;
  q.upper_count = mh;
  q.poles.reserve(m);
  q.weights.reserve(m);
  for (std::size_t k = 0; k < mh; ++k) {
    const double theta = 0.5 * kPi * (1.0 - rule.nodes[k]);
    const cplx e = std::polar(1.0, theta);
    q.poles.push_back(center + radius * e);
    q.weights.push_back(-(rule.weights[k] * radius / 4.0) * e);
  }
  for (std::size_t k = 0; k < mh; ++k) {
    const cplx e = std::conj(q.poles[k] - center) / radius;
    q.poles.push_back(center + radius * e);
    q.weights.push_back(-(rule.weights[k] * radius / 4.0) * e);
  }
  return q;
}

cplx rational_eval(const ContourQuadrature& q, cplx lambda) {
  cplx acc = 0.0;
  const double guard = 1e-14 * q.radius;
  for (std::size_t j = 0; j < q.poles.size(); ++j) {
    const cplx d = lambda - q.poles[j];
    if (std::abs(d) <= guard) throw std::domain_error("rational_eval: evaluation point hits a pole");
    acc += q.weights[j] / d;
  }
  return acc;
}

double rational_eval_real(const ContourQuadrature& q, double lambda) {
  if (q.kind != ContourKind::halfcircle_conjugate)
    throw std::invalid_argument("rational_eval_real: quadrature is not conjugate-symmetric");
  const cplx v = rational_eval(q, cplx(lambda, 0.0));
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v.real())))
    throw std::runtime_error("rational_eval_real: imaginary part did not cancel");
  return v.real();
}

}  // namespace speccount
