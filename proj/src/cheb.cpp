// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "speccount/contour.hpp"

namespace speccount {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEdgeClamp = 1.0 - 1e-12;

double clamp_mapped(double t) { return std::clamp(t, -kEdgeClamp, kEdgeClamp); }

std::vector<double> damping_factors(Damping d, std::size_t p) {
  switch (d) {
    case Damping::none:
      return std::vector<double>(p + 1, 1.0);
    case Damping::jackson:
      return jackson_coeffs(p);
    case Damping::lanczos_sigma:
      return lanczos_sigma_coeffs(p);
  }
  throw std::invalid_argument("unknown damping kind");
}

ChebFilter build(FilterKind kind, double a_hat, double b_hat, const SpectralBounds& bounds,
                 std::size_t p, Damping damping) {
  ChebFilter f;
  f.kind = kind;
  f.degree = p;
  f.a_hat = a_hat;
  f.b_hat = b_hat;
  f.damping = damping;
  f.map = make_map(bounds);
  f.gamma = cheb_coeffs(a_hat, b_hat, p);
  const auto g = damping_factors(damping, p);
  f.damped.resize(p + 1);
  for (std::size_t j = 0; j <= p; ++j) f.damped[j] = g[j] * f.gamma[j];
  return f;
}

/// Step function the filter approximates, in mapped coordinates.
double plateau_indicator(const ChebFilter& f, double t) {
  switch (f.kind) {
    case FilterKind::mid_pass:
      return (t >= f.a_hat && t <= f.b_hat) ? 1.0 : 0.0;
    case FilterKind::high_pass:
      return t >= f.a_hat ? 1.0 : 0.0;
    case FilterKind::low_pass:
      return t <= f.b_hat ? 1.0 : 0.0;
  }
  return 0.0;
}

}  // namespace

std::vector<double> cheb_coeffs(double a_hat, double b_hat, std::size_t p) {
  if (!(a_hat >= -1.0 && a_hat < b_hat && b_hat <= 1.0))
    throw std::invalid_argument("cheb_coeffs: need -1 <= a_hat < b_hat <= 1");
  const double ua = std::acos(a_hat);  // in [0, pi], ua >= ub
  const double ub = std::acos(b_hat);
  std::vector<double> g(p + 1);
  g[0] = (ua - ub) / kPi;
  for (std::size_t j = 1; j <= p; ++j) {
    const double jd = static_cast<double>(j);
    g[j] = (2.0 / kPi) * (std::sin(jd * ua) - std::sin(jd * ub)) / jd;
  }
  return g;
}

std::vector<double> jackson_coeffs(std::size_t p) {
  const double ap = kPi / static_cast<double>(p + 2);
  const double denom = static_cast<double>(p + 2) * std::sin(ap);
  std::vector<double> g(p + 1);
  for (std::size_t j = 0; j <= p; ++j) {
    const double jd = static_cast<double>(j);
    g[j] = std::sin((jd + 1.0) * ap) / denom +
           (1.0 - (jd + 1.0) / static_cast<double>(p + 2)) * std::cos(jd * ap);
  }
  return g;
}

std::vector<double> lanczos_sigma_coeffs(std::size_t p) {
  const double tp = kPi / static_cast<double>(p + 1);
  std::vector<double> g(p + 1, 1.0);
  for (std::size_t j = 1; j <= p; ++j) {
    const double x = static_cast<double>(j) * tp;
    g[j] = std::sin(x) / x;
  }
  return g;
}

ChebFilter make_midpass_filter(double a, double b, const SpectralBounds& bounds, std::size_t p,
                               Damping damping) {
  if (!(a < b)) throw std::invalid_argument("make_midpass_filter: need a < b");
  if (p == 0) throw std::invalid_argument("make_midpass_filter: degree must be positive");
  const AffineMap map = make_map(bounds);
  const double a_hat = clamp_mapped(map.map(a));
  const double b_hat = clamp_mapped(map.map(b));
  if (!(a_hat < b_hat))
    throw std::invalid_argument("make_midpass_filter: interval maps outside the bounds");
  return build(FilterKind::mid_pass, a_hat, b_hat, bounds, p, damping);
}

ChebFilter make_highpass_filter(double sigma, const SpectralBounds& bounds, std::size_t p,
                                Damping damping) {
  if (p == 0) throw std::invalid_argument("make_highpass_filter: degree must be positive");
  const AffineMap map = make_map(bounds);
  const double s_hat = clamp_mapped(map.map(sigma));
  ChebFilter f = build(FilterKind::high_pass, s_hat, 1.0, bounds, p, damping);
  return f;
}

ChebFilter make_lowpass_filter(double sigma, const SpectralBounds& bounds, std::size_t p,
                               Damping damping) {
  if (p == 0) throw std::invalid_argument("make_lowpass_filter: degree must be positive");
  const AffineMap map = make_map(bounds);
  const double s_hat = clamp_mapped(map.map(sigma));
  ChebFilter f = build(FilterKind::low_pass, -1.0, s_hat, bounds, p, damping);
  return f;
}

double filter_eval(const ChebFilter& f, double t_hat) {
  if (std::abs(t_hat) > 1.0 + 1e-12)
    throw std::domain_error("filter_eval: point outside [-1, 1]");
  const double t = std::clamp(t_hat, -1.0, 1.0);
  double tkm1 = 1.0;  // T_0
  double acc = f.damped[0];
  if (f.degree == 0) return acc;
  double tk = t;  // T_1
  acc += f.damped[1] * tk;
  for (std::size_t j = 2; j <= f.degree; ++j) {
    const double tkp1 = 2.0 * t * tk - tkm1;
    acc += f.damped[j] * tkp1;
    tkm1 = tk;
    tk = tkp1;
  }
  return acc;
}

void filter_apply(const ChebFilter& f, const RealOp& op, std::span<const double> v,
                  std::span<double> out) {
  const std::size_t n = op.dim;
  if (v.size() != n || out.size() != n) throw std::invalid_argument("filter_apply: size mismatch");
  const double c = f.map.center;
  const double h = f.map.half_span;
  std::vector<double> wm1(v.begin(), v.end());  // w_0
  for (std::size_t i = 0; i < n; ++i) out[i] = f.damped[0] * wm1[i];
  if (f.degree == 0) return;

  std::vector<double> wk(n), tmp(n);
  auto mapped_apply = [&](const std::vector<double>& x, std::vector<double>& y) {
    op.apply(x, tmp);
    for (std::size_t i = 0; i < n; ++i) y[i] = (tmp[i] - c * x[i]) / h;
  };
  mapped_apply(wm1, wk);  // w_1
  for (std::size_t i = 0; i < n; ++i) out[i] += f.damped[1] * wk[i];
  std::vector<double> wkp1(n);
  for (std::size_t j = 2; j <= f.degree; ++j) {
    mapped_apply(wk, wkp1);
    for (std::size_t i = 0; i < n; ++i) {
      const double w = 2.0 * wkp1[i] - wm1[i];
      out[i] += f.damped[j] * w;
      wm1[i] = wk[i];
      wk[i] = w;
    }
    // wm1/wk were advanced element-wise above; wkp1 is scratch again.
  }
}

double l2_error_bound(std::size_t p) { return 4.0 * kPi / (3.0 * static_cast<double>(p + 1)); }

double cheb_tail_sum(double a_hat, double b_hat, std::size_t p, std::size_t tail_terms) {
  if (!(a_hat >= -1.0 && a_hat < b_hat && b_hat <= 1.0))
    throw std::invalid_argument("cheb_tail_sum: need -1 <= a_hat < b_hat <= 1");
  const double ua = std::acos(a_hat);
  const double ub = std::acos(b_hat);
  // Terms decay like 1/j^2; summing from the small end keeps the accumulation
  // accurate.
  double s = 0.0;
  for (std::size_t j = tail_terms; j > p; --j) {
    const double jd = static_cast<double>(j);
    const double g = (2.0 / kPi) * (std::sin(jd * ua) - std::sin(jd * ub)) / jd;
    s += g * g;
  }
  return 0.5 * kPi * s;
}

double weighted_l2_sq_error(const std::vector<double>& coeffs, double a_hat, double b_hat,
                            std::size_t nodes) {
  if (coeffs.empty()) throw std::invalid_argument("weighted_l2_sq_error: empty coefficients");
  if (!(a_hat >= -1.0 && a_hat < b_hat && b_hat <= 1.0))
    throw std::invalid_argument("weighted_l2_sq_error: need -1 <= a_hat < b_hat <= 1");
  // In theta = acos(t) the weight disappears and psi(cos theta) is a cosine
  // polynomial; the integrand is smooth except at the two jumps of h, so the
  // integral is split there and each piece handled by composite
  // Gauss-Legendre panels.
  const double ta = std::acos(a_hat);  // larger angle
  const double tb = std::acos(b_hat);
  struct Piece {
    double lo, hi, h;
  };
  const Piece pieces[3] = {{0.0, tb, 0.0}, {tb, ta, 1.0}, {ta, kPi, 0.0}};

  auto psi = [&coeffs](double theta) {
    // cos(j theta) by the same three-term recurrence the filter uses.
    double ckm1 = 1.0;
    double acc = coeffs[0];
    if (coeffs.size() == 1) return acc;
    const double c1 = std::cos(theta);
    double ck = c1;
    acc += coeffs[1] * ck;
    for (std::size_t j = 2; j < coeffs.size(); ++j) {
      const double ckp1 = 2.0 * c1 * ck - ckm1;
      acc += coeffs[j] * ckp1;
      ckm1 = ck;
      ck = ckp1;
    }
    return acc;
  };

  // One shared rule, applied in panels sized so the polynomial degree is
  // resolved: panels of <= 32 points each handle degree <= 30 exactly.
  const GaussLegendre rule = gauss_legendre(32);
  double total = 0.0;
  for (const Piece& pc : pieces) {
    const double len = pc.hi - pc.lo;
    if (len <= 1e-14) continue;
    auto want = static_cast<std::size_t>(std::ceil(static_cast<double>(nodes) * len / kPi));
    const std::size_t panels = std::max<std::size_t>(1, (std::max<std::size_t>(want, 32) + 31) / 32);
    const double plen = len / static_cast<double>(panels);
    for (std::size_t q = 0; q < panels; ++q) {
      const double lo = pc.lo + plen * static_cast<double>(q);
      for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double theta = lo + 0.5 * plen * (rule.nodes[i] + 1.0);
        const double d = psi(theta) - pc.h;
        total += 0.5 * plen * rule.weights[i] * d * d;
      }
    }
  }
  return total;
}

TailReport tail_report(const ChebFilter& f, std::size_t grid_points) {
  if (grid_points < 16) throw std::invalid_argument("tail_report: grid too small");
  TailReport r;
  // Two percent of the reference span on each side of a jump counts as the
  // transition collar, independent of the degree.
  r.collar_halfwidth = 0.02 * 2.0;
  std::vector<double> edges;
  if (f.kind != FilterKind::low_pass) edges.push_back(f.a_hat);
  if (f.kind != FilterKind::high_pass) edges.push_back(f.b_hat);

  for (std::size_t i = 0; i < grid_points; ++i) {
    const double t = -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double err = std::abs(filter_eval(f, t) - plateau_indicator(f, t));
    bool collar = false;
    for (double e : edges) collar = collar || std::abs(t - e) <= r.collar_halfwidth;
    if (collar)
      r.near_edge_max = std::max(r.near_edge_max, err);
    else if (plateau_indicator(f, t) == 1.0)
      r.inside_max = std::max(r.inside_max, err);
    else
      r.outside_max = std::max(r.outside_max, err);
  }
  return r;
}

}  // namespace speccount
