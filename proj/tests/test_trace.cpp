// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>
#include <vector>

#include "speccount/trace.hpp"

using namespace speccount;

namespace {

// Quadratic form of a fixed diagonal: v^T D v. Exact trace = sum of diag.
struct DiagForm {
  std::vector<double> d;
  cplx operator()(std::size_t, std::span<const double> v) const {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += d[i] * v[i] * v[i];
    return {s, 0.0};
  }
};

}  // namespace

TEST_CASE("sample vectors are pure functions of (seed, k)") {
  SampleConfig cfg;
  cfg.kind = SampleKind::gaussian_normalized;
  cfg.seed = 99;
  std::vector<double> a(32), b(32);
  sample_vector(cfg, 5, std::span<double>(a));
  sample_vector(cfg, 5, std::span<double>(b));
  CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * 32) == 0);
  sample_vector(cfg, 6, std::span<double>(b));
  CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * 32) != 0);
}

TEST_CASE("gaussian samples have unit norm, rademacher have unit entries") {
  SampleConfig cfg;
  cfg.seed = 4;
  cfg.kind = SampleKind::gaussian_normalized;
  std::vector<double> v(100);
  sample_vector(cfg, 0, std::span<double>(v));
  double nv2 = 0.0;
  for (double x : v) nv2 += x * x;
  CHECK(nv2 == doctest::Approx(1.0).epsilon(1e-12));

  cfg.kind = SampleKind::rademacher;
  sample_vector(cfg, 0, std::span<double>(v));
  for (double x : v) CHECK(std::abs(x) == 1.0);
  // Roughly balanced signs.
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / 100.0;
  CHECK(std::abs(mean) < 0.5);

  cfg.kind = SampleKind::complex_rademacher;
  std::vector<cplx> z(64);
  sample_vector(cfg, 3, std::span<cplx>(z));
  for (const cplx& x : z) {
    CHECK(std::abs(x.real()) == 1.0);
    CHECK(std::abs(x.imag()) == 1.0);
  }
}

TEST_CASE("kind/overload mismatches throw") {
  SampleConfig cfg;
  cfg.kind = SampleKind::complex_rademacher;
  std::vector<double> v(4);
  CHECK_THROWS_AS(sample_vector(cfg, 0, std::span<double>(v)), std::invalid_argument);
  cfg.kind = SampleKind::rademacher;
  std::vector<cplx> z(4);
  CHECK_THROWS_AS(sample_vector(cfg, 0, std::span<cplx>(z)), std::invalid_argument);
}

TEST_CASE("rademacher sampling is exact per sample on a diagonal operator") {
  // With +-1 entries, v^T D v = tr D for every vector: the scaling rule
  // dim * q / ||v||^2 must preserve that exactness.
  DiagForm form{{1.5, -2.0, 0.25, 4.0, 0.0, 1.0}};
  const double tr = std::accumulate(form.d.begin(), form.d.end(), 0.0);
  SampleConfig cfg;
  cfg.kind = SampleKind::rademacher;
  cfg.n_v_max = 25;
  cfg.increment_tol = 0.0;  // disabled: run all samples
  const TraceRun run = rq_estimate(6, form, cfg);
  CHECK(run.n_used() == 25);
  CHECK(!run.converged_at);
  for (double q : run.quotients) CHECK(q == doctest::Approx(tr).epsilon(1e-13));
}

TEST_CASE("complex rademacher scaling corrects the doubled norm") {
  // |v_i|^2 = 2, so the raw form doubles the trace; the ||v||^2 = 2n scaling
  // must cancel it exactly.
  const std::vector<double> d = {2.0, -1.0, 0.5, 3.0};
  auto form = [&d](std::size_t, std::span<const cplx> v) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += d[i] * std::norm(v[i]);
    return s;
  };
  SampleConfig cfg;
  cfg.kind = SampleKind::complex_rademacher;
  cfg.n_v_max = 10;
  cfg.increment_tol = 0.0;
  const TraceRun run = rq_estimate_complex(4, form, cfg);
  const double tr = 4.5;
  for (double q : run.quotients) CHECK(q == doctest::Approx(tr).epsilon(1e-13));
  for (double im : run.imag_parts) CHECK(std::abs((im) - (0.0)) <= 1e-13);
}

TEST_CASE("gaussian estimator is unbiased within sampling error") {
  std::vector<double> d(40);
  for (std::size_t i = 0; i < 40; ++i) d[i] = 0.1 * static_cast<double>(i);
  DiagForm form{d};
  const double tr = std::accumulate(d.begin(), d.end(), 0.0);
  SampleConfig cfg;
  cfg.kind = SampleKind::gaussian_normalized;
  cfg.n_v_max = 800;
  cfg.seed = 21;
  cfg.increment_tol = 0.0;
  const TraceRun run = rq_estimate(40, form, cfg);
  CHECK(run.estimate() == doctest::Approx(tr).epsilon(0.05));
}

TEST_CASE("parallel evaluation is bitwise identical to serial") {
  std::vector<double> d(64);
  for (std::size_t i = 0; i < 64; ++i) d[i] = std::sin(static_cast<double>(i));
  DiagForm form{d};
  SampleConfig cfg;
  cfg.kind = SampleKind::gaussian_normalized;
  cfg.n_v_max = 90;
  cfg.increment_tol = 0.0;
  const TraceRun serial = rq_estimate(64, form, cfg, 1);
  const TraceRun par4 = rq_estimate(64, form, cfg, 4);
  const TraceRun par7 = rq_estimate(64, form, cfg, 7);
  REQUIRE(serial.n_used() == par4.n_used());
  REQUIRE(serial.n_used() == par7.n_used());
  CHECK(std::memcmp(serial.quotients.data(), par4.quotients.data(),
                    sizeof(double) * serial.n_used()) == 0);
  CHECK(std::memcmp(serial.running_mean.data(), par7.running_mean.data(),
                    sizeof(double) * serial.n_used()) == 0);
}

TEST_CASE("early stop truncates at the monitor and parallel runs agree") {
  DiagForm form{{3.0, 3.0, 3.0}};  // rademacher makes every quotient constant
  SampleConfig cfg;
  cfg.kind = SampleKind::rademacher;
  cfg.n_v_max = 500;
  cfg.window = 10;
  cfg.increment_tol = 0.5;
  const TraceRun serial = rq_estimate(3, form, cfg, 1);
  CHECK(serial.converged_at == 10);
  CHECK(serial.n_used() == 10);
  const TraceRun par = rq_estimate(3, form, cfg, 8);
  CHECK(par.converged_at == serial.converged_at);
  CHECK(par.n_used() == serial.n_used());
  CHECK(std::memcmp(serial.quotients.data(), par.quotients.data(), sizeof(double) * 10) == 0);
}

TEST_CASE("convergence monitor semantics") {
  std::vector<double> rm(30, 5.0);
  CHECK(convergence_monitor(rm, 10, 1.0) == 10);
  CHECK(!convergence_monitor(rm, 10, 0.0));   // tol <= 0 disables
  CHECK(!convergence_monitor(rm, 10, -2.0));
  // Early movement defers convergence until the window clears it entirely.
  for (std::size_t i = 0; i < 15; ++i) rm[i] = static_cast<double>(i);
  const auto at = convergence_monitor(rm, 10, 1.0);
  REQUIRE(at.has_value());
  CHECK(*at == 25);  // first window fully inside the settled region
  // Never settles if every step is large.
  std::vector<double> wild(40);
  for (std::size_t i = 0; i < 40; ++i) wild[i] = (i % 2) ? 10.0 : -10.0;
  CHECK(!convergence_monitor(wild, 10, 1.0));
  CHECK_THROWS_AS(convergence_monitor(rm, 1, 1.0), std::invalid_argument);
}

TEST_CASE("oscillation band detector") {
  std::vector<double> rm;
  for (std::size_t i = 0; i < 60; ++i)
    rm.push_back(20.0 + 30.0 / static_cast<double>(i + 1));
  const auto at = oscillation_band_below(rm, 10, 1.0);
  REQUIRE(at.has_value());
  // Window band is 270/(m(m-9)), first below 1 at m = 22.
  CHECK(*at == 22);
  CHECK(!oscillation_band_below(rm, 10, 1e-9));
}

TEST_CASE("non-finite quotients abort with a diagnostic") {
  auto form = [](std::size_t k, std::span<const double>) {
    return cplx(k == 3 ? std::numeric_limits<double>::quiet_NaN() : 1.0, 0.0);
  };
  SampleConfig cfg;
  cfg.kind = SampleKind::rademacher;
  cfg.n_v_max = 10;
  cfg.increment_tol = 0.0;
  CHECK_THROWS_WITH_AS(rq_estimate(4, form, cfg),
                       doctest::Contains("sample 3"), std::runtime_error);
}

TEST_CASE("sample count bound from the projector tail inequality") {
  // 16 * 20 * ln(200) = 1695.47..., 16 * 1 * ln 4 = 22.18...
  CHECK(hutchinson_min_samples(20.0, 0.01) == 1696);
  CHECK(hutchinson_min_samples(1.0, 0.5) == 23);
  CHECK_THROWS_AS(hutchinson_min_samples(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(hutchinson_min_samples(5.0, 1.5), std::invalid_argument);
}

TEST_CASE("estimator guards") {
  DiagForm form{{1.0}};
  SampleConfig cfg;
  cfg.kind = SampleKind::complex_rademacher;
  CHECK_THROWS_AS(rq_estimate(1, form, cfg), std::invalid_argument);
  cfg.kind = SampleKind::rademacher;
  cfg.n_v_max = 0;
  CHECK_THROWS_AS(rq_estimate(1, form, cfg), std::invalid_argument);
}
