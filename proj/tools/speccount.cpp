// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

// speccount: command-line front end for the stochastic eigenvalue-count
// estimators. Every subcommand emits exactly one JSON document (stdout or
// --out); per-sample and grid data stream to --csv. Same flags and seed
// produce byte-identical JSON except for the wall_time_ms field.
//
// Exit codes: 0 success, 1 runtime failure (reported as structured error
// JSON on stdout), 2 usage error.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "speccount/bounds.hpp"
#include "speccount/cheb.hpp"
#include "speccount/contour.hpp"
#include "speccount/count.hpp"
#include "speccount/matrix_market.hpp"
#include "speccount/oracle.hpp"
#include "speccount/solvers.hpp"
#include "speccount/sparse.hpp"
#include "speccount/trace.hpp"

namespace {

using ojson = nlohmann::ordered_json;
using speccount::cplx;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + path);
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path);
}

void emit_json(ojson j, const std::string& out_path) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty())
    std::cout << text;
  else
    write_text(out_path, text);
}

// ---------------------------------------------------------------------------
// Shared flag bundles.

struct SampleOpts {
  std::string sampling = "gaussian";
  std::size_t nv = 200;
  std::uint64_t seed = 42;
  std::size_t window = 10;
  double inc_tol = 1.0;
  unsigned threads = 1;

  speccount::SampleConfig to_config() const {
    speccount::SampleConfig c;
    if (sampling == "gaussian")
      c.kind = speccount::SampleKind::gaussian_normalized;
    else if (sampling == "rademacher")
      c.kind = speccount::SampleKind::rademacher;
    else
      throw CLI::ValidationError("--sampling", "unknown sampling kind: " + sampling);
    c.n_v_max = nv;
    c.seed = seed;
    c.window = window;
    c.increment_tol = inc_tol;
    return c;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--sampling", sampling, "Sample family: gaussian | rademacher")
        ->default_str("gaussian");
    cmd->add_option("--nv", nv, "Maximum number of sample vectors")->default_str("200");
    cmd->add_option("--seed", seed, "RNG seed (fixed default, never time-based)")
        ->default_str("42");
    cmd->add_option("--window", window, "Convergence-monitor trailing window")
        ->default_str("10");
    cmd->add_option("--inc-tol", inc_tol,
                    "Monitor increment tolerance; <= 0 disables early stop")
        ->default_str("1");
    cmd->add_option("--threads", threads,
                    "Worker threads (aggregation is deterministic regardless)")
        ->default_str("1");
  }

  ojson echo() const {
    ojson e;
    e["sampling"] = sampling;
    e["nv"] = nv;
    e["seed"] = seed;
    e["window"] = window;
    e["inc_tol"] = inc_tol;
    e["threads"] = threads;
    return e;
  }
};

struct SolverOpts {
  std::string solver = "dense";
  double tol = 1e-8;
  std::size_t restart = 20;
  std::size_t max_iters = 200;
  std::size_t dense_cap = 8000;

  speccount::SolverConfig to_config() const {
    speccount::SolverConfig c;
    if (solver == "dense")
      c.method = speccount::SolverMethod::dense_lu;
    else if (solver == "gmres")
      c.method = speccount::SolverMethod::gmres;
    else
      throw CLI::ValidationError("--solver", "unknown solver: " + solver);
    c.tol = tol;
    c.restart = restart;
    c.max_iters = max_iters;
    c.dense_cap = dense_cap;
    return c;
  }

  void add_flags(CLI::App* cmd) {
    cmd->add_option("--solver", solver, "Resolvent solver: dense | gmres")
        ->default_str("dense");
    cmd->add_option("--tol", tol, "GMRES relative residual target")->default_str("1e-08");
    cmd->add_option("--restart", restart, "GMRES restart length")->default_str("20");
    cmd->add_option("--max-iters", max_iters, "GMRES total iteration budget")
        ->default_str("200");
    cmd->add_option("--dense-cap", dense_cap, "Dimension cap for dense factorization")
        ->default_str("8000");
  }

  ojson echo() const {
    ojson e;
    e["solver"] = solver;
    e["tol"] = tol;
    e["restart"] = restart;
    e["max_iters"] = max_iters;
    e["dense_cap"] = dense_cap;
    return e;
  }
};

speccount::Damping parse_damping(const std::string& s) {
  if (s == "none") return speccount::Damping::none;
  if (s == "jackson") return speccount::Damping::jackson;
  if (s == "sigma") return speccount::Damping::lanczos_sigma;
  throw CLI::ValidationError("--damping", "unknown damping: " + s);
}

const char* damping_name(speccount::Damping d) {
  switch (d) {
    case speccount::Damping::none: return "none";
    case speccount::Damping::jackson: return "jackson";
    default: return "sigma";
  }
}

speccount::SparseMatrix load_matrix(const std::string& path) {
  return speccount::load_matrix_market(path);
}

// ---------------------------------------------------------------------------
// Report serialization.

ojson bounds_json(const speccount::SpectralBounds& b) {
  ojson j;
  j["lmin"] = b.lmin;
  j["lmax"] = b.lmax;
  j["margin"] = b.margin;
  return j;
}

ojson per_sample_json(const speccount::TraceRun& run) {
  ojson arr = ojson::array();
  const bool complex_run = !run.imag_parts.empty();
  for (std::size_t k = 0; k < run.quotients.size(); ++k) {
    ojson e;
    e["k"] = k + 1;
    e["quotient"] = run.quotients[k];
    e["running_mean"] = run.running_mean[k];
    if (complex_run) e["imag"] = run.imag_parts[k];
    arr.push_back(std::move(e));
  }
  return arr;
}

std::string per_sample_csv(const speccount::TraceRun& run) {
  const bool complex_run = !run.imag_parts.empty();
  std::string csv = complex_run ? "k,quotient,running_mean,imag\n"
                                : "k,quotient,running_mean\n";
  char line[160];
  for (std::size_t k = 0; k < run.quotients.size(); ++k) {
    if (complex_run)
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g\n", k + 1,
                    run.quotients[k], run.running_mean[k], run.imag_parts[k]);
    else
      std::snprintf(line, sizeof line, "%zu,%.17g,%.17g\n", k + 1, run.quotients[k],
                    run.running_mean[k]);
    csv += line;
  }
  return csv;
}

// Common body of every count-like report: estimate first, diagnostics after,
// wall time last so a determinism check only has to ignore one line.
ojson count_json(const std::string& command, const speccount::CountReport& r,
                 ojson bounds, ojson config_echo, double wall_ms) {
  ojson j;
  j["schema"] = 1;
  j["command"] = command;
  j["estimate"] = r.estimate;
  j["rounded"] = r.rounded;
  j["method"] = r.method;
  j["n_v_used"] = r.run.n_used();
  if (r.run.converged_at)
    j["converged_at"] = *r.run.converged_at;
  else
    j["converged_at"] = nullptr;
  j["bounds"] = std::move(bounds);
  if (r.method.rfind("poly", 0) == 0) {
    j["degree"] = r.degree;
    j["damping"] = damping_name(r.damping);
  } else {
    j["poles_upper"] = r.poles_upper;
    j["poles_total"] = r.poles_total;
    j["pole_partials"] = r.pole_partials;
  }
  j["per_sample"] = per_sample_json(r.run);
  j["config_echo"] = std::move(config_echo);
  j["wall_time_ms"] = wall_ms;
  return j;
}

// ---------------------------------------------------------------------------
// bounds

struct BoundsCmd {
  std::string matrix;
  std::size_t steps = 60;
  double margin = 0.005;
  std::uint64_t seed = 42;
  std::string out;

  ojson run() const {
    const auto t0 = Clock::now();
    const auto A = load_matrix(matrix);
    const auto op = speccount::make_op(A);
    const auto b = speccount::lanczos_bounds(op, steps, seed, margin);
    ojson j;
    j["schema"] = 1;
    j["command"] = "bounds";
    j["n"] = A.n;
    j["bounds"] = bounds_json(b);
    ojson echo;
    echo["matrix"] = matrix;
    echo["steps"] = steps;
    echo["margin"] = margin;
    echo["seed"] = seed;
    j["config_echo"] = std::move(echo);
    j["wall_time_ms"] = ms_since(t0);
    return j;
  }
};

// ---------------------------------------------------------------------------
// count / count-gen / trace-run

struct CountCmd {
  std::string matrix;
  std::string matrix_b;  // count-gen only
  double a = 0.0, b = 0.0;
  std::string method = "poly";
  // poly
  std::size_t degree = 100;
  std::string damping = "none";
  std::vector<double> given_bounds;  // --lmin --lmax pair via --bounds
  std::size_t bounds_steps = 60;
  double bounds_margin = 0.005;
  // rational
  std::size_t nc = 8;
  bool swapped = false;
  SolverOpts solver;
  SampleOpts samples;
  // trace-run extra
  double band_level = 1.0;
  std::string out, csv;

  void add_common(CLI::App* cmd, bool generalized) {
    cmd->add_option("--matrix", matrix, "Matrix Market file (A)")->required();
    if (generalized)
      cmd->add_option("--matrix-b", matrix_b, "Matrix Market file (B, SPD)")->required();
    cmd->add_option("--a", a, "Interval lower endpoint")->required();
    cmd->add_option("--b", b, "Interval upper endpoint")->required();
    cmd->add_option("--method", method, "Filter: poly | rational")->default_str("poly");
    cmd->add_option("--degree", degree, "Polynomial filter degree")->default_str("100");
    cmd->add_option("--damping", damping, "Polynomial damping: none | jackson | sigma")
        ->default_str("none");
    cmd->add_option("--bounds", given_bounds,
                    "Spectrum bounds lmin lmax (skip the Lanczos estimate)")
        ->expected(2);
    cmd->add_option("--bounds-steps", bounds_steps, "Lanczos steps for the bounds")
        ->default_str("60");
    cmd->add_option("--bounds-margin", bounds_margin, "Relative bounds widening per side")
        ->default_str("0.005");
    cmd->add_option("--nc", nc,
                    "Rational filter: quadrature points on the upper half-circle "
                    "(total poles = 2*nc; the report prints both)")
        ->default_str("8");
    cmd->add_flag("--swapped", swapped,
                  "Rational filter: pole-major loop order (identical estimate)");
    solver.add_flags(cmd);
    samples.add_flags(cmd);
    cmd->add_option("--out", out, "Write the JSON report here instead of stdout");
    cmd->add_option("--csv", csv, "Stream per-sample data (k,quotient,running_mean) here");
  }

  speccount::RunConfig run_config() const {
    speccount::RunConfig cfg;
    cfg.samples = samples.to_config();
    cfg.solver = solver.to_config();
    cfg.bounds_steps = bounds_steps;
    cfg.bounds_margin = bounds_margin;
    cfg.threads = samples.threads;
    return cfg;
  }

  ojson echo(const std::string& command) const {
    ojson e;
    e["command"] = command;
    e["matrix"] = matrix;
    if (!matrix_b.empty()) e["matrix_b"] = matrix_b;
    e["a"] = a;
    e["b"] = b;
    e["method"] = method;
    if (method == "poly") {
      e["degree"] = degree;
      e["damping"] = damping;
      if (given_bounds.size() == 2) e["bounds"] = given_bounds;
      e["bounds_steps"] = bounds_steps;
      e["bounds_margin"] = bounds_margin;
    } else {
      e["nc"] = nc;
      e["swapped"] = swapped;
      e.update(solver.echo());
    }
    e.update(samples.echo());
    return e;
  }

  ojson run(const std::string& command, bool generalized, bool trace_focus) const {
    const auto t0 = Clock::now();
    const auto cfg = run_config();
    speccount::Pencil P;
    P.A = load_matrix(matrix);
    if (generalized) P.B = load_matrix(matrix_b);

    speccount::CountReport r;
    ojson bjson;
    if (method == "poly") {
      const auto damp = parse_damping(damping);
      std::optional<speccount::SpectralBounds> given;
      if (given_bounds.size() == 2)
        given = speccount::SpectralBounds{given_bounds[0], given_bounds[1], 0.0};
      if (generalized) {
        // The two shifted operators A - aB and A - bB have their own spectra;
        // a single user-supplied pair cannot serve both.
        if (given)
          throw CLI::ValidationError("--bounds",
                                     "only the standard problem accepts fixed bounds");
        r = speccount::count_poly_generalized(P, a, b, degree, damp, cfg);
        bjson["low"] = bounds_json(*r.bounds_low);
        bjson["high"] = bounds_json(*r.bounds_high);
      } else {
        r = speccount::count_poly_standard(P.A, a, b, degree, damp, cfg, given);
        bjson = bounds_json(*r.bounds);
      }
    } else if (method == "rational") {
      if (swapped)
        r = speccount::count_rational_swapped(P, a, b, nc, cfg);
      else if (generalized)
        r = speccount::count_rational(P, a, b, nc, cfg);
      else
        r = speccount::count_rational(P.A, a, b, nc, cfg);
      bjson = nullptr;
    } else {
      throw CLI::ValidationError("--method", "unknown method: " + method);
    }

    if (!csv.empty()) write_text(csv, per_sample_csv(r.run));
    ojson j = count_json(command, r, std::move(bjson), echo(command), 0.0);
    if (trace_focus) {
      const auto band = speccount::oscillation_band_below(
          r.run.running_mean, samples.window, band_level);
      j.erase("wall_time_ms");
      j["band_level"] = band_level;
      if (band)
        j["band_below_at"] = *band;
      else
        j["band_below_at"] = nullptr;
      j["config_echo"]["band_level"] = band_level;
    }
    j["wall_time_ms"] = ms_since(t0);
    return j;
  }
};

// ---------------------------------------------------------------------------
// count-nonsym

struct NonsymCmd {
  std::string matrix;
  double center_re = 0.0, center_im = 0.0, radius = 0.0;
  std::size_t nc = 16;
  SolverOpts solver;
  SampleOpts samples;
  std::string out, csv;

  ojson run() const {
    const auto t0 = Clock::now();
    auto cfg = speccount::RunConfig{};
    cfg.samples = samples.to_config();  // kind is overridden by the estimator
    cfg.solver = solver.to_config();
    cfg.threads = samples.threads;
    const auto A = load_matrix(matrix);
    const cplx center(center_re, center_im);
    const auto r = speccount::count_rational_nonsymmetric(A, center, radius, nc, cfg);
    if (!csv.empty()) write_text(csv, per_sample_csv(r.run));

    ojson echo;
    echo["command"] = "count-nonsym";
    echo["matrix"] = matrix;
    echo["center_re"] = center_re;
    echo["center_im"] = center_im;
    echo["radius"] = radius;
    echo["nc"] = nc;
    echo.update(solver.echo());
    echo.update(samples.echo());
    echo["sampling"] = "complex-rademacher";  // forced for non-Hermitian counts
    ojson j = count_json("count-nonsym", r, nullptr, std::move(echo), 0.0);
    j["wall_time_ms"] = ms_since(t0);
    return j;
  }
};

// ---------------------------------------------------------------------------
// suggest-m0

struct SuggestCmd {
  std::string matrix;
  double a = 0.0, b = 0.0;
  std::string method = "poly";
  std::size_t degree = 100;
  std::string damping = "jackson";
  std::size_t nc = 8;
  SolverOpts solver;
  SampleOpts samples;
  std::size_t bounds_steps = 60;
  double bounds_margin = 0.005;
  std::string out;

  ojson run() const {
    const auto t0 = Clock::now();
    speccount::RunConfig cfg;
    cfg.samples = samples.to_config();
    cfg.solver = solver.to_config();
    cfg.bounds_steps = bounds_steps;
    cfg.bounds_margin = bounds_margin;
    cfg.threads = samples.threads;
    const auto A = load_matrix(matrix);

    std::size_t m0 = 0;
    if (method == "poly")
      m0 = speccount::suggest_subspace_size(A, a, b, degree, parse_damping(damping), cfg);
    else if (method == "rational")
      m0 = speccount::suggest_subspace_size_rational(A, a, b, nc, cfg);
    else
      throw CLI::ValidationError("--method", "unknown method: " + method);

    ojson j;
    j["schema"] = 1;
    j["command"] = "suggest-m0";
    j["m0"] = m0;
    j["enlargement"] = (b - a) / 4.0;
    ojson echo;
    echo["matrix"] = matrix;
    echo["a"] = a;
    echo["b"] = b;
    echo["method"] = method;
    if (method == "poly") {
      echo["degree"] = degree;
      echo["damping"] = damping;
    } else {
      echo["nc"] = nc;
      echo.update(solver.echo());
    }
    echo.update(samples.echo());
    j["config_echo"] = std::move(echo);
    j["wall_time_ms"] = ms_since(t0);
    return j;
  }
};

// ---------------------------------------------------------------------------
// filter-eval

struct FilterEvalCmd {
  double a = 0.0, b = 0.0;
  std::size_t degree = 80;
  std::string damping = "none";
  double lmin = -1.0, lmax = 1.0;
  std::size_t grid = 1001;
  std::string out, csv;

  ojson run() const {
    const auto t0 = Clock::now();
    if (grid < 2) throw CLI::ValidationError("--grid", "need at least 2 points");
    const speccount::SpectralBounds bounds{lmin, lmax, 0.0};
    const auto f =
        speccount::make_midpass_filter(a, b, bounds, degree, parse_damping(damping));

    std::size_t rows = 0;
    if (!csv.empty()) {
      std::string body = "t,psi\n";
      char line[80];
      for (std::size_t i = 0; i < grid; ++i) {
        const double t =
            lmin + (lmax - lmin) * static_cast<double>(i) / static_cast<double>(grid - 1);
        const double psi = speccount::filter_eval(f, f.map.map(t));
        std::snprintf(line, sizeof line, "%.17g,%.17g\n", t, psi);
        body += line;
        ++rows;
      }
      write_text(csv, body);
    }

    const auto report = speccount::tail_report(f);
    ojson j;
    j["schema"] = 1;
    j["command"] = "filter-eval";
    j["degree"] = degree;
    j["damping"] = damping;
    j["a_hat"] = f.a_hat;
    j["b_hat"] = f.b_hat;
    j["l2_bound_undamped"] = speccount::l2_error_bound(degree);
    j["weighted_l2_sq_error"] =
        speccount::weighted_l2_sq_error(f.damped, f.a_hat, f.b_hat);
    j["plateau_max_dev"] = report.inside_max;
    j["collar_max_dev"] = report.near_edge_max;
    j["outside_max_dev"] = report.outside_max;
    j["collar_halfwidth"] = report.collar_halfwidth;
    j["csv_rows"] = rows;
    ojson echo;
    echo["a"] = a;
    echo["b"] = b;
    echo["degree"] = degree;
    echo["damping"] = damping;
    echo["lmin"] = lmin;
    echo["lmax"] = lmax;
    echo["grid"] = grid;
    j["config_echo"] = std::move(echo);
    j["wall_time_ms"] = ms_since(t0);
    return j;
  }
};

// ---------------------------------------------------------------------------
// rational-eval

struct RationalEvalCmd {
  double a = 0.0, b = 0.0;
  bool full = false;
  double center_re = 0.0, center_im = 0.0, radius = 0.0;
  std::size_t nc = 8;
  std::size_t grid = 1001;
  std::vector<double> grid_range;  // optional lo hi
  std::string out, csv;

  ojson run() const {
    const auto t0 = Clock::now();
    speccount::ContourQuadrature q;
    if (full)
      q = speccount::build_fullcircle_quadrature(cplx(center_re, center_im), radius, nc);
    else
      q = speccount::build_halfcircle_quadrature(a, b, nc);

    double lo = q.center.real() - 2.0 * q.radius;
    double hi = q.center.real() + 2.0 * q.radius;
    if (grid_range.size() == 2) {
      lo = grid_range[0];
      hi = grid_range[1];
    }

    std::size_t rows = 0;
    if (!csv.empty()) {
      if (grid < 2) throw CLI::ValidationError("--grid", "need at least 2 points");
      std::string body = "lambda_re,lambda_im,chi_re,chi_im\n";
      char line[160];
      for (std::size_t i = 0; i < grid; ++i) {
        const double x =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(grid - 1);
        const cplx lam(x, q.center.imag());
        const cplx chi = speccount::rational_eval(q, lam);
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.17g\n", lam.real(),
                      lam.imag(), chi.real(), chi.imag());
        body += line;
        ++rows;
      }
      write_text(csv, body);
    }

    const cplx at_center = speccount::rational_eval(q, q.center);
    ojson j;
    j["schema"] = 1;
    j["command"] = "rational-eval";
    j["contour"] = full ? "fullcircle" : "halfcircle";
    j["center_re"] = q.center.real();
    j["center_im"] = q.center.imag();
    j["radius"] = q.radius;
    j["poles_upper"] = q.upper_count;
    j["poles_total"] = q.poles.size();
    j["chi_center_re"] = at_center.real();
    j["chi_center_im"] = at_center.imag();
    j["csv_rows"] = rows;
    ojson echo;
    if (full) {
      echo["center_re"] = center_re;
      echo["center_im"] = center_im;
      echo["radius"] = radius;
    } else {
      echo["a"] = a;
      echo["b"] = b;
    }
    echo["full"] = full;
    echo["nc"] = nc;
    echo["grid"] = grid;
    if (grid_range.size() == 2) echo["grid_range"] = grid_range;
    j["config_echo"] = std::move(echo);
    j["wall_time_ms"] = ms_since(t0);
    return j;
  }
};

// ---------------------------------------------------------------------------
// oracle-count

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string file_hash_hex(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open matrix file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(ss.str())));
  return buf;
}

struct OracleCmd {
  std::string matrix;
  std::string matrix_b;
  bool has_a = false, has_b = false;
  double a = 0.0, b = 0.0;
  double center_re = 0.0, center_im = 0.0;
  double radius = -1.0;
  std::size_t degree = 0;  // 0 = no polynomial trace
  std::string damping = "none";
  std::size_t nc = 0;  // 0 = no rational trace
  double margin = 0.0;
  std::size_t cap = 8000;
  bool no_cache = false;
  std::string out;

  // Spectrum cache sidecar, keyed by the content hash of the input file(s).
  // A stale or foreign sidecar is ignored and rewritten.
  speccount::DenseSpectrum spectrum_cached(const speccount::Pencil& P) const {
    namespace fs = std::filesystem;
    const fs::path sidecar = fs::path(matrix).concat(".spectrum.json");
    std::string key = file_hash_hex(matrix);
    if (!matrix_b.empty()) key += "-" + file_hash_hex(matrix_b);

    if (!no_cache && fs::exists(sidecar)) {
      try {
        std::ifstream f(sidecar);
        const auto j = nlohmann::json::parse(f);
        if (j.at("schema") == 1 && j.at("hash") == key) {
          speccount::DenseSpectrum s;
          s.eigenvalues = j.at("real").get<std::vector<double>>();
          const auto re = j.at("complex_re").get<std::vector<double>>();
          const auto im = j.at("complex_im").get<std::vector<double>>();
          for (std::size_t i = 0; i < re.size(); ++i)
            s.eigenvalues_complex.emplace_back(re[i], im[i]);
          return s;
        }
      } catch (const std::exception&) {
        // fall through to recompute
      }
    }

    speccount::DenseSpectrum s = P.B ? speccount::dense_spectrum(P, cap)
                                     : speccount::dense_spectrum(P.A, cap);
    if (!no_cache) {
      nlohmann::ordered_json j;
      j["schema"] = 1;
      j["hash"] = key;
      j["real"] = s.eigenvalues;
      std::vector<double> re, im;
      for (const cplx& z : s.eigenvalues_complex) {
        re.push_back(z.real());
        im.push_back(z.imag());
      }
      j["complex_re"] = re;
      j["complex_im"] = im;
      try {
        write_text(sidecar.string(), j.dump() + "\n");
      } catch (const std::exception&) {
        // best-effort cache; an unwritable directory is not an error
      }
    }
    return s;
  }

  ojson run() const {
    const auto t0 = Clock::now();
    const bool disk = radius >= 0.0;
    if (disk == (has_a || has_b))
      throw CLI::ValidationError(
          "oracle-count", "give either --a/--b (interval) or --radius (disk)");
    if (!disk && !(has_a && has_b))
      throw CLI::ValidationError("oracle-count", "interval mode needs both --a and --b");

    speccount::Pencil P;
    P.A = load_matrix(matrix);
    if (!matrix_b.empty()) P.B = load_matrix(matrix_b);
    const auto s = spectrum_cached(P);

    ojson j;
    j["schema"] = 1;
    j["command"] = "oracle-count";
    j["n"] = s.size();
    if (disk) {
      j["exact_count"] = speccount::exact_count(s, cplx(center_re, center_im), radius);
      if (nc > 0) {
        const auto q = speccount::build_fullcircle_quadrature(
            cplx(center_re, center_im), radius, nc);
        j["rational_trace"] = speccount::exact_filter_trace(s, q);
      }
    } else {
      j["exact_count"] = speccount::exact_count(s, a, b);
      if (degree > 0) {
        if (!s.is_real())
          throw std::runtime_error("polynomial filter trace needs a real spectrum");
        // Tight oracle bounds: the exact extremes, widened only by --margin.
        speccount::SpectralBounds bounds{s.eigenvalues.front(), s.eigenvalues.back(),
                                         0.0};
        const double span = bounds.lmax - bounds.lmin;
        bounds.lmin -= margin * span;
        bounds.lmax += margin * span;
        bounds.margin = margin;
        const auto f = speccount::make_midpass_filter(a, b, bounds, degree,
                                                      parse_damping(damping));
        j["poly_trace"] = speccount::exact_filter_trace(s, f, bounds);
        j["bounds"] = bounds_json(bounds);
      }
      if (nc > 0) {
        const auto q = speccount::build_halfcircle_quadrature(a, b, nc);
        j["rational_trace"] = speccount::exact_filter_trace(s, q);
      }
    }

    ojson echo;
    echo["matrix"] = matrix;
    if (!matrix_b.empty()) echo["matrix_b"] = matrix_b;
    if (disk) {
      echo["center_re"] = center_re;
      echo["center_im"] = center_im;
      echo["radius"] = radius;
    } else {
      echo["a"] = a;
      echo["b"] = b;
    }
    if (degree > 0) {
      echo["degree"] = degree;
      echo["damping"] = damping;
      echo["margin"] = margin;
    }
    if (nc > 0) echo["nc"] = nc;
    echo["cap"] = cap;
    echo["no_cache"] = no_cache;
    j["config_echo"] = std::move(echo);
    j["wall_time_ms"] = ms_since(t0);
    return j;
  }
};

// ---------------------------------------------------------------------------
// gen-matrix

struct GenMatrixCmd {
  std::string kind = "laplacian";
  std::size_t nx = 10, ny = 1, nz = 1;
  double lo = 0.0, hi = 1.0;
  std::size_t total = 0;
  std::vector<std::string> clusters;  // "center,width,count"
  std::uint64_t seed = 0;
  std::string out_matrix;
  std::string out;

  ojson run() const {
    const auto t0 = Clock::now();
    speccount::SparseMatrix A;
    double min_gap = 0.0;
    if (kind == "laplacian") {
      A = speccount::gen_laplacian(nx, ny, nz);
    } else if (kind == "diag") {
      speccount::ClusterSpec spec;
      spec.lo = lo;
      spec.hi = hi;
      spec.total = total;
      for (const std::string& c : clusters) {
        speccount::Cluster cl;
        unsigned long long cnt = 0;
        if (std::sscanf(c.c_str(), "%lf,%lf,%llu", &cl.center, &cl.width, &cnt) != 3)
          throw CLI::ValidationError("--cluster",
                                     "expected center,width,count: " + c);
        cl.count = static_cast<std::size_t>(cnt);
        spec.clusters.push_back(cl);
      }
      A = speccount::gen_diag_spectrum(spec, seed);
      min_gap = spec.min_relative_gap();
    } else {
      throw CLI::ValidationError("--kind", "unknown kind: " + kind);
    }
    speccount::save_matrix_market(A, out_matrix);

    ojson j;
    j["schema"] = 1;
    j["command"] = "gen-matrix";
    j["kind"] = kind;
    j["n"] = A.n;
    j["nnz"] = A.nnz();
    j["path"] = out_matrix;
    if (kind == "diag") j["min_relative_gap"] = min_gap;
    ojson echo;
    echo["kind"] = kind;
    if (kind == "laplacian") {
      echo["nx"] = nx;
      echo["ny"] = ny;
      echo["nz"] = nz;
    } else {
      echo["lo"] = lo;
      echo["hi"] = hi;
      echo["total"] = total;
      echo["clusters"] = clusters;
      echo["seed"] = seed;
    }
    echo["out_matrix"] = out_matrix;
    j["config_echo"] = std::move(echo);
    j["wall_time_ms"] = ms_since(t0);
    return j;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "speccount: stochastic estimation of the number of eigenvalues of a "
      "sparse Hermitian matrix (or definite pencil, or general complex "
      "matrix) inside an interval or disk.\n"
      "Set SPECCOUNT_DATA_DIR to point tests at external matrix files."};
  app.require_subcommand(1);

  BoundsCmd bounds_cmd;
  CountCmd count_cmd, gen_cmd, trace_cmd;
  NonsymCmd nonsym_cmd;
  SuggestCmd suggest_cmd;
  FilterEvalCmd filter_cmd;
  RationalEvalCmd rational_cmd;
  OracleCmd oracle_cmd;
  GenMatrixCmd genmat_cmd;

  auto* c_bounds =
      app.add_subcommand("bounds", "Lanczos estimate of the enclosing spectrum bounds");
  c_bounds->add_option("--matrix", bounds_cmd.matrix, "Matrix Market file")->required();
  c_bounds->add_option("--steps", bounds_cmd.steps, "Lanczos steps")->default_str("60");
  c_bounds->add_option("--margin", bounds_cmd.margin, "Relative widening per side")
      ->default_str("0.005");
  c_bounds->add_option("--seed", bounds_cmd.seed, "Start-vector seed")->default_str("42");
  c_bounds->add_option("--out", bounds_cmd.out, "JSON output file");

  auto* c_count = app.add_subcommand(
      "count", "Estimate the eigenvalue count of a symmetric matrix in [a, b]");
  count_cmd.add_common(c_count, false);

  auto* c_gen = app.add_subcommand(
      "count-gen", "Estimate the eigenvalue count of a definite pencil (A, B) in [a, b]");
  gen_cmd.add_common(c_gen, true);

  auto* c_nonsym = app.add_subcommand(
      "count-nonsym", "Estimate the eigenvalue count of a general matrix in a disk");
  c_nonsym->add_option("--matrix", nonsym_cmd.matrix, "Matrix Market file")->required();
  c_nonsym->add_option("--center-re", nonsym_cmd.center_re, "Disk center, real part")
      ->default_str("0");
  c_nonsym->add_option("--center-im", nonsym_cmd.center_im, "Disk center, imaginary part")
      ->default_str("0");
  c_nonsym->add_option("--radius", nonsym_cmd.radius, "Disk radius")->required();
  c_nonsym
      ->add_option("--nc", nonsym_cmd.nc,
                   "Total quadrature points on the full circle (even)")
      ->default_str("16");
  nonsym_cmd.solver.add_flags(c_nonsym);
  nonsym_cmd.samples.add_flags(c_nonsym);
  c_nonsym->add_option("--out", nonsym_cmd.out, "JSON output file");
  c_nonsym->add_option("--csv", nonsym_cmd.csv, "Per-sample CSV file");

  auto* c_suggest = app.add_subcommand(
      "suggest-m0",
      "Search-subspace size for contour eigensolvers: count over [a, b] "
      "enlarged by (b-a)/4 per side, never below the plain count");
  c_suggest->add_option("--matrix", suggest_cmd.matrix, "Matrix Market file")->required();
  c_suggest->add_option("--a", suggest_cmd.a, "Interval lower endpoint")->required();
  c_suggest->add_option("--b", suggest_cmd.b, "Interval upper endpoint")->required();
  c_suggest->add_option("--method", suggest_cmd.method, "Filter: poly | rational")
      ->default_str("poly");
  c_suggest->add_option("--degree", suggest_cmd.degree, "Polynomial filter degree")
      ->default_str("100");
  c_suggest
      ->add_option("--damping", suggest_cmd.damping,
                   "Polynomial damping: none | jackson | sigma")
      ->default_str("jackson");
  c_suggest
      ->add_option("--nc", suggest_cmd.nc,
                   "Rational filter: upper half-circle quadrature points")
      ->default_str("8");
  c_suggest->add_option("--bounds-steps", suggest_cmd.bounds_steps, "Lanczos steps")
      ->default_str("60");
  c_suggest
      ->add_option("--bounds-margin", suggest_cmd.bounds_margin,
                   "Relative bounds widening per side")
      ->default_str("0.005");
  suggest_cmd.solver.add_flags(c_suggest);
  suggest_cmd.samples.add_flags(c_suggest);
  c_suggest->add_option("--out", suggest_cmd.out, "JSON output file");

  auto* c_filter = app.add_subcommand(
      "filter-eval", "Evaluate a polynomial mid-pass filter on a grid (plot data)");
  c_filter->add_option("--a", filter_cmd.a, "Plateau lower endpoint")->required();
  c_filter->add_option("--b", filter_cmd.b, "Plateau upper endpoint")->required();
  c_filter->add_option("--degree", filter_cmd.degree, "Filter degree")->default_str("80");
  c_filter->add_option("--damping", filter_cmd.damping, "none | jackson | sigma")
      ->default_str("none");
  c_filter->add_option("--lmin", filter_cmd.lmin, "Spectrum lower bound")
      ->default_str("-1");
  c_filter->add_option("--lmax", filter_cmd.lmax, "Spectrum upper bound")
      ->default_str("1");
  c_filter->add_option("--grid", filter_cmd.grid, "Grid points over [lmin, lmax]")
      ->default_str("1001");
  c_filter->add_option("--out", filter_cmd.out, "JSON output file");
  c_filter->add_option("--csv", filter_cmd.csv, "Grid CSV file (t,psi)");

  auto* c_rational = app.add_subcommand(
      "rational-eval", "Evaluate a rational contour filter on a grid (plot data)");
  c_rational->add_option("--a", rational_cmd.a, "Interval lower endpoint (half-circle)");
  c_rational->add_option("--b", rational_cmd.b, "Interval upper endpoint (half-circle)");
  c_rational->add_flag("--full", rational_cmd.full,
                       "Full-circle contour around --center-re/--center-im");
  c_rational->add_option("--center-re", rational_cmd.center_re, "Disk center, real part")
      ->default_str("0");
  c_rational
      ->add_option("--center-im", rational_cmd.center_im, "Disk center, imaginary part")
      ->default_str("0");
  c_rational->add_option("--radius", rational_cmd.radius, "Disk radius (full-circle)")
      ->default_str("0");
  c_rational
      ->add_option("--nc", rational_cmd.nc,
                   "Quadrature points: upper half-circle count (half-circle mode) or "
                   "total on the circle (full mode)")
      ->default_str("8");
  c_rational->add_option("--grid", rational_cmd.grid, "Grid points")->default_str("1001");
  c_rational
      ->add_option("--grid-range", rational_cmd.grid_range,
                   "Grid endpoints lo hi (default center +- 2 radius)")
      ->expected(2);
  c_rational->add_option("--out", rational_cmd.out, "JSON output file");
  c_rational->add_option("--csv", rational_cmd.csv,
                         "Grid CSV file (lambda_re,lambda_im,chi_re,chi_im)");

  auto* c_trace = app.add_subcommand(
      "trace-run",
      "Run the stochastic estimator and report the full per-sample trail "
      "with convergence diagnostics");
  trace_cmd.add_common(c_trace, false);
  c_trace
      ->add_option("--band-level", trace_cmd.band_level,
                   "Report when the running-mean oscillation band falls below this")
      ->default_str("1");

  auto* c_oracle = app.add_subcommand(
      "oracle-count",
      "Dense-eigendecomposition ground truth: exact counts and filter traces");
  c_oracle->add_option("--matrix", oracle_cmd.matrix, "Matrix Market file (A)")
      ->required();
  c_oracle->add_option("--matrix-b", oracle_cmd.matrix_b, "Matrix Market file (B, SPD)");
  auto* oa = c_oracle->add_option("--a", oracle_cmd.a, "Interval lower endpoint");
  auto* ob = c_oracle->add_option("--b", oracle_cmd.b, "Interval upper endpoint");
  c_oracle->add_option("--center-re", oracle_cmd.center_re, "Disk center, real part")
      ->default_str("0");
  c_oracle->add_option("--center-im", oracle_cmd.center_im, "Disk center, imaginary part")
      ->default_str("0");
  c_oracle->add_option("--radius", oracle_cmd.radius, "Disk radius (disk mode)");
  c_oracle
      ->add_option("--degree", oracle_cmd.degree,
                   "Also report the exact polynomial filter trace at this degree")
      ->default_str("0");
  c_oracle->add_option("--damping", oracle_cmd.damping, "none | jackson | sigma")
      ->default_str("none");
  c_oracle
      ->add_option("--nc", oracle_cmd.nc,
                   "Also report the exact rational filter trace (upper half-circle "
                   "points for intervals, total points for disks)")
      ->default_str("0");
  c_oracle
      ->add_option("--margin", oracle_cmd.margin,
                   "Relative widening of the tight oracle bounds per side")
      ->default_str("0");
  c_oracle->add_option("--cap", oracle_cmd.cap, "Dense eigendecomposition dimension cap")
      ->default_str("8000");
  c_oracle->add_flag("--no-cache", oracle_cmd.no_cache,
                     "Skip the sidecar spectrum cache entirely");
  c_oracle->add_option("--out", oracle_cmd.out, "JSON output file");

  auto* c_genmat = app.add_subcommand(
      "gen-matrix", "Write a test matrix (grid Laplacian or engineered diagonal)");
  c_genmat->add_option("--kind", genmat_cmd.kind, "laplacian | diag")
      ->default_str("laplacian");
  c_genmat->add_option("--nx", genmat_cmd.nx, "Grid extent x")->default_str("10");
  c_genmat->add_option("--ny", genmat_cmd.ny, "Grid extent y")->default_str("1");
  c_genmat->add_option("--nz", genmat_cmd.nz, "Grid extent z")->default_str("1");
  c_genmat->add_option("--lo", genmat_cmd.lo, "Spectrum lower end (diag)")
      ->default_str("0");
  c_genmat->add_option("--hi", genmat_cmd.hi, "Spectrum upper end (diag)")
      ->default_str("1");
  c_genmat->add_option("--total", genmat_cmd.total, "Total eigenvalue count (diag)")
      ->default_str("0");
  c_genmat->add_option("--cluster", genmat_cmd.clusters,
                       "Engineered cluster center,width,count (repeatable)");
  c_genmat->add_option("--seed", genmat_cmd.seed, "Reserved for placement jitter")
      ->default_str("0");
  c_genmat->add_option("--out-matrix", genmat_cmd.out_matrix, "Matrix Market output path")
      ->required();
  c_genmat->add_option("--out", genmat_cmd.out, "JSON output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  oracle_cmd.has_a = oa->count() > 0;
  oracle_cmd.has_b = ob->count() > 0;

  std::string active = "?";
  std::string out_path;
  try {
    ojson j;
    if (c_bounds->parsed()) {
      active = "bounds";
      out_path = bounds_cmd.out;
      j = bounds_cmd.run();
    } else if (c_count->parsed()) {
      active = "count";
      out_path = count_cmd.out;
      j = count_cmd.run("count", false, false);
    } else if (c_gen->parsed()) {
      active = "count-gen";
      out_path = gen_cmd.out;
      j = gen_cmd.run("count-gen", true, false);
    } else if (c_nonsym->parsed()) {
      active = "count-nonsym";
      out_path = nonsym_cmd.out;
      j = nonsym_cmd.run();
    } else if (c_suggest->parsed()) {
      active = "suggest-m0";
      out_path = suggest_cmd.out;
      j = suggest_cmd.run();
    } else if (c_filter->parsed()) {
      active = "filter-eval";
      out_path = filter_cmd.out;
      j = filter_cmd.run();
    } else if (c_rational->parsed()) {
      active = "rational-eval";
      out_path = rational_cmd.out;
      j = rational_cmd.run();
    } else if (c_trace->parsed()) {
      active = "trace-run";
      out_path = trace_cmd.out;
      j = trace_cmd.run("trace-run", false, true);
    } else if (c_oracle->parsed()) {
      active = "oracle-count";
      out_path = oracle_cmd.out;
      j = oracle_cmd.run();
    } else if (c_genmat->parsed()) {
      active = "gen-matrix";
      out_path = genmat_cmd.out;
      j = genmat_cmd.run();
    }
    emit_json(std::move(j), out_path);
    return 0;
  } catch (const CLI::ValidationError& e) {
    std::cerr << "speccount: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    ojson err;
    err["schema"] = 1;
    err["error"] = ojson{{"command", active}, {"message", e.what()}};
    std::cout << err.dump(2) << "\n";
    return 1;
  }
}
