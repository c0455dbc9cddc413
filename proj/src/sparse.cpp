// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace speccount {

void SparseMatrix::validate() const {
  if (n == 0) throw std::invalid_argument("sparse: empty matrix");
  if (row_ptr.size() != n + 1) throw std::invalid_argument("sparse: row_ptr size mismatch");
  if (row_ptr.front() != 0) throw std::invalid_argument("sparse: row_ptr[0] != 0");
  for (std::size_t i = 0; i < n; ++i) {
    if (row_ptr[i + 1] < row_ptr[i]) throw std::invalid_argument("sparse: row_ptr not monotone");
  }
  const std::size_t m = row_ptr.back();
  if (col.size() != m) throw std::invalid_argument("sparse: col size mismatch");
  if (is_real()) {
    if (val_re.size() != m || !val_z.empty())
      throw std::invalid_argument("sparse: real matrix must populate val_re only");
  } else {
    if (val_z.size() != m || !val_re.empty())
      throw std::invalid_argument("sparse: complex matrix must populate val_z only");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) {
      if (col[k] >= n) throw std::invalid_argument("sparse: column index out of range");
      if (k > row_ptr[i] && col[k] <= col[k - 1])
        throw std::invalid_argument("sparse: columns not strictly ascending in row " +
                                    std::to_string(i));
    }
  }
  if (!is_real() && symmetry == SymmetryKind::symmetric) {
    // Complex symmetric (A == A^T) is legal storage; nothing more to check.
  }
}

void Pencil::validate() const {
  A.validate();
  if (B) {
    B->validate();
    if (B->n != A.n) throw std::invalid_argument("pencil: A and B dimensions differ");
    if (A.is_real() != B->is_real())
      throw std::invalid_argument("pencil: A and B must share a scalar kind");
  }
}

void matvec(const SparseMatrix& m, std::span<const double> x, std::span<double> y) {
  if (!m.is_real()) throw std::invalid_argument("matvec: real kernel on complex matrix");
  if (x.size() != m.n || y.size() != m.n) throw std::invalid_argument("matvec: size mismatch");
  for (std::size_t i = 0; i < m.n; ++i) {
    double acc = 0.0;
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k) acc += m.val_re[k] * x[m.col[k]];
    y[i] = acc;
  }
}

void matvec(const SparseMatrix& m, std::span<const cplx> x, std::span<cplx> y) {
  if (x.size() != m.n || y.size() != m.n) throw std::invalid_argument("matvec: size mismatch");
  if (m.is_real()) {
    for (std::size_t i = 0; i < m.n; ++i) {
      cplx acc = 0.0;
      for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
        acc += m.val_re[k] * x[m.col[k]];
      y[i] = acc;
    }
  } else {
    for (std::size_t i = 0; i < m.n; ++i) {
      cplx acc = 0.0;
      for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
        acc += m.val_z[k] * x[m.col[k]];
      y[i] = acc;
    }
  }
}

void pencil_shift_apply(const Pencil& p, double sigma, std::span<const double> x,
                        std::span<double> y) {
  if (!p.A.is_real()) throw std::invalid_argument("pencil_shift_apply: real kernel only");
  matvec(p.A, x, y);
  if (p.B) {
    // Local work buffer keeps the call safe to issue from several threads.
    std::vector<double> work(p.dim());
    matvec(*p.B, x, std::span<double>(work));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= sigma * work[i];
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= sigma * x[i];
  }
}

void pencil_shift_apply(const Pencil& p, cplx sigma, std::span<const cplx> x, std::span<cplx> y) {
  matvec(p.A, x, y);
  if (p.B) {
    std::vector<cplx> work(p.dim());
    matvec(*p.B, x, std::span<cplx>(work));
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= sigma * work[i];
  } else {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] -= sigma * x[i];
  }
}

RealOp make_op(const SparseMatrix& m) {
  if (!m.is_real()) throw std::invalid_argument("make_op: matrix is not real");
  return RealOp{m.n, [&m](std::span<const double> x, std::span<double> y) { matvec(m, x, y); }};
}

RealOp make_shift_op(const Pencil& p, double sigma) {
  if (!p.A.is_real()) throw std::invalid_argument("make_shift_op: pencil is not real");
  return RealOp{p.dim(), [&p, sigma](std::span<const double> x, std::span<double> y) {
                  pencil_shift_apply(p, sigma, x, y);
                }};
}

SparseMatrix gen_laplacian(std::size_t nx, std::size_t ny, std::size_t nz, std::size_t cap) {
  if (nx == 0 || ny == 0 || nz == 0) throw std::invalid_argument("gen_laplacian: zero extent");
  const std::size_t n = nx * ny * nz;
  if (n > cap) throw std::invalid_argument("gen_laplacian: size exceeds cap");
  std::size_t active = 0;
  if (nx > 1) ++active;
  if (ny > 1) ++active;
  if (nz > 1) ++active;
  if (active == 0) active = 1;  // 1x1x1 still gets the 1-d stencil value

  SparseMatrix m;
  m.n = n;
  m.scalar = ScalarKind::real;
  m.symmetry = SymmetryKind::symmetric;
  m.row_ptr.assign(n + 1, 0);
  m.col.reserve(n * (2 * active + 1));
  m.val_re.reserve(n * (2 * active + 1));

  const double diag = 2.0 * static_cast<double>(active);
  auto idx = [nx, ny](std::size_t x, std::size_t y, std::size_t z) {
    return x + nx * (y + ny * z);
  };
  for (std::size_t z = 0; z < nz; ++z)
    for (std::size_t y = 0; y < ny; ++y)
      for (std::size_t x = 0; x < nx; ++x) {
        auto push = [&m](std::size_t j, double v) {
          m.col.push_back(j);
          m.val_re.push_back(v);
        };
        // Neighbors emitted in ascending column order.
        if (z > 0) push(idx(x, y, z - 1), -1.0);
        if (y > 0) push(idx(x, y - 1, z), -1.0);
        if (x > 0) push(idx(x - 1, y, z), -1.0);
        push(idx(x, y, z), diag);
        if (x + 1 < nx) push(idx(x + 1, y, z), -1.0);
        if (y + 1 < ny) push(idx(x, y + 1, z), -1.0);
        if (z + 1 < nz) push(idx(x, y, z + 1), -1.0);
        m.row_ptr[idx(x, y, z) + 1] = m.col.size();
      }
  return m;
}

double ClusterSpec::min_relative_gap() const {
  // Informational helper used when reporting how adversarial a spectrum is.
  std::vector<double> pts;
  for (const auto& c : clusters)
    if (c.count > 1) pts.push_back(c.width / static_cast<double>(c.count - 1));
  if (pts.empty()) return 0.0;
  const double span = hi - lo;
  return *std::min_element(pts.begin(), pts.end()) / (span > 0 ? span : 1.0);
}

SparseMatrix gen_diag_spectrum(const ClusterSpec& spec, std::uint64_t /*seed*/) {
  // The seed parameter is reserved for jittered placement; the current
  // layouts are fully deterministic so it is deliberately unused.
  if (spec.total == 0) throw std::invalid_argument("gen_diag_spectrum: empty spectrum");
  if (!(spec.lo < spec.hi)) throw std::invalid_argument("gen_diag_spectrum: lo must be < hi");
  std::size_t clustered = 0;
  for (const auto& c : spec.clusters) {
    if (c.count == 0) throw std::invalid_argument("gen_diag_spectrum: empty cluster");
    if (c.width < 0) throw std::invalid_argument("gen_diag_spectrum: negative cluster width");
    if (c.center - c.width / 2 < spec.lo - 1e-12 || c.center + c.width / 2 > spec.hi + 1e-12)
      throw std::invalid_argument("gen_diag_spectrum: cluster leaves [lo, hi]");
    clustered += c.count;
  }
  if (clustered > spec.total)
    throw std::invalid_argument("gen_diag_spectrum: clusters exceed total count");

  std::vector<double> lam;
  lam.reserve(spec.total);
  const std::size_t bulk = spec.total - clustered;
  if (bulk == 1) {
    lam.push_back(0.5 * (spec.lo + spec.hi));
  } else if (bulk > 1) {
    const double step = (spec.hi - spec.lo) / static_cast<double>(bulk - 1);
    for (std::size_t i = 0; i < bulk; ++i) lam.push_back(spec.lo + step * static_cast<double>(i));
  }
  for (const auto& c : spec.clusters) {
    if (c.count == 1) {
      lam.push_back(c.center);
      continue;
    }
    const double start = c.center - c.width / 2;
    const double step = c.width / static_cast<double>(c.count - 1);
    for (std::size_t i = 0; i < c.count; ++i) lam.push_back(start + step * static_cast<double>(i));
  }
  std::sort(lam.begin(), lam.end());

  SparseMatrix m;
  m.n = spec.total;
  m.scalar = ScalarKind::real;
  m.symmetry = SymmetryKind::symmetric;
  m.row_ptr.resize(spec.total + 1);
  m.col.resize(spec.total);
  m.val_re = std::move(lam);
  for (std::size_t i = 0; i <= spec.total; ++i) m.row_ptr[i] = i;
  for (std::size_t i = 0; i < spec.total; ++i) m.col[i] = i;
  return m;
}

}  // namespace speccount
