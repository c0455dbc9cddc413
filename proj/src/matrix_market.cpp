// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#include "speccount/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace speccount {

namespace {

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

struct Entry {
  std::size_t r, c;
  cplx v;
};

}  // namespace

SparseMatrix load_matrix_market(std::istream& in, const std::string& name) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line)) fail(name, 1, "empty file");
  ++lineno;

  std::istringstream banner(line);
  std::string tag, object, format, field, symmetry;
  banner >> tag >> object >> format >> field >> symmetry;
  if (lower(tag) != "%%matrixmarket") fail(name, lineno, "missing %%MatrixMarket banner");
  if (lower(object) != "matrix") fail(name, lineno, "unsupported object '" + object + "'");
  format = lower(format);
  field = lower(field);
  symmetry = lower(symmetry);
  if (format == "array") fail(name, lineno, "dense 'array' format not supported, use coordinate");
  if (format != "coordinate") fail(name, lineno, "unsupported format '" + format + "'");
  if (field == "pattern") fail(name, lineno, "'pattern' field carries no values, not supported");
  if (field == "integer") fail(name, lineno, "'integer' field not supported, convert to real");
  if (field != "real" && field != "complex") fail(name, lineno, "unsupported field '" + field + "'");
  if (symmetry == "skew-symmetric") fail(name, lineno, "skew-symmetric storage not supported");
  if (symmetry != "general" && symmetry != "symmetric" && symmetry != "hermitian")
    fail(name, lineno, "unsupported symmetry '" + symmetry + "'");
  if (symmetry == "hermitian" && field == "real")
    symmetry = "symmetric";  // hermitian real data is plain symmetric

  const bool complex_field = field == "complex";
  const bool mirrored = symmetry != "general";
  const bool conj_mirror = symmetry == "hermitian";

  // Size line: first non-comment, non-blank line after the banner.
  std::size_t rows = 0, cols = 0, declared = 0;
  for (;;) {
    if (!std::getline(in, line)) fail(name, lineno + 1, "missing size line");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream sz(line);
    if (!(sz >> rows >> cols >> declared)) fail(name, lineno, "malformed size line");
    break;
  }
  if (rows != cols) fail(name, lineno, "matrix is not square");
  if (rows == 0) fail(name, lineno, "matrix is empty");

  std::vector<Entry> entries;
  entries.reserve(mirrored ? 2 * declared : declared);
  std::size_t seen = 0;
  while (seen < declared) {
    if (!std::getline(in, line)) fail(name, lineno + 1, "unexpected end of file, entries missing");
    ++lineno;
    if (line.empty() || line[0] == '%') continue;
    std::istringstream es(line);
    std::size_t i = 0, j = 0;
    double re = 0.0, im = 0.0;
    if (!(es >> i >> j >> re)) fail(name, lineno, "malformed entry");
    if (complex_field && !(es >> im)) fail(name, lineno, "complex entry missing imaginary part");
    if (i == 0 || j == 0 || i > rows || j > cols) fail(name, lineno, "index out of range");
    ++seen;
    entries.push_back({i - 1, j - 1, cplx(re, im)});
    if (mirrored && i != j) entries.push_back({j - 1, i - 1, conj_mirror ? std::conj(cplx(re, im)) : cplx(re, im)});
  }

  // COO -> CSR with duplicates summed and columns sorted.
  SparseMatrix m;
  m.n = rows;
  m.scalar = complex_field ? ScalarKind::complex_ : ScalarKind::real;
  m.symmetry = symmetry == "general" ? SymmetryKind::general
               : conj_mirror         ? SymmetryKind::hermitian
                                     : SymmetryKind::symmetric;
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return a.r != b.r ? a.r < b.r : a.c < b.c;
  });
  m.row_ptr.assign(rows + 1, 0);
  for (std::size_t k = 0; k < entries.size();) {
    std::size_t k2 = k + 1;
    cplx v = entries[k].v;
    while (k2 < entries.size() && entries[k2].r == entries[k].r && entries[k2].c == entries[k].c) {
      v += entries[k2].v;
      ++k2;
    }
    m.col.push_back(entries[k].c);
    if (complex_field)
      m.val_z.push_back(v);
    else
      m.val_re.push_back(v.real());
    ++m.row_ptr[entries[k].r + 1];
    k = k2;
  }
  for (std::size_t i = 0; i < rows; ++i) m.row_ptr[i + 1] += m.row_ptr[i];
  m.validate();
  return m;
}

SparseMatrix load_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return load_matrix_market(in, path.string());
}

void save_matrix_market(const SparseMatrix& m, std::ostream& out) {
  m.validate();
  const bool complex_field = !m.is_real();
  const char* field = complex_field ? "complex" : "real";
  const char* sym = m.symmetry == SymmetryKind::general     ? "general"
                    : m.symmetry == SymmetryKind::hermitian ? "hermitian"
                                                            : "symmetric";
  const bool lower_only = m.symmetry != SymmetryKind::general;

  std::vector<std::size_t> keep;
  keep.reserve(m.nnz());
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t k = m.row_ptr[i]; k < m.row_ptr[i + 1]; ++k)
      if (!lower_only || m.col[k] <= i) keep.push_back(k);

  out << "%%MatrixMarket matrix coordinate " << field << ' ' << sym << '\n';
  out << m.n << ' ' << m.n << ' ' << keep.size() << '\n';
  char buf[96];
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t kk = m.row_ptr[i]; kk < m.row_ptr[i + 1]; ++kk) {
      if (lower_only && m.col[kk] > i) continue;
      if (complex_field) {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g %.17g\n", i + 1, m.col[kk] + 1,
                      m.val_z[kk].real(), m.val_z[kk].imag());
      } else {
        std::snprintf(buf, sizeof buf, "%zu %zu %.17g\n", i + 1, m.col[kk] + 1, m.val_re[kk]);
      }
      out << buf;
    }
  if (!out) throw std::runtime_error("matrix market write failed");
}

void save_matrix_market(const SparseMatrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  save_matrix_market(m, out);
}

}  // namespace speccount
