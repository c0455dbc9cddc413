// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_MATRIX_MARKET_HPP
#define SPECCOUNT_MATRIX_MARKET_HPP

#include <filesystem>
#include <iosfwd>

#include "speccount/sparse.hpp"

namespace speccount {

/// Reads a square coordinate-format Matrix Market file. Symmetric and
/// hermitian storage is expanded to the full pattern (the symmetry claim is
/// kept on the result), duplicate entries are summed, and columns are sorted
/// within each row. `pattern`, `integer`, `skew-symmetric` and dense `array`
/// headers are rejected with an explicit message; malformed lines report
/// their 1-based line number.
SparseMatrix load_matrix_market(const std::filesystem::path& path);
SparseMatrix load_matrix_market(std::istream& in, const std::string& name = "<stream>");

/// Writes coordinate storage with round-trip precision: general matrices in
/// full, symmetric/hermitian ones as their lower triangle under the matching
/// header keyword. load(save(A)) reproduces the expanded CSR (values and
/// symmetry claim) bit-exactly.
void save_matrix_market(const SparseMatrix& A, const std::filesystem::path& path);
void save_matrix_market(const SparseMatrix& A, std::ostream& out);

}  // namespace speccount

#endif  // SPECCOUNT_MATRIX_MARKET_HPP
