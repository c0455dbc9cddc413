// Copyright (c) the speccount developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef SPECCOUNT_OPERATORS_HPP
#define SPECCOUNT_OPERATORS_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>

namespace speccount {

using cplx = std::complex<double>;

/// Matrix-free real linear operator. `apply` writes y = Op*x and must not
/// alias its arguments. Everything that consumes spectra through products
/// (Lanczos bounds, polynomial filters, quadratic forms) goes through this.
struct RealOp {
  std::size_t dim = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
};

/// Complex counterpart, used by the shifted solves of the rational path.
struct ComplexOp {
  std::size_t dim = 0;
  std::function<void(std::span<const cplx>, std::span<cplx>)> apply;
};

}  // namespace speccount

#endif  // SPECCOUNT_OPERATORS_HPP
