// faraug/matrix.hpp

// Copyright 2026  The faraug Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "faraug/error.hpp"

namespace faraug {

/// Dense row-major matrix; rows are frames throughout the library.
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, T fill = T{})
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<T> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const T> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<T>& data() noexcept { return data_; }
  const std::vector<T>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using MatrixF = Matrix<float>;
using MatrixD = Matrix<double>;

/// Solves A x = b by Gaussian elimination with partial pivoting.
/// Returns false when A is numerically singular.
inline bool solve_linear(MatrixD a, std::vector<double> b,
                         std::vector<double>& x) {
  const std::size_t n = a.rows();
  require(a.cols() == n && b.size() == n, ErrorCode::kShapeMismatch,
          "solve_linear needs a square system");
  double scale = 0.0;
  for (double v : a.data()) scale = std::max(scale, std::fabs(v));
  if (scale == 0.0) return false;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a(r, c)) > std::fabs(a(piv, c))) piv = r;
    if (std::fabs(a(piv, c)) <= 1e-13 * scale) return false;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(c, k), a(piv, k));
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a(r, c) / a(c, c);
      if (f == 0.0) continue;
      for (std::size_t k = c; k < n; ++k) a(r, k) -= f * a(c, k);
      b[r] -= f * b[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t c = n; c-- > 0;) {
    double acc = b[c];
    for (std::size_t k = c + 1; k < n; ++k) acc -= a(c, k) * x[k];
    x[c] = acc / a(c, c);
  }
  return true;
}

}  // namespace faraug
