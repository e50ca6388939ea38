#pragma once

#include <cstddef>
#include <vector>

namespace mvpr {

/// Dense row-major matrix.
template <typename T>
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<T> values;

  Matrix() = default;
  Matrix(int r, int c, T fill = T{}) : rows(r), cols(c), values(static_cast<std::size_t>(r) * c, fill) {}

  T& operator()(int i, int j) { return values[static_cast<std::size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return values[static_cast<std::size_t>(i) * cols + j]; }

  bool operator==(const Matrix&) const = default;
};

using DenseMatrix = Matrix<double>;

}  // namespace mvpr
