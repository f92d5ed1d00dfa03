#pragma once

// Dense Gaussian elimination over any scalar of the dual tower. Pivoting is
// decided on primal values so the elimination order, and hence the
// derivative propagation, is fixed by the evaluation point.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "adaptube/dual.hpp"

namespace adaptube {

class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Solves A X = B. A is n x n, B is n x r, both row-major; returns X
/// row-major.
template <typename T>
std::vector<T> solve_dense(std::vector<T> A, std::vector<T> B, int n, int r) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    double best = std::abs(primal(A[col * n + col]));
    for (int row = col + 1; row < n; ++row) {
      const double v = std::abs(primal(A[row * n + col]));
      if (v > best) {
        best = v;
        pivot = row;
      }
    }
    if (best < 1e-300) throw SingularMatrix("solve_dense: singular matrix");
    if (pivot != col) {
      for (int j = 0; j < n; ++j) std::swap(A[col * n + j], A[pivot * n + j]);
      for (int j = 0; j < r; ++j) std::swap(B[col * r + j], B[pivot * r + j]);
    }
    const T inv = T(1.0) / A[col * n + col];
    for (int row = col + 1; row < n; ++row) {
      const T f = A[row * n + col] * inv;
      if (primal(f) == 0.0 && !is_dual<T>::value) continue;
      for (int j = col; j < n; ++j) A[row * n + j] = A[row * n + j] - f * A[col * n + j];
      for (int j = 0; j < r; ++j) B[row * r + j] = B[row * r + j] - f * B[col * r + j];
    }
  }
  std::vector<T> X(static_cast<std::size_t>(n) * r);
  for (int row = n - 1; row >= 0; --row) {
    for (int j = 0; j < r; ++j) {
      T acc = B[row * r + j];
      for (int k = row + 1; k < n; ++k) acc = acc - A[row * n + k] * X[k * r + j];
      X[row * r + j] = acc / A[row * n + row];
    }
  }
  return X;
}

}  // namespace adaptube
