#pragma once

#include "herd/rational.hpp"

#include <Eigen/Dense>

#include <optional>

namespace herd {

template <class S>
using MatrixX = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using VectorX = Eigen::Matrix<S, Eigen::Dynamic, 1>;

// Gaussian elimination with partial pivoting, usable with exact scalars.
// Returns nullopt when the matrix is exactly singular (a pivot column with
// all zeros); with Rational coefficients that test is exact.
template <class S>
std::optional<VectorX<S>> solve_linear(MatrixX<S> m, VectorX<S> b) {
  using std::abs;
  const Eigen::Index n = m.rows();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = -1;
    S best(0);
    for (Eigen::Index row = col; row < n; ++row) {
      S mag = abs(m(row, col));
      if (piv < 0 ? !(mag == S(0)) : best < mag) {
        piv = row;
        best = mag;
      }
    }
    if (piv < 0) return std::nullopt;
    if (piv != col) {
      m.row(piv).swap(m.row(col));
      std::swap(b(piv), b(col));
    }
    for (Eigen::Index row = col + 1; row < n; ++row) {
      if (m(row, col) == S(0)) continue;
      S factor = m(row, col) / m(col, col);
      m.row(row) -= factor * m.row(col);
      m(row, col) = S(0);
      b(row) -= factor * b(col);
    }
  }
  VectorX<S> u(n);
  for (Eigen::Index row = n - 1; row >= 0; --row) {
    S acc = b(row);
    for (Eigen::Index col = row + 1; col < n; ++col) acc -= m(row, col) * u(col);
    u(row) = acc / m(row, row);
  }
  return u;
}

}  // namespace herd
