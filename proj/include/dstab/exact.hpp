#pragma once

#include <utility>

#include <Eigen/Core>
#include <boost/multiprecision/eigen.hpp>

#include "dstab/rational.hpp"

namespace dstab {

template <class Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RationalMatrix = DenseMatrix<Rational>;

// Determinant by Gaussian elimination with exact pivots (any nonzero entry).
// Only meaningful for exact scalar types.
template <class Scalar>
Scalar exact_determinant(DenseMatrix<Scalar> m) {
  const Eigen::Index n = m.rows();
  Scalar det = 1;
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index pivot = col;
    while (pivot < n && m(pivot, col) == 0) ++pivot;
    if (pivot == n) return Scalar(0);
    if (pivot != col) {
      m.row(pivot).swap(m.row(col));
      det = -det;
    }
    det *= m(col, col);
    for (Eigen::Index r = col + 1; r < n; ++r) {
      if (m(r, col) == 0) continue;
      Scalar factor = m(r, col) / m(col, col);
      for (Eigen::Index c = col; c < n; ++c) m(r, c) -= factor * m(col, c);
    }
  }
  return det;
}

template <class Scalar>
Eigen::Index exact_rank(DenseMatrix<Scalar> m) {
  Eigen::Index rank = 0;
  for (Eigen::Index col = 0; col < m.cols() && rank < m.rows(); ++col) {
    Eigen::Index pivot = rank;
    while (pivot < m.rows() && m(pivot, col) == 0) ++pivot;
    if (pivot == m.rows()) continue;
    if (pivot != rank) m.row(pivot).swap(m.row(rank));
    for (Eigen::Index r = rank + 1; r < m.rows(); ++r) {
      if (m(r, col) == 0) continue;
      Scalar factor = m(r, col) / m(rank, col);
      for (Eigen::Index c = col; c < m.cols(); ++c) m(r, c) -= factor * m(rank, c);
    }
    ++rank;
  }
  return rank;
}

}  // namespace dstab
