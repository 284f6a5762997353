#pragma once

// Internal dense assembly helpers shared by the oracle solver and the 2-D
// calibration. Not part of the public headers.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dbi/inpaint.hpp"
#include "dbi/raster.hpp"

namespace dbi::detail {

/// Sparse five-point Neumann negated Laplacian on a width x height grid,
/// column-major pixel order.
inline Eigen::SparseMatrix<double> sparse_neg_laplacian(int width, int height) {
  using T = Eigen::Triplet<double>;
  std::vector<T> trip;
  trip.reserve(static_cast<std::size_t>(width) * height * 5);
  auto idx = [height](int x, int y) { return x * height + y; };
  for (int x = 0; x < width; ++x) {
    for (int y = 0; y < height; ++y) {
      const int i = idx(x, y);
      double deg = 0.0;
      auto link = [&](int xn, int yn) {
        trip.emplace_back(i, idx(xn, yn), -1.0);
        deg += 1.0;
      };
      if (x > 0) link(x - 1, y);
      if (x < width - 1) link(x + 1, y);
      if (y > 0) link(x, y - 1);
      if (y < height - 1) link(x, y + 1);
      trip.emplace_back(i, i, deg);
    }
  }
  Eigen::SparseMatrix<double> L(width * height, width * height);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

inline Eigen::SparseMatrix<double> sparse_operator(int width, int height,
                                                   InpaintOperator op) {
  Eigen::SparseMatrix<double> L = sparse_neg_laplacian(width, height);
  if (op == InpaintOperator::Harmonic) return L;
  return (L * L).pruned();
}

/// Dense inpainting matrix M = C + (I - C) Op.
inline Eigen::MatrixXd dense_inpainting_matrix(
    const Mask &mask, const Eigen::SparseMatrix<double> &op_matrix) {
  const auto n = static_cast<Eigen::Index>(mask.size());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < op_matrix.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(op_matrix, k); it;
         ++it)
      if (!mask.test(static_cast<std::size_t>(it.row())))
        M(it.row(), it.col()) = it.value();
  for (Eigen::Index i = 0; i < n; ++i)
    if (mask.test(static_cast<std::size_t>(i))) M(i, i) = 1.0;
  return M;
}

} // namespace dbi::detail
