#include "sar/regularizers.hpp"

#include <Eigen/SVD>

#include <stdexcept>

namespace sar {

PhaseMatrix phase_from(const VecC& image) {
  PhaseMatrix theta;
  theta.diag.resize(image.size());
  for (Index j = 0; j < image.size(); ++j) {
    const Scalar mag = std::abs(image[j]);
    theta.diag[j] = mag > 0 ? image[j] / mag : Complex(1, 0);
  }
  return theta;
}

SparsifyingOperator SparsifyingOperator::identity(const SceneGrid& grid) {
  return SparsifyingOperator(Kind::Identity, grid);
}

SparsifyingOperator SparsifyingOperator::tv2d(const SceneGrid& grid) {
  if (grid.nx < 2 || grid.ny < 2)
    throw std::invalid_argument("tv2d: grid must be at least 2x2");
  return SparsifyingOperator(Kind::Tv2d, grid);
}

Index SparsifyingOperator::rows() const {
  return kind_ == Kind::Identity ? cols() : 2 * cols();
}

VecC SparsifyingOperator::apply(const VecC& v) const {
  if (v.size() != cols()) throw std::invalid_argument("SparsifyingOperator: length mismatch");
  if (kind_ == Kind::Identity) return v;
  const int nx = grid_.nx, ny = grid_.ny;
  const Index n = cols();
  VecC w = VecC::Zero(2 * n);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const Index j = grid_.idx(ix, iy);
      w[j] = v[j + 1] - v[j];
    }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Index j = grid_.idx(ix, iy);
      w[n + j] = v[j + nx] - v[j];
    }
  return w;
}

VecC SparsifyingOperator::applyAdjoint(const VecC& w) const {
  if (w.size() != rows()) throw std::invalid_argument("SparsifyingOperator: length mismatch");
  if (kind_ == Kind::Identity) return w;
  const int nx = grid_.nx, ny = grid_.ny;
  const Index n = cols();
  VecC v = VecC::Zero(n);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const Index j = grid_.idx(ix, iy);
      v[j + 1] += w[j];
      v[j] -= w[j];
    }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Index j = grid_.idx(ix, iy);
      v[j + nx] += w[n + j];
      v[j] -= w[n + j];
    }
  return v;
}

Vec SparsifyingOperator::weighted_squared_column_sums(const Vec& row_weights) const {
  if (row_weights.size() != rows())
    throw std::invalid_argument("SparsifyingOperator: row weight length mismatch");
  if (kind_ == Kind::Identity) return row_weights;
  const int nx = grid_.nx, ny = grid_.ny;
  const Index n = cols();
  Vec d = Vec::Zero(n);
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const Index j = grid_.idx(ix, iy);
      d[j] += row_weights[j];
      d[j + 1] += row_weights[j];
    }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Index j = grid_.idx(ix, iy);
      d[j] += row_weights[n + j];
      d[j + nx] += row_weights[n + j];
    }
  return d;
}

Mat SparsifyingOperator::dense() const {
  Mat T = Mat::Zero(rows(), cols());
  if (kind_ == Kind::Identity) {
    T.diagonal().setOnes();
    return T;
  }
  const int nx = grid_.nx, ny = grid_.ny;
  const Index n = cols();
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix + 1 < nx; ++ix) {
      const Index j = grid_.idx(ix, iy);
      T(j, j + 1) = 1;
      T(j, j) = -1;
    }
  for (int iy = 0; iy + 1 < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const Index j = grid_.idx(ix, iy);
      T(n + j, j + nx) = 1;
      T(n + j, j) = -1;
    }
  return T;
}

bool check_common_kernel(const MatC& F, const SparsifyingOperator& T, const PhaseMatrix& theta) {
  const Index n = T.cols();
  if (n > 4096) throw std::invalid_argument("check_common_kernel: dense check limited to N <= 4096");
  if (F.cols() != n) throw std::invalid_argument("check_common_kernel: F column count mismatch");
  if (theta.diag.size() != n)
    throw std::invalid_argument("check_common_kernel: phase diagonal length mismatch");

  MatC stacked(F.rows() + T.rows(), n);
  stacked.topRows(F.rows()) = F;
  stacked.bottomRows(T.rows()) =
      T.dense().cast<Complex>() * theta.diag.conjugate().asDiagonal();
  Eigen::BDCSVD<MatC> svd(stacked);
  const Vec& sv = svd.singularValues();
  if (sv.size() == 0) return false;
  const Scalar thresh = 1e-10 * sv[0];
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] > thresh) ++rank;
  return rank == n;
}

}  // namespace sar
