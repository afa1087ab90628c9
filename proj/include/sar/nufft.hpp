#pragma once

#include "sar/types.hpp"

namespace sar {

// Linear map from an image vector to nonuniform frequency samples,
// f_m = sum_j x_j exp(-i (kx_m x_j + ky_m y_j)).
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual Index rows() const = 0;  // sample count M
  virtual Index cols() const = 0;  // pixel count N
  virtual VecC forward(const VecC& image) const = 0;
  virtual VecC adjoint(const VecC& samples) const = 0;
  // Scale of the diagonal surrogate A*A ~= rho() * I.
  virtual Scalar rho() const = 0;
};

struct NufftSettings {
  Scalar oversampling = 2.0;
  int width = 12;  // spreading kernel width, fine-grid cells
};

// Gridding implementation: deconvolve by the kernel transform on the modes,
// FFT on an oversampled grid, then interpolate at the scaled frequencies with
// an exponential-of-semicircle kernel. The adjoint transposes each stage
// exactly, so <Fx, y> == <x, F*y> to roundoff by construction. Frequencies
// must scale into [-pi, pi) per axis; out-of-band coordinates are an error.
class NufftOperator final : public LinearOperator {
 public:
  NufftOperator(const SceneGrid& grid, FreqCoords coords, NufftSettings settings = {});

  Index rows() const override { return xi_x_.size(); }
  Index cols() const override { return grid_.n(); }
  VecC forward(const VecC& image) const override;
  VecC adjoint(const VecC& samples) const override;
  Scalar rho() const override { return rho_; }

  const SceneGrid& grid() const { return grid_; }
  const NufftSettings& settings() const { return set_; }

 private:
  SceneGrid grid_;
  NufftSettings set_;
  int nfx_ = 0, nfy_ = 0;  // oversampled grid sizes
  Scalar beta_ = 0;        // kernel sharpness
  Vec xi_x_, xi_y_;        // digital frequencies, [-pi, pi)
  Vec deconv_x_, deconv_y_;
  Scalar rho_ = 0;
};

// Maximum-likelihood image (1/M) F* data on the operator's grid.
ComplexImage ml_estimate(const NufftOperator& op, const VecC& data);

// Direct evaluation of the same sums, O(M N); the small-instance oracle.
// Guarded to M * N <= 1e8.
VecC direct_dft(const SceneGrid& grid, const FreqCoords& coords, const VecC& image);
VecC direct_dft_adjoint(const SceneGrid& grid, const FreqCoords& coords, const VecC& samples);

// Explicit M x N matrix of the forward map, same guard as the direct oracle.
MatC dense_forward_matrix(const SceneGrid& grid, const FreqCoords& coords);

}  // namespace sar
