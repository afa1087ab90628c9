#include "sar/nufft.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sar {

namespace {

constexpr Scalar kPi = std::numbers::pi;

// Exponential-of-semicircle spreading kernel on [-1, 1].
inline Scalar es_kernel(Scalar z, Scalar beta) {
  const Scalar s = 1 - z * z;
  return s > 0 ? std::exp(beta * (std::sqrt(s) - 1)) : 0;
}

// Gauss-Legendre nodes and weights on [0, 1].
void gauss_legendre(int n, Vec& nodes, Vec& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Scalar x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    Scalar pp = 0;
    for (int it = 0; it < 100; ++it) {
      Scalar p0 = 1, p1 = x;
      for (int j = 2; j <= n; ++j) {
        const Scalar p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1);
      const Scalar dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = 0.5 * (1 - x);
    nodes[n - 1 - i] = 0.5 * (1 + x);
    weights[i] = weights[n - 1 - i] = 1.0 / ((1 - x * x) * pp * pp);
  }
}

// Fourier transform of the kernel periodization at integer modes k in
// [-c, n-1-c], psi_hat(k) = 2 L int_0^1 psi(u) cos(k L u) du with L the
// half-support w*pi/n_f.
Vec kernel_transform(int n, int c, int nf, int width, Scalar beta) {
  const Scalar L = width * kPi / nf;
  Vec u, wq;
  gauss_legendre(64, u, wq);
  Vec psi(u.size());
  for (Index q = 0; q < u.size(); ++q) psi[q] = wq[q] * es_kernel(u[q], beta);
  Vec out(n);
  for (int i = 0; i < n; ++i) {
    const Scalar k = i - c;
    Scalar acc = 0;
    for (Index q = 0; q < u.size(); ++q) acc += psi[q] * std::cos(k * L * u[q]);
    out[i] = 2 * L * acc;
  }
  return out;
}

// In-place 2D FFT, unnormalized in both directions; backward via conjugation.
void fft2(MatC& Z, bool backward) {
  if (backward) Z = Z.conjugate();
  Eigen::FFT<Scalar> fft;
  VecC in(Z.rows()), out(Z.rows());
  for (Index c = 0; c < Z.cols(); ++c) {
    in = Z.col(c);
    fft.fwd(out, in);
    Z.col(c) = out;
  }
  VecC rin(Z.cols()), rout(Z.cols());
  for (Index r = 0; r < Z.rows(); ++r) {
    rin = Z.row(r).transpose();
    fft.fwd(rout, rin);
    Z.row(r) = rout.transpose();
  }
  if (backward) Z = Z.conjugate();
}

inline int wrap(int t, int n) {
  t %= n;
  return t < 0 ? t + n : t;
}

int fine_size(int n, Scalar oversampling) {
  const int nf = int(std::ceil(oversampling * n / 2)) * 2;
  return std::max(nf, 2);
}

}  // namespace

NufftOperator::NufftOperator(const SceneGrid& grid, FreqCoords coords, NufftSettings settings)
    : grid_(grid), set_(settings) {
  if (grid.nx <= 0 || grid.ny <= 0 || grid.extent <= 0)
    throw std::invalid_argument("NufftOperator: grid must have positive size and extent");
  if (coords.kx.size() != coords.ky.size())
    throw std::invalid_argument("NufftOperator: kx/ky length mismatch");
  if (coords.size() == 0) throw std::invalid_argument("NufftOperator: no frequency samples");
  if (set_.oversampling < 1.25)
    throw std::invalid_argument("NufftOperator: oversampling must be >= 1.25");
  if (set_.width < 2 || set_.width > 64)
    throw std::invalid_argument("NufftOperator: kernel width out of range");

  xi_x_ = coords.kx * grid.dx();
  xi_y_ = coords.ky * grid.dy();
  for (Index m = 0; m < xi_x_.size(); ++m) {
    if (!std::isfinite(xi_x_[m]) || !std::isfinite(xi_y_[m]) || xi_x_[m] < -kPi ||
        xi_x_[m] >= kPi || xi_y_[m] < -kPi || xi_y_[m] >= kPi)
      throw std::invalid_argument("NufftOperator: sample " + std::to_string(m) +
                                  " maps outside [-pi, pi) in scaled frequency");
  }

  nfx_ = fine_size(grid.nx, set_.oversampling);
  nfy_ = fine_size(grid.ny, set_.oversampling);
  beta_ = 0.97 * kPi * (1 - 0.5 / set_.oversampling) * set_.width;

  const Vec px = kernel_transform(grid.nx, grid.cx(), nfx_, set_.width, beta_);
  const Vec py = kernel_transform(grid.ny, grid.cy(), nfy_, set_.width, beta_);
  deconv_x_ = 2 * kPi / (nfx_ * px.array());
  deconv_y_ = 2 * kPi / (nfy_ * py.array());

  VecC e = VecC::Zero(grid_.n());
  e[grid_.idx(grid_.cx(), grid_.cy())] = 1;
  rho_ = adjoint(forward(e))[grid_.idx(grid_.cx(), grid_.cy())].real();
}

VecC NufftOperator::forward(const VecC& image) const {
  if (image.size() != grid_.n())
    throw std::invalid_argument("NufftOperator::forward: image length mismatch");
  const int w = set_.width;
  const Scalar half = w / 2.0;

  MatC Z = MatC::Zero(nfx_, nfy_);
  for (int iy = 0; iy < grid_.ny; ++iy) {
    const int ty = wrap(iy - grid_.cy(), nfy_);
    for (int ix = 0; ix < grid_.nx; ++ix) {
      const int tx = wrap(ix - grid_.cx(), nfx_);
      Z(tx, ty) += image[grid_.idx(ix, iy)] * (deconv_x_[ix] * deconv_y_[iy]);
    }
  }
  fft2(Z, false);

  VecC out(rows());
  Eigen::ArrayXd wx(w), wy(w);
  for (Index m = 0; m < rows(); ++m) {
    const Scalar pxp = xi_x_[m] * nfx_ / (2 * kPi);
    const Scalar pyp = xi_y_[m] * nfy_ / (2 * kPi);
    const int t0x = int(std::ceil(pxp - half));
    const int t0y = int(std::ceil(pyp - half));
    for (int t = 0; t < w; ++t) {
      wx[t] = es_kernel((pxp - (t0x + t)) / half, beta_);
      wy[t] = es_kernel((pyp - (t0y + t)) / half, beta_);
    }
    Complex acc = 0;
    for (int ty = 0; ty < w; ++ty) {
      if (wy[ty] == 0) continue;
      const int gy = wrap(t0y + ty, nfy_);
      Complex row = 0;
      for (int tx = 0; tx < w; ++tx) row += wx[tx] * Z(wrap(t0x + tx, nfx_), gy);
      acc += wy[ty] * row;
    }
    out[m] = acc;
  }
  return out;
}

VecC NufftOperator::adjoint(const VecC& samples) const {
  if (samples.size() != rows())
    throw std::invalid_argument("NufftOperator::adjoint: sample length mismatch");
  const int w = set_.width;
  const Scalar half = w / 2.0;

  MatC Z = MatC::Zero(nfx_, nfy_);
  Eigen::ArrayXd wx(w), wy(w);
  for (Index m = 0; m < rows(); ++m) {
    const Scalar pxp = xi_x_[m] * nfx_ / (2 * kPi);
    const Scalar pyp = xi_y_[m] * nfy_ / (2 * kPi);
    const int t0x = int(std::ceil(pxp - half));
    const int t0y = int(std::ceil(pyp - half));
    for (int t = 0; t < w; ++t) {
      wx[t] = es_kernel((pxp - (t0x + t)) / half, beta_);
      wy[t] = es_kernel((pyp - (t0y + t)) / half, beta_);
    }
    for (int ty = 0; ty < w; ++ty) {
      if (wy[ty] == 0) continue;
      const int gy = wrap(t0y + ty, nfy_);
      const Complex vy = samples[m] * wy[ty];
      for (int tx = 0; tx < w; ++tx) Z(wrap(t0x + tx, nfx_), gy) += wx[tx] * vy;
    }
  }
  fft2(Z, true);

  VecC out(cols());
  for (int iy = 0; iy < grid_.ny; ++iy) {
    const int ty = wrap(iy - grid_.cy(), nfy_);
    for (int ix = 0; ix < grid_.nx; ++ix)
      out[grid_.idx(ix, iy)] =
          Z(wrap(ix - grid_.cx(), nfx_), ty) * (deconv_x_[ix] * deconv_y_[iy]);
  }
  return out;
}

ComplexImage ml_estimate(const NufftOperator& op, const VecC& data) {
  ComplexImage img;
  img.grid = op.grid();
  img.values = op.adjoint(data) / Scalar(op.rows());
  return img;
}

namespace {
void check_oracle_guard(const SceneGrid& grid, const FreqCoords& coords) {
  if (double(coords.size()) * double(grid.n()) > 1e8)
    throw std::invalid_argument("direct dft oracle: M * N exceeds 1e8");
  if (coords.kx.size() != coords.ky.size())
    throw std::invalid_argument("direct dft oracle: kx/ky length mismatch");
}
}  // namespace

VecC direct_dft(const SceneGrid& grid, const FreqCoords& coords, const VecC& image) {
  check_oracle_guard(grid, coords);
  if (image.size() != grid.n()) throw std::invalid_argument("direct_dft: image length mismatch");
  using MapMat = Eigen::Map<const MatC>;
  const MapMat img(image.data(), grid.nx, grid.ny);
  VecC out(coords.size());
  VecC ex(grid.nx), ey(grid.ny);
  for (Index m = 0; m < coords.size(); ++m) {
    for (int ix = 0; ix < grid.nx; ++ix)
      ex[ix] = std::polar(1.0, -coords.kx[m] * grid.x(ix));
    for (int iy = 0; iy < grid.ny; ++iy)
      ey[iy] = std::polar(1.0, -coords.ky[m] * grid.y(iy));
    out[m] = ex.transpose() * img * ey;
  }
  return out;
}

VecC direct_dft_adjoint(const SceneGrid& grid, const FreqCoords& coords, const VecC& samples) {
  check_oracle_guard(grid, coords);
  if (samples.size() != coords.size())
    throw std::invalid_argument("direct_dft_adjoint: sample length mismatch");
  MatC img = MatC::Zero(grid.nx, grid.ny);
  VecC ex(grid.nx), ey(grid.ny);
  for (Index m = 0; m < coords.size(); ++m) {
    for (int ix = 0; ix < grid.nx; ++ix)
      ex[ix] = std::polar(1.0, coords.kx[m] * grid.x(ix));
    for (int iy = 0; iy < grid.ny; ++iy)
      ey[iy] = std::polar(1.0, coords.ky[m] * grid.y(iy));
    img.noalias() += samples[m] * ex * ey.transpose();
  }
  VecC out(grid.n());
  Eigen::Map<MatC>(out.data(), grid.nx, grid.ny) = img;
  return out;
}

MatC dense_forward_matrix(const SceneGrid& grid, const FreqCoords& coords) {
  check_oracle_guard(grid, coords);
  MatC F(coords.size(), grid.n());
  for (Index m = 0; m < coords.size(); ++m)
    for (int iy = 0; iy < grid.ny; ++iy)
      for (int ix = 0; ix < grid.nx; ++ix)
        F(m, grid.idx(ix, iy)) =
            std::polar(1.0, -(coords.kx[m] * grid.x(ix) + coords.ky[m] * grid.y(iy)));
  return F;
}

}  // namespace sar
