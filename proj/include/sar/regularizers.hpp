#pragma once

#include "sar/types.hpp"

namespace sar {

// Unit-modulus diagonal built from an image's phases; the phase of a zero
// pixel is 1.
struct PhaseMatrix {
  VecC diag;

  VecC apply(const VecC& v) const { return diag.cwiseProduct(v); }
  VecC applyConj(const VecC& v) const { return diag.conjugate().cwiseProduct(v); }
};

PhaseMatrix phase_from(const VecC& image);

// Sparsifying transform T: identity, or stacked horizontal/vertical first
// differences with replicate-edge boundary (rows 0..N-1 horizontal, N..2N-1
// vertical; edge rows are zero so constants map to zero).
class SparsifyingOperator {
 public:
  enum class Kind { Identity, Tv2d };

  static SparsifyingOperator identity(const SceneGrid& grid);
  static SparsifyingOperator tv2d(const SceneGrid& grid);

  Kind kind() const { return kind_; }
  const SceneGrid& grid() const { return grid_; }
  Index rows() const;  // Q: N for identity, 2N for tv
  Index cols() const { return grid_.n(); }

  VecC apply(const VecC& v) const;
  VecC applyAdjoint(const VecC& w) const;
  // Diagonal of T^T diag(row_weights) T.
  Vec weighted_squared_column_sums(const Vec& row_weights) const;
  Mat dense() const;

 private:
  SparsifyingOperator(Kind kind, const SceneGrid& grid) : kind_(kind), grid_(grid) {}
  Kind kind_;
  SceneGrid grid_;
};

// True when kernel(F) and kernel(T Theta*) intersect only at zero: the
// stacked dense matrix [F; T Theta*] has rank N under a singular-value
// threshold of 1e-10 * sigma_max. Dense check, guarded to N <= 4096.
bool check_common_kernel(const MatC& F, const SparsifyingOperator& T, const PhaseMatrix& theta);

}  // namespace sar
