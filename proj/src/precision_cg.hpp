#pragma once

#include "sar/regularizers.hpp"

namespace sar::detail {

// s I + Theta T^T diag(w) T Theta^*, the Hermitian PD operator shared by the
// posterior-mean solve and the ADMM image subproblem.
struct ShiftedStencilOp {
  const SparsifyingOperator& T;
  const PhaseMatrix& theta;
  const Vec& row_weights;
  Scalar shift;

  VecC apply(const VecC& v) const {
    VecC w = T.apply(theta.applyConj(v));
    w.array() *= row_weights.array();
    return shift * v + theta.apply(T.applyAdjoint(w));
  }

  Vec diagonal() const {
    return Vec::Constant(T.cols(), shift) + T.weighted_squared_column_sums(row_weights);
  }
};

// Jacobi-preconditioned conjugate gradients.
inline VecC pcg(const ShiftedStencilOp& P, const VecC& rhs, const VecC* warm, Scalar tol,
                int max_iters, bool* converged) {
  const Vec diag = P.diagonal();
  VecC x = warm ? *warm : VecC::Zero(rhs.size());
  VecC r = rhs - P.apply(x);
  const Scalar stop = tol * rhs.norm();
  bool ok = r.norm() <= stop;
  if (!ok) {
    VecC z = r.array() / diag.array();
    VecC p = z;
    Scalar rz = r.dot(z).real();
    for (int it = 0; it < max_iters; ++it) {
      const VecC q = P.apply(p);
      const Scalar pq = p.dot(q).real();
      if (pq <= 0) break;
      const Scalar step = rz / pq;
      x += step * p;
      r -= step * q;
      if (r.norm() <= stop) {
        ok = true;
        break;
      }
      z = r.array() / diag.array();
      const Scalar rz_new = r.dot(z).real();
      p = z + (rz_new / rz) * p;
      rz = rz_new;
    }
  }
  if (converged) *converged = ok;
  return x;
}

}  // namespace sar::detail
