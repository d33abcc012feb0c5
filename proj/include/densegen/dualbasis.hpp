#pragma once

#include "densegen/numkernel.hpp"

namespace densegen::dualbasis {

/// Inputs for solve_dual: find invertible M with M^{-1} P0 = P and
/// M^T Q0 = Q, given the compatible pairings Q0^T P0 = Q^T P != 0.
struct DualSpec {
  Matrix p0, q0, p, q;  // n x 1 column vectors
  FieldTag field = FieldTag::Real;
  bool want_positive_det = false;  // real field only

  void validate() const;
};

/// Given column vectors P, Q with Q^T P = 1, returns an invertible M whose
/// inverse has first column P and whose transpose has first column Q. The
/// rows of M and columns of M^{-1} form a dual basis pair. For the real
/// field with want_positive_det, the last pair is sign-flipped if needed
/// so that det(M) > 0.
Matrix extend_to_dual_basis(const Matrix& p, const Matrix& q, bool want_positive_det = false);

Matrix solve_dual(const DualSpec& spec);

}  // namespace densegen::dualbasis
