#pragma once

#include <utility>

#include "densegen/numkernel.hpp"

namespace densegen::upsilon {

/// Block view of an (n+1)x(n+1) matrix: n x n core F, border column X,
/// border row Y^T, corner scalar eta.
struct BorderedMatrix {
  Matrix f;   // n x n
  Matrix x;   // n x 1
  Matrix y;   // n x 1
  Scalar eta = 0.0;

  int core_dim() const { return f.rows(); }
  FieldTag field() const { return f.field(); }
};

struct UpsilonPoint {
  Scalar a = 0.0;    // Y^T F^{-1} X
  Scalar eta = 0.0;
};

enum class BorderClass { I_n, I_n_plus, I_n_minus, S_n, S_n_plus, S_n_minus, BarOnly, None };

const char* to_string(BorderClass c);

BorderedMatrix split(const Matrix& g);
Matrix join(const BorderedMatrix& b);

UpsilonPoint upsilon_of(const BorderedMatrix& b);

/// Classify by the border structure. Real matrices report the signed
/// variants; complex ones report I_n / S_n. BarOnly marks invertible F
/// with vanishing pairing Y^T F^{-1} X.
BorderClass classify(const BorderedMatrix& b, double tol = 1e-9);

inline bool is_I(BorderClass c) {
  return c == BorderClass::I_n || c == BorderClass::I_n_plus || c == BorderClass::I_n_minus;
}
inline bool is_S(BorderClass c) {
  return c == BorderClass::S_n || c == BorderClass::S_n_plus || c == BorderClass::S_n_minus;
}

/// Factors G2 = S_left * G1 * S_right with both factors in S_n, given
/// that G1 and G2 share an Upsilon point. With `positive`, both inputs
/// must be in the same signed class and the factors land in S_n^+.
std::pair<Matrix, Matrix> same_fiber_factor(const BorderedMatrix& g1, const BorderedMatrix& g2,
                                            bool positive = false);

/// ((z + a*delta)(z + b*eps)/(z + a*b), z + eps*delta) for p = (a, eps),
/// q = (b, delta). With real_positive, additionally requires 1 + ab/z > 0.
UpsilonPoint combine_points(const UpsilonPoint& p, const UpsilonPoint& q, Scalar z,
                            bool real_positive = false);

struct CombineRealization {
  Matrix m1, m2, product;
};

/// The rank-one-bordered matrices whose product realizes combine_points
/// at z = r*s, in dimension (n+1) x (n+1).
CombineRealization realize_combine(const UpsilonPoint& p, const UpsilonPoint& q, Scalar r, Scalar s,
                                   int n, bool real_positive = false);

/// Moves B along border perturbations X +- tW, Y + tW onto the fiber of
/// `target`, choosing the smallest |t| root; eta is set directly.
BorderedMatrix fiber_perturb(const BorderedMatrix& b, const UpsilonPoint& target);

}  // namespace densegen::upsilon
