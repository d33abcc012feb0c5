#include "densegen/dualbasis.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <vector>

namespace densegen::dualbasis {
namespace {

using EMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;
using EVec = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, 1>;

EVec to_eigen_vec(const Matrix& v) {
  EVec e(v.rows());
  for (int i = 0; i < v.rows(); ++i) e(i) = v.at(i, 0);
  return e;
}

}  // namespace

void DualSpec::validate() const {
  if (p0.rows() != q0.rows() || p0.rows() != p.rows() || p0.rows() != q.rows())
    fail(ErrKind::BadInput, "dual spec vectors must share a dimension");
  for (const Matrix* v : {&p0, &q0, &p, &q})
    if (v->frobenius() == 0.0) fail(ErrKind::BadInput, "dual spec vectors must be nonzero");
  const Scalar d0 = numkernel::pairing(q0, p0);
  const Scalar d1 = numkernel::pairing(q, p);
  if (std::abs(d0) == 0.0) fail(ErrKind::BadPairing, "Q0^T P0 must be nonzero");
  if (std::abs(d0 - d1) > 1e-10 * std::max(std::abs(d0), 1.0))
    fail(ErrKind::BadPairing, "pairings Q0^T P0 and Q^T P disagree");
}

Matrix extend_to_dual_basis(const Matrix& p, const Matrix& q, bool want_positive_det) {
  const int n = p.rows();
  if (n <= 1) fail(ErrKind::DimensionTooSmall, "dual basis extension needs n > 1");
  const Scalar d = numkernel::pairing(q, p);
  if (std::abs(d - Scalar(1.0)) > 1e-10)
    fail(ErrKind::BadPairing, "Q^T P must be 1 (caller rescales)");
  const FieldTag field = p.field();

  std::vector<EVec> ps{to_eigen_vec(p)};
  std::vector<EVec> qs{to_eigen_vec(q)};

  for (int k = 1; k < n; ++k) {
    // Rows P_i^T; the next Q must lie in the kernel of this stack.
    EMat pmat(k, n);
    for (int i = 0; i < k; ++i) pmat.row(i) = ps[static_cast<std::size_t>(i)].transpose();
    EMat gram = pmat * pmat.adjoint();
    EMat proj = EMat::Identity(n, n) - pmat.adjoint() * gram.ldlt().solve(pmat);

    // Canonical basis vector with the largest kernel component, projected.
    EVec best = EVec::Zero(n);
    double best_norm = 0.0;
    for (int j = 0; j < n; ++j) {
      EVec cand = proj.col(j);
      if (cand.norm() > best_norm) {
        best_norm = cand.norm();
        best = cand;
      }
    }
    if (best_norm < 1e-10)
      fail(ErrKind::DegenerateExtension, "no canonical vector clears span{P_1..P_k}");
    EVec qnext = best / best_norm;

    // Least-norm P_{k+1}: Q_i^T Z = 0 for i <= k, Q_{k+1}^T Z = 1.
    Matrix sys(field, k + 1, n);
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < n; ++j) sys.at(i, j) = qs[static_cast<std::size_t>(i)](j);
    for (int j = 0; j < n; ++j) sys.at(k, j) = qnext(j);
    Matrix rhs = Matrix::zeros(field, k + 1, 1);
    rhs.at(k, 0) = 1.0;
    Matrix z = numkernel::least_norm_solve(sys, rhs);

    ps.push_back(to_eigen_vec(z));
    qs.push_back(qnext);
  }

  Matrix m(field, n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m.at(i, j) = qs[static_cast<std::size_t>(i)](j);

  if (want_positive_det && field == FieldTag::Real) {
    if (numkernel::det(m).real() < 0.0)
      for (int j = 0; j < n; ++j) m.at(n - 1, j) = -m.at(n - 1, j);
  }
  return m;
}

Matrix solve_dual(const DualSpec& spec) {
  spec.validate();
  const int n = spec.p0.rows();
  const Scalar d = numkernel::pairing(spec.q0, spec.p0);

  if (n == 1) {
    const Scalar q0 = spec.q0.at(0, 0), q = spec.q.at(0, 0);
    const Scalar p0 = spec.p0.at(0, 0), p = spec.p.at(0, 0);
    // M^T Q0 = Q forces m = q/q0; consistency with M^{-1} P0 = P follows
    // from the equal pairings, checked here.
    const Scalar m = q / q0;
    if (std::abs(p0 / m - p) > 1e-9 * std::max(std::abs(p), 1.0))
      fail(ErrKind::DimensionTooSmall, "scalar constraint inconsistent at n = 1");
    Matrix out(spec.field, 1, 1);
    out.at(0, 0) = m;
    return out;
  }

  // Rescaling convention: divide the Q-side by d, keep the P-side.
  Matrix q0s = spec.q0 * (Scalar(1.0) / d);
  Matrix qs = spec.q * (Scalar(1.0) / d);

  Matrix m1 = extend_to_dual_basis(spec.p0, q0s, spec.want_positive_det);
  Matrix m2 = extend_to_dual_basis(spec.p, qs, spec.want_positive_det);
  return numkernel::invert(m1) * m2;
}

}  // namespace densegen::dualbasis
