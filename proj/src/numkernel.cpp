#include "densegen/numkernel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

namespace densegen {

const char* to_string(FieldTag f) { return f == FieldTag::Real ? "real" : "complex"; }

Matrix::Matrix(FieldTag field, int rows, int cols, std::vector<Scalar> data)
    : field_(field), rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != static_cast<std::size_t>(rows) * cols)
    fail(ErrKind::BadInput, "entry count does not match rows*cols");
}

Matrix Matrix::identity(FieldTag field, int n) {
  Matrix m(field, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::zeros(FieldTag field, int rows, int cols) { return Matrix(field, rows, cols); }

Matrix Matrix::diag(FieldTag field, const std::vector<Scalar>& entries) {
  const int n = static_cast<int>(entries.size());
  Matrix m(field, n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = entries[static_cast<std::size_t>(i)];
  return m;
}

Matrix Matrix::transpose() const {
  Matrix t(field_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t.at(j, i) = at(i, j);
  return t;
}

Matrix Matrix::block(int i0, int j0, int r, int c) const {
  Matrix b(field_, r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) b.at(i, j) = at(i0 + i, j0 + j);
  return b;
}

void Matrix::set_block(int i0, int j0, const Matrix& b) {
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) at(i0 + i, j0 + j) = b.at(i, j);
}

Matrix Matrix::operator*(const Matrix& rhs) const {
  if (cols_ != rhs.rows_) fail(ErrKind::BadInput, "dimension mismatch in product");
  if (field_ != rhs.field_) fail(ErrKind::FieldMismatch, "mixed-field product");
  Matrix out(field_, rows_, rhs.cols_);
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      const Scalar aik = at(i, k);
      if (aik == Scalar(0.0)) continue;
      for (int j = 0; j < rhs.cols_; ++j) out.at(i, j) += aik * rhs.at(k, j);
    }
  return out;
}

Matrix Matrix::operator*(Scalar s) const {
  Matrix out = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.at(i, j) *= s;
  return out;
}

Matrix Matrix::operator+(const Matrix& rhs) const {
  Matrix out = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.at(i, j) += rhs.at(i, j);
  return out;
}

Matrix Matrix::operator-(const Matrix& rhs) const {
  Matrix out = *this;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) out.at(i, j) -= rhs.at(i, j);
  return out;
}

double Matrix::frobenius() const {
  double s = 0.0;
  for (const auto& v : data_) s += std::norm(v);
  return std::sqrt(s);
}

double Matrix::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

bool Matrix::all_finite() const {
  for (const auto& v : data_)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

bool Matrix::operator==(const Matrix& rhs) const {
  return field_ == rhs.field_ && rows_ == rhs.rows_ && cols_ == rhs.cols_ && data_ == rhs.data_;
}

namespace numkernel {
namespace {

using EMat = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

EMat to_eigen(const Matrix& m) {
  EMat e(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) e(i, j) = m.at(i, j);
  return e;
}

Matrix from_eigen(FieldTag field, const EMat& e) {
  Matrix m(field, static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < e.rows(); ++i)
    for (int j = 0; j < e.cols(); ++j) m.at(i, j) = e(i, j);
  return m;
}

double max_row_norm(const Matrix& m) {
  double best = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    double r = 0.0;
    for (int j = 0; j < m.cols(); ++j) r += std::norm(m.at(i, j));
    best = std::max(best, std::sqrt(r));
  }
  return best;
}

}  // namespace

Matrix invert(const Matrix& m) {
  if (!m.square()) fail(ErrKind::BadInput, "invert needs a square matrix");
  Eigen::PartialPivLU<EMat> lu(to_eigen(m));
  // Pivot magnitudes sit on the diagonal of the packed LU factor.
  const double threshold = 1e-12 * std::max(max_row_norm(m), 1e-300);
  for (int i = 0; i < m.rows(); ++i) {
    if (std::abs(lu.matrixLU()(i, i)) < threshold)
      fail(ErrKind::SingularMatrix, "pivot below singularity threshold");
  }
  return from_eigen(m.field(), lu.inverse());
}

Scalar det(const Matrix& m) {
  if (!m.square()) fail(ErrKind::BadInput, "det needs a square matrix");
  if (m.rows() == 0) return 1.0;
  Eigen::PartialPivLU<EMat> lu(to_eigen(m));
  return lu.determinant();
}

Spectrum eigenvalues(const Matrix& m) {
  if (!m.square()) fail(ErrKind::BadInput, "eigenvalues needs a square matrix");
  Eigen::ComplexEigenSolver<EMat> solver(to_eigen(m), /*computeEigenvectors=*/false);
  Spectrum s;
  s.converged = solver.info() == Eigen::Success;
  if (!s.converged) fail(ErrKind::NoConvergence, "eigenvalue iteration did not converge");
  s.eigenvalues.resize(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) s.eigenvalues[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
  return s;
}

Matrix least_norm_solve(const Matrix& a, const Matrix& b, double rank_tol) {
  EMat ea = to_eigen(a);
  EMat eb = to_eigen(b);
  Eigen::CompleteOrthogonalDecomposition<EMat> cod(ea);
  cod.setThreshold(rank_tol);
  if (cod.rank() < std::min(ea.rows(), ea.cols()))
    fail(ErrKind::DegenerateExtension, "rank-deficient system in least-norm solve");
  EMat z = cod.solve(eb);
  if ((ea * z - eb).norm() > 1e-8 * (1.0 + eb.norm()))
    fail(ErrKind::DegenerateExtension, "least-norm solve residual too large");
  return from_eigen(a.field(), z);
}

Matrix matpow(const Matrix& m, long exponent) {
  if (exponent < 0) fail(ErrKind::BadInput, "negative exponent");
  Matrix result = Matrix::identity(m.field(), m.rows());
  Matrix base = m;
  long e = exponent;
  while (e > 0) {
    if (e & 1) result = result * base;
    base = base * base;
    e >>= 1;
  }
  return result;
}

Matrix null_direction(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1) fail(ErrKind::BadInput, "empty matrix");
  Eigen::JacobiSVD<EMat> svd(to_eigen(a), Eigen::ComputeFullV);
  return from_eigen(a.field(), svd.matrixV().col(a.cols() - 1));
}

Matrix random_matrix(FieldTag field, int rows, int cols, SplitMix64& rng) {
  Matrix m(field, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      m.at(i, j) = field == FieldTag::Real ? Scalar(rng.uniform(-1.0, 1.0)) : rng.unit_disc();
  return m;
}

Matrix random_invertible(FieldTag field, int n, SplitMix64& rng, double min_abs_det) {
  for (;;) {
    Matrix m = random_matrix(field, n, n, rng);
    if (std::abs(det(m)) >= min_abs_det) return m;
  }
}

Matrix random_vector(FieldTag field, int n, SplitMix64& rng) {
  for (;;) {
    Matrix v = random_matrix(field, n, 1, rng);
    if (v.frobenius() > 0.1) return v;
  }
}

}  // namespace numkernel
}  // namespace densegen
