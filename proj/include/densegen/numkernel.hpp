#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "densegen/errors.hpp"
#include "densegen/rng.hpp"

namespace densegen {

using Scalar = std::complex<double>;

enum class FieldTag { Real, Complex };

const char* to_string(FieldTag f);

/// Dense row-major matrix over a tagged field. Scalars are always stored
/// as re/im pairs; a Real matrix simply has all imaginary parts zero, so
/// real matrices embed losslessly.
class Matrix {
 public:
  Matrix() = default;
  Matrix(FieldTag field, int rows, int cols)
      : field_(field), rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {}
  Matrix(FieldTag field, int rows, int cols, std::vector<Scalar> data);

  static Matrix identity(FieldTag field, int n);
  static Matrix zeros(FieldTag field, int rows, int cols);
  /// n x n with block `b` placed at diagonal offset `at`.
  static Matrix diag(FieldTag field, const std::vector<Scalar>& entries);

  FieldTag field() const { return field_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool square() const { return rows_ == cols_; }

  Scalar& at(int i, int j) { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const Scalar& at(int i, int j) const { return data_[static_cast<std::size_t>(i) * cols_ + j]; }
  const std::vector<Scalar>& data() const { return data_; }

  Matrix transpose() const;  // plain transpose, no conjugation
  Matrix block(int i0, int j0, int r, int c) const;
  void set_block(int i0, int j0, const Matrix& b);

  Matrix operator*(const Matrix& rhs) const;
  Matrix operator*(Scalar s) const;
  Matrix operator+(const Matrix& rhs) const;
  Matrix operator-(const Matrix& rhs) const;

  double frobenius() const;
  double max_abs() const;
  bool all_finite() const;

  /// Entry-wise exact equality (used by round-trip checks).
  bool operator==(const Matrix& rhs) const;

 private:
  FieldTag field_ = FieldTag::Real;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<Scalar> data_;
};

struct Spectrum {
  std::vector<Scalar> eigenvalues;  // with multiplicity, dimension many
  bool converged = true;
};

namespace numkernel {

/// LU inversion with partial pivoting. Throws SingularMatrix when a pivot
/// falls below 1e-12 times the max row norm.
Matrix invert(const Matrix& m);

Scalar det(const Matrix& m);

/// Eigenvalues for square matrices up to n = 16.
Spectrum eigenvalues(const Matrix& m);

/// Least-norm solution Z of A Z = b (A may be wide). Throws
/// DegenerateExtension when A is rank deficient beyond `rank_tol`.
Matrix least_norm_solve(const Matrix& a, const Matrix& b, double rank_tol = 1e-12);

Matrix matpow(const Matrix& m, long exponent);

/// Unit vector x minimizing ||A x||_2 (the least singular direction).
Matrix null_direction(const Matrix& a);

/// Random square matrix, entries uniform in the unit disc (or [-1,1] for
/// the real field), resampled until |det| >= min_abs_det.
Matrix random_invertible(FieldTag field, int n, SplitMix64& rng, double min_abs_det = 1e-6);

Matrix random_matrix(FieldTag field, int rows, int cols, SplitMix64& rng);

/// Random column vector with entries bounded away from zero pairing use.
Matrix random_vector(FieldTag field, int n, SplitMix64& rng);

inline Scalar pairing(const Matrix& q, const Matrix& p) {
  Scalar s = 0.0;
  for (int i = 0; i < q.rows(); ++i) s += q.at(i, 0) * p.at(i, 0);
  return s;
}

}  // namespace numkernel
}  // namespace densegen
