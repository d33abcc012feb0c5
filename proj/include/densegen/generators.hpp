#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "densegen/numkernel.hpp"
#include "densegen/word.hpp"

namespace densegen::gen {

/// One diagonal block of a canonical form, carried symbolically so that
/// square roots and angle halving never touch numerically computed
/// eigendecompositions.
struct Block {
  enum class Kind {
    PositiveScalar,      // value > 0
    One,                 // scalar 1
    RotationBlock,       // 2x2 rotation by 2^{-m} pi
    ReflectionBlock,     // 2x2 [[c, c], [c, -c]], c = sqrt(2)/2
    SignScalar,          // +1 or -1
    UnitModulusScalar,   // complex root of unity (value on the unit circle)
    FreeComplexScalar,   // unconstrained complex scalar
  };
  Kind kind;
  Scalar value = 1.0;  // scalar kinds
  int m = 0;           // RotationBlock

  int size() const {
    return kind == Kind::RotationBlock || kind == Kind::ReflectionBlock ? 2 : 1;
  }
  Matrix to_matrix(FieldTag field) const;
};

struct CanonicalForm {
  std::vector<Block> blocks;
  Matrix transform;  // A = transform * blockdiag(blocks) * transform^{-1}

  int dim() const;
  Matrix block_diagonal(FieldTag field) const;
  Matrix reconstruct(FieldTag field) const;
};

enum class DensityScope { FullMatrixAlgebra, PositiveDeterminant, Unvalidated };

const char* to_string(DensityScope s);

/// How a letter of the inner pair embeds into words over the outer pair.
/// The embedded n x n block equals conj * eval_inner * conj^{-1}, and the
/// corner entry picks up the per-letter signs (real ladders only).
struct LetterLift {
  Word a_image, b_image;  // outer word replacing one unit of inner A / B
  Matrix conj;
  int a_sign = 1, b_sign = 1;
};

struct GeneratorPair {
  Matrix a, b;
  FieldTag field = FieldTag::Real;
  int dim = 0;
  DensityScope scope = DensityScope::Unvalidated;
  std::optional<CanonicalForm> canonical_a;
  std::string provenance;

  std::shared_ptr<const GeneratorPair> inner;
  std::optional<LetterLift> lift;
};

GeneratorPair build_real_pair(int n);
GeneratorPair build_complex_pair(int n);

GeneratorPair lift_real(const GeneratorPair& pair);
GeneratorPair lift_complex(const GeneratorPair& pair);

enum class MatrixClass { C_n, R_n };

struct ClassCheckResult {
  bool pass = false;
  std::string detail;  // certificate on pass, reason on fail
};

/// Eigenvalue-based membership check. With strict_free_scalar, the
/// otherwise-unconstrained leading complex scalar must also be a root of
/// unity.
ClassCheckResult check_class(const Matrix& a, MatrixClass cls, double tol = 1e-8,
                             bool strict_free_scalar = false);

Matrix block_diag(FieldTag field, const std::vector<Matrix>& blocks);

}  // namespace densegen::gen
