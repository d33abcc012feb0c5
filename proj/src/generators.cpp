#include "densegen/generators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace densegen::gen {
namespace {

constexpr double kPi = 3.14159265358979323846;
const double kHalfSqrt2 = std::sqrt(2.0) / 2.0;

// defab constants
const double kA2 = -std::pow(2.0, 3.0 / 5.0);
const double kE2 = -std::pow(2.0, -4.0 / 5.0);
const double kB2 = 8.0 / 3.0;

Matrix reflection_block(FieldTag field) {
  Matrix m(field, 2, 2);
  m.at(0, 0) = kHalfSqrt2;
  m.at(0, 1) = kHalfSqrt2;
  m.at(1, 0) = kHalfSqrt2;
  m.at(1, 1) = -kHalfSqrt2;
  return m;
}

// [[1, -sqrt2], [sqrt2, -1]]; squares to -I.
Matrix half_turn_root_block(FieldTag field) {
  Matrix m(field, 2, 2);
  m.at(0, 0) = 1.0;
  m.at(0, 1) = -std::sqrt(2.0);
  m.at(1, 0) = std::sqrt(2.0);
  m.at(1, 1) = -1.0;
  return m;
}

// Eigenbasis of the reflection block, columns ordered (+1, -1).
Matrix reflection_basis_plus_minus(FieldTag field) {
  Matrix u(field, 2, 2);
  u.at(0, 0) = 1.0 + std::sqrt(2.0);
  u.at(0, 1) = 1.0 - std::sqrt(2.0);
  u.at(1, 0) = 1.0;
  u.at(1, 1) = 1.0;
  return u;
}

// Columns ordered (-1, +1) so the unit eigenvalue lands last.
Matrix reflection_basis_minus_plus(FieldTag field) {
  Matrix u(field, 2, 2);
  u.at(0, 0) = 1.0 - std::sqrt(2.0);
  u.at(0, 1) = 1.0 + std::sqrt(2.0);
  u.at(1, 0) = 1.0;
  u.at(1, 1) = 1.0;
  return u;
}

// Real similarity taking the quarter-turn rotation to half_turn_root_block.
Matrix half_turn_root_basis(FieldTag field) {
  Matrix s(field, 2, 2);
  s.at(0, 0) = 0.0;
  s.at(0, 1) = std::sqrt(2.0);
  s.at(1, 0) = -1.0;
  s.at(1, 1) = 1.0;
  return s;
}

Block sqrt_block(const Block& b) {
  switch (b.kind) {
    case Block::Kind::PositiveScalar:
      return Block{Block::Kind::PositiveScalar, std::sqrt(b.value.real()), 0};
    case Block::Kind::One:
      return b;
    case Block::Kind::RotationBlock:
      return Block{Block::Kind::RotationBlock, 1.0, b.m + 1};
    case Block::Kind::UnitModulusScalar:
      return Block{Block::Kind::UnitModulusScalar, std::polar(1.0, std::arg(b.value) / 2.0), 0};
    case Block::Kind::FreeComplexScalar:
      return Block{Block::Kind::FreeComplexScalar, std::sqrt(b.value), 0};
    default:
      fail(ErrKind::MissingCanonicalForm, "block kind has no symbolic square root");
  }
}

/// Permutation matrix moving block `from` to the end; transform_new =
/// transform_old * P and new_blockdiag = P^T * old_blockdiag * P.
Matrix block_move_to_end(FieldTag field, const std::vector<Block>& blocks, std::size_t from) {
  std::vector<int> offsets(blocks.size() + 1, 0);
  for (std::size_t i = 0; i < blocks.size(); ++i)
    offsets[i + 1] = offsets[i] + blocks[i].size();
  const int dim = offsets.back();
  Matrix p = Matrix::zeros(field, dim, dim);
  int newc = 0;
  auto place = [&](std::size_t blk) {
    for (int k = 0; k < blocks[blk].size(); ++k) p.at(offsets[blk] + k, newc++) = 1.0;
  };
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (i != from) place(i);
  place(from);
  return p;
}

}  // namespace

const char* to_string(DensityScope s) {
  switch (s) {
    case DensityScope::FullMatrixAlgebra: return "FullMatrixAlgebra";
    case DensityScope::PositiveDeterminant: return "PositiveDeterminant";
    case DensityScope::Unvalidated: return "Unvalidated";
  }
  return "Unvalidated";
}

Matrix Block::to_matrix(FieldTag field) const {
  switch (kind) {
    case Kind::PositiveScalar:
    case Kind::SignScalar:
    case Kind::UnitModulusScalar:
    case Kind::FreeComplexScalar: {
      Matrix out(field, 1, 1);
      out.at(0, 0) = value;
      return out;
    }
    case Kind::One: {
      Matrix out(field, 1, 1);
      out.at(0, 0) = 1.0;
      return out;
    }
    case Kind::RotationBlock: {
      const double theta = std::pow(2.0, -m) * kPi;
      Matrix out(field, 2, 2);
      out.at(0, 0) = std::cos(theta);
      out.at(0, 1) = -std::sin(theta);
      out.at(1, 0) = std::sin(theta);
      out.at(1, 1) = std::cos(theta);
      return out;
    }
    case Kind::ReflectionBlock:
      return reflection_block(field);
  }
  fail(ErrKind::BadInput, "unknown block kind");
}

int CanonicalForm::dim() const {
  int d = 0;
  for (const Block& b : blocks) d += b.size();
  return d;
}

Matrix CanonicalForm::block_diagonal(FieldTag field) const {
  std::vector<Matrix> mats;
  mats.reserve(blocks.size());
  for (const Block& b : blocks) mats.push_back(b.to_matrix(field));
  return block_diag(field, mats);
}

Matrix CanonicalForm::reconstruct(FieldTag field) const {
  return transform * block_diagonal(field) * numkernel::invert(transform);
}

Matrix block_diag(FieldTag field, const std::vector<Matrix>& blocks) {
  int dim = 0;
  for (const Matrix& b : blocks) dim += b.rows();
  Matrix out = Matrix::zeros(field, dim, dim);
  int at = 0;
  for (const Matrix& b : blocks) {
    out.set_block(at, at, b);
    at += b.rows();
  }
  return out;
}

GeneratorPair build_real_pair(int n) {
  if (n < 1) fail(ErrKind::BadInput, "dimension must be positive");
  const FieldTag f = FieldTag::Real;

  if (n == 1) {
    // Registry pair: ln(-a)/ln(b) = -1/sqrt(2), irrational and negative.
    GeneratorPair p;
    p.a = Matrix(f, 1, 1, {Scalar(-std::exp(1.0))});
    p.b = Matrix(f, 1, 1, {Scalar(std::exp(-std::sqrt(2.0)))});
    p.field = f;
    p.dim = 1;
    p.scope = DensityScope::Unvalidated;
    p.provenance = "registry real n=1";
    return p;
  }

  if (n == 2) {
    GeneratorPair p;
    p.a = Matrix(f, 2, 2, {Scalar(kA2), Scalar(kE2), Scalar(1.0), Scalar(0.0)});
    p.b = Matrix::diag(f, {1.0, kB2});
    p.field = f;
    p.dim = 2;
    p.scope = DensityScope::PositiveDeterminant;
    p.provenance = "base real n=2";
    return p;
  }

  if (n == 3) {
    GeneratorPair p;
    const double sqrtb = std::sqrt(kB2);
    Matrix a = Matrix::zeros(f, 3, 3);
    a.at(0, 0) = sqrtb;
    a.set_block(1, 1, reflection_block(f));
    Matrix e = Matrix::zeros(f, 3, 3);
    e.at(0, 1) = 1.0;
    e.at(1, 0) = kE2;
    e.at(1, 1) = kA2;
    e.at(2, 2) = 1.0;

    CanonicalForm cf;
    cf.blocks = {Block{Block::Kind::PositiveScalar, sqrtb, 0}, Block{Block::Kind::One, 1.0, 0},
                 Block{Block::Kind::SignScalar, -1.0, 0}};
    cf.transform = Matrix::identity(f, 3);
    cf.transform.set_block(1, 1, reflection_basis_plus_minus(f));

    p.a = a;
    p.b = e;
    p.field = f;
    p.dim = 3;
    p.scope = DensityScope::FullMatrixAlgebra;
    p.canonical_a = cf;
    p.provenance = "base real n=3";

    // The 2x2 semigroup embeds block-diagonally: E = diag(A', 1) and
    // A^2 = diag(B', 1), where (A', B') is the base 2x2 pair written in
    // swapped coordinates (a conjugate pair, so its density scope carries
    // over unchanged). Storing the inner pair in the embedded coordinates
    // makes the lift an exact letter-for-word substitution.
    Matrix swap = Matrix::zeros(f, 2, 2);
    swap.at(0, 1) = 1.0;
    swap.at(1, 0) = 1.0;
    GeneratorPair inner_pair = build_real_pair(2);
    inner_pair.a = swap * inner_pair.a * swap;
    inner_pair.b = swap * inner_pair.b * swap;
    inner_pair.provenance = "base real n=2 (embedded coordinates)";
    auto inner = std::make_shared<GeneratorPair>(std::move(inner_pair));
    LetterLift lift;
    lift.a_image.append(Gen::B, 1);
    lift.b_image.append(Gen::A, 2);
    lift.conj = Matrix::identity(f, 2);
    p.inner = inner;
    p.lift = lift;
    return p;
  }

  return lift_real(build_real_pair(n - 1));
}

GeneratorPair build_complex_pair(int n) {
  if (n < 1) fail(ErrKind::BadInput, "dimension must be positive");
  const FieldTag f = FieldTag::Complex;

  if (n == 1) {
    GeneratorPair p;
    p.a = Matrix(f, 1, 1, {Scalar(2.0) * std::polar(1.0, 2.0 * kPi * std::sqrt(2.0))});
    p.b = Matrix(f, 1, 1, {Scalar(1.0 / 3.0) * std::polar(1.0, 2.0 * kPi * std::sqrt(3.0))});
    p.field = f;
    p.dim = 1;
    p.scope = DensityScope::Unvalidated;
    p.provenance = "registry complex n=1";
    return p;
  }

  if (n == 2) {
    GeneratorPair p;
    const Scalar z1 = std::pow(2.0, 3.0 / 5.0) * std::polar(1.0, 2.0 * kPi * std::sqrt(2.0));
    p.a = Matrix::diag(f, {z1, 1.0});
    Matrix e = Matrix::zeros(f, 2, 2);
    e.at(0, 1) = 1.0;
    e.at(1, 0) = -std::pow(2.0, -4.0 / 5.0) * std::polar(1.0, -2.0 * kPi * std::sqrt(3.0));
    e.at(1, 1) = -std::pow(2.0, 3.0 / 5.0);
    p.b = e;
    p.field = f;
    p.dim = 2;
    p.scope = DensityScope::Unvalidated;
    CanonicalForm cf;
    cf.blocks = {Block{Block::Kind::FreeComplexScalar, z1, 0}, Block{Block::Kind::One, 1.0, 0}};
    cf.transform = Matrix::identity(f, 2);
    p.canonical_a = cf;
    p.provenance = "registry complex n=2";
    return p;
  }

  return lift_complex(build_complex_pair(n - 1));
}

GeneratorPair lift_complex(const GeneratorPair& pair) {
  if (pair.field != FieldTag::Complex) fail(ErrKind::BadInput, "lift_complex needs a complex pair");
  if (!pair.canonical_a) fail(ErrKind::MissingCanonicalForm, "canonical form required");
  const CanonicalForm& cf = *pair.canonical_a;
  if (cf.blocks.empty() || cf.blocks.back().kind != Block::Kind::One)
    fail(ErrKind::MissingCanonicalForm, "last canonical block must be the unit scalar");
  const FieldTag f = FieldTag::Complex;
  const int n = pair.dim;

  std::vector<Block> pre;
  for (std::size_t i = 0; i + 1 < cf.blocks.size(); ++i) pre.push_back(sqrt_block(cf.blocks[i]));

  std::vector<Matrix> mats;
  for (const Block& b : pre) mats.push_back(b.to_matrix(f));
  mats.push_back(reflection_block(f));

  Matrix tb = Matrix::identity(f, n + 1);
  tb.set_block(0, 0, cf.transform);
  Matrix c = tb * block_diag(f, mats) * numkernel::invert(tb);

  Matrix d = Matrix::identity(f, n + 1);
  d.set_block(0, 0, pair.b);

  CanonicalForm cfc;
  cfc.blocks = pre;
  cfc.blocks.push_back(Block{Block::Kind::UnitModulusScalar, -1.0, 0});
  cfc.blocks.push_back(Block{Block::Kind::One, 1.0, 0});
  Matrix w = Matrix::identity(f, n + 1);
  w.set_block(n - 1, n - 1, reflection_basis_minus_plus(f));
  cfc.transform = tb * w;

  GeneratorPair out;
  out.a = c;
  out.b = d;
  out.field = f;
  out.dim = n + 1;
  out.scope = pair.scope == DensityScope::FullMatrixAlgebra ? DensityScope::FullMatrixAlgebra
                                                            : DensityScope::Unvalidated;
  out.canonical_a = cfc;
  out.provenance = "complex lift of [" + pair.provenance + "]";
  out.inner = std::make_shared<GeneratorPair>(pair);
  LetterLift lift;
  lift.a_image.append(Gen::A, 2);
  lift.b_image.append(Gen::B, 1);
  lift.conj = Matrix::identity(f, n);
  out.lift = lift;
  return out;
}

GeneratorPair lift_real(const GeneratorPair& pair) {
  if (pair.field != FieldTag::Real) fail(ErrKind::BadInput, "lift_real needs a real pair");
  if (!pair.canonical_a) fail(ErrKind::MissingCanonicalForm, "canonical form required");
  const CanonicalForm& cf = *pair.canonical_a;
  if (cf.blocks.size() < 2) fail(ErrKind::NotInClassR, "canonical form too small");
  const Block& first = cf.blocks.front();
  if (first.kind != Block::Kind::PositiveScalar && first.kind != Block::Kind::One)
    fail(ErrKind::NotInClassR, "leading canonical block must be a positive scalar");
  const Block& last = cf.blocks.back();
  if (last.kind != Block::Kind::SignScalar)
    fail(ErrKind::NotInClassR, "trailing canonical block must be a sign scalar");
  for (std::size_t i = 1; i + 1 < cf.blocks.size(); ++i) {
    const auto k = cf.blocks[i].kind;
    if (k != Block::Kind::One && k != Block::Kind::RotationBlock)
      fail(ErrKind::NotInClassR, "middle canonical blocks must be units or rotations");
  }
  const FieldTag f = FieldTag::Real;
  const int n = pair.dim;
  const int sign = last.value.real() > 0.0 ? 1 : -1;  // = sgn det A

  const Scalar det_e = numkernel::det(pair.b);
  if (std::abs(det_e) < 1e-12) fail(ErrKind::BadInput, "second generator must be invertible");
  const int sign_e = det_e.real() > 0.0 ? 1 : -1;

  std::vector<Block> pre;
  for (std::size_t i = 0; i + 1 < cf.blocks.size(); ++i) pre.push_back(sqrt_block(cf.blocks[i]));

  std::vector<Matrix> mats;
  for (const Block& b : pre) mats.push_back(b.to_matrix(f));
  mats.push_back(sign > 0 ? reflection_block(f) : half_turn_root_block(f));

  Matrix tb = Matrix::identity(f, n + 1);
  tb.set_block(0, 0, cf.transform);
  Matrix c = tb * block_diag(f, mats) * numkernel::invert(tb);

  Matrix w = Matrix::identity(f, n + 1);
  CanonicalForm cfc;
  cfc.blocks = pre;
  if (sign > 0) {
    // Reflection splits into a fresh unit plus the trailing -1.
    cfc.blocks.push_back(Block{Block::Kind::One, 1.0, 0});
    cfc.blocks.push_back(Block{Block::Kind::SignScalar, -1.0, 0});
    w.set_block(n - 1, n - 1, reflection_basis_plus_minus(f));
    cfc.transform = tb * w;
  } else {
    // The trailing pair becomes a quarter-turn rotation; shuffle a unit
    // eigenvalue into the corner so the form stays sign-terminated.
    cfc.blocks.push_back(Block{Block::Kind::RotationBlock, 1.0, 1});
    w.set_block(n - 1, n - 1, half_turn_root_basis(f));

    std::size_t one_at = cfc.blocks.size();
    for (std::size_t i = cfc.blocks.size(); i-- > 0;) {
      if (cfc.blocks[i].kind == Block::Kind::One) {
        one_at = i;
        break;
      }
    }
    if (one_at == cfc.blocks.size())
      fail(ErrKind::NotInClassR, "no unit eigenvalue available for the corner slot");
    Matrix perm = block_move_to_end(f, cfc.blocks, one_at);
    std::vector<Block> reordered;
    for (std::size_t i = 0; i < cfc.blocks.size(); ++i)
      if (i != one_at) reordered.push_back(cfc.blocks[i]);
    reordered.push_back(Block{Block::Kind::SignScalar, 1.0, 0});
    cfc.blocks = reordered;
    cfc.transform = tb * w * perm;
  }

  Matrix d = Matrix::zeros(f, n + 1, n + 1);
  d.set_block(0, 0, pair.b);
  d.at(n, n) = -sign_e;

  GeneratorPair out;
  out.a = c;
  out.b = d;
  out.field = f;
  out.dim = n + 1;
  out.scope = pair.scope == DensityScope::FullMatrixAlgebra ? DensityScope::FullMatrixAlgebra
                                                            : DensityScope::Unvalidated;
  out.canonical_a = cfc;
  out.provenance = "real lift of [" + pair.provenance + "]";
  out.inner = std::make_shared<GeneratorPair>(pair);
  LetterLift lift;
  lift.a_image.append(Gen::A, 2);
  lift.b_image.append(Gen::B, 1);
  lift.conj = Matrix::identity(f, n);
  lift.a_sign = sign;
  lift.b_sign = -sign_e;
  out.lift = lift;
  return out;
}

namespace {

bool is_root_of_unity(Scalar lambda, double tol, int* order_out = nullptr) {
  if (std::abs(std::abs(lambda) - 1.0) > tol) return false;
  Scalar p = lambda;
  for (int n = 1; n <= (1 << 16); ++n) {
    if (std::abs(p - Scalar(1.0)) <= tol * std::max(1.0, static_cast<double>(n)) * 1e2) {
      if (order_out) *order_out = n;
      return true;
    }
    p *= lambda;
  }
  return false;
}

}  // namespace

ClassCheckResult check_class(const Matrix& a, MatrixClass cls, double tol,
                             bool strict_free_scalar) {
  if (!a.square()) return {false, "not square"};
  Spectrum s = numkernel::eigenvalues(a);

  if (cls == MatrixClass::C_n) {
    bool has_one = false;
    int free_count = 0;
    for (const Scalar& lam : s.eigenvalues) {
      if (std::abs(lam - Scalar(1.0)) <= tol) has_one = true;
      if (!is_root_of_unity(lam, tol)) ++free_count;
    }
    if (!has_one) return {false, "no unit eigenvalue"};
    const int allowed = strict_free_scalar ? 0 : 1;
    if (free_count > allowed)
      return {false, std::to_string(free_count) + " eigenvalues are not roots of unity"};
    return {true, "unit eigenvalue present; " + std::to_string(free_count) + " free scalar(s)"};
  }

  // R_n
  const Scalar detv = numkernel::det(a);
  if (std::abs(detv) <= tol) return {false, "singular"};
  const int sgn_det = detv.real() > 0.0 ? 1 : -1;

  int ones = 0, minus_ones = 0, pos_reals = 0;
  std::vector<double> pos_angles, neg_angles;
  for (const Scalar& lam : s.eigenvalues) {
    if (std::abs(lam - Scalar(1.0)) <= tol) {
      ++ones;
      continue;
    }
    if (std::abs(lam + Scalar(1.0)) <= tol) {
      ++minus_ones;
      continue;
    }
    if (std::abs(lam.imag()) <= tol) {
      if (lam.real() > tol) {
        ++pos_reals;
        continue;
      }
      return {false, "negative real eigenvalue other than -1"};
    }
    if (std::abs(std::abs(lam) - 1.0) > tol) return {false, "complex eigenvalue off the unit circle"};
    const double theta = std::arg(lam);
    const double at = std::abs(theta);
    const double m_est = std::log2(kPi / at);
    const double m_round = std::round(m_est);
    if (m_round < 1 || std::abs(at - std::pow(2.0, -m_round) * kPi) > tol)
      return {false, "eigenangle is not 2^{-m} pi"};
    (theta > 0 ? pos_angles : neg_angles).push_back(at);
  }

  std::sort(pos_angles.begin(), pos_angles.end());
  std::sort(neg_angles.begin(), neg_angles.end());
  if (pos_angles.size() != neg_angles.size())
    return {false, "rotation eigenvalues do not pair into conjugates"};
  for (std::size_t i = 0; i < pos_angles.size(); ++i)
    if (std::abs(pos_angles[i] - neg_angles[i]) > tol)
      return {false, "rotation eigenvalues do not pair into conjugates"};

  if (pos_reals > 1) return {false, "more than one positive scalar block"};
  if (ones == 0) return {false, "no unit eigenvalue"};

  if (sgn_det < 0) {
    if (minus_ones < 1) return {false, "negative determinant without a -1 eigenvalue"};
    if ((minus_ones - 1) % 2 != 0) return {false, "unpaired -1 eigenvalues"};
  } else {
    if (minus_ones % 2 != 0) return {false, "unpaired -1 eigenvalues"};
  }

  return {true, "spectrum matches: " + std::to_string(pos_reals) + " positive, " +
                    std::to_string(ones) + " unit, " + std::to_string(minus_ones) +
                    " negative-unit, " + std::to_string(pos_angles.size()) + " rotation pair(s)"};
}

}  // namespace densegen::gen
