#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include <densegen/generators.hpp>

using namespace densegen;
using namespace densegen::gen;
using numkernel::det;
using numkernel::eigenvalues;

namespace {

// sigma is the corner sign the squared lifted generator must carry.
double ladder_residual(const GeneratorPair& lifted) {
  REQUIRE(lifted.inner != nullptr);
  const Matrix& a_inner = lifted.inner->a;
  const int n = a_inner.rows();
  const Matrix c2 = lifted.a * lifted.a;
  Matrix expected = Matrix::zeros(lifted.field, n + 1, n + 1);
  expected.set_block(0, 0, a_inner);
  Scalar sigma = 1.0;
  if (lifted.field == FieldTag::Real) {
    sigma = det(a_inner).real() > 0.0 ? 1.0 : -1.0;
  }
  expected.at(n, n) = sigma;
  return (c2 - expected).frobenius() / (1.0 + a_inner.frobenius());
}

bool spectrum_contains(const Spectrum& s, Scalar v, double tol = 1e-10) {
  for (const Scalar& ev : s.eigenvalues)
    if (std::abs(ev - v) < tol) return true;
  return false;
}

}  // namespace

TEST_CASE("2x2 real base pair: exact constants") {
  const GeneratorPair p = build_real_pair(2);
  CHECK(p.a.at(0, 0) == Scalar(-std::pow(2.0, 0.6)));
  CHECK(p.a.at(0, 1) == Scalar(-std::pow(2.0, -0.8)));
  CHECK(p.a.at(1, 0) == Scalar(1.0));
  CHECK(p.a.at(1, 1) == Scalar(0.0));
  CHECK(p.b.at(0, 0) == Scalar(1.0));
  CHECK(p.b.at(1, 1) == Scalar(8.0 / 3.0));
  CHECK(p.scope == DensityScope::PositiveDeterminant);
}

TEST_CASE("3x3 real base pair: generator square and class membership") {
  const GeneratorPair p = build_real_pair(3);
  const Matrix a2 = p.a * p.a;
  const Matrix expected = Matrix::diag(FieldTag::Real, {8.0 / 3.0, 1.0, 1.0});
  CHECK((a2 - expected).frobenius() < 1e-12);
  CHECK(p.scope == DensityScope::FullMatrixAlgebra);
  REQUIRE(p.canonical_a.has_value());

  // Spectrum: {sqrt(8/3), 1, -1}.
  const Spectrum s = eigenvalues(p.a);
  CHECK(spectrum_contains(s, Scalar(std::sqrt(8.0 / 3.0))));
  CHECK(spectrum_contains(s, Scalar(1.0)));
  CHECK(spectrum_contains(s, Scalar(-1.0)));

  CHECK(check_class(p.a, MatrixClass::R_n).pass);
}

TEST_CASE("block identities used by the real lift") {
  const double h = std::sqrt(2.0) / 2.0;
  Matrix refl(FieldTag::Real, 2, 2, {h, h, h, -h});
  CHECK((refl * refl - Matrix::identity(FieldTag::Real, 2)).frobenius() < 1e-15);

  const double s = std::sqrt(2.0);
  Matrix half_turn_root(FieldTag::Real, 2, 2, {1.0, -s, s, -1.0});
  const Matrix sq = half_turn_root * half_turn_root;
  CHECK((sq - Matrix::identity(FieldTag::Real, 2) * Scalar(-1.0)).frobenius() < 1e-15);
}

TEST_CASE("ladder identity and class preservation, real 3..8 and complex 2..8") {
  for (int n = 4; n <= 8; ++n) {
    const GeneratorPair p = build_real_pair(n);
    CHECK(ladder_residual(p) <= 1e-12);
    CHECK(check_class(p.a, MatrixClass::R_n).pass);
  }
  for (int n = 3; n <= 8; ++n) {
    const GeneratorPair p = build_complex_pair(n);
    CHECK(ladder_residual(p) <= 1e-12);
    CHECK(check_class(p.a, MatrixClass::C_n).pass);
  }
}

TEST_CASE("complex lift: square reproduces diag(A, 1)") {
  const GeneratorPair p2 = build_complex_pair(2);
  const GeneratorPair p3 = build_complex_pair(3);
  const Matrix c2 = p3.a * p3.a;
  Matrix expected = Matrix::zeros(FieldTag::Complex, 3, 3);
  expected.set_block(0, 0, p2.a);
  expected.at(2, 2) = 1.0;
  CHECK((c2 - expected).frobenius() <= 1e-12 * (1.0 + p2.a.frobenius()));
  // Second generator embeds the inner one: D = diag(E, 1).
  Matrix d_expected = Matrix::zeros(FieldTag::Complex, 3, 3);
  d_expected.set_block(0, 0, p2.b);
  d_expected.at(2, 2) = 1.0;
  CHECK((p3.b - d_expected).frobenius() < 1e-12);
}

TEST_CASE("real lift of the 3x3 base: corner sign follows the determinant") {
  const GeneratorPair p3 = build_real_pair(3);
  REQUIRE(det(p3.a).real() < 0.0);  // spectrum has a -1, positive scalar, and 1
  const GeneratorPair p4 = lift_real(p3);
  const Matrix c2 = p4.a * p4.a;
  Matrix expected = Matrix::zeros(FieldTag::Real, 4, 4);
  expected.set_block(0, 0, p3.a);
  expected.at(3, 3) = -1.0;
  CHECK((c2 - expected).frobenius() <= 1e-12 * (1.0 + p3.a.frobenius()));
}

TEST_CASE("rotation halving: eigenangles of lifted rotation blocks halve exactly") {
  // Build up enough levels that rotation blocks appear and get halved.
  GeneratorPair p = build_real_pair(4);
  for (int level = 0; level < 3; ++level) {
    REQUIRE(p.canonical_a.has_value());
    const GeneratorPair lifted = lift_real(p);
    REQUIRE(lifted.canonical_a.has_value());
    // Collect rotation blocks of parent and child; each parent block with
    // angle 2^-m pi must appear halved (m+1) in the child.
    for (const Block& pb : p.canonical_a->blocks) {
      if (pb.kind != Block::Kind::RotationBlock) continue;
      bool found = false;
      for (const Block& cb : lifted.canonical_a->blocks) {
        if (cb.kind == Block::Kind::RotationBlock && cb.m == pb.m + 1) found = true;
      }
      CHECK(found);
      // Verify the angle numerically through the block matrix spectrum.
      const Matrix bm = pb.to_matrix(FieldTag::Real);
      const Spectrum s = eigenvalues(bm);
      const double angle = std::pow(2.0, -pb.m) * std::acos(-1.0);
      CHECK(spectrum_contains(s, std::polar(1.0, angle), 1e-10));
    }
    p = lifted;
  }
}

TEST_CASE("check_class: positive and negative cases") {
  CHECK(check_class(Matrix::identity(FieldTag::Complex, 4), MatrixClass::C_n).pass);

  const Matrix bad = Matrix::diag(FieldTag::Complex, {2.0, 3.0});
  const ClassCheckResult r = check_class(bad, MatrixClass::C_n);
  CHECK_FALSE(r.pass);
  CHECK_FALSE(r.detail.empty());

  // No unit eigenvalue: fails the real class requirement too.
  const Matrix no_one = Matrix::diag(FieldTag::Real, {2.0, -1.0});
  CHECK_FALSE(check_class(no_one, MatrixClass::R_n).pass);
}

TEST_CASE("canonical form reconstructs the generator") {
  for (int n : {3, 5, 7}) {
    const GeneratorPair p = build_real_pair(n);
    REQUIRE(p.canonical_a.has_value());
    CHECK((p.canonical_a->reconstruct(FieldTag::Real) - p.a).frobenius() <=
          1e-10 * (1.0 + p.a.frobenius()));
  }
}

TEST_CASE("letter lifts replay inner letters inside the outer pair") {
  const GeneratorPair p4 = build_real_pair(4);
  REQUIRE(p4.lift.has_value());
  REQUIRE(p4.inner != nullptr);
  // One unit of the inner A maps to a_image; its evaluation must contain
  // the conjugated inner A in the leading block, up to the corner sign.
  Matrix img = Matrix::identity(FieldTag::Real, 4);
  for (const Letter& l : p4.lift->a_image.letters) {
    const Matrix& g = l.gen == Gen::A ? p4.a : p4.b;
    img = img * numkernel::matpow(g, l.exp);
  }
  const Matrix conj = p4.lift->conj;
  const Matrix inner_block =
      numkernel::invert(conj) * img.block(0, 0, 3, 3) * conj;
  CHECK((inner_block - p4.inner->a).frobenius() < 1e-9);
}
