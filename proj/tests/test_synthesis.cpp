#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <densegen/generators.hpp>
#include <densegen/harness.hpp>
#include <densegen/planner.hpp>
#include <densegen/rng.hpp>
#include <densegen/synthesis.hpp>

using namespace densegen;
using namespace densegen::synthesis;

TEST_CASE("evaluate_word: single letters and known diagonal words") {
  const gen::GeneratorPair p2 = gen::build_real_pair(2);
  Word wa;
  wa.append(Gen::A, 1);
  CHECK((evaluate_word(wa, p2) - p2.a).frobenius() == 0.0);

  Word c;  // A B A^3 B A
  c.append(Gen::A, 1);
  c.append(Gen::B, 1);
  c.append(Gen::A, 3);
  c.append(Gen::B, 1);
  c.append(Gen::A, 1);
  CHECK((evaluate_word(c, p2) - Matrix::diag(FieldTag::Real, {4.0 / 9.0, 1.0})).frobenius() <
        1e-12);

  const gen::GeneratorPair p3 = gen::build_real_pair(3);
  Word a2;
  a2.append(Gen::A, 2);
  CHECK((evaluate_word(a2, p3) - Matrix::diag(FieldTag::Real, {8.0 / 3.0, 1.0, 1.0}))
            .frobenius() < 1e-12);
}

TEST_CASE("evaluate_word is multiplicative over concatenation") {
  const gen::GeneratorPair pair = gen::build_real_pair(3);
  SplitMix64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Word w1 = harness::random_word(rng, 6);
    const Word w2 = harness::random_word(rng, 6);
    const Matrix lhs = evaluate_word(concat(w1, w2), pair);
    const Matrix rhs = evaluate_word(w1, pair) * evaluate_word(w2, pair);
    CHECK((lhs - rhs).frobenius() <= 1e-10 * (1.0 + rhs.frobenius()));
  }
}

TEST_CASE("evaluate_word: overflow guard on runaway exponents") {
  const gen::GeneratorPair pair = gen::build_real_pair(2);
  Word w;
  w.append(Gen::B, 2000);  // (8/3)^2000 far exceeds the norm ceiling
  CHECK_THROWS_AS(evaluate_word(w, pair), Error);
}

TEST_CASE("beam_search: exact depth-2 witness found within a tiny budget") {
  const gen::GeneratorPair pair = gen::build_real_pair(2);
  const Matrix target = pair.a * pair.b;
  SearchBudget budget;
  budget.max_evaluations = 64;
  const ApproxResult r = beam_search(target, pair, 1e-9, budget);
  CHECK(r.achieved_error < 1e-9);
  Word expect;
  expect.append(Gen::A, 1);
  expect.append(Gen::B, 1);
  CHECK(r.word == expect);
}

TEST_CASE("beam_search: witness-perturbation recovery on 2x2 and 3x3 pairs") {
  SplitMix64 rng(17);
  for (int dim : {2, 3}) {
    const gen::GeneratorPair pair = gen::build_real_pair(dim);
    for (int trial = 0; trial < 10; ++trial) {
      // the rescale perturbs by 0.03*|base|, so keep witnesses whose
      // perturbed evaluation stays within the tolerance
      Word w = harness::random_word(rng, 6);
      Matrix base = evaluate_word(w, pair);
      while (base.frobenius() > 3.0) {
        w = harness::random_word(rng, 6);
        base = evaluate_word(w, pair);
      }
      const Matrix target = base * Scalar(0.97);
      SearchBudget budget;
      budget.max_evaluations = 200000;
      const ApproxResult r = beam_search(target, pair, 0.1, budget);
      CHECK(r.achieved_error <= 0.1);
    }
  }
}

TEST_CASE("beam_search: error is non-increasing in the evaluation budget") {
  const gen::GeneratorPair pair = gen::build_real_pair(3);
  SplitMix64 rng(23);
  Matrix target = numkernel::random_matrix(FieldTag::Real, 3, 3, rng);
  target = target * Scalar(std::sqrt(3.0) / target.frobenius());
  double prev = 1e300;
  for (std::int64_t evals : {1000LL, 10000LL, 100000LL}) {
    SearchBudget budget;
    budget.max_evaluations = evals;
    const ApproxResult r = beam_search(target, pair, 1e-9, budget);
    CHECK(r.achieved_error <= prev + 1e-15);
    prev = r.achieved_error;
  }
}

TEST_CASE("beam_search: longer witness found with a wider beam") {
  const gen::GeneratorPair pair = gen::build_real_pair(3);
  SplitMix64 rng(29);
  const Word w = harness::random_word(rng, 10);
  const Matrix target = evaluate_word(w, pair);
  SearchBudget budget;
  budget.max_evaluations = 1'000'000;
  budget.beam_width = 1024;
  const ApproxResult r = beam_search(target, pair, 1e-9, budget);
  CHECK(r.achieved_error < 1e-9);
}

TEST_CASE("approx_matrix: a generator is reproduced exactly") {
  const gen::GeneratorPair pair = gen::build_real_pair(2);
  SearchBudget budget;
  budget.max_evaluations = 1000;
  const ApproxResult r = approx_matrix(pair.a, pair, 1e-9, budget);
  CHECK(r.achieved_error < 1e-12);
  Word expect;
  expect.append(Gen::A, 1);
  CHECK(r.word == expect);
}

TEST_CASE("approx_matrix: near-scalar 2x2 target via scalar-word seeding") {
  const gen::GeneratorPair pair = gen::build_real_pair(2);
  Matrix target = Matrix::diag(FieldTag::Real, {-1.0, -1.0});
  target.at(0, 1) = 1e-3;
  target.at(1, 0) = -1e-3;
  SearchBudget budget;
  budget.max_evaluations = 1'000'000;
  const ApproxResult r = approx_matrix(target, pair, 0.05, budget);
  CHECK(r.achieved_error < 0.05);
}

TEST_CASE("approx_matrix: negative-determinant 2x2 real targets are out of scope") {
  const gen::GeneratorPair pair = gen::build_real_pair(2);
  REQUIRE(pair.scope == gen::DensityScope::PositiveDeterminant);
  const Matrix target = Matrix::diag(FieldTag::Real, {1.0, -1.0});
  SearchBudget budget;
  CHECK_THROWS_AS(approx_matrix(target, pair, 0.1, budget), Error);
  try {
    approx_matrix(target, pair, 0.1, budget);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrKind::BadInput);
  }
}

TEST_CASE("approx_matrix: embedded block-diagonal route on the 3x3 pair") {
  const gen::GeneratorPair p3 = gen::build_real_pair(3);
  // diag(M, 1) with M an evaluation of a word over the embedded 2x2 pair
  // (conjugate to the base 2x2 pair, written in embedded coordinates).
  SplitMix64 rng(31);
  const Word inner = harness::random_word(rng, 5);
  const Matrix m2 = evaluate_word(inner, *p3.inner);
  Matrix target = Matrix::zeros(FieldTag::Real, 3, 3);
  target.set_block(0, 0, m2);
  target.at(2, 2) = 1.0;
  SearchBudget budget;
  budget.max_evaluations = 400000;
  const ApproxResult r = approx_matrix(target, p3, 0.05, budget);
  CHECK(r.achieved_error <= 0.05);
}

TEST_CASE("approx_matrix: 3x3 witness targets within the proven region") {
  const gen::GeneratorPair p3 = gen::build_real_pair(3);
  SplitMix64 rng(37);
  for (int trial = 0; trial < 3; ++trial) {
    const Word w = harness::random_word(rng, 10);
    const Matrix target = evaluate_word(w, p3);
    SearchBudget budget;
    budget.max_evaluations = 1'000'000;
    const ApproxResult r = approx_matrix(target, p3, 0.05, budget);
    CHECK(r.achieved_error <= 0.05);
  }
}

TEST_CASE("approx receipts are honest: re-evaluation reproduces the error") {
  const gen::GeneratorPair pair = gen::build_real_pair(3);
  SplitMix64 rng(41);
  Matrix target = numkernel::random_matrix(FieldTag::Real, 3, 3, rng);
  target = target * Scalar(std::sqrt(3.0) / target.frobenius());
  SearchBudget budget;
  budget.max_evaluations = 50000;
  const ApproxResult r = approx_matrix(target, pair, 1e-3, budget);
  const double recomputed = (evaluate_word(r.word, pair) - target).frobenius();
  CHECK(std::abs(recomputed - r.achieved_error) <= 1e-12 * (1.0 + recomputed));
  CHECK(r.target_norm == doctest::Approx(target.frobenius()).epsilon(1e-12));
}
