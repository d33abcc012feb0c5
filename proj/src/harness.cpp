#include "densegen/harness.hpp"

#include <algorithm>
#include <cmath>

#include "densegen/errors.hpp"

namespace densegen::harness {

namespace {

std::vector<double> quantiles(std::vector<double> errs) {
  if (errs.empty()) return {};
  std::sort(errs.begin(), errs.end());
  const auto pick = [&](double q) {
    const double idx = q * static_cast<double>(errs.size() - 1);
    return errs[static_cast<std::size_t>(std::llround(idx))];
  };
  return {pick(0.0), pick(0.25), pick(0.5), pick(0.75), pick(1.0)};
}

Matrix random_target(const gen::GeneratorPair& pair, SplitMix64& rng) {
  const int n = pair.dim;
  for (;;) {
    Matrix t(pair.field, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        t.at(i, j) = pair.field == FieldTag::Real ? Scalar(rng.normal())
                                                  : Scalar(rng.normal(), rng.normal());
    const double norm = t.frobenius();
    if (norm < 1e-6) continue;
    t = t * Scalar(std::sqrt(static_cast<double>(n)) / norm);
    if (pair.scope == gen::DensityScope::PositiveDeterminant &&
        numkernel::det(t).real() <= 0.0)
      continue;
    return t;
  }
}

}  // namespace

Word random_word(SplitMix64& rng, int max_degree) {
  const int degree = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_degree));
  Word w;
  Gen g = rng.next_u64() % 2 == 0 ? Gen::A : Gen::B;
  int left = degree;
  while (left > 0) {
    const int e = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(left));
    w.append(g, e);
    g = g == Gen::A ? Gen::B : Gen::A;
    left -= e;
  }
  return w;
}

DensityReport density_experiment(const gen::GeneratorPair& pair, int samples, double eps,
                                 const synthesis::SearchBudget& budget, std::uint64_t seed) {
  DensityReport rep;
  rep.pair_id = pair.provenance;
  rep.dimension = pair.dim;
  rep.field = pair.field;
  rep.samples = samples;
  rep.eps = eps;
  rep.budget = budget.max_evaluations;
  rep.seed = seed;

  SplitMix64 rng(seed);
  std::vector<double> errs;
  int hits = 0;
  for (int i = 0; i < samples; ++i) {
    const Matrix target = random_target(pair, rng);
    const auto res = synthesis::approx_matrix(target, pair, eps, budget);
    errs.push_back(res.achieved_error);
    if (res.achieved_error <= eps) ++hits;
  }
  rep.hit_rate = samples > 0 ? static_cast<double>(hits) / samples : 0.0;
  rep.error_quantiles = quantiles(errs);

  // witness suite: perturbed evaluations of short words, approximable by
  // construction
  rep.witness_samples = samples;
  std::vector<double> werrs;
  int whits = 0;
  for (int i = 0; i < samples; ++i) {
    const Word w = random_word(rng, 6);
    Matrix target = synthesis::evaluate_word(w, pair);
    for (int r = 0; r < target.rows(); ++r)
      for (int c = 0; c < target.cols(); ++c)
        target.at(r, c) += pair.field == FieldTag::Real
                               ? Scalar(1e-3 * rng.uniform(-1.0, 1.0))
                               : Scalar(1e-3 * rng.uniform(-1.0, 1.0),
                                        1e-3 * rng.uniform(-1.0, 1.0));
    if (pair.scope == gen::DensityScope::PositiveDeterminant &&
        numkernel::det(target).real() <= 0.0) {
      --i;  // vanishing-probability corner; resample
      continue;
    }
    const auto res = synthesis::approx_matrix(target, pair, eps, budget);
    werrs.push_back(res.achieved_error);
    if (res.achieved_error <= eps) ++whits;
  }
  rep.witness_hit_rate = samples > 0 ? static_cast<double>(whits) / samples : 0.0;
  rep.witness_error_quantiles = quantiles(werrs);
  return rep;
}

bool dependence_invariant_check(const std::vector<Matrix>& x, const Matrix& f, int trials,
                                double* worst_residual, std::uint64_t seed) {
  if (x.empty()) fail(ErrKind::BadInput, "need at least one vector");
  const int n = x.front().rows();
  if (static_cast<int>(x.size()) != n + 1) fail(ErrKind::BadInput, "need exactly n+1 vectors");
  const FieldTag field = f.field();

  Matrix stack(field, n, n + 1);
  double xmax = 0.0;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i < n; ++i) stack.at(i, j) = x[static_cast<std::size_t>(j)].at(i, 0);
    xmax = std::max(xmax, x[static_cast<std::size_t>(j)].frobenius());
  }
  const Matrix alpha = numkernel::null_direction(stack);

  SplitMix64 rng(seed);
  double worst = 0.0;
  bool pass = true;
  for (int t = 0; t < trials; ++t) {
    const Matrix map = t == 0 ? f : numkernel::random_matrix(field, n, n, rng);
    const double residual = (map * (stack * alpha)).frobenius();
    const double scale = std::max(1e-30, map.frobenius() * xmax);
    worst = std::max(worst, residual / scale);
    if (residual > 1e-9 * scale) pass = false;
  }
  if (worst_residual) *worst_residual = worst;
  return pass;
}

TransitivityResult transitivity_demo(const gen::GeneratorPair& pair, const Matrix& u_center,
                                     const Matrix& v_center, double radius,
                                     const synthesis::SearchBudget& budget, std::uint64_t seed) {
  const int n = pair.dim;
  if (u_center.rows() != n || v_center.rows() != n)
    fail(ErrKind::BadInput, "centers must match the pair dimension");
  SplitMix64 rng(seed);
  Matrix m = u_center;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    if (std::abs(numkernel::det(m)) >= 1e-6) break;
    Matrix delta = numkernel::random_matrix(pair.field, n, n, rng);
    const double dn = delta.frobenius();
    m = u_center + delta * Scalar(0.5 * radius / std::max(dn, 1e-30));
  }
  if (std::abs(numkernel::det(m)) < 1e-6)
    fail(ErrKind::SingularMatrix, "no invertible element found in the U-ball");

  const Matrix target = v_center * numkernel::invert(m);
  const auto res = synthesis::approx_matrix(target, pair, radius, budget);

  TransitivityResult out;
  out.word = res.word;
  out.m = m;
  out.distance = (synthesis::evaluate_word(res.word, pair) * m - v_center).frobenius();
  out.success = out.distance <= radius;
  return out;
}

}  // namespace densegen::harness
