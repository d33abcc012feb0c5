#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "densegen/generators.hpp"
#include "densegen/synthesis.hpp"

namespace densegen::harness {

struct DensityReport {
  std::string pair_id;
  int dimension = 0;
  FieldTag field = FieldTag::Real;
  int samples = 0;
  double eps = 0.0;
  double hit_rate = 0.0;
  std::vector<double> error_quantiles;  // min, q25, median, q75, max
  int witness_samples = 0;
  double witness_hit_rate = 0.0;
  std::vector<double> witness_error_quantiles;
  std::int64_t budget = 0;
  std::uint64_t seed = 0;
};

/// Random normalized-Gaussian targets plus a separately reported suite of
/// perturbed short-word evaluations (targets known to be approximable).
DensityReport density_experiment(const gen::GeneratorPair& pair, int samples, double eps,
                                 const synthesis::SearchBudget& budget, std::uint64_t seed);

/// Orbit-confinement obstruction: any n+1 vectors in K^n are dependent,
/// and the dependence survives every simultaneous map F X_i.
bool dependence_invariant_check(const std::vector<Matrix>& x, const Matrix& f, int trials,
                                double* worst_residual = nullptr, std::uint64_t seed = 1);

struct TransitivityResult {
  Word word;
  Matrix m;  // the invertible element picked in the U-ball
  double distance = 0.0;
  bool success = false;
};

TransitivityResult transitivity_demo(const gen::GeneratorPair& pair, const Matrix& u_center,
                                     const Matrix& v_center, double radius,
                                     const synthesis::SearchBudget& budget,
                                     std::uint64_t seed = 7);

/// Uniformly random normalized word of total degree <= max_degree.
Word random_word(SplitMix64& rng, int max_degree);

}  // namespace densegen::harness
