#pragma once

#include <cstdint>

#include "densegen/generators.hpp"
#include "densegen/numkernel.hpp"
#include "densegen/word.hpp"

namespace densegen::synthesis {

using gen::GeneratorPair;

struct SearchBudget {
  std::int64_t max_evaluations = 1'000'000;
  int max_word_length = 64;
  int beam_width = 256;
};

struct ApproxResult {
  Word word;
  double achieved_error = 0.0;
  double target_norm = 0.0;
  std::int64_t evaluations = 0;
  double wall_budget_used = 0.0;
  bool budget_exhausted = false;
};

/// Left fold of letter powers (exponentiation by squaring); errors with
/// Overflow when any intermediate Frobenius norm exceeds 1e150.
Matrix evaluate_word(const Word& w, const Matrix& a, const Matrix& b);
Matrix evaluate_word(const Word& w, const GeneratorPair& pair);

ApproxResult beam_search(const Matrix& target, const GeneratorPair& pair, double eps,
                         const SearchBudget& budget);

ApproxResult approx_matrix(const Matrix& target, const GeneratorPair& pair, double eps,
                           const SearchBudget& budget);

}  // namespace densegen::synthesis
