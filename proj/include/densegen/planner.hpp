#pragma once

#include <vector>

#include "densegen/upsilon.hpp"
#include "densegen/word.hpp"

namespace densegen::planner {

using upsilon::UpsilonPoint;

/// A step operand: either an explicit Upsilon point or a reference to an
/// earlier step's output.
struct Operand {
  bool is_ref = false;
  int ref = -1;
  UpsilonPoint value{};

  static Operand point(UpsilonPoint p) { return Operand{false, -1, p}; }
  static Operand prev(int idx) { return Operand{true, idx, {}}; }
};

struct PlanStep {
  enum class Kind { Combine, Surrogate, ProductRealize };
  Kind kind = Kind::Combine;

  // Combine: output = combine_points(p, q, r*s)
  Operand p, q;
  Scalar r = 1.0, s = 1.0;

  // Surrogate: finite stand-in for the limit point `base`
  UpsilonPoint base{};
  double param = 0.0;

  // ProductRealize: the two-factor bordered product with parameters (c, d, v)
  Scalar c = 0.0, d = 0.0, v = 0.0;
};

enum class PlanMode { ComplexFull, RealPlus, RealMinus };

const char* to_string(PlanMode m);

struct CombinePlan {
  PlanMode mode = PlanMode::ComplexFull;
  UpsilonPoint target{};
  std::vector<PlanStep> steps;
  double predicted_error = 0.0;
};

/// Seed point (sqrt(2)/2, -sqrt(2)/2) = Upsilon of every ladder generator.
UpsilonPoint seed_point();

/// Numeric evaluation of a plan; outputs of all steps, last one is the
/// endpoint. RealPlus plans assert the 1 + ab/z > 0 guard at every
/// combine and raise GuardViolation on breach. With exact_surrogates,
/// Surrogate steps output their limit base point instead of the finite
/// stand-in chain.
std::vector<UpsilonPoint> evaluate_plan_steps(const CombinePlan& plan,
                                              bool exact_surrogates = false);
UpsilonPoint evaluate_plan(const CombinePlan& plan, bool exact_surrogates = false);

/// Stage parameters (y, z) of the three-stage complex chain; the final
/// combine of ((y+sqrt2/2, y-sqrt2/2)) at z returns (u,v) exactly.
std::pair<Scalar, Scalar> complex_stage_params(Scalar u, Scalar v);

CombinePlan plan_complex_point(Scalar u, Scalar v, double t, bool allow_perturb = true);
CombinePlan plan_real_plus(double u, double v, double t);
CombinePlan plan_real_minus(double u, double v);

/// Builds the explicit two-factor bordered product for a ProductRealize
/// step at core dimension n (n >= 2).
upsilon::CombineRealization product_realize_matrices(const PlanStep& step, int n);

struct IntegerApprox {
  long long m = 0, n = 0;
  double err = 0.0;
};

/// Integers (m, n) with |rho - m*theta - n| < eps; theta must pass a
/// continued-fraction irrationality heuristic.
IntegerApprox kronecker_approx(double theta, double rho, double eps);

/// Positive integers (k, l), l >= min_l, with |k*alpha + l*beta - gamma| <
/// eps; requires alpha > 0, beta < 0.
IntegerApprox positive_coeff_approx(double alpha, double beta, double gamma, double eps,
                                    long long min_l = 1);

/// A word over the n=2 real base pair evaluating within eps of d*I_2.
Word scalar_word(double d, double eps);

}  // namespace densegen::planner
