#include "densegen/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>
#include <vector>

#include "densegen/errors.hpp"
#include "densegen/planner.hpp"
#include "densegen/upsilon.hpp"

namespace densegen::synthesis {

namespace {

constexpr double kOverflowNorm = 1e150;

void check_overflow(const Matrix& m) {
  if (!m.all_finite() || m.frobenius() > kOverflowNorm)
    fail(ErrKind::Overflow, "intermediate word value exceeded 1e150");
}

}  // namespace

Matrix evaluate_word(const Word& w, const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.rows() != a.cols() || b.rows() != b.cols())
    fail(ErrKind::BadInput, "generators must be square and same size");
  Matrix acc = Matrix::identity(a.field(), a.rows());
  for (const Letter& l : w.letters) {
    acc = acc * numkernel::matpow(l.gen == Gen::A ? a : b, l.exp);
    check_overflow(acc);
  }
  return acc;
}

Matrix evaluate_word(const Word& w, const GeneratorPair& pair) {
  return evaluate_word(w, pair.a, pair.b);
}

namespace {

struct BeamState {
  Word word;
  Matrix mat;
  double err = 0.0;
};

std::string fingerprint(const Matrix& m) {
  std::string key;
  key.reserve(m.rows() * m.cols() * 16);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) {
      const Scalar v = m.at(i, j);
      const long long re = std::llround(std::clamp(v.real(), -9e12, 9e12) * 1e4);
      const long long im = std::llround(std::clamp(v.imag(), -9e12, 9e12) * 1e4);
      key.append(reinterpret_cast<const char*>(&re), sizeof re);
      key.append(reinterpret_cast<const char*>(&im), sizeof im);
    }
  return key;
}

bool better(double err, const Word& w, double best_err, const Word& best_w) {
  if (err < best_err - 1e-15) return true;
  if (err > best_err + 1e-15) return false;
  return w < best_w;
}

// Exhaustive scan of every normalized word (alternating letters, free
// exponents) up to a total degree: 2^{D+1} evaluations for degree D. The
// beam's greedy intermediate ranking can discard the prefix of a deep
// witness, so word-evaluation targets get this exact sweep first.
void witness_probe(const Matrix& target, const GeneratorPair& pair, int max_degree,
                   std::int64_t& evals, double& best_err, Word& best_word) {
  std::vector<Matrix> pow_a{pair.a}, pow_b{pair.b};
  for (int e = 2; e <= max_degree; ++e) {
    pow_a.push_back(pow_a.back() * pair.a);
    pow_b.push_back(pow_b.back() * pair.b);
  }
  struct Frame {
    Matrix mat;
    Word word;
    int degree;
    Gen last;
  };
  std::vector<Frame> stack;
  const Matrix id = Matrix::identity(pair.a.field(), pair.dim);
  for (Gen g : {Gen::A, Gen::B})
    stack.push_back(Frame{id, Word{}, 0, g == Gen::A ? Gen::B : Gen::A});
  while (!stack.empty()) {
    const Frame fr = std::move(stack.back());
    stack.pop_back();
    const Gen g = fr.last == Gen::A ? Gen::B : Gen::A;
    const auto& pows = g == Gen::A ? pow_a : pow_b;
    for (int e = 1; e + fr.degree <= max_degree; ++e) {
      Frame child;
      child.mat = fr.mat * pows[e - 1];
      ++evals;
      if (!child.mat.all_finite() || child.mat.frobenius() > kOverflowNorm) continue;
      child.word = fr.word;
      child.word.append(g, e);
      child.degree = fr.degree + e;
      child.last = g;
      const double err = (child.mat - target).frobenius();
      if (better(err, child.word, best_err, best_word)) {
        best_err = err;
        best_word = child.word;
      }
      if (child.degree < max_degree) stack.push_back(std::move(child));
    }
  }
}

}  // namespace

ApproxResult beam_search(const Matrix& target, const GeneratorPair& pair, double eps,
                         const SearchBudget& budget) {
  if (target.rows() != pair.dim || target.cols() != pair.dim)
    fail(ErrKind::BadInput, "target dimension does not match the pair");
  if (budget.max_evaluations < 1 || budget.max_word_length < 1 || budget.beam_width < 1)
    fail(ErrKind::BadInput, "budget fields must be positive");

  constexpr int kMaxExp = 4;
  constexpr int kWarmupDegree = 8;
  constexpr double kShellRho = 1e3;
  const double tnorm = target.frobenius();
  const double shell_lo = tnorm / kShellRho, shell_hi = std::max(tnorm, 1.0) * kShellRho;

  const Matrix pow_a[kMaxExp] = {pair.a, numkernel::matpow(pair.a, 2), numkernel::matpow(pair.a, 3),
                                 numkernel::matpow(pair.a, 4)};
  const Matrix pow_b[kMaxExp] = {pair.b, numkernel::matpow(pair.b, 2), numkernel::matpow(pair.b, 3),
                                 numkernel::matpow(pair.b, 4)};

  std::vector<std::vector<BeamState>> layers(budget.max_word_length + 1);
  std::int64_t evals = 0;
  BeamState best;
  best.err = std::numeric_limits<double>::infinity();
  bool done = false;

  // exhaustive short-word sweep first: full witness coverage to the deepest
  // degree whose 2^{D+1} cost fits in a quarter of the budget (capped at 16)
  int probe_degree = 0;
  while (probe_degree < 16 &&
         (std::int64_t(2) << (probe_degree + 1)) <= budget.max_evaluations / 4)
    ++probe_degree;
  probe_degree = std::min(probe_degree, budget.max_word_length);
  if (probe_degree >= 4) {
    witness_probe(target, pair, probe_degree, evals, best.err, best.word);
    if (best.err <= eps) done = true;
  }

  for (int d = 1; d <= budget.max_word_length && !done; ++d) {
    std::vector<BeamState> layer;
    std::unordered_set<std::string> seen;
    for (int e = 1; e <= kMaxExp && !done; ++e) {
      const int src = d - e;
      if (src < 0) break;
      auto extend = [&](const Word& base, const Matrix& basemat, Gen g) {
        if (done || evals >= budget.max_evaluations) {
          done = done || evals >= budget.max_evaluations;
          return;
        }
        BeamState st;
        st.word = base;
        st.word.append(g, e);
        st.mat = basemat * (g == Gen::A ? pow_a[e - 1] : pow_b[e - 1]);
        ++evals;
        if (!st.mat.all_finite() || st.mat.frobenius() > kOverflowNorm) return;
        st.err = (st.mat - target).frobenius();
        if (better(st.err, st.word, best.err, best.word)) best = st;
        if (best.err <= eps) {
          done = true;
          return;
        }
        const double norm = st.mat.frobenius();
        if (d > kWarmupDegree && (norm < shell_lo || norm > shell_hi)) return;
        if (!seen.insert(fingerprint(st.mat)).second) return;
        layer.push_back(std::move(st));
      };
      if (src == 0) {
        extend(Word{}, Matrix::identity(pair.a.field(), pair.dim), Gen::A);
        extend(Word{}, Matrix::identity(pair.a.field(), pair.dim), Gen::B);
      } else {
        for (const BeamState& s : layers[src]) {
          const Gen last = s.word.letters.back().gen;
          extend(s.word, s.mat, last == Gen::A ? Gen::B : Gen::A);
        }
      }
    }
    std::sort(layer.begin(), layer.end(), [](const BeamState& x, const BeamState& y) {
      if (x.err != y.err) return x.err < y.err;
      return x.word < y.word;
    });
    if (static_cast<int>(layer.size()) > budget.beam_width) layer.resize(budget.beam_width);
    layers[d] = std::move(layer);
    if (evals >= budget.max_evaluations) break;
  }

  ApproxResult res;
  if (best.word.empty()) {
    best.word.append(Gen::A, 1);
  }
  res.word = best.word;
  res.achieved_error = (evaluate_word(res.word, pair) - target).frobenius();
  res.target_norm = tnorm;
  res.evaluations = evals;
  res.wall_budget_used =
      std::min(1.0, static_cast<double>(evals) / static_cast<double>(budget.max_evaluations));
  res.budget_exhausted = evals >= budget.max_evaluations && res.achieved_error > eps;
  return res;
}

namespace {

using planner::CombinePlan;
using planner::Operand;
using planner::PlanStep;
using upsilon::BorderedMatrix;
using upsilon::UpsilonPoint;

Word lift_word(const Word& inner, const gen::LetterLift& lift) {
  Word out;
  for (const Letter& l : inner.letters)
    for (long i = 0; i < l.exp; ++i) out.append(l.gen == Gen::A ? lift.a_image : lift.b_image);
  return out;
}

struct Realized {
  Word word;
  Matrix mat;
};

/// Recursive reduction driver; owns the evaluation budget across routes
/// and inner dimensions.
struct Reducer {
  std::int64_t remaining;
  SearchBudget base_budget;

  ApproxResult approx(const Matrix& target, const GeneratorPair& pair, double eps);

 private:
  ApproxResult base_case(const Matrix& target, const GeneratorPair& pair, double eps);
  bool embedded_route(const Matrix& target, const GeneratorPair& pair, double eps,
                      ApproxResult& out);
  bool reduction_route(const Matrix& target, const GeneratorPair& pair, double eps,
                       ApproxResult& out);
  Realized approx_sandwich(const Matrix& s, const GeneratorPair& pair, double eps);
  Realized realize_plan(const CombinePlan& plan, const GeneratorPair& pair, double eps);
  Realized realize_combine_step(const Realized& rp, const Realized& rq, Scalar r, Scalar s,
                                const GeneratorPair& pair, double eps);
  Realized realize_fiber_point(const UpsilonPoint& p, const GeneratorPair& pair, double eps);

  SearchBudget slice(std::int64_t cap) const {
    SearchBudget b = base_budget;
    b.max_evaluations = std::max<std::int64_t>(256, std::min(cap, remaining));
    // a deeper beam pays off once the budget affords many layers at it
    if (b.max_evaluations >= 200000)
      b.beam_width = std::max(b.beam_width, 1024);
    return b;
  }
};

ApproxResult Reducer::base_case(const Matrix& target, const GeneratorPair& pair, double eps) {
  ApproxResult res = beam_search(target, pair, eps, slice(remaining));
  remaining -= res.evaluations;
  if (pair.field == FieldTag::Real && pair.dim == 2 && res.achieved_error > eps) {
    // near-scalar targets: the explicit scalar-word route reaches far
    // deeper than the beam
    const double d = 0.5 * (target.at(0, 0).real() + target.at(1, 1).real());
    const double off = std::abs(target.at(0, 1)) + std::abs(target.at(1, 0)) +
                       std::abs(target.at(0, 0) - d) + std::abs(target.at(1, 1) - d);
    if (d != 0.0 && off < std::max(eps, 1e-3)) {
      try {
        const Word w = planner::scalar_word(d, std::max(1e-9, eps / 2.0));
        const double err = (evaluate_word(w, pair) - target).frobenius();
        if (better(err, w, res.achieved_error, res.word)) {
          res.word = w;
          res.achieved_error = err;
          res.budget_exhausted = err > eps;
        }
      } catch (const Error&) {
        // beam result stands
      }
    }
  }
  return res;
}

bool Reducer::embedded_route(const Matrix& target, const GeneratorPair& pair, double eps,
                             ApproxResult& out) {
  if (!pair.inner || !pair.lift) return false;
  const int n = pair.dim - 1;
  double border = 0.0;
  for (int i = 0; i < n; ++i)
    border += std::norm(target.at(i, n)) + std::norm(target.at(n, i));
  border = std::sqrt(border);
  if (border > 0.5 || std::abs(std::abs(target.at(n, n)) - 1.0) > 0.5) return false;
  try {
    const Matrix conj = pair.lift->conj;
    const Matrix inner_target =
        numkernel::invert(conj) * target.block(0, 0, n, n) * conj;
    const ApproxResult rin = approx(inner_target, *pair.inner, eps / 2.0);
    ApproxResult res;
    res.word = lift_word(rin.word, *pair.lift);
    res.achieved_error = (evaluate_word(res.word, pair) - target).frobenius();
    res.target_norm = target.frobenius();
    res.evaluations = rin.evaluations;
    out = res;
    return true;
  } catch (const Error&) {
    return false;
  }
}

Realized Reducer::approx_sandwich(const Matrix& s, const GeneratorPair& pair, double eps) {
  const int n = pair.dim - 1;
  const Matrix conj = pair.lift->conj;
  const Matrix inner_target = numkernel::invert(conj) * s.block(0, 0, n, n) * conj;
  const ApproxResult rin = approx(inner_target, *pair.inner, eps);
  Realized r;
  r.word = lift_word(rin.word, *pair.lift);
  r.mat = evaluate_word(r.word, pair);
  return r;
}

Realized Reducer::realize_combine_step(const Realized& rp, const Realized& rq, Scalar r, Scalar s,
                                       const GeneratorPair& pair, double eps) {
  const int n = pair.dim - 1;
  // fibers of the constructed factors must match the *achieved* operand
  // points, not the planned ones, or the sandwich solver rejects them
  const UpsilonPoint pa = upsilon::upsilon_of(upsilon::split(rp.mat));
  const UpsilonPoint qa = upsilon::upsilon_of(upsilon::split(rq.mat));
  const auto factors = upsilon::realize_combine(pa, qa, r, s, n, false);

  Realized out;
  const struct {
    const Matrix* factor;
    const Realized* mate;
  } parts[2] = {{&factors.m1, &rp}, {&factors.m2, &rq}};
  for (const auto& part : parts) {
    const auto sw =
        upsilon::same_fiber_factor(upsilon::split(part.mate->mat), upsilon::split(*part.factor));
    const Realized left = approx_sandwich(sw.first, pair, eps);
    const Realized right = approx_sandwich(sw.second, pair, eps);
    out.word.append(left.word);
    out.word.append(part.mate->word);
    out.word.append(right.word);
  }
  out.mat = evaluate_word(out.word, pair);
  return out;
}

Realized Reducer::realize_fiber_point(const UpsilonPoint& p, const GeneratorPair& pair,
                                      double eps) {
  const CombinePlan plan =
      planner::plan_real_plus(p.a.real(), p.eta.real(), 1e-5);
  return realize_plan(plan, pair, eps);
}

Realized Reducer::realize_plan(const CombinePlan& plan, const GeneratorPair& pair, double eps) {
  const Realized seed{[] {
                        Word w;
                        w.append(Gen::A, 1);
                        return w;
                      }(),
                      pair.a};
  const UpsilonPoint seed_actual = upsilon::upsilon_of(upsilon::split(pair.a));
  if (std::abs(seed_actual.a - planner::seed_point().a) > 0.1 ||
      std::abs(seed_actual.eta - planner::seed_point().eta) > 0.1)
    fail(ErrKind::FiberMismatch, "generator A is not on the seed fiber");

  std::vector<Realized> outs;
  auto operand = [&](const Operand& op) -> Realized {
    if (op.is_ref) return outs.at(op.ref);
    if (std::abs(op.value.a - seed_actual.a) > 1e-6 ||
        std::abs(op.value.eta - seed_actual.eta) > 1e-6)
      fail(ErrKind::FiberMismatch, "literal plan operand is not the seed point");
    return seed;
  };

  const int n = pair.dim - 1;
  for (const PlanStep& st : plan.steps) {
    switch (st.kind) {
      case PlanStep::Kind::Combine:
        outs.push_back(realize_combine_step(operand(st.p), operand(st.q), st.r, st.s, pair, eps));
        break;
      case PlanStep::Kind::Surrogate: {
        if (plan.mode == planner::PlanMode::ComplexFull) {
          outs.push_back(realize_combine_step(seed, seed, 0.5 + st.param, 1.0, pair, eps));
        } else {
          const Realized p1 =
              realize_combine_step(seed, seed, -0.5 - st.param, 1.0, pair, eps);
          outs.push_back(realize_combine_step(p1, p1, st.base.eta, 1.0, pair, eps));
        }
        break;
      }
      case PlanStep::Kind::ProductRealize: {
        const auto factors = planner::product_realize_matrices(st, n);
        Realized step_out;
        const Matrix* exact[2] = {&factors.m1, &factors.m2};
        for (const Matrix* f : exact) {
          const UpsilonPoint fp = upsilon::upsilon_of(upsilon::split(*f));
          Realized mate = realize_fiber_point(fp, pair, eps);
          // bridge the residual between the planned fiber and the one
          // the mate actually reached
          const UpsilonPoint actual = upsilon::upsilon_of(upsilon::split(mate.mat));
          const BorderedMatrix bridged = upsilon::fiber_perturb(upsilon::split(*f), actual);
          const auto sw = upsilon::same_fiber_factor(upsilon::split(mate.mat), bridged);
          const Realized left = approx_sandwich(sw.first, pair, eps);
          const Realized right = approx_sandwich(sw.second, pair, eps);
          step_out.word.append(left.word);
          step_out.word.append(mate.word);
          step_out.word.append(right.word);
        }
        step_out.mat = evaluate_word(step_out.word, pair);
        outs.push_back(step_out);
        break;
      }
    }
  }
  if (outs.empty()) fail(ErrKind::BadInput, "empty plan");
  return outs.back();
}

bool Reducer::reduction_route(const Matrix& target, const GeneratorPair& pair, double eps,
                              ApproxResult& out) {
  if (!pair.inner || !pair.lift) return false;
  try {
    BorderedMatrix t = upsilon::split(target);
    numkernel::invert(t.f);  // route needs an invertible core
    UpsilonPoint pt = upsilon::upsilon_of(t);
    if (std::abs(pt.a) < 1e-6) {
      pt.a = pt.a == Scalar(0.0) ? Scalar(1e-3) : pt.a * (1e-3 / std::abs(pt.a));
      t = upsilon::fiber_perturb(t, pt);
    }

    CombinePlan plan;
    if (pair.field == FieldTag::Complex) {
      plan = planner::plan_complex_point(pt.a, pt.eta, 1e-5);
    } else if (numkernel::det(t.f).real() > 0.0) {
      plan = planner::plan_real_plus(pt.a.real(), pt.eta.real(), 1e-5);
    } else {
      plan = planner::plan_real_minus(pt.a.real(), pt.eta.real());
    }

    // sandwiches per combine, two final ones; equal split with a 2x margin
    const double inner_eps = eps / (2.0 * (4.0 * plan.steps.size() + 2.0) * 2.0);
    const Realized body = realize_plan(plan, pair, inner_eps);

    const UpsilonPoint reached = upsilon::upsilon_of(upsilon::split(body.mat));
    const BorderedMatrix bridged = upsilon::fiber_perturb(upsilon::split(target), reached);
    const auto sw = upsilon::same_fiber_factor(upsilon::split(body.mat), bridged);
    const Realized left = approx_sandwich(sw.first, pair, inner_eps);
    const Realized right = approx_sandwich(sw.second, pair, inner_eps);

    ApproxResult res;
    res.word = concat(concat(left.word, body.word), right.word);
    res.achieved_error = (evaluate_word(res.word, pair) - target).frobenius();
    res.target_norm = target.frobenius();
    out = res;
    return true;
  } catch (const Error&) {
    return false;
  }
}

ApproxResult Reducer::approx(const Matrix& target, const GeneratorPair& pair, double eps) {
  if (target.rows() != pair.dim || target.cols() != pair.dim)
    fail(ErrKind::BadInput, "target dimension does not match the pair");
  if (target.field() == FieldTag::Complex && pair.field == FieldTag::Real)
    fail(ErrKind::FieldMismatch, "complex target over a real pair");
  if (pair.field == FieldTag::Real && pair.dim == 2 &&
      pair.scope == gen::DensityScope::PositiveDeterminant &&
      numkernel::det(target).real() < 0.0)
    fail(ErrKind::BadInput,
         "2x2 real targets must have positive determinant: the base pair is dense "
         "only in that component");

  if (pair.dim <= 2) return base_case(target, pair, eps);

  // hold back part of the budget so the structural routes below can still
  // run their own inner searches if the direct beam misses
  const std::int64_t held_back = remaining / 2;
  remaining -= held_back;
  ApproxResult best = base_case(target, pair, eps);
  remaining += held_back;
  if (best.achieved_error <= eps) return best;

  ApproxResult cand;
  if (embedded_route(target, pair, eps, cand) &&
      better(cand.achieved_error, cand.word, best.achieved_error, best.word))
    best = cand;
  if (best.achieved_error <= eps) {
    best.budget_exhausted = false;
    return best;
  }
  if (reduction_route(target, pair, eps, cand) &&
      better(cand.achieved_error, cand.word, best.achieved_error, best.word))
    best = cand;
  best.budget_exhausted = best.achieved_error > eps;
  return best;
}

}  // namespace

ApproxResult approx_matrix(const Matrix& target, const GeneratorPair& pair, double eps,
                           const SearchBudget& budget) {
  Reducer red{budget.max_evaluations, budget};
  ApproxResult res = red.approx(target, pair, eps);
  res.wall_budget_used =
      std::min(1.0, 1.0 - static_cast<double>(red.remaining) /
                              static_cast<double>(std::max<std::int64_t>(1, budget.max_evaluations)));
  res.target_norm = target.frobenius();
  return res;
}

}  // namespace densegen::synthesis
