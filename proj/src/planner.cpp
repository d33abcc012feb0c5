#include "densegen/planner.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "densegen/errors.hpp"
#include "densegen/generators.hpp"
#include "densegen/synthesis.hpp"

namespace densegen::planner {

namespace {

constexpr double kHalfSqrt2 = 0.70710678118654752440;

double dist(const UpsilonPoint& p, const UpsilonPoint& q) {
  return std::hypot(std::abs(p.a - q.a), std::abs(p.eta - q.eta));
}

bool is_real_mode(PlanMode m) { return m != PlanMode::ComplexFull; }

UpsilonPoint surrogate_value(PlanMode mode, const UpsilonPoint& base, double t) {
  const UpsilonPoint seed = seed_point();
  if (!is_real_mode(mode)) {
    // (0,1) as the z -> 1/2 limit of combining the seed with itself
    return upsilon::combine_points(seed, seed, 0.5 + t);
  }
  // (0,w), w > 0: squeeze z toward -a^2 from below, then square at z = w
  const UpsilonPoint p1 = upsilon::combine_points(seed, seed, -0.5 - t, true);
  return upsilon::combine_points(p1, p1, base.eta, true);
}

UpsilonPoint resolve(const Operand& op, const std::vector<UpsilonPoint>& outs) {
  if (!op.is_ref) return op.value;
  if (op.ref < 0 || op.ref >= static_cast<int>(outs.size()))
    fail(ErrKind::BadInput, "plan step references a later or missing step");
  return outs[op.ref];
}

PlanStep combine_step(Operand p, Operand q, Scalar z, bool real) {
  PlanStep st;
  st.kind = PlanStep::Kind::Combine;
  st.p = p;
  st.q = q;
  if (real) {
    st.r = z;
    st.s = 1.0;
  } else {
    st.r = std::sqrt(z);
    st.s = st.r;
  }
  return st;
}

PlanStep surrogate_step(UpsilonPoint base, double t) {
  PlanStep st;
  st.kind = PlanStep::Kind::Surrogate;
  st.base = base;
  st.param = t;
  return st;
}

}  // namespace

const char* to_string(PlanMode m) {
  switch (m) {
    case PlanMode::ComplexFull: return "complex";
    case PlanMode::RealPlus: return "real+";
    case PlanMode::RealMinus: return "real-";
  }
  return "?";
}

UpsilonPoint seed_point() { return UpsilonPoint{kHalfSqrt2, -kHalfSqrt2}; }

std::vector<UpsilonPoint> evaluate_plan_steps(const CombinePlan& plan, bool exact_surrogates) {
  std::vector<UpsilonPoint> outs;
  outs.reserve(plan.steps.size());
  const bool positive = plan.mode == PlanMode::RealPlus;
  for (const PlanStep& st : plan.steps) {
    switch (st.kind) {
      case PlanStep::Kind::Combine: {
        const UpsilonPoint p = resolve(st.p, outs);
        const UpsilonPoint q = resolve(st.q, outs);
        try {
          outs.push_back(upsilon::combine_points(p, q, st.r * st.s, positive));
        } catch (const Error& e) {
          if (e.kind() == ErrKind::PositivityViolated)
            fail(ErrKind::GuardViolation, std::string("combine guard breached: ") + e.what());
          throw;
        }
        break;
      }
      case PlanStep::Kind::Surrogate:
        outs.push_back(exact_surrogates ? st.base
                                        : surrogate_value(plan.mode, st.base, st.param));
        break;
      case PlanStep::Kind::ProductRealize: {
        const auto real = product_realize_matrices(st, 2);
        outs.push_back(upsilon::upsilon_of(upsilon::split(real.product)));
        break;
      }
    }
  }
  if (outs.empty()) fail(ErrKind::BadInput, "empty plan");
  return outs;
}

UpsilonPoint evaluate_plan(const CombinePlan& plan, bool exact_surrogates) {
  return evaluate_plan_steps(plan, exact_surrogates).back();
}

std::pair<Scalar, Scalar> complex_stage_params(Scalar u, Scalar v) {
  const Scalar du = u - v + 1.0;
  if (std::abs(du) < 1e-12) fail(ErrKind::DegenerateTarget, "u - v + 1 vanishes");
  const Scalar y = ((v - 1.0) * (v - 1.0) - u * v) / (std::sqrt(2.0) * du);
  const Scalar z = v + std::sqrt(2.0) * y / 2.0 - 0.5;
  return {y, z};
}

upsilon::CombineRealization product_realize_matrices(const PlanStep& step, int n) {
  if (step.kind != PlanStep::Kind::ProductRealize)
    fail(ErrKind::BadInput, "not a ProductRealize step");
  if (n < 1) fail(ErrKind::BadInput, "core dimension must be positive");
  if (std::abs(step.c) < 1e-300) fail(ErrKind::BadInput, "c must be nonzero");
  upsilon::CombineRealization out;
  out.m1 = Matrix::identity(FieldTag::Real, n + 1);
  out.m1.at(0, n) = 1.0;
  out.m1.at(n, 0) = (step.v - 1.0) / step.c;
  out.m2 = Matrix::identity(FieldTag::Real, n + 1);
  out.m2.at(0, n) = step.c;
  out.m2.at(n, 0) = step.d;
  out.product = out.m1 * out.m2;
  return out;
}

namespace {

struct ComplexMargins {
  Scalar y, z;
  bool ok = false;
};

ComplexMargins complex_margins(Scalar u, Scalar v) {
  ComplexMargins m;
  const Scalar du = u - v + 1.0;
  if (std::abs(du) < 1e-8) return m;
  m.y = ((v - 1.0) * (v - 1.0) - u * v) / (std::sqrt(2.0) * du);
  m.z = v + std::sqrt(2.0) * m.y / 2.0 - 0.5;
  if (std::abs(m.y) < 1e-6) return m;
  if (std::abs(m.z) < 1e-6) return m;
  // stage-3 pole: z + (sqrt2/2)(y + sqrt2/2) = v + sqrt2 y
  if (std::abs(v + std::sqrt(2.0) * m.y) < 1e-6) return m;
  m.ok = true;
  return m;
}

CombinePlan complex_plan_at(Scalar u, Scalar v, double t, Scalar y, Scalar z) {
  CombinePlan plan;
  plan.mode = PlanMode::ComplexFull;
  plan.target = UpsilonPoint{u, v};
  plan.steps.push_back(surrogate_step(UpsilonPoint{0.0, 1.0}, t));
  plan.steps.push_back(combine_step(Operand::prev(0), Operand::point(seed_point()), y, false));
  plan.steps.push_back(combine_step(Operand::point(seed_point()), Operand::prev(1), z, false));
  return plan;
}

/// Newton refinement of (y, z) against the finite-t chain; the map is
/// rational, so one-sided complex differences give the Jacobian.
void refine_complex_plan(CombinePlan& plan, Scalar u, Scalar v, double t) {
  Scalar y = plan.steps[1].r * plan.steps[1].s;
  Scalar z = plan.steps[2].r * plan.steps[2].s;
  auto residual = [&](Scalar yy, Scalar zz) -> std::pair<Scalar, Scalar> {
    const CombinePlan p = complex_plan_at(u, v, t, yy, zz);
    const UpsilonPoint e = evaluate_plan(p);
    return {e.a - u, e.eta - v};
  };
  try {
    for (int it = 0; it < 8; ++it) {
      const auto [f1, f2] = residual(y, z);
      if (std::abs(f1) + std::abs(f2) < 1e-13) break;
      const double hy = 1e-7 * (1.0 + std::abs(y));
      const double hz = 1e-7 * (1.0 + std::abs(z));
      const auto [g1, g2] = residual(y + hy, z);
      const auto [h1, h2] = residual(y, z + hz);
      const Scalar j11 = (g1 - f1) / hy, j12 = (h1 - f1) / hz;
      const Scalar j21 = (g2 - f2) / hy, j22 = (h2 - f2) / hz;
      const Scalar det = j11 * j22 - j12 * j21;
      if (std::abs(det) < 1e-14) return;
      const Scalar dy = (f1 * j22 - f2 * j12) / det;
      const Scalar dz = (j11 * f2 - j21 * f1) / det;
      if (!std::isfinite(std::abs(dy)) || !std::isfinite(std::abs(dz))) return;
      y -= dy;
      z -= dz;
    }
    const CombinePlan cand = complex_plan_at(u, v, t, y, z);
    if (dist(evaluate_plan(cand), plan.target) < dist(evaluate_plan(plan), plan.target))
      plan.steps = cand.steps;
  } catch (const Error&) {
    // keep the closed-form parameters
  }
}

}  // namespace

CombinePlan plan_complex_point(Scalar u, Scalar v, double t, bool allow_perturb) {
  if (!(t > 0.0 && t <= 0.1)) fail(ErrKind::BadInput, "surrogate parameter t must be in (0, 0.1]");
  if (std::abs(u) < 1e-12 && std::abs(v - 1.0) < 1e-12) {
    CombinePlan plan;
    plan.mode = PlanMode::ComplexFull;
    plan.target = UpsilonPoint{0.0, 1.0};
    plan.steps.push_back(surrogate_step(UpsilonPoint{0.0, 1.0}, t));
    plan.predicted_error = dist(evaluate_plan(plan), plan.target);
    return plan;
  }

  double nudge = 0.0;
  Scalar uu = u;
  ComplexMargins m = complex_margins(uu, v);
  if (!m.ok) {
    if (!allow_perturb) fail(ErrKind::DegenerateTarget, "u - v + 1 or a stage margin vanishes");
    for (int k = 1; k <= 64 && !m.ok; ++k) {
      nudge = k * 1e-6;
      uu = u + nudge;
      m = complex_margins(uu, v);
    }
    if (!m.ok)
      fail(ErrKind::DegenerateTarget, "could not perturb the target clear of stage degeneracies");
  }

  CombinePlan plan = complex_plan_at(uu, v, t, m.y, m.z);
  plan.target = UpsilonPoint{u, v};
  refine_complex_plan(plan, uu, v, t);
  plan.predicted_error = dist(evaluate_plan(plan), plan.target) + nudge;
  return plan;
}

CombinePlan plan_real_plus(double u, double v, double t) {
  if (!(t > 0.0 && t <= 0.1)) fail(ErrKind::BadInput, "surrogate parameter t must be in (0, 0.1]");
  CombinePlan plan;
  plan.mode = PlanMode::RealPlus;
  plan.target = UpsilonPoint{u, v};

  if (v - u > 1e-4) {
    // v > u: climb to (0,w), square twice to land near (b, b + w^4),
    // then shift left with the (0,1) surrogate.
    const double b = u >= 0.0 ? u + 1.0 : 1.0;
    const double w = std::pow(v - u, 0.25);
    plan.steps.push_back(surrogate_step(UpsilonPoint{0.0, 1.0}, t));
    plan.steps.push_back(surrogate_step(UpsilonPoint{0.0, w}, t));
    plan.steps.push_back(combine_step(Operand::prev(1), Operand::prev(1), -t, true));
    plan.steps.push_back(combine_step(Operand::prev(2), Operand::prev(2), b, true));
    plan.steps.push_back(combine_step(Operand::prev(0), Operand::prev(3), u - b, true));
  } else {
    // v <= u: one seed combine against a (0, w) surrogate covers the
    // closed lower half-plane
    const double w = std::max((u - v) / std::sqrt(2.0), 10.0 * t);
    double z = (u + v) / 2.0;
    if (std::abs(z) < 10.0 * t) z = z >= 0.0 ? 10.0 * t : -10.0 * t;
    plan.steps.push_back(surrogate_step(UpsilonPoint{0.0, w}, t));
    plan.steps.push_back(combine_step(Operand::prev(0), Operand::point(seed_point()), z, true));
  }
  plan.predicted_error = dist(evaluate_plan(plan), plan.target);
  return plan;
}

CombinePlan plan_real_minus(double u, double v) {
  if (std::abs(u - 1.0) < 1e-8 || std::abs(v - 1.0) < 1e-8)
    fail(ErrKind::DegenerateTarget, "real-minus targets need u != 1 and v != 1");
  double best_miss = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 40; ++k) {
    for (const double sign : {1.0, -1.0}) {
      const double c = sign * std::ldexp(1.0, -k);
      if (std::abs(c + 1.0 - u) < 1e-8) continue;
      const double d = (c * (u - v + 1.0) + 1.0 - v) / (c * (c + 1.0 - u));
      if (!(d < -1.0 - 1e-12)) {
        best_miss = std::min(best_miss, d + 1.0);
        continue;
      }
      PlanStep st;
      st.kind = PlanStep::Kind::ProductRealize;
      st.c = c;
      st.d = d;
      st.v = v;
      const auto real = product_realize_matrices(st, 2);
      const UpsilonPoint got = upsilon::upsilon_of(upsilon::split(real.product));
      const UpsilonPoint target{u, v};
      const double err = dist(got, target);
      if (err > 1e-9 * (1.0 + std::abs(u) + std::abs(v))) continue;
      CombinePlan plan;
      plan.mode = PlanMode::RealMinus;
      plan.target = target;
      plan.steps.push_back(st);
      plan.predicted_error = err;
      return plan;
    }
  }
  std::ostringstream os;
  os << "no c = +-2^{-k}, k <= 40, gives d < -1 (nearest miss d+1 = " << best_miss << ")";
  fail(ErrKind::NoAdmissibleC, os.str());
}

namespace {

struct Convergent {
  long long p = 0, q = 1;
  bool exact = false;  // continued fraction terminated here
};

std::vector<Convergent> convergents(double theta, long long qmax) {
  std::vector<Convergent> out;
  long long h2 = 1, h1 = 0, k2 = 0, k1 = 1;  // p_{-2..-1}, q_{-2..-1}
  double x = theta;
  for (int i = 0; i < 64; ++i) {
    const double fa = std::floor(x);
    if (fa > 9e17 || fa < -9e17) break;
    const long long a = static_cast<long long>(fa);
    if (k1 != 0 && std::abs(a) > (9'000'000'000'000'000'000LL / std::max(1LL, k1)) - 2) break;
    const long long h = a * h1 + h2;
    const long long q = a * k1 + k2;
    const double frac = x - fa;
    Convergent c{h, q, frac < 1e-15};
    out.push_back(c);
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = q;
    if (c.exact || q > qmax) break;
    x = 1.0 / frac;
  }
  return out;
}

void check_irrational(double theta) {
  if (!std::isfinite(theta)) fail(ErrKind::BadInput, "theta must be finite");
  for (const Convergent& c : convergents(theta, 10'000)) {
    if (c.q > 10'000) break;
    if (c.exact)
      fail(ErrKind::BadInput, "theta is rational in working precision (denominator <= 1e4)");
    if (c.q >= 3) {
      const double gap = std::abs(theta - static_cast<double>(c.p) / static_cast<double>(c.q));
      const double qd = static_cast<double>(c.q);
      if (gap <= 1.0 / (qd * qd * qd))
        fail(ErrKind::BadInput, "theta fails the cubic irrationality margin");
    }
  }
}

bool try_residual(double theta, double rho, double eps, long long m, IntegerApprox& out) {
  const double e = rho - static_cast<double>(m) * theta;
  if (std::abs(e) > 9e17) return false;
  const double n = std::nearbyint(e);
  const double err = std::abs(e - n);
  if (err < out.err) {
    out.m = m;
    out.n = static_cast<long long>(n);
    out.err = err;
  }
  return err < eps;
}

}  // namespace

IntegerApprox kronecker_approx(double theta, double rho, double eps) {
  if (!(eps > 1e-12)) fail(ErrKind::BadInput, "eps must exceed 1e-12");
  check_irrational(theta);
  IntegerApprox best;
  best.err = std::numeric_limits<double>::infinity();

  // smallest |m| first: exact representations come out exactly
  for (long long k = 0; k <= 4096; ++k)
    for (const long long m : {k, -k}) {
      if (try_residual(theta, rho, eps, m, best)) return best;
      if (k == 0) break;
    }

  // convergent step: q*theta - p is tiny, so s copies sweep the circle
  // in steps small enough to land within eps of rho mod 1
  if (eps >= 1e-7) {
    for (const Convergent& c : convergents(theta, 10'000'000)) {
      if (c.q <= 0 || c.q > 10'000'000) continue;
      const double delta = static_cast<double>(c.q) * theta - static_cast<double>(c.p);
      if (std::abs(delta) < 1e-15 || std::abs(delta) >= eps / 2.0) continue;
      const long long smax = static_cast<long long>(1.0 / std::abs(delta)) + 2;
      for (long long j = 0; j <= smax; ++j)
        for (const long long s : {j, -j}) {
          const double es = rho - static_cast<double>(s) * delta;
          const double n0 = std::nearbyint(es);
          const double err = std::abs(es - n0);
          if (err < eps) {
            IntegerApprox res;
            res.m = s * c.q;
            res.n = static_cast<long long>(n0) - s * c.p;
            res.err = std::abs(rho - static_cast<double>(res.m) * theta -
                               static_cast<double>(res.n));
            if (res.err < eps) return res;
          }
          if (j == 0) break;
        }
      break;  // one suitable convergent suffices
    }
  }

  for (long long k = 4097; k <= 1'000'000; ++k)
    for (const long long m : {k, -k})
      if (try_residual(theta, rho, eps, m, best)) return best;

  std::ostringstream os;
  os << "no |m| <= 1e6 meets eps = " << eps << " (best " << best.err << ")";
  fail(ErrKind::NotFoundWithinBound, os.str());
}

IntegerApprox positive_coeff_approx(double alpha, double beta, double gamma, double eps,
                                    long long min_l) {
  if (!(alpha > 0.0) || !(beta < 0.0)) fail(ErrKind::BadInput, "need alpha > 0 and beta < 0");
  if (!(eps > 1e-12)) fail(ErrKind::BadInput, "eps must exceed 1e-12");
  if (min_l < 1) min_l = 1;
  IntegerApprox best;
  best.err = std::numeric_limits<double>::infinity();
  const long long lmax = min_l + 2'000'000;
  for (long long l = min_l; l <= lmax; ++l) {
    const double x = (gamma - static_cast<double>(l) * beta) / alpha;
    const long long k = std::max(1LL, static_cast<long long>(std::nearbyint(x)));
    const double err = std::abs(static_cast<double>(k) * alpha + static_cast<double>(l) * beta -
                                gamma);
    if (err < best.err) {
      best.m = k;
      best.n = l;
      best.err = err;
    }
    if (err < eps) return best;
  }
  std::ostringstream os;
  os << "no k >= 1, l in [" << min_l << ", " << lmax << "] meets eps = " << eps << " (best "
     << best.err << ")";
  fail(ErrKind::NotFoundWithinBound, os.str());
}

namespace {

Word scalar_block_word() {
  // A B A^3 B A, the diag(4/9, 1) word of the 2x2 real base pair
  Word c;
  c.append(Gen::A, 1);
  c.append(Gen::B, 1);
  c.append(Gen::A, 3);
  c.append(Gen::B, 1);
  c.append(Gen::A, 1);
  return c;
}

}  // namespace

Word scalar_word(double d, double eps) {
  if (d == 0.0 || !std::isfinite(d)) fail(ErrKind::BadInput, "d must be finite and nonzero");
  if (!(eps > 1e-10)) fail(ErrKind::BadInput, "eps must exceed 1e-10");

  static const gen::GeneratorPair pair = gen::build_real_pair(2);
  const Matrix target = Matrix::diag(FieldTag::Real, {d, d});

  const double b = 8.0 / 3.0;
  const double c = 4.0 / 9.0;
  const double e = -std::pow(2.0, -0.8);
  const double alpha = std::log(b);
  const double beta = std::log(c);
  const double log_e = std::log(-e);

  // One block (C^l A B^k)^2 with C = A B A^3 B A evaluates to y*I plus a
  // corner term of size ~c^l, where y = e * b^k * c^l exactly.  A product of
  // m such blocks realizes sign (-1)^m times exp(K*alpha + L*beta + m*log_e)
  // for K = sum k_i, L = sum l_i.  Sequential floating-point evaluation of a
  // block leaves ~1e-15 noise that B^k amplifies by b^k, so each k_i must
  // stay modest; the three-variable lattice (K, L, m) still leaves enough
  // freedom to hit any d closely with small exponents.
  struct Candidate {
    double predicted;
    int m;
    long long kk, ll;
  };
  std::vector<Candidate> candidates;
  const int sign_parity = d < 0.0 ? 1 : 0;
  const long long min_l_per_block = 9;   // keeps the corner term ~1e-3
  const long long max_k_per_block = 28;  // keeps b^k noise amplification ~1e-3
  for (int m = 1; m <= 6; ++m) {
    if (m % 2 != sign_parity) continue;
    const double shifted = std::log(std::abs(d)) - m * log_e;
    for (long long kk = 0; kk <= max_k_per_block * m; ++kk) {
      const double lf = (kk * alpha - shifted) / (-beta);
      for (long long ll : {static_cast<long long>(std::floor(lf)),
                           static_cast<long long>(std::ceil(lf))}) {
        if (ll < min_l_per_block * m) continue;
        const double r = kk * alpha + ll * beta - shifted;
        const double lattice_err = std::abs(d) * std::abs(std::expm1(r));
        const double block_err =
            std::abs(d) * m * (2.0 * std::pow(c, 9.0) + 1e-15 * std::pow(b, 14.0));
        candidates.push_back({lattice_err + block_err, m, kk, ll});
      }
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.predicted != y.predicted) return x.predicted < y.predicted;
              if (x.m != y.m) return x.m < y.m;
              if (x.kk != y.kk) return x.kk < y.kk;
              return x.ll < y.ll;
            });

  const Word block = scalar_block_word();
  int tried = 0;
  for (const Candidate& cand : candidates) {
    if (cand.predicted > eps && tried > 0) break;
    if (++tried > 64) break;
    // Split K and L across the m blocks: spread k evenly, then pick each l so
    // the block scalar y_i stays near unit size; the last block absorbs the
    // remainder of L.
    std::vector<long long> ks(cand.m, cand.kk / cand.m);
    for (long long i = 0; i < cand.kk % cand.m; ++i) ks[static_cast<size_t>(i)] += 1;
    std::vector<long long> ls;
    long long used = 0;
    bool feasible = true;
    for (int i = 0; i + 1 < cand.m; ++i) {
      long long li = std::llround((ks[static_cast<size_t>(i)] * alpha + log_e) / (-beta));
      li = std::max(li, min_l_per_block);
      ls.push_back(li);
      used += li;
    }
    const long long last = cand.ll - used;
    if (last < min_l_per_block) feasible = false;
    ls.push_back(last);
    for (long long k : ks)
      if (k < 0 || k > max_k_per_block + 4) feasible = false;
    if (!feasible) continue;

    Word w;
    for (int i = 0; i < cand.m; ++i) {
      Word half;
      for (long long j = 0; j < ls[static_cast<size_t>(i)]; ++j) half.append(block);
      half.append(Gen::A, 1);
      if (ks[static_cast<size_t>(i)] > 0) half.append(Gen::B, ks[static_cast<size_t>(i)]);
      w.append(half);
      w.append(half);
    }
    if ((synthesis::evaluate_word(w, pair) - target).frobenius() < eps) return w;
  }
  fail(ErrKind::NotFoundWithinBound, "no block combination met the matrix tolerance");
}

}  // namespace densegen::planner
