#include "densegen/upsilon.hpp"

#include <cmath>
#include <vector>

#include "densegen/dualbasis.hpp"
#include "densegen/rng.hpp"

namespace densegen::upsilon {
namespace {

Matrix invert_core(const Matrix& f) {
  try {
    return numkernel::invert(f);
  } catch (const Error& e) {
    if (e.kind() == ErrKind::SingularMatrix) fail(ErrKind::SingularF, "core block F is singular");
    throw;
  }
}

Scalar quad_pairing(const Matrix& u, const Matrix& finv, const Matrix& v) {
  return numkernel::pairing(u, finv * v);
}

bool effectively_real(std::initializer_list<Scalar> vals) {
  for (const Scalar& v : vals)
    if (std::abs(v.imag()) > 1e-14 * (1.0 + std::abs(v))) return false;
  return true;
}

}  // namespace

const char* to_string(BorderClass c) {
  switch (c) {
    case BorderClass::I_n: return "I_n";
    case BorderClass::I_n_plus: return "I_n_plus";
    case BorderClass::I_n_minus: return "I_n_minus";
    case BorderClass::S_n: return "S_n";
    case BorderClass::S_n_plus: return "S_n_plus";
    case BorderClass::S_n_minus: return "S_n_minus";
    case BorderClass::BarOnly: return "BarOnly";
    case BorderClass::None: return "None";
  }
  return "None";
}

BorderedMatrix split(const Matrix& g) {
  if (!g.square() || g.rows() < 2) fail(ErrKind::DimensionTooSmall, "split needs dimension >= 2");
  const int n = g.rows() - 1;
  BorderedMatrix b;
  b.f = g.block(0, 0, n, n);
  b.x = g.block(0, n, n, 1);
  b.y = g.block(n, 0, 1, n).transpose();
  b.eta = g.at(n, n);
  return b;
}

Matrix join(const BorderedMatrix& b) {
  const int n = b.core_dim();
  Matrix g(b.field(), n + 1, n + 1);
  g.set_block(0, 0, b.f);
  g.set_block(0, n, b.x);
  g.set_block(n, 0, b.y.transpose());
  g.at(n, n) = b.eta;
  return g;
}

UpsilonPoint upsilon_of(const BorderedMatrix& b) {
  Matrix finv = invert_core(b.f);
  return UpsilonPoint{quad_pairing(b.y, finv, b.x), b.eta};
}

BorderClass classify(const BorderedMatrix& b, double tol) {
  const Scalar detf = numkernel::det(b.f);
  const bool invertible = std::abs(detf) > tol;
  const bool real = b.field() == FieldTag::Real;
  const bool border_zero = b.x.frobenius() <= tol && b.y.frobenius() <= tol;

  if (border_zero && std::abs(b.eta - Scalar(1.0)) <= tol && invertible) {
    if (!real) return BorderClass::S_n;
    return detf.real() > 0.0 ? BorderClass::S_n_plus : BorderClass::S_n_minus;
  }
  if (!invertible) return BorderClass::None;
  Matrix finv = numkernel::invert(b.f);
  const Scalar pairing = quad_pairing(b.y, finv, b.x);
  if (std::abs(pairing) > tol) {
    if (!real) return BorderClass::I_n;
    return detf.real() > 0.0 ? BorderClass::I_n_plus : BorderClass::I_n_minus;
  }
  return BorderClass::BarOnly;
}

std::pair<Matrix, Matrix> same_fiber_factor(const BorderedMatrix& g1, const BorderedMatrix& g2,
                                            bool positive) {
  const BorderClass c1 = classify(g1);
  const BorderClass c2 = classify(g2);
  if (!is_I(c1) || !is_I(c2)) fail(ErrKind::BadInput, "both matrices must classify as I_n");
  if (positive && c1 != c2)
    fail(ErrKind::BadInput, "positive mode needs matching signed classes");

  const UpsilonPoint u1 = upsilon_of(g1);
  const UpsilonPoint u2 = upsilon_of(g2);
  const double scale = std::max({std::abs(u1.a), std::abs(u1.eta), 1.0});
  if (std::abs(u1.a - u2.a) > 1e-9 * scale || std::abs(u1.eta - u2.eta) > 1e-9 * scale)
    fail(ErrKind::FiberMismatch, "Upsilon points disagree");

  Matrix f1inv = invert_core(g1.f);
  Matrix f2inv = invert_core(g2.f);

  dualbasis::DualSpec spec;
  spec.p0 = f1inv * g1.x;
  spec.q0 = g1.y;
  spec.p = f2inv * g2.x;
  spec.q = g2.y;
  spec.field = g1.field();
  spec.want_positive_det = positive;
  Matrix r = dualbasis::solve_dual(spec);

  const int n = g1.core_dim();
  Matrix s_left = Matrix::identity(g1.field(), n + 1);
  s_left.set_block(0, 0, g2.f * numkernel::invert(r) * f1inv);
  Matrix s_right = Matrix::identity(g1.field(), n + 1);
  s_right.set_block(0, 0, r);
  return {s_left, s_right};
}

UpsilonPoint combine_points(const UpsilonPoint& p, const UpsilonPoint& q, Scalar z,
                            bool real_positive) {
  const Scalar a = p.a, eps = p.eta, b = q.a, delta = q.eta;
  const Scalar ab = a * b;
  if (std::abs(z) <= 1e-12) fail(ErrKind::PoleAtZ, "z too close to 0");
  const double guard = 1e-9 * (1.0 + std::abs(ab));
  if (std::abs(z + ab) <= guard) fail(ErrKind::PoleAtZ, "z too close to -ab");
  if (real_positive) {
    if (!effectively_real({a, eps, b, delta, z}))
      fail(ErrKind::BadInput, "real-positive mode needs real inputs");
    const double g = 1.0 + (ab / z).real();
    if (g <= 0.0) fail(ErrKind::PositivityViolated, "1 + ab/z must be positive");
  }
  return UpsilonPoint{(z + a * delta) * (z + b * eps) / (z + ab), z + eps * delta};
}

CombineRealization realize_combine(const UpsilonPoint& p, const UpsilonPoint& q, Scalar r, Scalar s,
                                   int n, bool real_positive) {
  if (std::abs(r) == 0.0 || std::abs(s) == 0.0) fail(ErrKind::PoleAtZ, "r and s must be nonzero");
  combine_points(p, q, r * s, real_positive);  // validates z = rs

  const FieldTag field =
      effectively_real({p.a, p.eta, q.a, q.eta, r, s}) ? FieldTag::Real : FieldTag::Complex;
  CombineRealization out;
  out.m1 = Matrix::identity(field, n + 1);
  out.m1.at(0, n) = p.a / r;
  out.m1.at(n, 0) = r;
  out.m1.at(n, n) = p.eta;
  out.m2 = Matrix::identity(field, n + 1);
  out.m2.at(0, n) = s;
  out.m2.at(n, 0) = q.a / s;
  out.m2.at(n, n) = q.eta;
  out.product = out.m1 * out.m2;
  return out;
}

BorderedMatrix fiber_perturb(const BorderedMatrix& b, const UpsilonPoint& target) {
  Matrix finv = invert_core(b.f);
  const Scalar a0 = quad_pairing(b.y, finv, b.x);
  const int n = b.core_dim();
  const bool real = b.field() == FieldTag::Real;

  if (std::abs(target.a - a0) <= 1e-14 * (1.0 + std::abs(a0))) {
    BorderedMatrix out = b;
    out.eta = target.eta;
    return out;
  }

  // Candidate W vectors: canonical basis first, then seeded random units.
  std::vector<Matrix> candidates;
  for (int i = 0; i < n; ++i) {
    Matrix w = Matrix::zeros(b.field(), n, 1);
    w.at(i, 0) = 1.0;
    candidates.push_back(w);
  }
  SplitMix64 rng(0x57A7ED5EEDULL);
  for (int i = 0; i < 16; ++i) {
    Matrix w = numkernel::random_vector(b.field(), n, rng);
    candidates.push_back(w * Scalar(1.0 / w.frobenius()));
  }

  bool found = false;
  Scalar best_t = 0.0;
  int best_sign = 1;
  Matrix best_w = candidates.front();

  for (const Matrix& w : candidates) {
    const Scalar c2 = quad_pairing(w, finv, w);
    if (std::abs(c2) <= 1e-6) continue;
    const Scalar yw = quad_pairing(b.y, finv, w);
    const Scalar wx = quad_pairing(w, finv, b.x);
    for (int sign : {+1, -1}) {
      // g(t) = a0 + t*(sign*yw + wx) + sign*t^2*c2 = target.a
      const Scalar qa = Scalar(sign) * c2;
      const Scalar qb = Scalar(sign) * yw + wx;
      const Scalar qc = a0 - target.a;
      const Scalar disc = qb * qb - Scalar(4.0) * qa * qc;
      if (real && disc.real() < 0.0) continue;
      const Scalar sq = std::sqrt(disc);
      for (const Scalar& root : {(-qb + sq) / (Scalar(2.0) * qa), (-qb - sq) / (Scalar(2.0) * qa)}) {
        if (!std::isfinite(root.real()) || !std::isfinite(root.imag())) continue;
        if (!found || std::abs(root) < std::abs(best_t)) {
          found = true;
          best_t = root;
          best_sign = sign;
          best_w = w;
        }
      }
    }
    if (found) break;  // W candidates are fallbacks, not a global search
  }
  if (!found)
    fail(real ? ErrKind::NoRealRoot : ErrKind::SingularF,
         "no admissible perturbation direction found");

  BorderedMatrix out = b;
  out.x = b.x + best_w * (Scalar(best_sign) * best_t);
  out.y = b.y + best_w * best_t;
  out.eta = target.eta;
  return out;
}

}  // namespace densegen::upsilon
