#pragma once

// Solid torus T = {(rho' - sqrt(x^2+y^2))^2 + z^2 <= rho^2}, its rational
// linear images A T, and the elliptic-section variant T_Q, together with
// exact membership predicates for scaled lattice points.

#include "rational.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace torus {

class TorusParams {
 public:
  /// Exact parameters with rational radii.
  static TorusParams exact(const Rational& rho, const Rational& rho_prime) {
    if (rho <= 0 || rho_prime <= 0) throw std::invalid_argument("invalid torus: radii must be positive");
    TorusParams p(to_double(rho), to_double(rho_prime));
    p.rho_exact_ = rho;
    p.rho_prime_exact_ = rho_prime;
    p.rho_sq_ = rho * rho;
    p.rho_prime_sq_ = rho_prime * rho_prime;
    p.validate();
    return p;
  }

  /// Exact mode only needs the squared radii to be rational.
  static TorusParams from_squares(const Rational& rho_sq, const Rational& rho_prime_sq) {
    if (rho_sq <= 0 || rho_prime_sq <= 0)
      throw std::invalid_argument("torus radii must be positive");
    TorusParams p(std::sqrt(to_double(rho_sq)), std::sqrt(to_double(rho_prime_sq)));
    p.rho_sq_ = rho_sq;
    p.rho_prime_sq_ = rho_prime_sq;
    p.validate();
    return p;
  }

  /// Float-only parameters; exact predicates reject these.
  static TorusParams approximate(double rho, double rho_prime) {
    TorusParams p(rho, rho_prime);
    p.validate();
    return p;
  }

  double rho() const { return rho_; }
  double rho_prime() const { return rho_prime_; }
  bool exact_mode() const { return rho_sq_.has_value(); }
  bool rational_radii() const { return rho_exact_.has_value(); }

  const Rational& rho_sq() const { return require(rho_sq_); }
  const Rational& rho_prime_sq() const { return require(rho_prime_sq_); }
  const Rational& rho_exact() const { return require(rho_exact_, "rational rho"); }
  const Rational& rho_prime_exact() const { return require(rho_prime_exact_, "rational rho'"); }

  /// (lambda rho, lambda rho'); N(R) is invariant under R -> R / lambda.
  TorusParams scaled(const Rational& lambda) const {
    if (lambda <= 0) throw std::invalid_argument("scale factor must be positive");
    if (rational_radii()) return exact(lambda * *rho_exact_, lambda * *rho_prime_exact_);
    if (exact_mode()) return from_squares(lambda * lambda * *rho_sq_, lambda * lambda * *rho_prime_sq_);
    const double l = to_double(lambda);
    return approximate(l * rho_, l * rho_prime_);
  }

  /// Rational upper bound for rho' + rho (exact when the radii are rational).
  Rational outer_radius_bound() const {
    if (rational_radii()) return *rho_exact_ + *rho_prime_exact_;
    return Rational(floor_sqrt(rho_sq()) + floor_sqrt(rho_prime_sq()) + 2);
  }

  std::string describe() const {
    if (rational_radii()) return "rho=" + to_string(*rho_exact_) + " rho'=" + to_string(*rho_prime_exact_);
    if (exact_mode()) return "rho^2=" + to_string(*rho_sq_) + " rho'^2=" + to_string(*rho_prime_sq_);
    return "rho=" + std::to_string(rho_) + " rho'=" + std::to_string(rho_prime_);
  }

 private:
  TorusParams(double rho, double rho_prime) : rho_(rho), rho_prime_(rho_prime) {}

  void validate() const {
    if (!(rho_ > 0)) throw std::invalid_argument("invalid torus: rho must be positive");
    if (exact_mode()) {
      if (!(*rho_sq_ < *rho_prime_sq_))
        throw std::invalid_argument("invalid torus: requires 0 < rho < rho'");
    } else if (!(rho_ < rho_prime_)) {
      throw std::invalid_argument("invalid torus: requires 0 < rho < rho'");
    }
  }

  static const Rational& require(const std::optional<Rational>& v, const char* what = "exact mode") {
    if (!v) throw ComputationError(std::string("operation requires ") + what +
                                   " (rho^2 and rho'^2 rational); use the float predicate");
    return *v;
  }

  double rho_;
  double rho_prime_;
  std::optional<Rational> rho_exact_;
  std::optional<Rational> rho_prime_exact_;
  std::optional<Rational> rho_sq_;
  std::optional<Rational> rho_prime_sq_;
};

using Mat3 = std::array<std::array<Rational, 3>, 3>;

/// Invertible rational 3x3 matrix with cached determinant and inverse.
class RationalMat3 {
 public:
  explicit RationalMat3(const Mat3& entries) : a_(entries) {
    det_ = a_[0][0] * (a_[1][1] * a_[2][2] - a_[1][2] * a_[2][1]) -
           a_[0][1] * (a_[1][0] * a_[2][2] - a_[1][2] * a_[2][0]) +
           a_[0][2] * (a_[1][0] * a_[2][1] - a_[1][1] * a_[2][0]);
    if (det_ == 0) throw std::invalid_argument("invalid matrix: det A = 0");
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        // inverse = adj / det, adj[i][j] = cofactor[j][i]
        const int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
        inv_[i][j] = (a_[r0][c0] * a_[r1][c1] - a_[r0][c1] * a_[r1][c0]) / det_;
      }
    mu_ = 1;
    for (const auto& row : a_)
      for (const auto& x : row) mu_ = lcm(mu_, den(x));
  }

  static RationalMat3 identity() { return diagonal(1, 1, 1); }
  static RationalMat3 diagonal(const Rational& a, const Rational& b, const Rational& c) {
    Mat3 m{};
    for (auto& row : m) row.fill(0);
    m[0][0] = a;
    m[1][1] = b;
    m[2][2] = c;
    return RationalMat3(m);
  }

  const Mat3& entries() const { return a_; }
  const Rational& operator()(int i, int j) const { return a_[i][j]; }
  const Rational& det() const { return det_; }
  const Mat3& inverse() const { return inv_; }
  /// Smallest positive integer mu with mu A integral.
  const BigInt& denominator_clearing() const { return mu_; }

  RationalMat3 transpose() const {
    Mat3 t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t[i][j] = a_[j][i];
    return RationalMat3(t);
  }

  RationalMat3 operator*(const RationalMat3& o) const {
    Mat3 p;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        p[i][j] = 0;
        for (int k = 0; k < 3; ++k) p[i][j] += a_[i][k] * o.a_[k][j];
      }
    return RationalMat3(p);
  }

  RationalMat3 scaled(const Rational& lambda) const {
    Mat3 s = a_;
    for (auto& row : s)
      for (auto& x : row) x *= lambda;
    return RationalMat3(s);
  }

  bool is_identity() const {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (a_[i][j] != (i == j ? 1 : 0)) return false;
    return true;
  }

  std::string describe() const {
    std::string s;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) s += (s.empty() ? "" : ",") + to_string(a_[i][j]);
    return s;
  }

 private:
  Mat3 a_;
  Mat3 inv_;
  Rational det_;
  BigInt mu_;
};

/// Positive definite binary form Q(x,y) = a x^2 + b x y + c y^2.
class QuadForm2 {
 public:
  QuadForm2(Rational a, Rational b, Rational c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    if (!(a_ > 0) || !(disc() > 0))
      throw std::invalid_argument("invalid quadratic form: Q must be positive definite (a > 0, 4ac - b^2 > 0)");
  }

  static QuadForm2 sum_of_squares() { return {1, 0, 1}; }

  const Rational& a() const { return a_; }
  const Rational& b() const { return b_; }
  const Rational& c() const { return c_; }
  Rational disc() const { return 4 * a_ * c_ - b_ * b_; }
  /// Determinant of the Gram matrix [[a, b/2], [b/2, c]].
  Rational det() const { return disc() / 4; }

  /// Q*, whose matrix is the inverse of Q's matrix.
  QuadForm2 adjoint() const {
    const Rational d = det();
    return {c_ / d, -b_ / d, a_ / d};
  }

  Rational operator()(const Rational& x, const Rational& y) const {
    return a_ * x * x + b_ * x * y + c_ * y * y;
  }

  bool is_integral() const { return den(a_) == 1 && den(b_) == 1 && den(c_) == 1; }
  bool is_sum_of_squares() const { return a_ == 1 && b_ == 0 && c_ == 1; }

  QuadForm2 scaled(const Rational& lambda) const { return {lambda * a_, lambda * b_, lambda * c_}; }

  /// Common denominator e with e*Q integral.
  BigInt denominator() const { return lcm(lcm(den(a_), den(b_)), den(c_)); }

  std::string describe() const { return to_string(a_) + "," + to_string(b_) + "," + to_string(c_); }

 private:
  Rational a_, b_, c_;
};

struct LatticePoint {
  BigInt n1, n2, n3;
};

// ---------------------------------------------------------------------------
// Squaring scheme. Every exact predicate reduces to: with sigma = s/D the
// squared horizontal radius and Z^2 = z2/D,
//   W = rho'^2 - rho^2 + (s + z2)/D;  inside iff W <= 0 or W^2 <= 4 rho'^2 sigma.
// Clearing denominators gives integers alpha = L*Dn*rho'^2, beta = L*Dn*rho^2,
// gamma = L*Dd (D = Dn/Dd) and the integer test
//   W' = alpha - beta + gamma (s + z2);  W' <= 0 or W'^2 <= 4 alpha gamma s.
// ---------------------------------------------------------------------------

template <class Int>
struct SquaringCore {
  Int alpha{}, beta{}, gamma{};

  /// alpha - beta + gamma*z2; the slice constant.
  Int slice_offset(const Int& z2) const { return alpha - beta + gamma * z2; }

  bool inside_offset(const Int& s, const Int& offset) const {
    const Int w = offset + gamma * s;
    if (w <= 0) return true;
    return w * w <= 4 * alpha * gamma * s;
  }

  bool inside(const Int& s, const Int& z2) const { return inside_offset(s, slice_offset(z2)); }

  /// gamma*s compared against the vertex (2 alpha - offset) of the quadratic
  /// in s; the inside set of a slice is an interval around it.
  bool at_or_below_vertex(const Int& s, const Int& offset) const { return gamma * s <= 2 * alpha - offset; }
  bool at_or_above_vertex(const Int& s, const Int& offset) const { return gamma * s >= 2 * alpha - offset; }
};

using BigCore = SquaringCore<BigInt>;

/// Core for sigma = s / scale.
inline BigCore make_core(const TorusParams& params, const Rational& scale) {
  if (scale <= 0) throw std::invalid_argument("scale must be positive");
  const BigInt dn = num(scale), dd = den(scale);
  const Rational a = Rational(dn) * params.rho_prime_sq();
  const Rational b = Rational(dn) * params.rho_sq();
  const BigInt l = lcm(den(a), den(b));
  BigCore core;
  core.alpha = num(a * Rational(l));
  core.beta = num(b * Rational(l));
  core.gamma = l * dd;
  return core;
}

/// True when the i128 representation of the core cannot overflow for
/// 0 <= s <= s_max, 0 <= z2 <= z2_max.
inline bool core_fits_i128(const BigCore& core, const BigInt& s_max, const BigInt& z2_max) {
  const BigInt w = core.alpha + core.beta + core.gamma * (s_max + z2_max);
  const BigInt vertex = 2 * core.alpha + core.beta + 2 * core.gamma * s_max;
  return fits_bits(w * w + 1, 125) && fits_bits(4 * core.alpha * core.gamma * s_max + 1, 125) &&
         fits_bits(vertex, 125);
}

inline SquaringCore<i128> narrow(const BigCore& core) {
  return {to_i128(core.alpha), to_i128(core.beta), to_i128(core.gamma)};
}

/// Scale D with sigma = s/D for a lattice point divided by R.
inline Rational scale_for_radius(const Rational& R) {
  if (R <= 0) throw std::invalid_argument("R must be positive");
  return R * R;
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

inline bool contains(const TorusParams& params, const Rational& x, const Rational& y, const Rational& z) {
  const Rational sigma = x * x + y * y;
  const Rational w = params.rho_prime_sq() + sigma + z * z - params.rho_sq();
  if (w <= 0) return true;
  return w * w <= 4 * params.rho_prime_sq() * sigma;
}

inline bool contains_scaled(const TorusParams& params, const Rational& R, const LatticePoint& n) {
  const BigCore core = make_core(params, scale_for_radius(R));
  return core.inside(n.n1 * n.n1 + n.n2 * n.n2, n.n3 * n.n3);
}

/// A^{-1} n as an integer vector v over a common denominator delta.
struct MappedPoint {
  std::array<BigInt, 3> v;
  BigInt delta;
};

struct IntegralInverse {
  std::array<std::array<BigInt, 3>, 3> b;  // A^{-1} = b / delta
  BigInt delta;
};

inline IntegralInverse integral_inverse(const RationalMat3& A) {
  IntegralInverse out;
  out.delta = 1;
  for (const auto& row : A.inverse())
    for (const auto& x : row) out.delta = lcm(out.delta, den(x));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.b[i][j] = num(A.inverse()[i][j] * Rational(out.delta));
  return out;
}

/// Scale for the mapped body: A^{-1} n / R = v / (delta R).
inline Rational scale_for_mapped(const Rational& R, const BigInt& delta) {
  const Rational d = Rational(delta) * R;
  return d * d;
}

inline bool contains_mapped(const RationalMat3& A, const TorusParams& params, const Rational& R,
                            const LatticePoint& n) {
  const IntegralInverse inv = integral_inverse(A);
  const std::array<BigInt, 3> in{n.n1, n.n2, n.n3};
  std::array<BigInt, 3> v;
  for (int i = 0; i < 3; ++i) v[i] = inv.b[i][0] * in[0] + inv.b[i][1] * in[1] + inv.b[i][2] * in[2];
  const BigCore core = make_core(params, scale_for_mapped(R, inv.delta));
  return core.inside(v[0] * v[0] + v[1] * v[1], v[2] * v[2]);
}

/// Integer form e*Q with e the common denominator.
struct IntegralForm {
  BigInt a, b, c, e;
  BigInt operator()(const BigInt& x, const BigInt& y) const { return a * x * x + b * x * y + c * y * y; }
};

inline IntegralForm integral_form(const QuadForm2& Q) {
  const BigInt e = Q.denominator();
  return {num(Q.a() * Rational(e)), num(Q.b() * Rational(e)), num(Q.c() * Rational(e)), e};
}

/// Scale for T_Q: sigma = eQ(n)/(e R^2), Z^2 = e n3^2/(e R^2).
inline Rational scale_for_form(const Rational& R, const BigInt& e) { return Rational(e) * R * R; }

inline bool contains_q(const QuadForm2& Q, const TorusParams& params, const Rational& R, const LatticePoint& n) {
  const IntegralForm f = integral_form(Q);
  const BigCore core = make_core(params, scale_for_form(R, f.e));
  return core.inside(f(n.n1, n.n2), f.e * n.n3 * n.n3);
}

/// Float membership for parameters without exact data. Throws when the
/// defining expression is within 1e-9 of zero.
inline bool contains_float(const TorusParams& params, double x, double y, double z) {
  const double r = std::hypot(x, y);
  const double d = params.rho_prime() - r;
  const double f = d * d + z * z - params.rho() * params.rho();
  if (std::abs(f) <= 1e-9) throw ComputationError("membership uncertain within 1e-9 of the boundary");
  return f < 0;
}

// ---------------------------------------------------------------------------
// Bounding boxes
// ---------------------------------------------------------------------------

struct Box {
  std::array<std::int64_t, 3> lo{}, hi{};

  BigInt volume() const {
    BigInt v = 1;
    for (int i = 0; i < 3; ++i) v *= BigInt(hi[i] - lo[i] + 1);
    return v;
  }
};

inline Box symmetric_box(const BigInt& e1, const BigInt& e2, const BigInt& e3) {
  Box b;
  const std::array<BigInt, 3> e{e1, e2, e3};
  for (int i = 0; i < 3; ++i) {
    b.hi[i] = to_int64(e[i]);
    b.lo[i] = -b.hi[i];
  }
  return b;
}

inline Box bounding_box(const TorusParams& params, const Rational& R) {
  const BigInt z = floor_sqrt(params.rho_sq() * R * R);
  const BigInt xy = floor(params.outer_radius_bound() * R);
  return symmetric_box(xy, xy, z);
}

/// Image box of A times the torus box: |n_i| <= R sum_j |A_ij| e_j.
inline Box bounding_box(const RationalMat3& A, const TorusParams& params, const Rational& R) {
  const Rational exy = params.outer_radius_bound();
  const Rational ez = params.rational_radii() ? params.rho_exact() : Rational(floor_sqrt(params.rho_sq()) + 1);
  std::array<BigInt, 3> e;
  for (int i = 0; i < 3; ++i) {
    const Rational s = abs(A(i, 0)) * exy + abs(A(i, 1)) * exy + abs(A(i, 2)) * ez;
    e[i] = floor(s * R);
  }
  return symmetric_box(e[0], e[1], e[2]);
}

/// Q(x,y) <= E^2 implies x^2 <= 4 c E^2 / disc and y^2 <= 4 a E^2 / disc.
inline Box bounding_box(const QuadForm2& Q, const TorusParams& params, const Rational& R) {
  const Rational e = params.outer_radius_bound() * R;
  const Rational e2 = e * e;
  const BigInt x = floor_sqrt(4 * Q.c() * e2 / Q.disc());
  const BigInt y = floor_sqrt(4 * Q.a() * e2 / Q.disc());
  const BigInt z = floor_sqrt(params.rho_sq() * R * R);
  return symmetric_box(x, y, z);
}

}  // namespace torus
