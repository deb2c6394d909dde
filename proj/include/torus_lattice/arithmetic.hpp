#pragma once

// Representation counts by sums of two squares and binary forms, cumulative
// circle counts, and the axis data of the lattice A^t Z^3.

#include "geometry.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace torus {

/// #{(m1, m2) in Z^2 : m1^2 + m2^2 = m}.
inline std::int64_t r2(std::int64_t m) {
  if (m < 0) return 0;
  std::int64_t count = 0;
  const std::int64_t top = isqrt(m);
  for (std::int64_t x = -top; x <= top; ++x) {
    std::int64_t y;
    if (is_square(m - x * x, &y)) count += (y == 0) ? 1 : 2;
  }
  return count;
}

/// #{(x, y) : x^2 + y^2 <= T} for integer T, O(sqrt T).
inline std::int64_t circle_count(std::int64_t T) {
  if (T < 0) return 0;
  const std::int64_t top = isqrt(T);
  std::int64_t count = 2 * top + 1;  // x = 0 column
  for (std::int64_t x = 1; x <= top; ++x) count += 2 * (2 * isqrt(T - x * x) + 1);
  return count;
}

inline std::int64_t r2_cumulative(const Rational& T) {
  if (T < 0) return 0;
  return circle_count(to_int64(floor(T)));
}

/// r2 for every m <= limit in one pass, plus the cumulative counts. Built
/// once and shared read-only by counting workers.
class CircleCountTable {
 public:
  explicit CircleCountTable(std::int64_t limit) : limit_(limit) {
    if (limit < 0) throw std::invalid_argument("table limit must be nonnegative");
    if (limit > 2'000'000'000) throw ComputationError("circle count table too large");
    r2_.assign(static_cast<std::size_t>(limit) + 1, 0);
    const std::int64_t top = isqrt(limit);
    for (std::int64_t x = -top; x <= top; ++x) {
      const std::int64_t rest = limit - x * x;
      const std::int64_t ytop = isqrt(rest);
      for (std::int64_t y = -ytop; y <= ytop; ++y) ++r2_[static_cast<std::size_t>(x * x + y * y)];
    }
    cumulative_.resize(r2_.size());
    std::int64_t acc = 0;
    for (std::size_t m = 0; m < r2_.size(); ++m) cumulative_[m] = (acc += r2_[m]);
  }

  std::int64_t limit() const { return limit_; }
  std::int64_t r2(std::int64_t m) const { return (m < 0 || m > limit_) ? torus::r2(m) : r2_[m]; }

  /// #{x^2 + y^2 <= T}; falls back to direct summation beyond the table.
  std::int64_t cumulative(std::int64_t T) const {
    if (T < 0) return 0;
    if (T > limit_) return circle_count(T);
    return cumulative_[static_cast<std::size_t>(T)];
  }

 private:
  std::int64_t limit_;
  std::vector<std::int32_t> r2_;
  std::vector<std::int64_t> cumulative_;
};

struct ResidueClass {
  std::int64_t c1 = 0, c2 = 0, c3 = 0;
  std::int64_t q = 1;

  friend bool operator==(const ResidueClass&, const ResidueClass&) = default;
  friend auto operator<=>(const ResidueClass&, const ResidueClass&) = default;
};

inline std::int64_t mod_positive(std::int64_t a, std::int64_t q) {
  const std::int64_t r = a % q;
  return r < 0 ? r + q : r;
}

inline ResidueClass make_residue_class(std::int64_t c1, std::int64_t c2, std::int64_t c3, std::int64_t q) {
  if (q <= 0) throw std::invalid_argument("modulus must be positive");
  return {mod_positive(c1, q), mod_positive(c2, q), mod_positive(c3, q), q};
}

/// r*(m): representations with m1 = c1, m2 = c2 (mod q).
inline std::int64_t r2_restricted(std::int64_t m, const ResidueClass& cls) {
  if (m < 0) return 0;
  std::int64_t count = 0;
  const std::int64_t top = isqrt(m);
  for (std::int64_t x = -top; x <= top; ++x) {
    if (mod_positive(x, cls.q) != cls.c1) continue;
    std::int64_t y;
    if (!is_square(m - x * x, &y)) continue;
    if (mod_positive(y, cls.q) == cls.c2) ++count;
    if (y != 0 && mod_positive(-y, cls.q) == cls.c2) ++count;
  }
  return count;
}

/// #{(x, y) : Q*(x, y) = m} for an integral positive definite form.
inline std::int64_t rq(const QuadForm2& form, std::int64_t m) {
  if (!form.is_integral()) throw std::invalid_argument("rq requires an integral form");
  if (m < 0) return 0;
  const std::int64_t a = to_int64(num(form.a())), b = to_int64(num(form.b())), c = to_int64(num(form.c()));
  const std::int64_t disc = 4 * a * c - b * b;
  // c y^2 + b x y + a x^2 - m = 0 has real roots iff disc x^2 <= 4 c m
  const std::int64_t xtop = isqrt(4 * c * m / disc);
  std::int64_t count = 0;
  for (std::int64_t x = -xtop; x <= xtop; ++x) {
    const i128 d = static_cast<i128>(4) * c * m - static_cast<i128>(disc) * x * x;
    if (d < 0) continue;
    std::int64_t r;
    if (!is_square(static_cast<std::int64_t>(d), &r)) continue;
    for (const std::int64_t numer : {-b * x - r, -b * x + r}) {
      if (numer % (2 * c) == 0) ++count;
      if (r == 0) break;
    }
  }
  return count;
}

namespace detail {

// g = x a + y b with g = gcd(a, b) >= 0.
inline std::tuple<BigInt, BigInt, BigInt> ext_gcd(const BigInt& a, const BigInt& b) {
  BigInt old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const BigInt q = old_r / r;
    BigInt next = old_r - q * r;
    old_r = r, r = next;
    next = old_s - q * s;
    old_s = s, s = next;
    next = old_t - q * t;
    old_t = t, t = next;
  }
  if (old_r < 0) return {BigInt(-old_r), BigInt(-old_s), BigInt(-old_t)};
  return {old_r, old_s, old_t};
}

using IntVec3 = std::array<BigInt, 3>;

/// Column echelon form: after the call, columns[0] is zero in rows 1 and 2
/// and columns[1] is zero in row 2. Unimodular column operations only.
inline void column_echelon(std::array<IntVec3, 3>& columns) {
  for (int row = 2; row >= 1; --row) {
    for (int j = 0; j < row; ++j) {
      const BigInt a = columns[row][row];
      const BigInt b = columns[j][row];
      if (b == 0) continue;
      const auto [g, x, y] = ext_gcd(a, b);
      IntVec3 pivot, other;
      for (int i = 0; i < 3; ++i) {
        pivot[i] = x * columns[row][i] + y * columns[j][i];
        other[i] = (b / g) * columns[row][i] - (a / g) * columns[j][i];
      }
      columns[row] = pivot;
      columns[j] = other;
    }
  }
}

}  // namespace detail

enum class Axis { x = 0, y = 1, z = 2 };

/// min{r > 0 : r e_axis in A^t Z^3}. The generators of A^t Z^3 are the rows
/// of A; after clearing denominators the lattice is put into column echelon
/// form with the requested axis first, and the minimum is read from the
/// leading entry.
inline Rational axis_minimum(const RationalMat3& A, Axis axis) {
  const BigInt& mu = A.denominator_clearing();
  const int k = static_cast<int>(axis);
  const std::array<int, 3> order = {k, (k + 1) % 3, (k + 2) % 3};
  std::array<detail::IntVec3, 3> columns;
  for (int j = 0; j < 3; ++j)      // generator j = row j of A
    for (int i = 0; i < 3; ++i)    // coordinate order[i]
      columns[j][i] = num(A(j, order[i]) * Rational(mu));
  detail::column_echelon(columns);
  const BigInt lead = boost::multiprecision::abs(columns[0][0]);
  if (lead == 0) throw std::logic_error("singular lattice in axis_minimum");
  return Rational(lead, mu);
}

/// r_A = min{r > 0 : (r, 0, 0) in A^t Z^3}.
inline Rational r_A(const RationalMat3& A) { return axis_minimum(A, Axis::x); }

struct AxisLattice {
  Rational rA;
  std::int64_t q = 1;
  std::vector<ResidueClass> residues;

  bool contains(std::int64_t m1, std::int64_t m2, std::int64_t m3) const {
    const ResidueClass c = make_residue_class(m1, m2, m3, q);
    return std::binary_search(residues.begin(), residues.end(), c);
  }
};

/// Residue classes mod q = |det(mu A)| covering (mu A)^t Z^3, which contains
/// q Z^3 because q (mu A)^{-t} is the integral cofactor matrix.
inline AxisLattice axis_lattice(const RationalMat3& A, std::int64_t max_modulus = 128) {
  AxisLattice out;
  out.rA = r_A(A);
  const BigInt& mu = A.denominator_clearing();
  std::array<std::array<std::int64_t, 3>, 3> at;  // (mu A)^t
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) at[i][j] = to_int64(num(A(j, i) * Rational(mu)));
  const Rational det = A.det() * Rational(mu * mu * mu);
  out.q = to_int64(boost::multiprecision::abs(num(det)));
  if (out.q > max_modulus) throw ComputationError("axis_lattice modulus " + std::to_string(out.q) + " exceeds limit");
  const std::int64_t q = out.q;
  for (std::int64_t a = 0; a < q; ++a)
    for (std::int64_t b = 0; b < q; ++b)
      for (std::int64_t c = 0; c < q; ++c) {
        std::array<std::int64_t, 3> m{};
        for (int i = 0; i < 3; ++i) m[i] = at[i][0] * a + at[i][1] * b + at[i][2] * c;
        out.residues.push_back(make_residue_class(m[0], m[1], m[2], q));
      }
  std::sort(out.residues.begin(), out.residues.end());
  out.residues.erase(std::unique(out.residues.begin(), out.residues.end()), out.residues.end());
  return out;
}

}  // namespace torus
