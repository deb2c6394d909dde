#pragma once

// Exponential sums over M <= m < 2M, N <= n < 2N with phases
// R rho sqrt(m + n^2): the plain sum S, the r(m)-weighted sup over
// rectangles anchored at (M, N), and their stated bounds.

#include "arithmetic.hpp"
#include "special.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace torus {

enum class Sign { plus, minus };

inline const char* to_string(Sign s) { return s == Sign::plus ? "plus" : "minus"; }

inline Sign parse_sign(const std::string& s) {
  if (s == "plus" || s == "+") return Sign::plus;
  if (s == "minus" || s == "-") return Sign::minus;
  throw std::invalid_argument("sign must be plus or minus");
}

struct ExpSumResult {
  std::int64_t M = 1, N = 1;
  double R = 0, rho = 0, theta = 0;
  Sign sign = Sign::plus;
  double value = 0;
  double bound_ratio = 0;
  double trivial_bound = 0;
  bool outside_recommended = false;
};

namespace detail {

/// Fractional part of the phase. Above R = 1e6 the square roots are taken in
/// long double so the reduced phase stays accurate to well below 1e-6 cycles.
struct PhaseReducer {
  double R;
  bool extended;

  explicit PhaseReducer(double r) : R(r), extended(r > 1e6) {}

  double reduce(double rho, std::int64_t m, std::int64_t n, double sign_coeff, double linear) const {
    const auto mn = static_cast<double>(m) + static_cast<double>(n) * static_cast<double>(n);
    if (extended) {
      const long double x = static_cast<long double>(R) *
                            (static_cast<long double>(rho) * std::sqrt(static_cast<long double>(m) +
                                                                       static_cast<long double>(n) * n) +
                             sign_coeff * std::sqrt(static_cast<long double>(m)));
      const long double f = x - std::floor(x);
      return static_cast<double>(f) + linear;
    }
    const double x = R * (rho * std::sqrt(mn) + sign_coeff * std::sqrt(static_cast<double>(m)));
    return x - std::floor(x) + linear;
  }
};

inline Complex unit(double phase) {
  const double f = phase - std::floor(phase);
  return std::polar(1.0, 2 * pi * f);
}

inline void check_sizes(std::int64_t M, std::int64_t N) {
  if (M < 1 || N < 1) throw std::invalid_argument("M and N must be positive");
}

}  // namespace detail

/// B = M N^{1/2} + R^{-1} L^{3/2} M + R^{1/4} N^{7/6} L^{-1/24} M^{1/2} + N L^{1/4} M^{1/2}, L = M + N^2.
inline double exp_sum_bound(double R, std::int64_t M, std::int64_t N) {
  const double m = static_cast<double>(M), n = static_cast<double>(N);
  const double L = m + n * n;
  return m * std::sqrt(n) + std::pow(L, 1.5) * m / R + std::pow(R, 0.25) * std::pow(n, 7.0 / 6) * std::pow(L, -1.0 / 24) * std::sqrt(m) +
         n * std::pow(L, 0.25) * std::sqrt(m);
}

/// S = sum_m |sum_n e(theta n) e(R rho sqrt(m + n^2))|.
inline ExpSumResult exp_sum_S(double R, double rho, double theta, std::int64_t M, std::int64_t N) {
  detail::check_sizes(M, N);
  ExpSumResult out;
  out.M = M, out.N = N, out.R = R, out.rho = rho, out.theta = theta;
  const detail::PhaseReducer ph(R);
  double S = 0;
  for (std::int64_t m = M; m < 2 * M; ++m) {
    Complex inner = 0;
    for (std::int64_t n = N; n < 2 * N; ++n) {
      const double lin = theta * static_cast<double>(n);
      inner += detail::unit(ph.reduce(rho, m, n, 0.0, lin - std::floor(lin)));
    }
    S += std::abs(inner);
  }
  out.value = S;
  out.trivial_bound = static_cast<double>(M) * static_cast<double>(N);
  out.bound_ratio = R > 0 ? S / exp_sum_bound(R, M, N) : S / out.trivial_bound;
  return out;
}

struct WeightedSupOptions {
  /// Only the full rectangle (u, v) = (M, N); used to check the prefix sums.
  bool full_rectangle_only = false;
  double max_cells = 1e8;
  const CircleCountTable* table = nullptr;
};

/// sup over 1 <= u <= M, 1 <= v <= N of
/// |sum_{M <= m < M+u, N <= n < N+v} r(m) e(R (rho sqrt(m + n^2) +- sqrt m))|.
/// Rows are streamed: col[v] holds the running rectangle sums of the rows seen
/// so far, so memory is O(N).
inline ExpSumResult exp_sum_weighted_sup(double R, double rho, Sign sign, std::int64_t M, std::int64_t N,
                                         const WeightedSupOptions& opt = {}) {
  detail::check_sizes(M, N);
  if (static_cast<double>(M) * static_cast<double>(N) > opt.max_cells)
    throw ComputationError("exp_sum_weighted_sup: M*N exceeds the cell limit");
  ExpSumResult out;
  out.M = M, out.N = N, out.R = R, out.rho = rho, out.sign = sign;
  out.outside_recommended = R > 0 && (static_cast<double>(M) > std::pow(R, 4.0 / 3) * (1 + 1e-12) ||
                                      static_cast<double>(N) > std::pow(R, 2.0 / 3) * (1 + 1e-12));
  const double sc = sign == Sign::plus ? 1.0 : -1.0;
  const detail::PhaseReducer ph(R);
  std::vector<Complex> col(static_cast<std::size_t>(N), Complex(0));
  double best = 0, trivial = 0;
  for (std::int64_t m = M; m < 2 * M; ++m) {
    const std::int64_t w = opt.table ? opt.table->r2(m) : r2(m);
    trivial += static_cast<double>(w) * static_cast<double>(N);
    Complex row = 0;
    if (w != 0) {
      for (std::int64_t n = N; n < 2 * N; ++n) {
        row += static_cast<double>(w) * detail::unit(ph.reduce(rho, m, n, sc, 0.0));
        col[static_cast<std::size_t>(n - N)] += row;
      }
    }
    if (opt.full_rectangle_only) continue;
    for (const Complex& c : col) best = std::max(best, std::abs(c));
  }
  if (opt.full_rectangle_only) best = std::abs(col.back());
  out.value = best;
  out.trivial_bound = trivial;
  const double L = static_cast<double>(M) + static_cast<double>(N) * static_cast<double>(N);
  out.bound_ratio = best / (std::cbrt(R) * std::pow(static_cast<double>(M), 0.25) * std::pow(L, 0.75));
  return out;
}

/// S / B.
inline double exp_sum_bound_ratio(double R, double rho, double theta, std::int64_t M, std::int64_t N) {
  if (!(R > 0)) throw std::invalid_argument("exp_sum_bound_ratio needs R > 0");
  return exp_sum_S(R, rho, theta, M, N).value / exp_sum_bound(R, M, N);
}

}  // namespace torus
