#pragma once

// Main terms
//   M(R)   = 2 pi^2 rho^2 rho' R^3 + 4 pi rho rho' R^2 sum_{n>=1} J1(2 pi rho R n)/n,
//   M_A(R) = |det A| (2 pi^2 rho^2 rho' R^3 + 4 pi rho rho' R^2 / r sum J1(2 pi r rho R n)/n),
//   M_Q(R) = d^{-1/2} M(R).
//
// The Bessel series converges like sum n^{-3/2} with a phase e(n rho R) that
// does not oscillate when rho R is an integer, so plain truncation cannot
// reach useful tolerances. Terms n <= nmax are summed directly; the tail is
// summed through the Hankel expansion of J1, whose pieces are twisted zeta
// tails (lerch_tail). tail_bound bounds the neglected Hankel remainder.

#include "arithmetic.hpp"
#include "counting.hpp"
#include "special.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

namespace torus {

struct MainTermResult {
  double value = 0;      // leading + secondary
  double leading = 0;    // volume term
  double secondary = 0;  // Bessel series contribution
  std::int64_t nmax = 0;
  double tail_bound = 0;
  double rounding_bound = 0;
};

struct MainTermOptions {
  std::int64_t term_cap = 100'000'000;
  /// Force the number of directly summed terms (certification checks).
  std::optional<std::int64_t> nmax;
};

/// Value of sum_{n>=1} J1(2 pi x n) / n with error data.
struct BesselSeries {
  double sum = 0;
  double tail_bound = 0;      // bound on |sum_{n>nmax} Hankel remainder / n|
  double magnitude = 0;       // sum of |pieces|, drives the rounding estimate
  std::int64_t nmax = 0;
};

namespace detail {

inline constexpr int kHankelTerms = 10;

/// Remainder after kHankelTerms terms, summed over n > nmax: for real argument
/// the truncated P and Q series err by at most their first omitted terms.
inline double hankel_tail_bound(double x, std::int64_t nmax) {
  const double y = 2 * pi * x;
  const double n = static_cast<double>(nmax);
  double bound = 0;
  for (int k : {kHankelTerms, kHankelTerms + 1}) {
    const double p = k + 0.5;
    bound += std::abs(hankel_coefficient(k)) * std::pow(y, -p) * std::pow(n, -p) / p;
  }
  return std::sqrt(2 / pi) * bound;
}

/// Pairwise summation keeps the rounding error logarithmic in the length.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 16) {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

}  // namespace detail

inline BesselSeries bessel_series(double x, std::int64_t nmax) {
  if (!(x > 0)) throw std::invalid_argument("bessel_series needs x > 0");
  if (nmax < 1) throw std::invalid_argument("bessel_series needs nmax >= 1");
  BesselSeries out;
  out.nmax = nmax;
  std::vector<double> terms(static_cast<std::size_t>(nmax));
  double magnitude = 0;
  for (std::int64_t n = 1; n <= nmax; ++n) {
    const double t = bessel_j1(2 * detail::pi * x * static_cast<double>(n)) / static_cast<double>(n);
    terms[static_cast<std::size_t>(n - 1)] = t;
    magnitude += std::abs(t);
  }
  double sum = detail::pairwise_sum(terms.data(), terms.size());

  // J1(y) = Re[sqrt(2/pi) e^{-3 pi i/4} e^{iy} sum_k i^k a_k y^{-k-1/2}], y = 2 pi x n
  const double beta = x - std::floor(x);
  const double y1 = 2 * detail::pi * x;
  Complex tail = 0;
  Complex ik = 1;
  for (int k = 0; k < detail::kHankelTerms; ++k) {
    const double s = k + 1.5;
    const Complex piece = ik * hankel_coefficient(k) * std::pow(y1, -(k + 0.5)) * lerch_tail(s, beta, nmax + 1);
    tail += piece;
    magnitude += std::abs(piece);
    ik *= Complex(0, 1);
  }
  const Complex rot = std::polar(std::sqrt(2 / detail::pi), -0.75 * detail::pi);
  sum += (rot * tail).real();
  out.sum = sum;
  out.tail_bound = detail::hankel_tail_bound(x, nmax);
  out.magnitude = magnitude;
  return out;
}

namespace detail {

/// Secondary term prefactor * series(x) with nmax chosen by doubling until
/// the certified pieces fit in tol.
inline MainTermResult certified_main_term(double leading, double prefactor, double x, double tol,
                                          const MainTermOptions& opt) {
  if (!(tol > 0)) throw std::invalid_argument("main term tolerance must be positive");
  constexpr double eps = 4e-16;
  auto evaluate = [&](std::int64_t nmax) {
    const BesselSeries s = bessel_series(x, nmax);
    MainTermResult r;
    r.leading = leading;
    r.secondary = prefactor * s.sum;
    r.value = r.leading + r.secondary;
    r.nmax = nmax;
    r.tail_bound = std::abs(prefactor) * s.tail_bound;
    r.rounding_bound = eps * (std::abs(leading) + std::abs(prefactor) * s.magnitude * 8);
    return r;
  };
  if (opt.nmax) return evaluate(*opt.nmax);
  if (eps * std::abs(leading) > 0.5 * tol)
    throw ComputationError("main term tolerance below floating-point resolution at this R");
  // start where the Hankel expansion is accurate: 2 pi x (nmax + 1) >= 40
  std::int64_t nmax = std::max<std::int64_t>(4, static_cast<std::int64_t>(std::ceil(40 / (2 * pi * x))));
  while (std::abs(prefactor) * hankel_tail_bound(x, nmax) > 0.5 * tol) {
    nmax *= 2;
    if (nmax > opt.term_cap) throw ComputationError("main term cannot be certified within the term cap");
  }
  if (nmax > opt.term_cap) throw ComputationError("main term cannot be certified within the term cap");
  MainTermResult r = evaluate(nmax);
  if (r.rounding_bound > 0.5 * tol) throw ComputationError("main term tolerance below floating-point resolution at this R");
  return r;
}

}  // namespace detail

inline MainTermResult main_term(const TorusParams& params, double R, double tol, const MainTermOptions& opt = {}) {
  if (!(R > 0)) throw std::invalid_argument("main term needs R > 0");
  const double rho = params.rho(), rhop = params.rho_prime();
  const double leading = 2 * detail::pi * detail::pi * rho * rho * rhop * R * R * R;
  const double prefactor = 4 * detail::pi * rho * rhop * R * R;
  return detail::certified_main_term(leading, prefactor, rho * R, tol, opt);
}

/// z-axis minimum of A^t Z^3; the lattice points of A^t Z^3 on that axis
/// carry the secondary term of A T.
inline Rational secondary_frequency(const RationalMat3& A) { return axis_minimum(A, Axis::z); }

inline MainTermResult main_term_mapped(const RationalMat3& A, const TorusParams& params, double R, double tol,
                                       const MainTermOptions& opt = {}) {
  if (!(R > 0)) throw std::invalid_argument("main term needs R > 0");
  const double det = std::abs(to_double(A.det()));
  const double r = to_double(secondary_frequency(A));
  const double rho = params.rho(), rhop = params.rho_prime();
  const double leading = 2 * detail::pi * detail::pi * rho * rho * rhop * det * R * R * R;
  const double prefactor = 4 * detail::pi * rho * rhop * det * R * R / r;
  return detail::certified_main_term(leading, prefactor, r * rho * R, tol, opt);
}

inline MainTermResult main_term_q(const QuadForm2& Q, const TorusParams& params, double R, double tol,
                                  const MainTermOptions& opt = {}) {
  const double scale = 1 / std::sqrt(to_double(Q.det()));
  MainTermResult m = main_term(params, R, tol / scale, opt);
  m.leading *= scale;
  m.secondary *= scale;
  m.value = m.leading + m.secondary;
  m.tail_bound *= scale;
  m.rounding_bound *= scale;
  return m;
}

inline MainTermResult main_term(const Body& body, double R, double tol, const MainTermOptions& opt = {}) {
  return std::visit(
      [&](const auto& b) -> MainTermResult {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, TorusBody>) return main_term(b.params, R, tol, opt);
        else if constexpr (std::is_same_v<T, MappedBody>) return main_term_mapped(b.A, b.params, R, tol, opt);
        else return main_term_q(b.Q, b.params, R, tol, opt);
      },
      body);
}

/// Volume term alone: |det A| or d^{-1/2} times 2 pi^2 rho^2 rho' R^3.
inline double leading_term(const Body& body, double R) {
  const TorusParams& p = params_of(body);
  double v = 2 * detail::pi * detail::pi * p.rho() * p.rho() * p.rho_prime() * R * R * R;
  if (const auto* m = std::get_if<MappedBody>(&body)) v *= std::abs(to_double(m->A.det()));
  if (const auto* f = std::get_if<FormBody>(&body)) v /= std::sqrt(to_double(f->Q.det()));
  return v;
}

/// C = -2 sqrt(2) zeta(3/2): at integer rho R every J1(2 pi rho R n) has phase
/// cos(-3 pi/4) in its leading asymptotic term.
inline double secondary_constant() { return -2 * std::numbers::sqrt2 * zeta_three_halves(); }

/// C rho^{1/2} rho' R^{3/2}, valid for rho R a positive integer.
inline double secondary_approx(const TorusParams& params, const Rational& R) {
  if (R <= 0) throw std::invalid_argument("secondary_approx needs R > 0");
  const Rational x2 = params.rho_sq() * R * R;
  if (den(x2) != 1 || isqrt(num(x2)) * isqrt(num(x2)) != num(x2))
    throw std::invalid_argument("secondary_approx needs rho R to be a positive integer");
  const double r = to_double(R);
  return secondary_constant() * std::sqrt(params.rho()) * params.rho_prime() * std::pow(r, 1.5);
}

}  // namespace torus
