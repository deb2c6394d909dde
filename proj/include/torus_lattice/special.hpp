#pragma once

// J1, zeta(3/2), and the twisted tails sum_{n >= a} e(n beta) n^{-s} used to
// sum the Bessel series of the main term beyond its truncation point.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace torus {

using Complex = std::complex<double>;

namespace detail {

inline constexpr double pi = std::numbers::pi;

/// Hankel coefficients a_k(1) = prod_{j<=k} (4 - (2j-1)^2) / (k! 8^k).
inline constexpr std::array<double, 32> hankel_table = [] {
  std::array<double, 32> a{};
  a[0] = 1.0;
  for (int k = 1; k < 32; ++k) a[k] = a[k - 1] * (4.0 - (2.0 * k - 1) * (2.0 * k - 1)) / (8.0 * k);
  return a;
}();

inline double j1_series(double x) {
  const double h = 0.5 * x, h2 = h * h;
  double term = h, sum = h;
  for (int k = 0; k < 80; ++k) {
    term *= -h2 / ((k + 1.0) * (k + 2.0));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

// J1(x) = (1/2pi) int_0^{2pi} cos(theta - x sin theta) d theta; the periodic
// trapezoid rule with n nodes aliases in J_{1 +- kn}(x), negligible for
// x < 25 at n = 96.
inline double j1_trapezoid(double x) {
  constexpr int n = 96;
  double sum = 0;
  for (int j = 0; j < n; ++j) {
    const double th = 2 * pi * j / n;
    sum += std::cos(th - x * std::sin(th));
  }
  return sum / n;
}

inline double j1_hankel(double x) {
  double p = 0, q = 0, xp = 1, last = INFINITY;
  for (int k = 0; k < 32; ++k) {
    const double term = hankel_table[k] / xp;
    if (std::abs(term) > last) break;  // asymptotic series started to diverge
    last = std::abs(term);
    // P gets even k with sign (-1)^{k/2}; Q gets odd k with sign (-1)^{(k-1)/2}
    const double signed_term = (k % 4 < 2) ? term : -term;
    (k % 2 == 0 ? p : q) += signed_term;
    if (last < 1e-18) break;
    xp *= x;
  }
  const double s = std::sin(x), c = std::cos(x);
  const double cos_chi = (s - c) / std::numbers::sqrt2;   // cos(x - 3pi/4)
  const double sin_chi = -(s + c) / std::numbers::sqrt2;  // sin(x - 3pi/4)
  return std::sqrt(2 / (pi * x)) * (p * cos_chi - q * sin_chi);
}

}  // namespace detail

inline constexpr double kBesselSeriesLimit = 8.0;
inline constexpr double kBesselHankelStart = 25.0;

/// Bessel function of the first kind, order one. Odd extension for x < 0.
inline double bessel_j1(double x) {
  if (x < 0) return -bessel_j1(-x);
  if (x < kBesselSeriesLimit) return detail::j1_series(x);
  if (x < kBesselHankelStart) return detail::j1_trapezoid(x);
  return detail::j1_hankel(x);
}

/// Hankel coefficient a_k for order one.
inline double hankel_coefficient(int k) {
  if (k < 0 || k >= 32) throw std::out_of_range("hankel_coefficient index");
  return detail::hankel_table[static_cast<std::size_t>(k)];
}

/// zeta(s) for s > 1 by Euler-Maclaurin: direct sum to n = 19, integral and
/// endpoint terms, then four Bernoulli corrections at n = 20.
inline double zeta_euler_maclaurin(double s) {
  if (!(s > 1)) throw std::domain_error("zeta_euler_maclaurin needs s > 1");
  constexpr int n = 20;
  double sum = 0;
  for (int k = 1; k < n; ++k) sum += std::pow(k, -s);
  sum += std::pow(n, 1 - s) / (s - 1) + 0.5 * std::pow(n, -s);
  constexpr std::array<double, 4> b2k = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30};
  double rising = s;           // s (s+1) ... (s + 2k - 2)
  double fact = 2;             // (2k)!
  double power = std::pow(n, -s - 1);
  for (int k = 1; k <= 4; ++k) {
    sum += b2k[k - 1] / fact * rising * power;
    rising *= (s + 2 * k - 1) * (s + 2 * k);
    fact *= (2 * k + 1) * (2 * k + 2);
    power /= static_cast<double>(n) * n;
  }
  return sum;
}

inline double zeta_three_halves() { return zeta_euler_maclaurin(1.5); }

/// sum_{n >= a} e(n beta) n^{-s} for s > 1, a >= 1.
///
/// Uses n^{-s} = Gamma(s)^{-1} int_0^inf t^{s-1} e^{-nt} dt, which turns the
/// tail into Gamma(s)^{-1} e(a beta) int t^{s-1} e^{-at} / (1 - e(beta) e^{-t}) dt,
/// and integrates in u = log t with the trapezoid rule. The integrand's
/// singularities lie at Im u = +-pi/2, so the rule converges geometrically
/// for any beta, including beta = 0 where the tail is a Hurwitz zeta tail.
inline Complex lerch_tail(double s, double beta, std::int64_t a) {
  if (!(s > 1)) throw std::domain_error("lerch_tail needs s > 1");
  if (a < 1) throw std::domain_error("lerch_tail needs a >= 1");
  beta -= std::floor(beta);
  if (beta > 0.5) beta -= 1;  // beta in (-1/2, 1/2]
  const double omega = 2 * detail::pi * beta;
  const double cw = std::cos(omega), sw = std::sin(omega);
  const double hs = std::sin(0.5 * omega);
  const double ad = static_cast<double>(a);
  auto integrand = [&](double u) -> Complex {
    const double t = std::exp(u);
    const double et = std::exp(-t);
    // 1 - e^{i omega - t} computed without cancellation for small t and omega
    const Complex denom(-(std::expm1(-t) * cw - 2 * hs * hs), -et * sw);
    return std::exp(s * u - ad * t) / denom;
  };
  constexpr double h = 0.125;
  const double u0 = -std::log(ad);
  Complex sum = integrand(u0);
  double peak = std::abs(sum);
  for (int dir : {1, -1}) {
    for (int j = 1; j < 20000; ++j) {
      const Complex f = integrand(u0 + dir * j * h);
      sum += f;
      const double m = std::abs(f);
      peak = std::max(peak, m);
      if (j > 16 && m < 1e-21 * peak) break;
    }
  }
  // e(a beta) with the phase reduced mod 1 first
  const double phase = a * beta - std::floor(a * beta);
  const Complex twist = std::polar(1.0, 2 * detail::pi * phase);
  return twist * sum * (h / std::tgamma(s));
}

}  // namespace torus
