#pragma once

// Psi(t, u): Fourier transform of the torus indicator at a frequency with
// |(xi1, xi2)|^2 = t and xi3 = u, written as a single theta integral, and its
// large-(t, u) stationary phase approximation.

#include "geometry.hpp"
#include "special.hpp"

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace torus {

struct PsiEval {
  double t = 0, u = 0;
  double ell = 0;            // sqrt(t + u^2)
  double quad_value = 0;
  double imag_value = 0;     // vanishes by the z -> -z symmetry
  double stat_value = NAN;   // filled by psi_compare
  std::int64_t nodes = 0;
  double node_doubling_delta = 0;
  bool under_resolved = false;
};

namespace detail {

/// Periodic trapezoid sum of the Psi integrand for rho' = 1.
inline Complex psi_trapezoid(double rho, double t, double u, std::int64_t nodes) {
  const double st = std::sqrt(t);
  double re = 0, im = 0;
  for (std::int64_t j = 0; j < nodes; ++j) {
    const double th = 2 * pi * static_cast<double>(j) / static_cast<double>(nodes);
    const double s = std::sin(th), c = std::cos(th);
    const double r = 1 + rho * s;
    const double f = r * s * bessel_j1(2 * pi * r * st);
    re += f * std::cos(2 * pi * rho * u * c);
    im += f * std::sin(2 * pi * rho * u * c);
  }
  const double w = (rho / st) * 2 * pi / static_cast<double>(nodes);
  return {re * w, im * w};
}

inline void require_unit_rho_prime(const TorusParams& params) {
  if (params.rho_prime() != 1.0) throw std::invalid_argument("psi routines take rho' = 1; rescale first");
}

}  // namespace detail

/// nodes = 64 + 8 ceil((1 + rho) sqrt t + rho |u|): at least eight nodes per
/// oscillation of the fastest phase.
inline std::int64_t psi_node_rule(double rho, double t, double u) {
  return 64 + 8 * static_cast<std::int64_t>(std::ceil((1 + rho) * std::sqrt(t) + rho * std::abs(u)));
}

inline PsiEval psi_quadrature(const TorusParams& params, double t, double u, std::int64_t nodes) {
  detail::require_unit_rho_prime(params);
  if (!(t > 0)) throw std::invalid_argument("psi_quadrature needs t > 0");
  if (nodes < 64) throw std::invalid_argument("psi_quadrature needs nodes >= 64");
  const double rho = params.rho();
  PsiEval e;
  e.t = t;
  e.u = u;
  e.ell = std::sqrt(t + u * u);
  e.nodes = nodes;
  const Complex q = detail::psi_trapezoid(rho, t, u, nodes);
  const Complex q2 = detail::psi_trapezoid(rho, t, u, 2 * nodes);
  e.quad_value = q2.real();
  e.imag_value = q2.imag();
  e.node_doubling_delta = std::abs(q2.real() - q.real());
  e.under_resolved = e.node_doubling_delta > 1e-8 * (1 + std::abs(e.quad_value));
  return e;
}

/// Node rule, then doubling until the delta test passes (at most max_doublings).
inline PsiEval psi_quadrature(const TorusParams& params, double t, double u, int max_doublings = 6) {
  std::int64_t nodes = psi_node_rule(params.rho(), t, u);
  PsiEval e = psi_quadrature(params, t, u, nodes);
  for (int k = 0; k < max_doublings && e.under_resolved; ++k) e = psi_quadrature(params, t, u, nodes *= 2);
  return e;
}

/// T(t, u) = (l + rho sqrt t)^{1/2} cos(2 pi (rho l + sqrt t)) - (l - rho sqrt t)^{1/2} sin(2 pi (rho l - sqrt t)).
inline double psi_T(double rho, double t, double u) {
  const double l = std::sqrt(t + u * u), st = std::sqrt(t);
  return std::sqrt(l + rho * st) * std::cos(2 * detail::pi * (rho * l + st)) -
         std::sqrt(l - rho * st) * std::sin(2 * detail::pi * (rho * l - st));
}

/// Constant of the stationary phase formula. Two stationary points
/// theta = +-theta_tu contribute equally; with the amplitude
/// (l + rho sqrt t)^{1/2} t^{1/2} l^{-3/2}, the prefactor rho / (pi t^{3/4})
/// and the stationary phase factor rho^{-1/2} l^{-1/2}, the J1 asymptotic
/// sqrt(2/pi y) at y = 2 pi r sqrt t and the sqrt(2 pi / phi'') of the theta
/// integral combine to 2 * (1/pi) * (1/2) with the overall sign of the
/// sin(theta) weight, giving -1/pi.
inline double psi_stationary_constant() { return -1 / detail::pi; }

inline double psi_envelope(double rho, double t, double u) {
  const double l = std::sqrt(t + u * u);
  return std::sqrt(rho) * std::pow(t, -0.25) / (l * l);
}

/// C rho^{1/2} t^{-1/4} l^{-2} T(t, u).
inline double psi_stationary(const TorusParams& params, double t, double u) {
  detail::require_unit_rho_prime(params);
  if (t < 1 || std::abs(u) < 1) throw std::invalid_argument("psi_stationary needs t >= 1 and |u| >= 1");
  const double rho = params.rho();
  return psi_stationary_constant() * psi_envelope(rho, t, std::abs(u)) * psi_T(rho, t, std::abs(u));
}

/// Error envelope of the stationary phase formula:
/// rho^{1/2} t^{-1/4} l^{-2} t^{-1/2} l^{1/2} + t^{-5/4}.
inline double psi_error_envelope(double rho, double t, double u) {
  const double l = std::sqrt(t + u * u);
  return psi_envelope(rho, t, u) * std::sqrt(l / t) + std::pow(t, -1.25);
}

/// Excludes near-zeros of T, where relative errors are meaningless.
inline bool psi_comparable(double rho, double t, double u) {
  const double l = std::sqrt(t + u * u);
  return std::abs(psi_T(rho, t, u)) >= 0.1 * std::sqrt(l + rho * std::sqrt(t));
}

/// Psi for general rho': Psi_{rho, rho'}(t, u) = rho'^3 Psi_{rho/rho', 1}(rho'^2 t, rho' u).
struct PsiRescaled {
  TorusParams unit;
  double t, u, factor;
};

inline PsiRescaled psi_rescale(const TorusParams& params, double t, double u) {
  const double l = params.rho_prime();
  TorusParams unit = params.rational_radii()
                         ? TorusParams::exact(params.rho_exact() / params.rho_prime_exact(), Rational(1))
                         : TorusParams::approximate(params.rho() / l, 1.0);
  return {unit, l * l * t, l * u, l * l * l};
}

inline PsiEval psi_compare(const TorusParams& params, double t, double u) {
  const PsiRescaled r = psi_rescale(params, t, u);
  PsiEval e = psi_quadrature(r.unit, r.t, r.u);
  e.quad_value *= r.factor;
  e.imag_value *= r.factor;
  e.node_doubling_delta *= r.factor;
  e.stat_value = r.factor * psi_stationary(r.unit, r.t, r.u);
  e.t = t;
  e.u = u;
  e.ell = std::sqrt(t + u * u);
  return e;
}

}  // namespace torus
