#pragma once

// Exact lattice point counts N(R) for T, A T and T_Q: a brute-force oracle
// over the bounding box and a slice counter that resolves each horizontal
// z-slice (an annulus) to an interval of s = n1^2 + n2^2.

#include "arithmetic.hpp"
#include "geometry.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <type_traits>
#include <utility>
#include <thread>
#include <variant>
#include <vector>

namespace torus {

struct TorusBody {
  TorusParams params;
};

/// A T for rational invertible A.
struct MappedBody {
  RationalMat3 A;
  TorusParams params;
};

/// T_Q = {(rho' - sqrt(Q(x,y)))^2 + z^2 <= rho^2}.
struct FormBody {
  QuadForm2 Q;
  TorusParams params;
};

using Body = std::variant<TorusBody, MappedBody, FormBody>;

inline const TorusParams& params_of(const Body& body) {
  return std::visit([](const auto& b) -> const TorusParams& { return b.params; }, body);
}

inline std::string describe(const Body& body) {
  return std::visit(
      [](const auto& b) -> std::string {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, TorusBody>) return "torus " + b.params.describe();
        else if constexpr (std::is_same_v<T, MappedBody>) return "A=" + b.A.describe() + " " + b.params.describe();
        else return "Q=" + b.Q.describe() + " " + b.params.describe();
      },
      body);
}

enum class CountMethod { brute, slices };

inline const char* to_string(CountMethod m) { return m == CountMethod::brute ? "brute" : "slices"; }

struct CountResult {
  std::int64_t count = 0;
  Rational R;
  CountMethod method = CountMethod::brute;
  std::string body;
  std::chrono::nanoseconds elapsed{0};
};

struct CountOptions {
  /// Maximum number of box points the brute-force counter will visit.
  BigInt box_limit = BigInt(10'000'000'000LL);
  unsigned workers = 1;
  /// Optional shared r2 table (slice counter for T only).
  const CircleCountTable* table = nullptr;
};

namespace detail {

inline long double to_ld(const i128& v) { return static_cast<long double>(v); }
inline long double to_ld(const BigInt& v) { return v.convert_to<long double>(); }

/// Calls f with the i128 core when no intermediate can overflow, otherwise
/// with the arbitrary-precision core.
template <class F>
auto with_core(const BigCore& core, const BigInt& s_max, const BigInt& z2_max, F&& f) {
  if (core_fits_i128(core, s_max, z2_max)) return f(narrow(core));
  return f(core);
}

/// Sum of fn(i) for i in [0, n) split into contiguous blocks, one per worker.
/// Integer sums, so the result does not depend on the worker count.
template <class Fn>
std::int64_t parallel_sum(std::int64_t n, unsigned workers, Fn&& fn) {
  if (workers <= 1 || n < 2) {
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < n; ++i) total += fn(i);
    return total;
  }
  const auto w = static_cast<std::int64_t>(std::min<std::int64_t>(workers, n));
  std::vector<std::int64_t> partial(static_cast<std::size_t>(w), 0);
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(w));
  {
    std::vector<std::jthread> pool;
    for (std::int64_t k = 0; k < w; ++k)
      pool.emplace_back([&, k] {
        try {
          const std::int64_t lo = n * k / w, hi = n * (k + 1) / w;
          for (std::int64_t i = lo; i < hi; ++i) partial[k] += fn(i);
        } catch (...) {
          errors[k] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::int64_t total = 0;
  for (auto v : partial) total += v;
  return total;
}

inline void check_box(const Box& box, const BigInt& limit) {
  if (box.volume() > limit)
    throw ComputationError("bounding box has " + box.volume().str() + " points, above the limit " + limit.str());
}

/// Largest integer s with pred(s), pred monotone decreasing (true then false),
/// starting from a float estimate.
template <class Int, class Pred>
Int last_true(Int s, Pred&& pred) {
  while (pred(s + 1)) ++s;
  while (!pred(s)) --s;
  return s;
}

/// Smallest integer s with pred(s), pred monotone increasing.
template <class Int, class Pred>
Int first_true(Int s, Pred&& pred) {
  while (pred(s - 1)) --s;
  while (!pred(s)) ++s;
  return s;
}

template <class Int>
Int floor_ld(long double x) {
  return Int(static_cast<long long>(std::floor(x)));
}

/// Integer interval [lo, hi] of s with core.inside(s, z2), or nullopt when
/// empty. Float estimates of the two roots are corrected with the exact
/// predicate; each side is monotone once split at the vertex.
template <class Int>
std::optional<std::pair<Int, Int>> slice_interval(const SquaringCore<Int>& core, const Int& z2) {
  const Int offset = core.slice_offset(z2);
  if (offset > core.alpha) return std::nullopt;  // negative discriminant
  const long double a = to_ld(core.alpha), k = to_ld(offset), g = to_ld(core.gamma);
  const long double centre = (2 * a - k) / g;
  const long double half = 2 * std::sqrt(std::max<long double>(a * (a - k), 0)) / g;
  auto below_or_inside = [&](const Int& s) { return core.at_or_below_vertex(s, offset) || core.inside_offset(s, offset); };
  auto above_or_inside = [&](const Int& s) { return core.at_or_above_vertex(s, offset) || core.inside_offset(s, offset); };
  const Int hi = last_true<Int>(floor_ld<Int>(centre + half), below_or_inside);
  Int lo = first_true<Int>(floor_ld<Int>(centre - half) + 1, above_or_inside);
  if (lo < 0) lo = 0;
  if (lo > hi || !core.inside_offset(lo, offset) || !core.inside_offset(hi, offset)) return std::nullopt;
  return std::make_pair(lo, hi);
}

inline std::int64_t i64(const i128& v) { return static_cast<std::int64_t>(v); }
inline std::int64_t i64(const BigInt& v) { return to_int64(v); }

/// #{(n1, n2) : f(n1, n2) <= T} for a positive definite integral form.
inline std::int64_t form_cumulative(const IntegralForm& f, std::int64_t T) {
  if (T < 0) return 0;
  const i128 a = to_i128(f.a), b = to_i128(f.b), c = to_i128(f.c);
  const i128 disc = 4 * a * c - b * b;
  const auto n1max = isqrt(static_cast<std::int64_t>(4 * c * T / disc));
  std::int64_t count = 0;
  for (std::int64_t x = -n1max; x <= n1max; ++x) {
    auto value = [&](i128 y) { return a * x * x + b * x * y + c * y * y; };
    const long double centre = -static_cast<long double>(b) * x / (2 * static_cast<long double>(c));
    const long double rad = static_cast<long double>(4 * c * T - disc * x * x);
    const long double half = std::sqrt(std::max<long double>(rad, 0)) / (2 * static_cast<long double>(c));
    auto upper_pred = [&](i128 y) { return 2 * c * y <= -b * x || value(y) <= T; };
    auto lower_pred = [&](i128 y) { return 2 * c * y >= -b * x || value(y) <= T; };
    const i128 hi = last_true<i128>(static_cast<i128>(std::floor(centre + half)), upper_pred);
    const i128 lo = first_true<i128>(static_cast<i128>(std::ceil(centre - half)), lower_pred);
    if (lo <= hi && value(lo) <= T) count += static_cast<std::int64_t>(hi - lo + 1);
  }
  return count;
}

template <class Clock = std::chrono::steady_clock>
struct Stopwatch {
  typename Clock::time_point start = Clock::now();
  std::chrono::nanoseconds elapsed() const { return Clock::now() - start; }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

inline CountResult count_bruteforce(const TorusParams& params, const Rational& R, const CountOptions& opt = {}) {
  detail::Stopwatch<> sw;
  const Box box = bounding_box(params, R);
  detail::check_box(box, opt.box_limit);
  const BigCore big = make_core(params, scale_for_radius(R));
  const BigInt s_max = 2 * BigInt(box.hi[0]) * box.hi[0];
  const BigInt z2_max = BigInt(box.hi[2]) * box.hi[2];
  const std::int64_t count = detail::with_core(big, s_max, z2_max, [&](const auto& core) {
    using Int = std::decay_t<decltype(core.alpha)>;
    return detail::parallel_sum(box.hi[2] - box.lo[2] + 1, opt.workers, [&](std::int64_t i) {
      const std::int64_t n3 = box.lo[2] + i;
      const Int offset = core.slice_offset(Int(n3) * n3);
      std::int64_t c = 0;
      for (std::int64_t n1 = box.lo[0]; n1 <= box.hi[0]; ++n1)
        for (std::int64_t n2 = box.lo[1]; n2 <= box.hi[1]; ++n2)
          if (core.inside_offset(Int(n1) * n1 + Int(n2) * n2, offset)) ++c;
      return c;
    });
  });
  return {count, R, CountMethod::brute, describe(Body{TorusBody{params}}), sw.elapsed()};
}

/// Counts n with A^{-1} n / R in T by enumerating the image box. Rational A
/// destroys the annulus structure, so there is no slice variant.
inline CountResult count_mapped(const RationalMat3& A, const TorusParams& params, const Rational& R,
                                const CountOptions& opt = {}) {
  detail::Stopwatch<> sw;
  const Box box = bounding_box(A, params, R);
  detail::check_box(box, opt.box_limit);
  const IntegralInverse inv = integral_inverse(A);
  const BigCore big = make_core(params, scale_for_mapped(R, inv.delta));
  BigInt vmax = 0;
  for (int i = 0; i < 3; ++i) {
    BigInt row = 0;
    for (int j = 0; j < 3; ++j) row += boost::multiprecision::abs(inv.b[i][j]) * box.hi[j];
    vmax = std::max(vmax, row);
  }
  const BigInt s_max = 2 * vmax * vmax;
  const std::int64_t count = detail::with_core(big, s_max, vmax * vmax, [&](const auto& core) {
    using Int = std::decay_t<decltype(core.alpha)>;
    std::array<std::array<Int, 3>, 3> b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        if constexpr (std::is_same_v<Int, BigInt>) b[i][j] = inv.b[i][j];
        else b[i][j] = to_i128(inv.b[i][j]);
      }
    return detail::parallel_sum(box.hi[2] - box.lo[2] + 1, opt.workers, [&](std::int64_t i) {
      const Int n3 = Int(box.lo[2] + i);
      std::int64_t c = 0;
      for (std::int64_t x = box.lo[0]; x <= box.hi[0]; ++x) {
        const Int n1 = Int(x);
        for (std::int64_t y = box.lo[1]; y <= box.hi[1]; ++y) {
          const Int n2 = Int(y);
          const Int v0 = b[0][0] * n1 + b[0][1] * n2 + b[0][2] * n3;
          const Int v1 = b[1][0] * n1 + b[1][1] * n2 + b[1][2] * n3;
          const Int v2 = b[2][0] * n1 + b[2][1] * n2 + b[2][2] * n3;
          if (core.inside(v0 * v0 + v1 * v1, v2 * v2)) ++c;
        }
      }
      return c;
    });
  });
  return {count, R, CountMethod::brute, describe(Body{MappedBody{A, params}}), sw.elapsed()};
}

inline CountResult count_q_bruteforce(const QuadForm2& Q, const TorusParams& params, const Rational& R,
                                      const CountOptions& opt = {}) {
  detail::Stopwatch<> sw;
  const Box box = bounding_box(Q, params, R);
  detail::check_box(box, opt.box_limit);
  const IntegralForm f = integral_form(Q);
  const BigCore big = make_core(params, scale_for_form(R, f.e));
  const BigInt extent = std::max(box.hi[0], box.hi[1]);
  const BigInt s_max = (boost::multiprecision::abs(f.a) + boost::multiprecision::abs(f.b) + boost::multiprecision::abs(f.c)) * extent * extent;
  const BigInt z2_max = f.e * box.hi[2] * box.hi[2];
  const std::int64_t count = detail::with_core(big, s_max, z2_max, [&](const auto& core) {
    using Int = std::decay_t<decltype(core.alpha)>;
    Int a, b, c, e;
    if constexpr (std::is_same_v<Int, BigInt>) {
      a = f.a; b = f.b; c = f.c; e = f.e;
    } else {
      a = to_i128(f.a); b = to_i128(f.b); c = to_i128(f.c); e = to_i128(f.e);
    }
    return detail::parallel_sum(box.hi[2] - box.lo[2] + 1, opt.workers, [&](std::int64_t i) {
      const Int n3 = Int(box.lo[2] + i);
      const Int offset = core.slice_offset(e * n3 * n3);
      std::int64_t cnt = 0;
      for (std::int64_t x = box.lo[0]; x <= box.hi[0]; ++x)
        for (std::int64_t y = box.lo[1]; y <= box.hi[1]; ++y) {
          const Int n1 = Int(x), n2 = Int(y);
          if (core.inside_offset(a * n1 * n1 + b * n1 * n2 + c * n2 * n2, offset)) ++cnt;
        }
      return cnt;
    });
  });
  return {count, R, CountMethod::brute, describe(Body{FormBody{Q, params}}), sw.elapsed()};
}

inline CountResult count_bruteforce(const Body& body, const Rational& R, const CountOptions& opt = {}) {
  return std::visit(
      [&](const auto& b) -> CountResult {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, TorusBody>) return count_bruteforce(b.params, R, opt);
        else if constexpr (std::is_same_v<T, MappedBody>) return count_mapped(b.A, b.params, R, opt);
        else return count_q_bruteforce(b.Q, b.params, R, opt);
      },
      body);
}

// ---------------------------------------------------------------------------
// Slice counters
// ---------------------------------------------------------------------------

/// For each |n3| <= rho R the slice is s in [(rho'R - w)^2, (rho'R + w)^2],
/// w = sqrt(rho^2 R^2 - n3^2); its points are C(s_hi) - C(s_lo - 1) with C the
/// cumulative circle count.
inline CountResult count_slices(const TorusParams& params, const Rational& R, const CountOptions& opt = {}) {
  detail::Stopwatch<> sw;
  const Box box = bounding_box(params, R);
  const BigCore big = make_core(params, scale_for_radius(R));
  const BigInt s_max = 2 * BigInt(box.hi[0] + 2) * (box.hi[0] + 2);
  const BigInt z2_max = BigInt(box.hi[2]) * box.hi[2];
  const CircleCountTable* table = opt.table;
  auto cumulative = [table](std::int64_t T) { return table ? table->cumulative(T) : circle_count(T); };
  const std::int64_t count = detail::with_core(big, s_max, z2_max, [&](const auto& core) {
    using Int = std::decay_t<decltype(core.alpha)>;
    return detail::parallel_sum(box.hi[2] - box.lo[2] + 1, opt.workers, [&](std::int64_t i) -> std::int64_t {
      const std::int64_t n3 = box.lo[2] + i;
      const auto range = detail::slice_interval(core, Int(n3) * n3);
      if (!range) return 0;
      return cumulative(detail::i64(range->second)) - cumulative(detail::i64(range->first) - 1);
    });
  });
  return {count, R, CountMethod::slices, describe(Body{TorusBody{params}}), sw.elapsed()};
}

/// T_Q slices: s = eQ(n1, n2) ranges over an interval per n3, counted by
/// solving the quadratic in n2 exactly for each n1.
inline CountResult count_q(const QuadForm2& Q, const TorusParams& params, const Rational& R,
                           const CountOptions& opt = {}) {
  detail::Stopwatch<> sw;
  const Box box = bounding_box(Q, params, R);
  const IntegralForm f = integral_form(Q);
  const BigCore big = make_core(params, scale_for_form(R, f.e));
  const BigInt e_outer = floor(params.outer_radius_bound() * R) + 2;
  const BigInt s_max = 2 * f.e * e_outer * e_outer;
  const BigInt z2_max = f.e * box.hi[2] * box.hi[2];
  const std::int64_t count = detail::with_core(big, s_max, z2_max, [&](const auto& core) {
    using Int = std::decay_t<decltype(core.alpha)>;
    Int e;
    if constexpr (std::is_same_v<Int, BigInt>) e = f.e;
    else e = to_i128(f.e);
    return detail::parallel_sum(box.hi[2] - box.lo[2] + 1, opt.workers, [&](std::int64_t i) -> std::int64_t {
      const Int n3 = Int(box.lo[2] + i);
      const auto range = detail::slice_interval(core, Int(e * n3 * n3));
      if (!range) return 0;
      return detail::form_cumulative(f, detail::i64(range->second)) -
             detail::form_cumulative(f, detail::i64(range->first) - 1);
    });
  });
  return {count, R, CountMethod::slices, describe(Body{FormBody{Q, params}}), sw.elapsed()};
}

/// Dispatch by body; A T always uses the box enumeration.
inline CountResult count(const Body& body, const Rational& R, CountMethod method, const CountOptions& opt = {}) {
  if (method == CountMethod::brute) return count_bruteforce(body, R, opt);
  return std::visit(
      [&](const auto& b) -> CountResult {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, TorusBody>) return count_slices(b.params, R, opt);
        else if constexpr (std::is_same_v<T, MappedBody>) return count_mapped(b.A, b.params, R, opt);
        else return count_q(b.Q, b.params, R, opt);
      },
      body);
}

}  // namespace torus
