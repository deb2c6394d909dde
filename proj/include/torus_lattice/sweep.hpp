#pragma once

// Discrepancy records E(R) = N(R) - M(R), deterministic parallel sweeps over
// R grids, and the envelope exponent fit.

#include "counting.hpp"
#include "mainterm.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace torus {

struct SweepRecord {
  Rational R;
  std::int64_t count = 0;
  double mainterm = 0;
  double discrepancy = 0;  // count - mainterm
  std::chrono::nanoseconds elapsed{0};
  std::string error;       // nonempty when the record failed

  bool ok() const { return error.empty(); }
};

struct DiscrepancyOptions {
  double tol = 1e-4;
  /// Use only the volume term as the main term.
  bool drop_secondary = false;
  const CircleCountTable* table = nullptr;
  BigInt box_limit = BigInt(10'000'000'000LL);
};

inline SweepRecord discrepancy(const Body& body, const Rational& R, const DiscrepancyOptions& opt = {}) {
  if (!params_of(body).exact_mode()) throw ComputationError("discrepancy needs exact mode parameters");
  if (!(opt.tol > 0) || opt.tol > 1e-4) throw std::invalid_argument("discrepancy needs 0 < tol <= 1e-4");
  const auto start = std::chrono::steady_clock::now();
  CountOptions copt;
  copt.table = opt.table;
  copt.box_limit = opt.box_limit;
  SweepRecord rec;
  rec.R = R;
  rec.count = count(body, R, CountMethod::slices, copt).count;
  const double r = to_double(R);
  rec.mainterm = opt.drop_secondary ? leading_term(body, r) : main_term(body, r, opt.tol).value;
  rec.discrepancy = static_cast<double>(rec.count) - rec.mainterm;
  rec.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start);
  return rec;
}

/// R = k / rho for integer k, R_min <= R <= R_max; when more than `samples`
/// values qualify every step-th one is kept.
inline std::vector<Rational> aligned_grid(const Rational& rho, const Rational& r_min, const Rational& r_max,
                                          std::int64_t samples = 0) {
  if (rho <= 0) throw std::invalid_argument("aligned grid needs rho > 0");
  if (r_max < r_min) throw std::invalid_argument("grid needs r_min <= r_max");
  BigInt k0 = ceil(rho * r_min), k1 = floor(rho * r_max);
  if (k0 < 1) k0 = 1;
  std::vector<Rational> out;
  if (k1 < k0) return out;
  const BigInt total = k1 - k0 + 1;
  BigInt step = 1;
  if (samples > 0 && total > samples) step = (total + samples - 1) / samples;
  for (BigInt k = k0; k <= k1; k += step) out.push_back(Rational(k) / rho);
  return out;
}

/// samples equally spaced rationals from r_min to r_max inclusive.
inline std::vector<Rational> linear_grid(const Rational& r_min, const Rational& r_max, std::int64_t samples) {
  if (samples < 1) throw std::invalid_argument("grid needs samples >= 1");
  if (r_max < r_min || r_min <= 0) throw std::invalid_argument("grid needs 0 < r_min <= r_max");
  if (samples == 1) return {r_min};
  std::vector<Rational> out;
  out.reserve(static_cast<std::size_t>(samples));
  const Rational step = (r_max - r_min) / Rational(samples - 1);
  for (std::int64_t i = 0; i < samples; ++i) out.push_back(r_min + step * Rational(i));
  return out;
}

struct SweepOptions {
  DiscrepancyOptions record;
  unsigned workers = 1;
  /// Largest r2 table built for torus sweeps (entries).
  std::int64_t table_limit = 50'000'000;
  std::function<void(std::size_t done, std::size_t total)> progress;
};

/// Records sorted by R; each record is computed by one worker, so the output
/// does not depend on the worker count.
inline std::vector<SweepRecord> sweep(const Body& body, std::vector<Rational> grid, const SweepOptions& opt = {}) {
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<SweepRecord> out(grid.size());
  if (grid.empty()) return out;

  DiscrepancyOptions ropt = opt.record;
  std::unique_ptr<CircleCountTable> table;
  if (!ropt.table && std::holds_alternative<TorusBody>(body) && params_of(body).exact_mode()) {
    const Rational outer = params_of(body).outer_radius_bound() * grid.back();
    const BigInt limit = floor(outer * outer) + 1;
    if (limit <= opt.table_limit) {
      table = std::make_unique<CircleCountTable>(to_int64(limit));
      ropt.table = table.get();
    }
  }

  std::atomic<std::size_t> next{0}, done{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < grid.size();) {
      try {
        out[i] = discrepancy(body, grid[i], ropt);
      } catch (const std::exception& e) {
        out[i] = SweepRecord{};
        out[i].R = grid[i];
        out[i].error = e.what();
      }
      const std::size_t d = ++done;
      if (opt.progress) opt.progress(d, grid.size());
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(opt.workers, static_cast<unsigned>(grid.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  return out;
}

struct ExponentFit {
  double slope = 0;
  double intercept = 0;
  std::int64_t points_used = 0;
  double window = 1.3;
};

/// Running maximum of |E| over [R, window R], for every R whose full window
/// lies inside the data. Each maximum is placed at the R where it is attained
/// (distinct points only), then least squares of log|E| on log R.
inline ExponentFit envelope_exponent(const std::vector<double>& R, const std::vector<double>& absE, double window = 1.3) {
  if (R.size() != absE.size()) throw std::invalid_argument("envelope_exponent: size mismatch");
  if (R.size() < 20) throw std::invalid_argument("envelope_exponent needs at least 20 records");
  if (!(window > 1)) throw std::invalid_argument("envelope window must exceed 1");
  std::vector<std::size_t> idx(R.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return R[a] < R[b]; });
  const double rmax = R[idx.back()];
  constexpr double slack = 1e-12;

  std::vector<double> xs, ys;
  std::size_t last = idx.size();
  for (std::size_t a = 0; a < idx.size(); ++a) {
    const double r = R[idx[a]];
    if (!(r > 0)) throw std::invalid_argument("envelope_exponent needs R > 0");
    const double top = window * r;
    if (top > rmax * (1 + slack)) break;
    std::size_t arg = a;
    for (std::size_t b = a; b < idx.size() && R[idx[b]] <= top * (1 + slack); ++b)
      if (std::abs(absE[idx[b]]) > std::abs(absE[idx[arg]])) arg = b;
    if (arg == last || !(std::abs(absE[idx[arg]]) > 0)) continue;
    last = arg;
    xs.push_back(std::log(R[idx[arg]]));
    ys.push_back(std::log(std::abs(absE[idx[arg]])));
  }
  if (xs.size() < 3) throw std::invalid_argument("envelope_exponent: too few envelope points");

  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0)) throw std::invalid_argument("envelope_exponent: degenerate R range");
  ExponentFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points_used = static_cast<std::int64_t>(xs.size());
  fit.window = window;
  return fit;
}

/// Failed records are skipped.
inline ExponentFit envelope_exponent(const std::vector<SweepRecord>& records, double window = 1.3) {
  std::vector<double> R, E;
  for (const auto& r : records) {
    if (!r.ok()) continue;
    R.push_back(to_double(r.R));
    E.push_back(std::abs(r.discrepancy));
  }
  return envelope_exponent(R, E, window);
}

}  // namespace torus
