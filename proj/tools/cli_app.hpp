#pragma once

// torus-lattice command line: parses into a RunConfig, then executes it.
// Exit codes: 0 ok, 1 usage or invalid body, 2 computation error.

#include "torus_lattice/torus_lattice.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

namespace torus::cli {

struct RunConfig {
  std::string subcommand;

  // body; rationals kept as the user's strings so the config round-trips exactly
  std::string rho, rho_prime = "1";
  std::string A;      // "a11,...,a33", row major
  std::string Qform;  // "a,b,c" for a x^2 + b xy + c y^2

  std::string R;
  std::string method = "slices";
  double tol = 0;  // 0: 1e-8 for mainterm, 1e-4 for sweep

  std::string r_min, r_max;
  std::int64_t samples = 0;
  bool aligned = false;
  std::string out, in;
  unsigned workers = 0;  // 0: use --threads
  double window = 1.3;
  bool drop_secondary = false;

  double t = 0, u = 0;
  std::int64_t nodes = 0;
  bool compare = false;

  double expsum_R = 0, expsum_rho = 0.5, theta = 0;
  std::int64_t M = 1, N = 1;
  std::string sign = "plus", kind = "sup";

  std::int64_t m = -1;
  std::string cumulative;
  std::int64_t q = 0, c1 = 0, c2 = 0;

  unsigned threads = 1;
  std::uint64_t seed = 0;  // reserved: every computation is deterministic
  bool json = false, timing = false;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE_WITH_DEFAULT(RunConfig, subcommand, rho, rho_prime, A, Qform, R, method, tol,
                                                r_min, r_max, samples, aligned, out, in, workers, window,
                                                drop_secondary, t, u, nodes, compare, expsum_R, expsum_rho, theta, M,
                                                N, sign, kind, m, cumulative, q, c1, c2, threads, seed, json, timing)

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline std::vector<Rational> parse_list(const std::string& s, std::size_t expected, const char* what) {
  std::vector<Rational> v;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) v.push_back(parse_rational(item));
  if (v.size() != expected)
    throw UsageError(std::string(what) + " needs " + std::to_string(expected) + " comma-separated rationals");
  return v;
}

inline TorusParams parse_params(const RunConfig& c) {
  if (c.rho.empty()) throw UsageError("--rho is required");
  return TorusParams::exact(parse_rational(c.rho), parse_rational(c.rho_prime));
}

/// Body from the config; constructors reject invalid data naming the invariant.
inline Body parse_body(const RunConfig& c) {
  const TorusParams p = parse_params(c);
  if (!c.A.empty() && !c.Qform.empty()) throw UsageError("--A and --Qform are mutually exclusive");
  if (!c.A.empty()) {
    const auto v = parse_list(c.A, 9, "--A");
    Mat3 m;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = v[static_cast<std::size_t>(3 * i + j)];
    return MappedBody{RationalMat3(m), p};
  }
  if (!c.Qform.empty()) {
    const auto v = parse_list(c.Qform, 3, "--Qform");
    return FormBody{QuadForm2(v[0], v[1], v[2]), p};
  }
  return TorusBody{p};
}

inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::int64_t millis(std::chrono::nanoseconds ns, bool timing) {
  return timing ? std::chrono::duration_cast<std::chrono::milliseconds>(ns).count() : 0;
}

/// Writes CSV rows, or one JSON object per row with --json.
class RowWriter {
 public:
  RowWriter(std::ostream& os, std::vector<std::string> header, bool json)
      : os_(os), header_(std::move(header)), json_(json) {
    if (!json_) os_ << join(header_) << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    if (!json_) {
      os_ << join(cells) << '\n';
      return;
    }
    nlohmann::ordered_json j;
    for (std::size_t i = 0; i < header_.size(); ++i) j[header_[i]] = cells[i];
    os_ << j.dump() << '\n';
  }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
  }

  std::ostream& os_;
  std::vector<std::string> header_;
  bool json_;
};

inline unsigned workers_of(const RunConfig& c) { return std::max(1u, c.workers ? c.workers : c.threads); }

inline int run_count(const RunConfig& c, std::ostream& out) {
  const Body body = parse_body(c);
  if (c.R.empty()) throw UsageError("--R is required");
  if (c.method != "slices" && c.method != "brute") throw UsageError("--method must be slices or brute");
  CountOptions opt;
  opt.workers = workers_of(c);
  const CountResult r =
      count(body, parse_rational(c.R), c.method == "brute" ? CountMethod::brute : CountMethod::slices, opt);
  RowWriter w(out, {"R", "count", "method", "millis"}, c.json);
  w.row({to_string(r.R), std::to_string(r.count), to_string(r.method), std::to_string(millis(r.elapsed, c.timing))});
  return 0;
}

inline int run_mainterm(const RunConfig& c, std::ostream& out) {
  const Body body = parse_body(c);
  if (c.R.empty()) throw UsageError("--R is required");
  const Rational R = parse_rational(c.R);
  if (R <= 0) throw UsageError("--R must be positive");
  const MainTermResult m = main_term(body, to_double(R), c.tol > 0 ? c.tol : 1e-8);
  RowWriter w(out, {"R", "leading", "secondary", "value", "nmax"}, c.json);
  w.row({to_string(R), fmt(m.leading), fmt(m.secondary), fmt(m.value), std::to_string(m.nmax)});
  return 0;
}

inline std::vector<std::string> record_cells(const SweepRecord& r, bool timing) {
  return {to_string(r.R), std::to_string(r.count), fmt(r.mainterm), fmt(r.discrepancy),
          std::to_string(millis(r.elapsed, timing))};
}

inline int run_sweep(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Body body = parse_body(c);
  if (c.r_min.empty() || c.r_max.empty()) throw UsageError("--r-min and --r-max are required");
  const Rational lo = parse_rational(c.r_min), hi = parse_rational(c.r_max);
  std::vector<Rational> grid;
  if (c.aligned) {
    grid = aligned_grid(params_of(body).rho_exact(), lo, hi, c.samples);
  } else {
    if (c.samples < 1) throw UsageError("--samples is required without --aligned");
    grid = linear_grid(lo, hi, c.samples);
  }
  if (grid.empty()) throw UsageError("empty R grid");
  SweepOptions opt;
  opt.record.tol = c.tol > 0 ? c.tol : 1e-4;
  opt.workers = workers_of(c);
  std::mutex progress_mutex;
  const std::size_t every = std::max<std::size_t>(1, grid.size() / 10);
  opt.progress = [&](std::size_t done, std::size_t total) {
    if (done % every != 0 && done != total) return;
    std::lock_guard lock(progress_mutex);
    err << "sweep: " << done << "/" << total << "\n";
  };
  const auto records = sweep(body, grid, opt);

  std::ofstream file;
  if (!c.out.empty()) {
    file.open(c.out);
    if (!file) throw ComputationError("cannot open " + c.out);
  }
  std::ostream& os = c.out.empty() ? out : file;
  RowWriter w(os, {"R", "count", "mainterm", "discrepancy", "millis"}, c.json);
  int failed = 0;
  for (const auto& r : records) {
    if (!r.ok()) {
      err << "record R=" << to_string(r.R) << " failed: " << r.error << "\n";
      ++failed;
      continue;
    }
    w.row(record_cells(r, c.timing));
  }
  return failed ? 2 : 0;
}

struct CsvColumns {
  std::vector<std::string> names;
  std::vector<std::vector<std::string>> rows;

  std::size_t index(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == name) return i;
    throw UsageError("input CSV has no column " + name);
  }
};

inline CsvColumns read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  CsvColumns csv;
  auto split = [](const std::string& line) {
    std::vector<std::string> v;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) v.push_back(cell);
    return v;
  };
  std::string line;
  if (!std::getline(in, line)) throw UsageError(path + " is empty");
  csv.names = split(line);
  while (std::getline(in, line))
    if (!line.empty()) csv.rows.push_back(split(line));
  return csv;
}

inline int run_fit(const RunConfig& c, std::ostream& out) {
  if (c.in.empty()) throw UsageError("--in is required");
  const CsvColumns csv = read_csv(c.in);
  const std::size_t iR = csv.index("R");
  std::optional<Body> body;
  std::size_t iE = 0, iN = 0;
  if (c.drop_secondary) {
    body = parse_body(c);
    iN = csv.index("count");
  } else {
    iE = csv.index("discrepancy");
  }
  std::vector<double> R, E;
  for (const auto& row : csv.rows) {
    const Rational r = parse_rational(row.at(iR));
    R.push_back(to_double(r));
    if (body) E.push_back(std::abs(std::stod(row.at(iN)) - leading_term(*body, to_double(r))));
    else E.push_back(std::abs(std::stod(row.at(iE))));
  }
  const ExponentFit f = envelope_exponent(R, E, c.window);
  RowWriter w(out, {"slope", "intercept", "points"}, c.json);
  w.row({fmt(f.slope), fmt(f.intercept), std::to_string(f.points_used)});
  return 0;
}

inline int run_psi(const RunConfig& c, std::ostream& out) {
  const TorusParams p = parse_params(c);
  if (!(c.t > 0)) throw UsageError("--t must be positive");
  PsiEval e;
  if (c.compare) {
    e = psi_compare(p, c.t, c.u);
  } else {
    const PsiRescaled r = psi_rescale(p, c.t, c.u);
    e = c.nodes ? psi_quadrature(r.unit, r.t, r.u, c.nodes) : psi_quadrature(r.unit, r.t, r.u);
    e.quad_value *= r.factor;
    e.t = c.t, e.u = c.u;
  }
  const double rel = std::abs(e.stat_value - e.quad_value) / std::abs(e.quad_value);
  RowWriter w(out, {"t", "u", "quad", "stat", "rel_err", "nodes"}, c.json);
  w.row({fmt(e.t), fmt(e.u), fmt(e.quad_value), c.compare ? fmt(e.stat_value) : "", c.compare ? fmt(rel) : "",
         std::to_string(e.nodes)});
  return 0;
}

inline int run_expsum(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.M < 1 || c.N < 1) throw UsageError("--M and --N must be positive");
  ExpSumResult r;
  if (c.kind == "S") {
    r = exp_sum_S(c.expsum_R, c.expsum_rho, c.theta, c.M, c.N);
  } else if (c.kind == "sup") {
    r = exp_sum_weighted_sup(c.expsum_R, c.expsum_rho, parse_sign(c.sign), c.M, c.N);
    if (r.outside_recommended) err << "warning: M or N outside the recommended range M <= R^{4/3}, N <= R^{2/3}\n";
  } else {
    throw UsageError("--kind must be sup or S");
  }
  RowWriter w(out, {"M", "N", "R", "rho", "theta", "sign", "value", "bound_ratio", "trivial_bound"}, c.json);
  w.row({std::to_string(r.M), std::to_string(r.N), fmt(r.R), fmt(r.rho), fmt(r.theta), to_string(r.sign),
         fmt(r.value), fmt(r.bound_ratio), fmt(r.trivial_bound)});
  return 0;
}

inline int run_r2(const RunConfig& c, std::ostream& out) {
  if (!c.cumulative.empty()) {
    out << r2_cumulative(parse_rational(c.cumulative)) << "\n";
    return 0;
  }
  if (c.m < 0) throw UsageError("--m or --cumulative is required");
  if (!c.Qform.empty()) {
    const auto v = parse_list(c.Qform, 3, "--Qform");
    out << rq(QuadForm2(v[0], v[1], v[2]), c.m) << "\n";
  } else if (c.q > 0) {
    out << r2_restricted(c.m, make_residue_class(c.c1, c.c2, 0, c.q)) << "\n";
  } else {
    out << r2(c.m) << "\n";
  }
  return 0;
}

inline int run_ra(const RunConfig& c, std::ostream& out) {
  if (c.A.empty()) throw UsageError("--A is required");
  const auto v = parse_list(c.A, 9, "--A");
  Mat3 m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = v[static_cast<std::size_t>(3 * i + j)];
  out << to_string(r_A(RationalMat3(m))) << "\n";
  return 0;
}

inline int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
  if (c.subcommand == "count") return run_count(c, out);
  if (c.subcommand == "mainterm") return run_mainterm(c, out);
  if (c.subcommand == "sweep") return run_sweep(c, out, err);
  if (c.subcommand == "fit") return run_fit(c, out);
  if (c.subcommand == "psi") return run_psi(c, out);
  if (c.subcommand == "expsum") return run_expsum(c, out, err);
  if (c.subcommand == "r2") return run_r2(c, out);
  if (c.subcommand == "ra") return run_ra(c, out);
  throw UsageError("unknown subcommand " + c.subcommand);
}

inline constexpr const char* kRationalHelp = "rational: p/q, integer, or exact decimal (0.1 = 1/10)";

inline void add_body(CLI::App* sc, RunConfig& c, bool required = true) {
  auto* o = sc->add_option("--rho", c.rho, std::string("tube radius rho; ") + kRationalHelp);
  if (required) o->required();
  sc->add_option("--rho-prime", c.rho_prime, std::string("central radius rho' (default 1); ") + kRationalHelp);
  sc->add_option("--A", c.A, "rational matrix A, nine comma-separated entries, row major");
  sc->add_option("--Qform", c.Qform, "binary form a,b,c meaning a x^2 + b xy + c y^2");
}

/// Parses argv into a config. Returns an exit code when parsing already
/// finished the run (help, version, usage error).
inline std::optional<int> parse(int argc, const char* const* argv, RunConfig& c, std::ostream& out,
                                std::ostream& err) {
  CLI::App app{"Exact lattice point counts in scaled solid tori, main terms and exponential sums"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("torus-lattice ") + TORUS_LATTICE_VERSION);
  app.add_option("--threads", c.threads, "worker threads (count, sweep)")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "reserved; all computations are deterministic");
  app.add_flag("--json", c.json, "emit one JSON object per row instead of CSV");
  app.add_flag("--timing", c.timing, "fill the millis column (default 0 for reproducible output)");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "print the parsed configuration as JSON and exit");

  auto* count = app.add_subcommand("count", "N(R): prints R,count,method,millis");
  add_body(count, c);
  count->add_option("--R", c.R, std::string("scale R; ") + kRationalHelp)->required();
  count->add_option("--method", c.method, "slices|brute (A always enumerates the box)")
      ->check(CLI::IsMember({"slices", "brute"}));

  auto* mt = app.add_subcommand("mainterm", "M(R): prints R,leading,secondary,value,nmax");
  add_body(mt, c);
  mt->add_option("--R", c.R, std::string("scale R; ") + kRationalHelp)->required();
  mt->add_option("--tol", c.tol, "absolute tolerance on M(R) (default 1e-8)");

  auto* sw = app.add_subcommand("sweep", "E(R) over a grid: prints R,count,mainterm,discrepancy,millis");
  add_body(sw, c);
  sw->add_option("--r-min", c.r_min, std::string("smallest R; ") + kRationalHelp)->required();
  sw->add_option("--r-max", c.r_max, std::string("largest R; ") + kRationalHelp)->required();
  sw->add_option("--samples", c.samples, "number of grid points (aligned: upper bound, by subsampling)");
  sw->add_flag("--aligned", c.aligned, "grid R = k / rho, k integer");
  sw->add_option("--out", c.out, "CSV output path (default stdout)");
  sw->add_option("--workers", c.workers, "parallel records (default --threads)");
  sw->add_option("--tol", c.tol, "absolute main term tolerance, at most 1e-4 (default 1e-4)");

  auto* fit = app.add_subcommand("fit", "envelope exponent of |E|: prints slope,intercept,points");
  fit->add_option("--in", c.in, "sweep CSV")->required();
  fit->add_option("--window", c.window, "envelope window ratio, > 1");
  fit->add_flag("--drop-secondary", c.drop_secondary, "use |count - volume term|; needs the body flags");
  add_body(fit, c, false);

  auto* psi = app.add_subcommand("psi", "Psi(t,u) by quadrature: prints t,u,quad,stat,rel_err,nodes");
  psi->add_option("--rho", c.rho, std::string("tube radius; ") + kRationalHelp)->required();
  psi->add_option("--rho-prime", c.rho_prime, std::string("central radius (default 1); ") + kRationalHelp);
  psi->add_option("--t", c.t, "squared horizontal frequency, > 0")->required();
  psi->add_option("--u", c.u, "vertical frequency")->required();
  psi->add_option("--nodes", c.nodes, "trapezoid nodes (default: resolution rule), >= 64");
  psi->add_flag("--compare", c.compare, "also evaluate the stationary phase formula (t, |u| >= 1)");

  auto* es = app.add_subcommand("expsum", "exponential sums: prints M,N,R,rho,theta,sign,value,bound_ratio,trivial_bound");
  es->add_option("--R", c.expsum_R, "real R >= 0")->required();
  es->add_option("--rho", c.expsum_rho, "real rho (default 0.5)");
  es->add_option("--M", c.M, "m range M <= m < 2M")->required();
  es->add_option("--N", c.N, "n range N <= n < 2N")->required();
  es->add_option("--sign", c.sign, "plus|minus, sign of sqrt(m) in the weighted sup")
      ->check(CLI::IsMember({"plus", "minus"}));
  es->add_option("--theta", c.theta, "linear phase theta (S only)");
  es->add_option("--kind", c.kind, "sup (weighted sup, ratio to R^{1/3}M^{1/4}L^{3/4}) or S (ratio to the bound B(R,M,N))")
      ->check(CLI::IsMember({"sup", "S"}));

  auto* r2c = app.add_subcommand("r2", "representation counts: prints an integer");
  r2c->add_option("--m", c.m, "integer m >= 0");
  r2c->add_option("--cumulative", c.cumulative, std::string("#{x^2+y^2 <= T}; ") + kRationalHelp);
  r2c->add_option("--q", c.q, "modulus for the restricted count");
  r2c->add_option("--c1", c.c1, "residue of m1 mod q");
  r2c->add_option("--c2", c.c2, "residue of m2 mod q");
  r2c->add_option("--Qform", c.Qform, "integral form a,b,c: count Q(x,y) = m instead");

  auto* ra = app.add_subcommand("ra", "r_A = min{r > 0 : (r,0,0) in A^t Z^3}: prints a rational");
  ra->add_option("--A", c.A, "rational matrix A, nine comma-separated entries, row major")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return 0;
    const auto active = app.get_subcommands();
    err << (active.empty() ? app.help() : active.front()->help());
    return 1;
  }
  c.subcommand = app.get_subcommands().front()->get_name();
  const bool has_body = c.subcommand == "count" || c.subcommand == "mainterm" || c.subcommand == "sweep" ||
                        (c.subcommand == "fit" && c.drop_secondary);
  if (has_body) {
    try {
      parse_body(c);
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return 1;
    }
  }
  if (print_config) {
    out << nlohmann::json(c).dump(2) << "\n";
    return 0;
  }
  return std::nullopt;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  if (auto code = parse(argc, argv, c, out, err)) return *code;
  try {
    return execute(c, out, err);
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace torus::cli
