// Counts lattice points in R T for rho = 1/2, rho' = 2 and compares with M(R).

#include "torus_lattice/torus_lattice.hpp"

#include <cstdio>

int main() {
  using namespace torus;
  const TorusParams p = TorusParams::exact(Rational(1, 2), Rational(2));
  std::printf("%6s %12s %16s %12s\n", "R", "N(R)", "M(R)", "E(R)");
  for (int R : {2, 5, 10, 20, 50, 100}) {
    const auto n = count_slices(p, Rational(R));
    const auto m = main_term(p, R, 1e-6);
    std::printf("%6d %12lld %16.4f %12.4f\n", R, static_cast<long long>(n.count), m.value,
                static_cast<double>(n.count) - m.value);
  }
}
