#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "ek/grid.hpp"

namespace ek::testing {

// Smooth perturbation: a few Gaussian bumps in each component, kept clear of the grid ends.
inline FieldState random_field(const Grid& g, std::uint64_t seed, double amp = 1.0, int bumps = 6) {
  std::mt19937_64 rng(seed);
  const double lo = g.x(0), len = g.length();
  std::uniform_real_distribution<double> pos(lo + 0.25 * len, lo + 0.75 * len);
  std::uniform_real_distribution<double> width(1.0, 3.0);
  std::uniform_real_distribution<double> a(-1.0, 1.0);
  FieldState f(g.n);
  for (auto* comp : {&f.rho, &f.v}) {
    for (int b = 0; b < bumps; ++b) {
      double xc = pos(rng), w = width(rng), s = amp * a(rng);
      for (int i = 0; i < g.n; ++i) {
        double y = (g.x(i) - xc) / w;
        (*comp)[i] += s * std::exp(-y * y);
      }
    }
  }
  return f;
}

}  // namespace ek::testing
