#pragma once

#include <vector>

#include "ek/profiles.hpp"

namespace ek {

enum class Boundary { periodic, clamped };

struct Grid {
  int n = 0;
  double h = 0.0;
  double x0 = 0.0;
  Boundary boundary = Boundary::periodic;
  EndState left, right;  // ghost values for clamped grids

  // n points on [lo, hi), spacing (hi-lo)/n.
  static Grid periodic(double lo, double hi, int n);
  // n points on [lo, hi] including both ends, spacing (hi-lo)/(n-1).
  static Grid clamped(double lo, double hi, int n, EndState left, EndState right);

  double x(int i) const { return x0 + h * i; }
  std::vector<double> coords() const;
  double length() const { return boundary == Boundary::periodic ? h * n : h * (n - 1); }
};

// Either a state (rho, v) or a perturbation pair (r, u).
struct FieldState {
  std::vector<double> rho, v;
  double t = 0.0;

  FieldState() = default;
  explicit FieldState(int n, double t0 = 0.0) : rho(n, 0.0), v(n, 0.0), t(t0) {}
  int size() const { return static_cast<int>(rho.size()); }
};

struct GaugeState {
  std::vector<double> rho, w, z_re, z_im, a;
  double t = 0.0;
};

// y += a x
void axpy(double a, const FieldState& x, FieldState& y);

// Centered differences of order 2 or 4; one-sided closures on clamped grids.
std::vector<double> dx(const std::vector<double>& f, const Grid& g, int order);

// Samples a profile on the grid, centred at x_center.
FieldState sample_profile(const WaveProfile& p, const Grid& g, double x_center = 0.0, int points = 8);

// Validates positivity/finite values (state error otherwise).
void check_state(const FieldState& s, double rho_floor = 0.0);

}  // namespace ek
