#include "ek/grid.hpp"

#include <cmath>
#include <string>

#include "ek/error.hpp"

namespace ek {

Grid Grid::periodic(double lo, double hi, int n) {
  if (n < 16) fail(ErrorKind::configuration, "grid needs n >= 16");
  if (!(hi > lo)) fail(ErrorKind::configuration, "grid interval is empty");
  Grid g;
  g.n = n;
  g.h = (hi - lo) / n;
  g.x0 = lo;
  g.boundary = Boundary::periodic;
  return g;
}

Grid Grid::clamped(double lo, double hi, int n, EndState left, EndState right) {
  if (n < 16) fail(ErrorKind::configuration, "grid needs n >= 16");
  if (!(hi > lo)) fail(ErrorKind::configuration, "grid interval is empty");
  Grid g;
  g.n = n;
  g.h = (hi - lo) / (n - 1);
  g.x0 = lo;
  g.boundary = Boundary::clamped;
  g.left = left;
  g.right = right;
  return g;
}

std::vector<double> Grid::coords() const {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = this->x(i);
  return x;
}

void axpy(double a, const FieldState& x, FieldState& y) {
  for (int i = 0; i < y.size(); ++i) {
    y.rho[i] += a * x.rho[i];
    y.v[i] += a * x.v[i];
  }
}

std::vector<double> dx(const std::vector<double>& f, const Grid& g, int order) {
  const int n = g.n;
  if (static_cast<int>(f.size()) != n) fail(ErrorKind::precondition, "field size does not match grid");
  if (order != 2 && order != 4) fail(ErrorKind::configuration, "difference order must be 2 or 4");
  std::vector<double> d(n);
  const double h = g.h;
  if (g.boundary == Boundary::periodic) {
    auto at = [&](int i) { return f[((i % n) + n) % n]; };
    for (int i = 0; i < n; ++i)
      d[i] = order == 2 ? (at(i + 1) - at(i - 1)) / (2 * h)
                        : (at(i - 2) - 8 * at(i - 1) + 8 * at(i + 1) - at(i + 2)) / (12 * h);
    return d;
  }
  if (order == 2) {
    for (int i = 1; i < n - 1; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2 * h);
    d[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h);
    d[n - 1] = (3 * f[n - 1] - 4 * f[n - 2] + f[n - 3]) / (2 * h);
    return d;
  }
  for (int i = 2; i < n - 2; ++i) d[i] = (f[i - 2] - 8 * f[i - 1] + 8 * f[i + 1] - f[i + 2]) / (12 * h);
  d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12 * h);
  d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12 * h);
  d[n - 2] = (3 * f[n - 1] + 10 * f[n - 2] - 18 * f[n - 3] + 6 * f[n - 4] - f[n - 5]) / (12 * h);
  d[n - 1] = (25 * f[n - 1] - 48 * f[n - 2] + 36 * f[n - 3] - 16 * f[n - 4] + 3 * f[n - 5]) / (12 * h);
  return d;
}

FieldState sample_profile(const WaveProfile& p, const Grid& g, double xc, int points) {
  FieldState s(g.n);
  for (int i = 0; i < g.n; ++i) {
    s.rho[i] = p.rho_at(g.x(i) - xc, points);
    s.v[i] = p.spec.c + p.spec.j / s.rho[i];
  }
  return s;
}

void check_state(const FieldState& s, double floor) {
  for (int i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.rho[i]) || !std::isfinite(s.v[i]))
      fail(ErrorKind::state, "non-finite value at index " + std::to_string(i));
    if (!(s.rho[i] > floor)) fail(ErrorKind::state, "vacuum (rho <= 0) at index " + std::to_string(i));
  }
}

}  // namespace ek
