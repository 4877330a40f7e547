#include "ek/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ek/error.hpp"

namespace ek {

Scheme parse_scheme(std::string_view s) {
  if (s == "rk4_primitive") return Scheme::rk4_primitive;
  if (s == "rk4_gauge") return Scheme::rk4_gauge;
  fail(ErrorKind::configuration, "unknown scheme '" + std::string(s) + "'");
}

namespace {

FieldState combine(const FieldState& s, double a, const FieldState& k) {
  FieldState o = s;
  axpy(a, k, o);
  return o;
}

void guard(const FieldState& s, double t) {
  for (int i = 0; i < s.size(); ++i) {
    if (!std::isfinite(s.rho[i]) || !std::isfinite(s.v[i]))
      fail(ErrorKind::blowup, "non-finite value at t=" + std::to_string(t));
    if (!(s.rho[i] > 0.0)) fail(ErrorKind::blowup, "vacuum reached at t=" + std::to_string(t));
  }
}

template <class Rhs>
FieldState rk4(const FieldState& s, double dt, Rhs&& f) {
  FieldState k1 = f(s, 0.0);
  FieldState k2 = f(combine(s, 0.5 * dt, k1), 0.5 * dt);
  FieldState k3 = f(combine(s, 0.5 * dt, k2), 0.5 * dt);
  FieldState k4 = f(combine(s, dt, k3), dt);
  FieldState o = s;
  for (int i = 0; i < o.size(); ++i) {
    o.rho[i] += dt / 6.0 * (k1.rho[i] + 2.0 * k2.rho[i] + 2.0 * k3.rho[i] + k4.rho[i]);
    o.v[i] += dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
  }
  o.t = s.t + dt;
  return o;
}

}  // namespace

FieldState rhs_nonlinear(const Discretization& d, const FieldState& s, double cf) {
  const FluidModel& m = d.model();
  const Grid& g = d.grid();
  FieldState dh = delta_H(d, s);
  const double h1l = 0.5 * g.left.v * g.left.v + (g.boundary == Boundary::clamped ? m.g(g.left.rho) : 0.0);
  const double h1r = 0.5 * g.right.v * g.right.v + (g.boundary == Boundary::clamped ? m.g(g.right.rho) : 0.0);
  const int n = d.n();
  Vec a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = dh.v[i] - cf * s.rho[i];
    b[i] = dh.rho[i] - cf * s.v[i];
  }
  FieldState out(n, s.t);
  d.center(a, g.left.rho * g.left.v - cf * g.left.rho, g.right.rho * g.right.v - cf * g.right.rho, out.rho);
  d.center(b, h1l - cf * g.left.v, h1r - cf * g.right.v, out.v);
  for (int i = 0; i < n; ++i) {
    out.rho[i] = -out.rho[i];
    out.v[i] = -out.v[i];
  }
  return out;
}

namespace {

struct G3 {
  Vec rho, p, w;
};

G3 gauge_rhs(const Discretization& d, const G3& s, double cf) {
  const FluidModel& m = d.model();
  const Grid& g = d.grid();
  const int n = d.n();
  const double rl = g.left.rho, rr = g.right.rho, vl = g.left.v, vr = g.right.v;
  Vec flux(n);
  for (int i = 0; i < n; ++i) flux[i] = s.rho[i] * s.p[i];
  Vec dflux, drho, dp, dw;
  d.center(flux, rl * vl, rr * vr, dflux);
  d.center(s.rho, rl, rr, drho);
  d.center(s.p, vl, vr, dp);
  d.center(s.w, 0.0, 0.0, dw);

  Vec re, ep, ew;
  d.interp(s.rho, rl, rr, re);
  d.diff(s.p, vl, vr, ep);
  d.diff(s.w, 0.0, 0.0, ew);
  const int ne = d.edges();
  for (int k = 0; k < ne; ++k) {
    double a = std::sqrt(re[k] * m.K(re[k]));
    ep[k] *= a;
    ew[k] *= a;
  }
  Vec lap_p, lap_w;
  d.diff_t(ep, lap_p, false);
  d.diff_t(ew, lap_w, false);  // these are -Lap

  G3 o{Vec(n), Vec(n), Vec(n)};
  for (int i = 0; i < n; ++i) {
    const double adv = s.p[i] - cf;
    o.rho[i] = -dflux[i] + cf * drho[i];
    o.p[i] = -adv * dp[i] + s.w[i] * dw[i] - lap_w[i] - m.g1(s.rho[i]) * drho[i];
    o.w[i] = -adv * dw[i] - s.w[i] * dp[i] + lap_p[i];
  }
  return o;
}

void gaxpy(double a, const G3& x, G3& y) {
  for (std::size_t i = 0; i < y.rho.size(); ++i) {
    y.rho[i] += a * x.rho[i];
    y.p[i] += a * x.p[i];
    y.w[i] += a * x.w[i];
  }
}

}  // namespace

GaugeState to_gauge(const Discretization& d, const FieldState& s) {
  const FluidModel& m = d.model();
  const int n = d.n();
  GaugeState g;
  g.t = s.t;
  g.rho = s.rho;
  g.z_re = s.v;
  Vec dr = d.center(s.rho, d.grid().left.rho, d.grid().right.rho);
  g.w.resize(n);
  g.a.resize(n);
  for (int i = 0; i < n; ++i) {
    g.w[i] = std::sqrt(m.K(s.rho[i]) / s.rho[i]) * dr[i];
    g.a[i] = std::sqrt(s.rho[i] * m.K(s.rho[i]));
  }
  g.z_im = g.w;
  return g;
}

FieldState from_gauge(const GaugeState& g) {
  FieldState s;
  s.rho = g.rho;
  s.v = g.z_re;
  s.t = g.t;
  return s;
}

GaugeState step_gauge(const Discretization& d, const GaugeState& gs, double dt, double cf) {
  G3 s{gs.rho, gs.z_re, gs.z_im};
  G3 k1 = gauge_rhs(d, s, cf);
  G3 y = s;
  gaxpy(0.5 * dt, k1, y);
  G3 k2 = gauge_rhs(d, y, cf);
  y = s;
  gaxpy(0.5 * dt, k2, y);
  G3 k3 = gauge_rhs(d, y, cf);
  y = s;
  gaxpy(dt, k3, y);
  G3 k4 = gauge_rhs(d, y, cf);
  gaxpy(dt / 6.0, k1, s);
  gaxpy(dt / 3.0, k2, s);
  gaxpy(dt / 3.0, k3, s);
  gaxpy(dt / 6.0, k4, s);

  const FluidModel& m = d.model();
  GaugeState o;
  o.t = gs.t + dt;
  o.rho = std::move(s.rho);
  o.z_re = std::move(s.p);
  o.w = s.w;
  o.z_im = std::move(s.w);
  o.a.resize(o.rho.size());
  for (std::size_t i = 0; i < o.rho.size(); ++i) {
    if (!std::isfinite(o.rho[i]) || !std::isfinite(o.z_re[i]) || !std::isfinite(o.w[i]))
      fail(ErrorKind::blowup, "non-finite value at t=" + std::to_string(o.t));
    if (!(o.rho[i] > 0.0)) fail(ErrorKind::blowup, "vacuum reached at t=" + std::to_string(o.t));
    o.a[i] = std::sqrt(o.rho[i] * m.K(o.rho[i]));
  }
  return o;
}

FieldState step_nonlinear(const Discretization& d, const FieldState& s, double dt, Scheme scheme, double cf) {
  try {
    if (scheme == Scheme::rk4_gauge) return from_gauge(step_gauge(d, to_gauge(d, s), dt, cf));
    FieldState o = rk4(s, dt, [&](const FieldState& y, double) { return rhs_nonlinear(d, y, cf); });
    guard(o, o.t);
    return o;
  } catch (const Error& e) {
    // vacuum inside a stage surfaces as a state or domain error
    if (e.kind() == ErrorKind::state || e.kind() == ErrorKind::domain)
      fail(ErrorKind::blowup, std::string(e.what()) + " in step from t=" + std::to_string(s.t));
    throw;
  }
}

double cfl_dt(const Discretization& d, const FieldState& s, double safety) {
  double amax = 0.0;
  for (double r : s.rho) amax = std::max(amax, std::sqrt(r * d.model().K(r)));
  return safety * d.h() * d.h() / amax;
}

FieldState linearized_rhs(const Discretization& d, const HessianCoefficients& c, const FieldState& u, double cf) {
  FieldState hu = apply_d2H(d, c, u);
  const int n = d.n();
  Vec a(n), b(n);
  for (int i = 0; i < n; ++i) {
    a[i] = hu.v[i] - cf * u.rho[i];
    b[i] = hu.rho[i] - cf * u.v[i];
  }
  FieldState out(n, u.t);
  d.center(a, 0.0, 0.0, out.rho);
  d.center(b, 0.0, 0.0, out.v);
  for (int i = 0; i < n; ++i) {
    out.rho[i] = -out.rho[i];
    out.v[i] = -out.v[i];
  }
  return out;
}

FieldState step_linearized(const Discretization& d, const BackgroundFn& bg, const FieldState& u, double dt,
                           double cf) {
  const double t = u.t;
  HessianCoefficients c0 = hessian_coefficients(d, bg(t));
  HessianCoefficients ch = hessian_coefficients(d, bg(t + 0.5 * dt));
  HessianCoefficients c1 = hessian_coefficients(d, bg(t + dt));
  FieldState o = rk4(u, dt, [&](const FieldState& y, double tau) {
    const HessianCoefficients& c = tau == 0.0 ? c0 : (tau == dt ? c1 : ch);
    return linearized_rhs(d, c, y, cf);
  });
  for (int i = 0; i < o.size(); ++i)
    if (!std::isfinite(o.rho[i]) || !std::isfinite(o.v[i]))
      fail(ErrorKind::blowup, "linearised flow produced non-finite values at t=" + std::to_string(o.t));
  return o;
}

FieldState step_linearized(const Discretization& d, const HessianCoefficients& c, const FieldState& u, double dt,
                           double cf) {
  FieldState o = rk4(u, dt, [&](const FieldState& y, double) { return linearized_rhs(d, c, y, cf); });
  for (int i = 0; i < o.size(); ++i)
    if (!std::isfinite(o.rho[i]) || !std::isfinite(o.v[i]))
      fail(ErrorKind::blowup, "linearised flow produced non-finite values at t=" + std::to_string(o.t));
  return o;
}

}  // namespace ek
