#include "ek/stability.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "ek/error.hpp"

namespace ek {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::stable: return "stable";
    case Verdict::unstable: return "unstable";
    case Verdict::marginal: return "marginal";
  }
  return "?";
}

namespace {

double trapezoid(const std::vector<double>& f, double h) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i];
  return h * (s - 0.5 * (f.front() + f.back()));
}

}  // namespace

MomentumEstimate momentum_estimates(const FluidModel& m, const WaveProfile& p) {
  if (p.spec.kind != WaveKind::soliton) fail(ErrorKind::precondition, "momentum requires a soliton profile");
  const double rp = p.spec.right.rho, vp = p.spec.right.v, c = p.spec.c;
  MomentumEstimate est;
  std::vector<double> f(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) f[i] = (p.rho[i] - rp) * (p.v[i] - vp);
  est.grid = trapezoid(f, p.spacing());

  const double rm = p.rho_min;
  const double delta = rp - rm;
  if (delta <= 0.0) return est;
  // F = (r - rp)^2 Phi since f(rp) = 0, and Phi(r) - Phi(rm) = (r - rm) psi(r) with psi written through
  // g'' so that no cancellation occurs near the turning point; Phi(rm) = 0.
  const double j = p.spec.j;
  auto psi = [&](double r) {
    const double d = r - rm;
    auto inner = [&](double t) {
      const double x0 = rp + t * (rm - rp);
      auto g2 = [&](double s) { return m.g2(x0 + s * t * d); };
      return (1.0 - t) * t * boost::math::quadrature::gauss<double, 10>::integrate(g2, 0.0, 1.0);
    };
    return j * j / (2.0 * rp * rp * r * rm) + boost::math::quadrature::gauss<double, 10>::integrate(inner, 0.0, 1.0);
  };
  auto integrand = [&](double u) {
    const double r = rm + delta * u * u;
    const double ps = psi(r);
    if (!(ps > 0.0)) return 0.0;
    return 4.0 * delta * std::abs(r - rp) * (c - vp) / r * std::sqrt(m.K(r) / (2.0 * delta * ps));
  };
  double err = 0.0;
  est.quadrature = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, 1.0, 12, 1e-12, &err);
  return est;
}

double momentum_of_profile(const FluidModel& m, const WaveProfile& p) {
  MomentumEstimate e = momentum_estimates(m, p);
  double scale = std::max(std::abs(e.grid), std::abs(e.quadrature));
  if (scale > 0.0 && std::abs(e.grid - e.quadrature) > 1e-6 * scale)
    fail(ErrorKind::resolution, "profile momentum quadratures disagree (" + std::to_string(e.grid) + " vs " +
                                    std::to_string(e.quadrature) + ")");
  return e.grid;
}

double instability_momentum(const FluidModel& m, const WaveProfile& p) {
  const double rp = p.spec.right.rho, vp = p.spec.right.v, c = p.spec.c;
  const double l1 = 0.5 * vp * vp + m.g(rp), l2 = rp * vp;
  const double e0 = 0.5 * rp * vp * vp + m.Gfun(rp);
  std::vector<double> f(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double r = p.rho[i], v = p.v[i], rx = p.rho_x[i];
    f[i] = 0.5 * r * v * v + 0.5 * m.K(r) * rx * rx + m.Gfun(r) - e0 - c * (r - rp) * (v - vp) - l1 * (r - rp) -
           l2 * (v - vp);
  }
  return trapezoid(f, p.spacing());
}

StabilityReport dPdc(const FluidModel& m, const EndState& right, double c, double hc, double hw, int n) {
  if (!(hc > 0.0)) fail(ErrorKind::configuration, "h_c must be positive");
  const double cs2 = sound_speed_sq(m, right.rho);
  for (double s : {c - hc, c + hc})
    if (!((right.v - s) * (right.v - s) < cs2))
      fail(ErrorKind::precondition, "soliton family leaves the subsonic window at c=" + std::to_string(s));
  auto P = [&](double s) { return momentum_of_profile(m, soliton_profile(m, right, s, hw, n)); };
  StabilityReport r;
  r.c = c;
  r.P = P(c);
  const double d1 = (P(c + hc) - P(c - hc)) / (2.0 * hc);
  const double d2 = (P(c + 0.5 * hc) - P(c - 0.5 * hc)) / hc;
  r.dPdc = (4.0 * d2 - d1) / 3.0;
  r.m2 = -r.dPdc;
  r.verdict = r.dPdc < -1e-8 ? Verdict::stable : (r.dPdc > 1e-8 ? Verdict::unstable : Verdict::marginal);
  return r;
}

TransonicScan transonic_stability_scan(const FluidModel& m, const EndState& right, const std::vector<double>& eps) {
  if (eps.empty()) fail(ErrorKind::configuration, "empty transonic scan");
  TransonicScan scan;
  scan.hypothesis_ok = m.g2(right.rho) >= 0.0;
  scan.dPddelta_positive = true;
  scan.dPdc_negative = true;
  for (double e : eps) {
    TransonicRow row;
    row.eps = e;
    row.c = transonic_speed(m, right, e);
    WaveProfile p = soliton_profile(m, right, row.c);
    row.delta = right.rho - p.rho_min;
    row.P = momentum_of_profile(m, p);
    const double de = 0.01 * e;
    double cp = transonic_speed(m, right, e + de), cm = transonic_speed(m, right, e - de);
    WaveProfile pp = soliton_profile(m, right, cp), pm = soliton_profile(m, right, cm);
    double Pp = momentum_of_profile(m, pp), Pm = momentum_of_profile(m, pm);
    double dp = right.rho - pp.rho_min, dm = right.rho - pm.rho_min;
    row.dPddelta = (Pp - Pm) / (dp - dm);
    row.dPdc = (Pp - Pm) / (cp - cm);
    scan.dPddelta_positive = scan.dPddelta_positive && row.dPddelta > 0.0;
    scan.dPdc_negative = scan.dPdc_negative && row.dPdc < 0.0;
    scan.rows.push_back(row);
  }
  double emin = eps[0];
  for (double e : eps) emin = std::min(emin, e);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int k = 0;
  for (const auto& r : scan.rows) {
    if (r.eps > 10.0 * emin * (1 + 1e-12)) continue;
    double x = std::log(r.delta), y = std::log(std::abs(r.P));
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++k;
  }
  scan.slope = k >= 2 ? (k * sxy - sx * sy) / (k * sxx - sx * sx) : 0.0;
  return scan;
}

FieldState apply_d2E(const Discretization& d, const HessianCoefficients& coef, const FieldState& u, double c) {
  FieldState o = apply_d2H(d, coef, u);
  for (int i = 0; i < o.size(); ++i) {
    o.rho[i] -= c * u.v[i];
    o.v[i] -= c * u.rho[i];
  }
  return o;
}

FieldState translation_mode(const Discretization& d, const FieldState& bg) {
  const Grid& g = d.grid();
  FieldState t(d.n(), bg.t);
  d.center(bg.rho, g.left.rho, g.right.rho, t.rho);
  d.center(bg.v, g.left.v, g.right.v, t.v);
  return t;
}

FieldState momentum_direction(const FieldState& bg, const EndState& ref) {
  FieldState o(bg.size(), bg.t);
  for (int i = 0; i < bg.size(); ++i) {
    o.rho[i] = bg.v[i] - ref.v;
    o.v[i] = bg.rho[i] - ref.rho;
  }
  return o;
}

FieldState discrete_traveling_wave(const Discretization& d, const WaveProfile& p, double xc, double tol) {
  const FluidModel& m = d.model();
  const Grid& g = d.grid();
  const int n = d.n();
  const double c = p.spec.c, j = p.spec.j;
  const EndState ref = p.spec.right;
  const double l1 = 0.5 * ref.v * ref.v + m.g(ref.rho);

  FieldState s = sample_profile(p, g, xc);
  auto residual = [&](const FieldState& st) {
    FieldState dh = delta_H(d, st);
    Eigen::VectorXd r(n);
    for (int i = 0; i < n; ++i) r(i) = dh.rho[i] - c * (st.v[i] - ref.v) - l1;
    return r;
  };

  Eigen::VectorXd r = residual(s);
  for (int it = 0; it < 25 && r.cwiseAbs().maxCoeff() > tol; ++it) {
    HessianCoefficients coef = hessian_coefficients(d, s);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n + 1, n + 1);
    FieldState e(n);
    for (int k = 0; k < n; ++k) {
      e.rho[k] = 1.0;
      FieldState col = apply_d2H(d, coef, e);
      e.rho[k] = 0.0;
      for (int i = 0; i < n; ++i) A(i, k) = col.rho[i];
      // remove v u coupling (u = 0 here) and replace the pointwise part by the reduced derivative
      const double w = s.v[k] - c;
      A(k, k) += -w * w / s.rho[k];
    }
    // bordered system pins the translation mode
    Vec dr = d.center(s.rho, g.left.rho, g.right.rho);
    double nrm = 0.0;
    for (double x : dr) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (int i = 0; i < n; ++i) A(i, n) = A(n, i) = dr[i] / nrm;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
    rhs.head(n) = -r;
    Eigen::VectorXd step = A.partialPivLu().solve(rhs);
    for (int i = 0; i < n; ++i) {
      s.rho[i] += step(i);
      if (!(s.rho[i] > 0.0)) fail(ErrorKind::numerical, "traveling-wave polishing reached vacuum");
      s.v[i] = c + j / s.rho[i];
    }
    Eigen::VectorXd rn = residual(s);
    if (!(rn.cwiseAbs().maxCoeff() < r.cwiseAbs().maxCoeff()) && rn.cwiseAbs().maxCoeff() > 1e3 * tol) {
      r = rn;
      break;
    }
    r = rn;
    if (step.head(n).cwiseAbs().maxCoeff() < 1e-15) break;
  }
  if (!(r.cwiseAbs().maxCoeff() <= 1e-9))
    fail(ErrorKind::numerical, "traveling-wave polishing did not converge (residual " +
                                   std::to_string(r.cwiseAbs().maxCoeff()) + ")");
  return s;
}

Eigen::MatrixXd assemble_d2E(const Discretization& d, const FieldState& bg, double c) {
  const int n = d.n();
  HessianCoefficients coef = hessian_coefficients(d, bg);
  Eigen::MatrixXd M(2 * n, 2 * n);
  FieldState e(n);
  for (int k = 0; k < 2 * n; ++k) {
    (k < n ? e.rho[k] : e.v[k - n]) = 1.0;
    FieldState col = apply_d2E(d, coef, e, c);
    (k < n ? e.rho[k] : e.v[k - n]) = 0.0;
    for (int i = 0; i < n; ++i) {
      M(i, k) = col.rho[i];
      M(n + i, k) = col.v[i];
    }
  }
  return M;
}

Eigen::MatrixXd assemble_d2E(const Discretization& d, const WaveProfile& p, bool polish) {
  FieldState bg = polish ? discrete_traveling_wave(d, p) : sample_profile(p, d.grid());
  return assemble_d2E(d, bg, p.spec.c);
}

double kernel_residual(const Discretization& d, const FieldState& bg, double c) {
  HessianCoefficients coef = hessian_coefficients(d, bg);
  FieldState t = translation_mode(d, bg);
  FieldState mt = apply_d2E(d, coef, t, c);
  return std::sqrt(inner(mt, mt, 1.0) / inner(t, t, 1.0));
}

SpectralReport spectrum_d2E(const Eigen::MatrixXd& M, const Discretization& d, const FluidModel& m,
                            const WaveProfile& p, double hc, bool polish) {
  SpectralReport rep;
  rep.grid_spacing = d.h();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) fail(ErrorKind::numerical, "symmetric eigensolver failed");
  const auto& ev = es.eigenvalues();
  rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
  double emax = 0.0;
  for (double x : rep.eigenvalues) emax = std::max(emax, std::abs(x));
  for (double x : rep.eigenvalues)
    if (x < -1e-8 * emax) ++rep.n_negative;

  auto background = [&](const WaveProfile& q) {
    return polish ? discrete_traveling_wave(d, q) : sample_profile(q, d.grid());
  };
  FieldState bg = background(p);
  rep.kernel_residual = kernel_residual(d, bg, p.spec.c);

  if (hc > 0.0 && p.spec.kind == WaveKind::soliton) {
    const double hw = p.half_width();
    const int np = static_cast<int>(p.size());
    FieldState up = background(soliton_profile(m, p.spec.right, p.spec.c + hc, hw, np));
    FieldState um = background(soliton_profile(m, p.spec.right, p.spec.c - hc, hw, np));
    FieldState dc(d.n());
    for (int i = 0; i < d.n(); ++i) {
      dc.rho[i] = (up.rho[i] - um.rho[i]) / (2.0 * hc);
      dc.v[i] = (up.v[i] - um.v[i]) / (2.0 * hc);
    }
    FieldState mdc = apply_d2E(d, hessian_coefficients(d, bg), dc, p.spec.c);
    FieldState dp = momentum_direction(bg, p.spec.right);
    axpy(-1.0, dp, mdc);
    rep.jordan_residual = std::sqrt(inner(mdc, mdc, 1.0) / inner(dp, dp, 1.0));
  }
  return rep;
}

DecompositionRecord decompose(const Discretization& d, const FieldState& U, const FieldState& bg,
                              const EndState& ref, bool use_alpha) {
  const double h = d.h();
  FieldState b1 = momentum_direction(bg, ref);
  FieldState b2 = translation_mode(d, bg);
  DecompositionRecord rec;
  rec.t = U.t;
  rec.W = U;
  const double g22 = inner(b2, b2, h);
  if (!use_alpha) {
    if (!(g22 > 0.0)) fail(ErrorKind::precondition, "degenerate translation direction");
    rec.beta = inner(U, b2, h) / g22;
    axpy(-rec.beta, b2, rec.W);
    return rec;
  }
  const double g11 = inner(b1, b1, h), g12 = inner(b1, b2, h);
  const double det = g11 * g22 - g12 * g12;
  if (!(g11 > 0.0) || !(g22 > 0.0) || !(det > 1e-12 * g11 * g22))
    fail(ErrorKind::precondition, "degenerate Gram matrix (zero-amplitude background?)");
  const double r1 = inner(U, b1, h), r2 = inner(U, b2, h);
  rec.alpha = (g22 * r1 - g12 * r2) / det;
  rec.beta = (g11 * r2 - g12 * r1) / det;
  axpy(-rec.alpha, b1, rec.W);
  axpy(-rec.beta, b2, rec.W);
  return rec;
}

}  // namespace ek
