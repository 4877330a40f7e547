// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "ek/error.hpp"
#include "ek/evolution.hpp"
#include "ek/multisoliton.hpp"
#include "ek/stability.hpp"
#include "support/random_fields.hpp"

using namespace ek;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome kink_oracle() {
  FluidModel m = cubic_vdw();
  TravelingWaveSpec s = solve_kink_endstates(m, 0.0, {1.1, 2.9, 0.0});
  WaveProfile p = kink_profile(m, s, 20.0, 4096);
  double err = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    err = std::max(err, std::abs(p.rho[i] - (2.0 + std::tanh(p.xi[i] / std::sqrt(2.0)))));
  return {err <= 1e-6, fmt("sup |rho - (2 + tanh(x/sqrt2))| = %.2e", err)};
}

Outcome gp_min_density() {
  FluidModel m = gross_pitaevskii();
  double worst = 0.0;
  for (double c : {0.3, 0.6, 0.9}) worst = std::max(worst, std::abs(soliton_min_density(m, {1, 0}, c) - c * c));
  return {worst <= 1e-10, fmt("max |rho_m - c^2| = %.2e", worst)};
}

Outcome stability_criterion() {
  FluidModel m = gross_pitaevskii();
  bool ok = true;
  std::string d;
  for (double c : {0.4, 0.6, 0.8}) {
    StabilityReport r = dPdc(m, {1, 0}, c);
    double exact = -8.0 * std::sqrt(1.0 - c * c);  // P(c) = 4(acos c - c sqrt(1-c^2))
    ok = ok && r.dPdc < 0.0 && r.verdict == Verdict::stable && std::abs(r.dPdc - exact) <= 1e-6 * std::abs(exact);
    d += fmt("dP/dc(%.1f)=%.6f ", c, r.dPdc);
  }
  TransonicScan scan = transonic_stability_scan(m, {1, 0}, {0.32, 0.16, 0.08, 0.04});
  ok = ok && scan.slope >= 1.4 && scan.slope <= 1.6;
  d += fmt("transonic slope=%.4f", scan.slope);
  return {ok, d};
}

Outcome spectral_signature() {
  FluidModel m = gross_pitaevskii();
  const double c = 0.6;
  WaveProfile p = soliton_profile(m, {1, 0}, c);
  Discretization d1(m, Grid::periodic(-40, 40, 1024), Stencil::fd2);
  Eigen::MatrixXd M = assemble_d2E(d1, p);
  SpectralReport r = spectrum_d2E(M, d1, m, p, 1e-3);
  Discretization d2(m, Grid::periodic(-40, 40, 2048), Stencil::fd2);
  double k2 = kernel_residual(d2, discrete_traveling_wave(d2, p), c);
  double ratio = r.kernel_residual / k2;
  bool ok = r.n_negative == 1 && ratio >= 3.5 && ratio <= 4.5 && r.jordan_residual <= 1e-3;
  return {ok, fmt("n_negative=%d kernel ratio=%.3f jordan=%.2e", r.n_negative, ratio, r.jordan_residual)};
}

Outcome hamiltonian_consistency() {
  FluidModel m = gross_pitaevskii();
  WaveProfile p = soliton_profile(m, {1, 0}, 0.6);
  double sym = 0.0, gat_ratio = 1e300, hess_lo = 1e300, hess_hi = 0.0;
  for (Stencil st : {Stencil::fd2, Stencil::fd4, Stencil::spectral}) {
    Grid g = Grid::periodic(-40, 40, 512);
    Discretization d(m, g, st);
    FieldState V = sample_profile(p, g);
    for (int k = 0; k < 20; ++k) {
      FieldState U = testing::random_field(g, 100 + k), W = testing::random_field(g, 500 + k);
      double a = inner(apply_d2H(d, V, U), W, g.h), b = inner(U, apply_d2H(d, V, W), g.h);
      sym = std::max(sym, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));

      // <dH, W> against the centred difference of H: error O(eps^2)
      FieldState dh = delta_H(d, V);
      double lin = inner(dh, W, g.h);
      auto gerr = [&](double eps) {
        FieldState P = V, Q = V;
        axpy(eps, W, P);
        axpy(-eps, W, Q);
        return std::abs((discrete_H(d, P, {1, 0}) - discrete_H(d, Q, {1, 0})) / (2 * eps) - lin);
      };
      double e1 = gerr(1e-2), e2 = gerr(1e-3);
      gat_ratio = std::min(gat_ratio, e1 / e2);

      // d2H U against the forward difference of dH: error O(eps)
      auto herr = [&](double eps) {
        FieldState P = V;
        axpy(eps, U, P);
        FieldState q = delta_H(d, P);
        axpy(-1.0, dh, q);
        FieldState hu = apply_d2H(d, V, U);
        double s = 0.0;
        for (int i = 0; i < g.n; ++i)
          s = std::max({s, std::abs(q.rho[i] / eps - hu.rho[i]), std::abs(q.v[i] / eps - hu.v[i])});
        return s;
      };
      double r = herr(1e-3) / herr(1e-4);
      hess_lo = std::min(hess_lo, r);
      hess_hi = std::max(hess_hi, r);
    }
  }
  bool ok = sym <= 1e-10 && gat_ratio >= 80.0 && hess_lo >= 8.0 && hess_hi <= 12.0;
  return {ok, fmt("symmetry=%.1e  dH ratio(eps 1e-2/1e-3)>=%.1f  d2H ratio(1e-3/1e-4) in [%.2f, %.2f]", sym,
                  gat_ratio, hess_lo, hess_hi)};
}

Outcome simulator() {
  FluidModel m = gross_pitaevskii();
  const double c = 0.6, T = 5.0;
  WaveProfile p = soliton_profile(m, {1, 0}, c);
  Grid g = Grid::periodic(-40, 40, 4096);
  Discretization d(m, g, Stencil::fd4);
  FieldState s0 = sample_profile(p, g, -c * T / 2);
  double dt = cfl_dt(d, s0);
  const int N = static_cast<int>(std::ceil(T / dt));
  dt = T / N;
  const double H0 = discrete_H(d, s0, {1, 0}), P0 = discrete_P(d, s0, {1, 0});
  FieldState a = s0, b = s0;
  double dH = 0.0, dP = 0.0, gap100 = 0.0;
  for (int k = 0; k < N; ++k) {
    a = step_nonlinear(d, a, dt, Scheme::rk4_primitive);
    b = step_nonlinear(d, b, dt, Scheme::rk4_gauge);
    if (k + 1 == 100)
      for (int i = 0; i < g.n; ++i)
        gap100 = std::max({gap100, std::abs(a.rho[i] - b.rho[i]), std::abs(a.v[i] - b.v[i])});
    if ((k + 1) % 500 == 0 || k + 1 == N) {
      dH = std::max(dH, std::abs(discrete_H(d, a, {1, 0}) - H0) / std::max(1.0, std::abs(H0)));
      dP = std::max(dP, std::abs(discrete_P(d, a, {1, 0}) - P0) / std::max(1.0, std::abs(P0)));
    }
  }
  double shape = 0.0, gapT = 0.0;
  for (int i = 0; i < g.n; ++i) {
    shape = std::max(shape, std::abs(a.rho[i] - p.rho_at(g.x(i) - c * T / 2, 8)));
    gapT = std::max({gapT, std::abs(a.rho[i] - b.rho[i]), std::abs(a.v[i] - b.v[i])});
  }
  bool ok = shape <= 1e-3 && dH <= 1e-6 && dP <= 1e-6 && gap100 <= 1e-6 && gapT <= 1e-6;
  return {ok, fmt("shape=%.2e  H drift=%.1e  P drift=%.1e  primitive-gauge gap: 100 steps %.1e, T=5 %.1e", shape,
                  dH, dP, gap100, gapT)};
}

Outcome linear_growth() {
  FluidModel m = gross_pitaevskii();
  const double c = 0.6, T = 50.0;
  WaveProfile p = soliton_profile(m, {1, 0}, c);
  Grid g = Grid::periodic(-40, 40, 512);
  Discretization d(m, g, Stencil::spectral);
  FieldState bg = discrete_traveling_wave(d, p);
  HessianCoefficients coef = hessian_coefficients(d, bg);
  double dt = cfl_dt(d, bg);
  const int N = static_cast<int>(std::ceil(T / dt));
  dt = T / N;
  double C = 0.0, drift = 0.0;
  for (int r = 0; r < 5; ++r) {
    FieldState U = testing::random_field(g, 900 + r, 1e-2);
    const double n0 = norm_H0(d, U);
    const double a0 = decompose(d, U, bg, {1, 0}).alpha;
    for (int k = 1; k <= N; ++k) {
      U = step_linearized(d, coef, U, dt, c);
      if (k % 100 == 0 || k == N) {
        double t = k * dt;
        C = std::max(C, norm_H0(d, U) / ((1.0 + t) * n0));
        drift = std::max(drift, std::abs(decompose(d, U, bg, {1, 0}).alpha - a0) / std::abs(a0));
      }
    }
  }
  return {C <= 20.0 && drift <= 1e-4, fmt("fitted C=%.3f  alpha drift=%.2e", C, drift)};
}

Outcome partition() {
  FluidModel m = gross_pitaevskii();
  std::vector<WaveProfile> w{soliton_profile(m, {1, 0}, 0.4), soliton_profile(m, {1, 0}, 0.6),
                             soliton_profile(m, {1, 0}, 0.8)};
  double worst = 0.0, cmin = 1e300, cmax = 0.0, fd = 0.0;
  bool ordered = true, range = true;
  for (double A : {20.0, 40.0, 80.0}) {
    MultiSolitonConfig cfg = make_config(w, A);
    Grid g = Grid::periodic(-100, 300, 8000);
    double CA = 0.0;
    for (double t : {0.0, 10.0, 50.0}) {
      PartitionBundle pb = partition_of_unity(cfg, t, g);
      std::vector<double> mass(3, 0.0), first(3, 0.0);
      for (int i = 0; i < g.n; ++i) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) {
          double x = pb.chi[k][i];
          s += x * x;
          range = range && x >= 0.0 && x <= 1.0;
          mass[k] += x * x;
          first[k] += x * x * g.x(i);
        }
        worst = std::max(worst, std::abs(s - 1.0));
      }
      for (int k = 0; k + 1 < 3; ++k) ordered = ordered && first[k] / mass[k] < first[k + 1] / mass[k + 1];
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < g.n; ++i) CA = std::max(CA, std::abs(pb.dchi_dx[k][i]) * A);
        for (int i = 1; i + 1 < g.n; ++i) {
          double num = (pb.chi[k][i + 1] - pb.chi[k][i - 1]) / (2 * g.h);
          fd = std::max(fd, std::abs(num - pb.dchi_dx[k][i]) * A);
        }
      }
    }
    cmin = std::min(cmin, CA);
    cmax = std::max(cmax, CA);
  }
  // one constant for all A: the scaled bound must not grow with A
  bool ok = worst <= 1e-12 && ordered && range && cmax <= 1.05 * cmin && fd <= 1e-3 * cmax;
  return {ok, fmt("max |sum chi^2 - 1|=%.1e  A*|dchi/dx| in [%.4f, %.4f]  fd check %.1e", worst, cmin, cmax, fd)};
}

// Constant-capillarity model with g = rho - 1 and K = 3; speeds 0.8 and 0.9, spectral grid h ~ 0.45.
struct NewtonSetup {
  FluidModel m = constant_k(3.0, Polynomial{{-1.0, 1.0}});
  MultiSolitonConfig cfg;
  Grid grid;
  explicit NewtonSetup(double A) {
    cfg = make_config({soliton_profile(m, {1, 0}, 0.8), soliton_profile(m, {1, 0}, 0.9)}, A, 0.0, 0.85);
    double T = default_T_end(cfg);
    double lo = cfg.center(0, T) - cfg.margin(0) - 1.0, hi = cfg.center(1, T) + cfg.margin(1) + 1.0;
    int n = static_cast<int>(std::ceil((hi - lo) / 0.45));
    grid = Grid::periodic(lo, hi, n + n % 2);
  }
};

double fit_slope(const std::vector<double>& t, const std::vector<double>& y) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    n += 1;
    sx += t[i];
    sy += y[i];
    sxx += t[i] * t[i];
    sxy += t[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

Outcome newton_contraction() {
  NewtonSetup s(30.0);
  Discretization d(s.m, s.grid, Stencil::spectral);
  ApproximateSolution sol = newton_iterate(d, s.cfg);
  const auto& f = sol.sup_residual;
  std::string det = fmt("floor=%.1e sup f:", sol.floor);
  for (double x : f) det += fmt(" %.2e", x);
  if (f.size() < 3) return {false, det + " (fewer than two iterations)"};
  double ratio = f[1] / f[0];
  // pre-floor iterations: started from a residual above the stopping level
  int pre = 0;
  for (int j = 0; j < sol.iterations; ++j)
    if (f[j] > 10.0 * sol.floor) ++pre;
  double slope = (std::log(f[2]) - std::log(f[1])) / (std::log(f[1]) - std::log(f[0]));
  bool decay = true;
  for (const auto& h : sol.residual_history) {
    std::vector<double> t, y;
    for (std::size_t i = 0; i < h.size(); ++i)
      if (h[i] > 0.0) {
        t.push_back(sol.record_times[i]);
        y.push_back(std::log(h[i]));
      }
    decay = decay && fit_slope(t, y) < 0.0 && h.front() > h[h.size() - 2];
  }
  bool ok = ratio <= 0.1 && pre >= 2 && slope >= 1.8 && decay;
  return {ok, det + fmt("  f1/f0=%.3f  pre-floor iterations=%d  log slope=%.2f  decreasing in t=%s", ratio, pre,
                        slope, decay ? "yes" : "no")};
}

Outcome end_to_end() {
  std::vector<double> bounds;
  std::string det;
  bool ok = true;
  for (double A : {30.0, 60.0}) {
    NewtonSetup s(A);
    Discretization d(s.m, s.grid, Stencil::spectral);
    ApproximateSolution sol = newton_iterate(d, s.cfg);
    FieldState V = sol.state(0.0);
    auto dist = [&](const FieldState& u, double t) {
      FieldState e = u;
      axpy(-1.0, assemble_S(s.cfg, t, s.grid), e);
      return norm_H0(d, e);
    };
    const double d0 = dist(V, 0.0), T = 10.0;
    double dt = cfl_dt(d, V), worst = d0;
    const int N = static_cast<int>(std::ceil(T / dt));
    dt = T / N;
    for (int k = 1; k <= N; ++k) {
      V = step_nonlinear(d, V, dt, Scheme::rk4_primitive, s.cfg.frame_speed);
      V.t = k * dt;
      worst = std::max(worst, dist(V, V.t));
    }
    ok = ok && worst <= d0 + 1e-3;
    bounds.push_back(worst);
    det += fmt("A=%g: |V(0)-S(0)|=%.2e max_t |V-S|=%.2e  ", A, d0, worst);
  }
  ok = ok && bounds[1] < bounds[0];
  return {ok, det};
}

}  // namespace

int main() {
  struct Item {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Item> items{
      {1, "cubic kink oracle", kink_oracle},
      {2, "GP soliton minimum density", gp_min_density},
      {3, "momentum stability criterion", stability_criterion},
      {4, "spectral signature of d2E", spectral_signature},
      {5, "Hamiltonian consistency", hamiltonian_consistency},
      {6, "simulator conservation and exactness", simulator},
      {7, "linear stability growth", linear_growth},
      {8, "partition of unity", partition},
      {9, "Newton contraction", newton_contraction},
      {10, "multi-soliton shadow", end_to_end},
  };
  int failed = 0;
  for (auto& it : items) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", it.id, it.name, o.detail.c_str(), sec);
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
