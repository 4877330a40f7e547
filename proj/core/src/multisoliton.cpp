#include "ek/multisoliton.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ek/error.hpp"
#include "ek/evolution.hpp"

namespace ek {

double MultiSolitonConfig::c0() const {
  double gap = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < size(); ++k) gap = std::min(gap, speed(k + 1) - speed(k));
  return 0.5 * gap;
}

double MultiSolitonConfig::min_offset() const {
  double a = std::numeric_limits<double>::infinity();
  for (double o : offsets) a = std::min(a, o);
  return a;
}

double MultiSolitonConfig::center(int k, double t) const {
  double x = x1 + (speed(k) - frame_speed) * t;
  for (int j = 0; j < k; ++j) x += offsets[j];
  return x;
}

double MultiSolitonConfig::margin(int k) const {
  if (tail_margin > 0.0) return tail_margin;
  const WaveProfile& p = waves[k];
  double rate = std::min(p.tail_rate_left, p.tail_rate_right);
  return 23.0 / rate;
}

void MultiSolitonConfig::validate() const {
  if (waves.empty()) fail(ErrorKind::configuration, "no waves");
  if (static_cast<int>(offsets.size()) != size() - 1)
    fail(ErrorKind::configuration, "expected " + std::to_string(size() - 1) + " offsets");
  for (double o : offsets)
    if (!(o > 0.0)) fail(ErrorKind::configuration, "offsets must be positive");
  for (int k = 0; k + 1 < size(); ++k)
    if (!(speed(k + 1) > speed(k))) fail(ErrorKind::configuration, "speeds must be strictly increasing");
  const EndState& bg = background();
  for (int k = 0; k < size(); ++k) {
    const TravelingWaveSpec& s = waves[k].spec;
    bool soliton = s.kind == WaveKind::soliton;
    if (k > 0 || !leading_kink) {
      if (!soliton) fail(ErrorKind::configuration, "only the leading wave may be a kink");
    } else if (soliton) {
      fail(ErrorKind::configuration, "leading_kink set but wave 1 is a soliton");
    }
    double tol = 1e-10 * std::max(1.0, std::abs(bg.rho));
    if (std::abs(s.right.rho - bg.rho) > tol || std::abs(s.right.v - bg.v) > tol)
      fail(ErrorKind::configuration, "wave " + std::to_string(k + 1) + " does not share the common endstate");
  }
  if (interp_points < 2) fail(ErrorKind::configuration, "interp_points < 2");
}

MultiSolitonConfig make_config(std::vector<WaveProfile> waves, double A, double x1, double frame_speed,
                               bool leading_kink) {
  MultiSolitonConfig c;
  c.waves = std::move(waves);
  c.offsets.assign(c.waves.empty() ? 0 : c.waves.size() - 1, A);
  c.x1 = x1;
  c.frame_speed = frame_speed;
  c.leading_kink = leading_kink;
  c.validate();
  return c;
}

void check_window(const MultiSolitonConfig& cfg, double t, const Grid& grid) {
  const double lo = grid.x(0), hi = grid.x(grid.n - 1);
  for (int k = 0; k < cfg.size(); ++k) {
    double x = cfg.center(k, t), m = cfg.margin(k);
    if (x - lo < m || hi - x < m)
      fail(ErrorKind::window, "wave " + std::to_string(k + 1) + " centre " + std::to_string(x) +
                                  " within tail margin " + std::to_string(m) + " of [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "] at t=" + std::to_string(t));
  }
}

namespace {

// rho and d/dt rho of one translated wave
void add_wave(const MultiSolitonConfig& cfg, int k, double t, const Grid& g, bool full, FieldState& s,
              FieldState* ds) {
  const WaveProfile& p = cfg.waves[k];
  const double xc = cfg.center(k, t), c = p.spec.c, j = p.spec.j;
  const double vel = c - cfg.frame_speed;
  const EndState& bg = cfg.background();
  const int pts = cfg.interp_points;
  for (int i = 0; i < g.n; ++i) {
    double y = g.x(i) - xc;
    double r = p.rho_at(y, pts);
    double v = c + j / r;
    s.rho[i] += full ? r : r - bg.rho;
    s.v[i] += full ? v : v - bg.v;
    if (ds) {
      double rt = -vel * p.rho_x_at(y, pts);
      ds->rho[i] += rt;
      ds->v[i] += -j / (r * r) * rt;
    }
  }
}

}  // namespace

FieldState assemble_S(const MultiSolitonConfig& cfg, double t, const Grid& grid) {
  check_window(cfg, t, grid);
  FieldState s(grid.n, t);
  for (int k = 0; k < cfg.size(); ++k) add_wave(cfg, k, t, grid, k == 0, s, nullptr);
  return s;
}

FieldState assemble_dSdt(const MultiSolitonConfig& cfg, double t, const Grid& grid) {
  check_window(cfg, t, grid);
  FieldState s(grid.n, t), ds(grid.n, t);
  for (int k = 0; k < cfg.size(); ++k) add_wave(cfg, k, t, grid, k == 0, s, &ds);
  return ds;
}

namespace {

double psi(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }
double psi_prime(double u) { return u > 0.0 ? std::exp(-1.0 / u) / (u * u) : 0.0; }

}  // namespace

double smooth_step(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 0.5) return 1.0;
  double a = psi(2.0 * s), b = psi(1.0 - 2.0 * s);
  return a / (a + b);
}

double smooth_step_prime(double s) {
  if (s <= 0.0 || s >= 0.5) return 0.0;
  double a = psi(2.0 * s), b = psi(1.0 - 2.0 * s);
  double da = 2.0 * psi_prime(2.0 * s), db = -2.0 * psi_prime(1.0 - 2.0 * s);
  return (da * b - a * db) / ((a + b) * (a + b));
}

PartitionBundle partition_of_unity(const MultiSolitonConfig& cfg, double t, const Grid& grid) {
  cfg.validate();
  const int n = cfg.size(), N = grid.n;
  PartitionBundle pb;
  pb.t = t;
  pb.phi.assign(n, Vec(N, 0.0));
  std::vector<Vec> phx(n, Vec(N, 0.0)), pht(n, Vec(N, 0.0));
  std::vector<double> cum(n, 0.0);
  for (int k = 1; k < n; ++k) cum[k] = cum[k - 1] + cfg.offsets[k - 1];
  for (int i = 0; i < N; ++i) {
    const double xi = grid.x(i) + cfg.frame_speed * t - cfg.x1;
    if (n == 1) {
      pb.phi[0][i] = 1.0;
      continue;
    }
    // transition between waves k and k+1
    for (int k = 0; k + 1 < n; ++k) {
      double A = cfg.offsets[k];
      double s = (xi - cfg.midspeed(k) * t - (cum[k] + 0.5 * A)) / A;
      double c = smooth_step(s), dc = smooth_step_prime(s);
      double sx = 1.0 / A, st = (cfg.frame_speed - cfg.midspeed(k)) / A;
      pb.phi[k][i] -= c;
      phx[k][i] -= dc * sx;
      pht[k][i] -= dc * st;
      pb.phi[k + 1][i] += c;
      phx[k + 1][i] += dc * sx;
      pht[k + 1][i] += dc * st;
    }
    pb.phi[0][i] += 1.0;
  }
  pb.chi.assign(n, Vec(N));
  pb.dchi_dx.assign(n, Vec(N));
  pb.dchi_dt.assign(n, Vec(N));
  pb.min_phi2 = std::numeric_limits<double>::infinity();
  for (int i = 0; i < N; ++i) {
    double q = 0.0, qx = 0.0, qt = 0.0;
    for (int k = 0; k < n; ++k) {
      q += pb.phi[k][i] * pb.phi[k][i];
      qx += pb.phi[k][i] * phx[k][i];
      qt += pb.phi[k][i] * pht[k][i];
    }
    pb.min_phi2 = std::min(pb.min_phi2, q);
    double R = std::sqrt(q);
    for (int k = 0; k < n; ++k) {
      double p = pb.phi[k][i];
      pb.chi[k][i] = p / R;
      pb.dchi_dx[k][i] = phx[k][i] / R - p * qx / (q * R);
      pb.dchi_dt[k][i] = pht[k][i] / R - p * qt / (q * R);
    }
  }
  if (!(pb.min_phi2 >= 1e-6))
    fail(ErrorKind::configuration, "partition degenerate at t=" + std::to_string(t) + " (sum phi^2 = " +
                                       std::to_string(pb.min_phi2) + "); offsets too small");
  return pb;
}

ResidualResult residual(const Discretization& d, const FieldState& V, const FieldState& dVdt, double cf) {
  ResidualResult r;
  r.f = dVdt;
  axpy(-1.0, rhs_nonlinear(d, V, cf), r.f);
  r.f.t = V.t;
  r.norm = norm_H0(d, r.f);
  return r;
}

ResidualResult residual(const Discretization& d, const StateProvider& V, double t, double dt_fd, double cf) {
  FieldState a = V(t + dt_fd), b = V(t - dt_fd);
  FieldState dv(a.size(), t);
  for (int i = 0; i < a.size(); ++i) {
    dv.rho[i] = (a.rho[i] - b.rho[i]) / (2.0 * dt_fd);
    dv.v[i] = (a.v[i] - b.v[i]) / (2.0 * dt_fd);
  }
  return residual(d, V(t), dv, cf);
}

double default_T_end(const MultiSolitonConfig& cfg) {
  if (cfg.size() < 2) return 10.0;
  double T = std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < cfg.size(); ++k) T = std::min(T, cfg.offsets[k] / (cfg.speed(k + 1) - cfg.speed(k)));
  return T;
}

double discretization_floor(const Discretization& d, const MultiSolitonConfig& cfg, double T_end) {
  double fl = 0.0;
  for (int k = 0; k < cfg.size(); ++k) {
    MultiSolitonConfig one = cfg;
    one.waves = {cfg.waves[k]};
    one.offsets.clear();
    one.leading_kink = k == 0 && cfg.leading_kink;
    one.x1 = cfg.center(k, 0.0);
    for (double t : {0.0, 0.5 * T_end, T_end}) {
      FieldState S = assemble_S(one, t, d.grid());
      fl = std::max(fl, residual(d, S, assemble_dSdt(one, t, d.grid()), cfg.frame_speed).norm);
    }
  }
  return fl;
}

namespace {

FieldState cubic_in_time(const std::vector<FieldState>& rec, const std::vector<double>& times, double t) {
  const int m = static_cast<int>(times.size());
  if (m == 1) return rec[0];
  const double dt = times[1] - times[0];
  double u = (t - times[0]) / dt;
  int i0 = std::clamp(static_cast<int>(std::floor(u)) - 1, 0, std::max(0, m - 4));
  int np = std::min(4, m);
  FieldState o(rec[0].size(), t);
  for (int a = 0; a < np; ++a) {
    double w = 1.0;
    for (int b = 0; b < np; ++b)
      if (b != a) w *= (u - (i0 + b)) / static_cast<double>(a - b);
    axpy(w, rec[i0 + a], o);
  }
  o.t = t;
  return o;
}

}  // namespace

FieldState ApproximateSolution::correction(double t) const {
  FieldState o(grid.n, t);
  for (const auto& eta : eta_list) axpy(1.0, cubic_in_time(eta, record_times, t), o);
  o.t = t;
  return o;
}

FieldState ApproximateSolution::state(double t) const {
  FieldState s = assemble_S(config, t, grid);
  axpy(1.0, correction(t), s);
  return s;
}

StateProvider ApproximateSolution::provider() const {
  return [this](double t) { return state(t); };
}

ApproximateSolution newton_iterate(const Discretization& d, const MultiSolitonConfig& cfg, const NewtonOptions& opt) {
  cfg.validate();
  const Grid& g = d.grid();
  const double cf = cfg.frame_speed;
  ApproximateSolution out;
  out.config = cfg;
  out.grid = g;
  out.T_end = opt.T_end > 0.0 ? opt.T_end : default_T_end(cfg);
  if (opt.records < 2) fail(ErrorKind::configuration, "records < 2");
  const int R = opt.records;
  double dt_max = opt.dt > 0.0 ? opt.dt : cfl_dt(d, assemble_S(cfg, 0.0, g));
  int stride = std::max(1, static_cast<int>(std::ceil(out.T_end / dt_max / (R - 1))));
  const int N = stride * (R - 1);  // full steps
  const double dt = out.T_end / N;
  out.dt = dt;
  out.floor = opt.floor >= 0.0 ? opt.floor : discretization_floor(d, cfg, out.T_end);
  for (int i = 0; i < R; ++i) out.record_times.push_back(i * stride * dt);

  // half-step lattice k = 0..2N at t_k = k dt / 2
  const int L = 2 * N + 1;
  auto tk = [&](int k) { return 0.5 * dt * k; };
  std::vector<FieldState> S(L), F(L);
  for (int k = 0; k < L; ++k) {
    S[k] = assemble_S(cfg, tk(k), g);
    F[k] = residual(d, S[k], assemble_dSdt(cfg, tk(k), g), cf).f;
  }
  auto record = [&](std::vector<FieldState>& f) {
    std::vector<double> h;
    double sup = 0.0;
    for (int k = 0; k < L; ++k) {
      double nk = norm_H0(d, f[k]);
      if (!std::isfinite(nk)) sup = std::numeric_limits<double>::infinity();
      sup = std::max(sup, nk);
      if (k % (2 * stride) == 0) h.push_back(nk);
    }
    out.residual_history.push_back(std::move(h));
    out.sup_residual.push_back(sup);
  };
  record(F);

  std::vector<FieldState> eta(L), deta(L);
  for (int it = 0; it < opt.max_iters; ++it) {
    if (out.sup_residual.back() <= 10.0 * out.floor) break;
    const std::string tag = "newton iteration " + std::to_string(it + 1);
    // backward sweep of  eta' = L[S] eta - F,  eta(T_end) = 0
    HessianCoefficients c_hi = hessian_coefficients(d, S[L - 1]);
    FieldState e(g.n, out.T_end);
    auto lin = [&](const HessianCoefficients& c, const FieldState& y, const FieldState& f) {
      FieldState o = linearized_rhs(d, c, y, cf);
      axpy(-1.0, f, o);
      return o;
    };
    const double tau = -dt;
    eta[L - 1] = e;
    for (int m = N; m >= 1; --m) {
      const int i = 2 * m;
      HessianCoefficients c_mid = hessian_coefficients(d, S[i - 1]);
      HessianCoefficients c_lo = hessian_coefficients(d, S[i - 2]);
      FieldState k1 = lin(c_hi, e, F[i]);
      deta[i] = k1;
      FieldState y = e;
      axpy(0.5 * tau, k1, y);
      FieldState k2 = lin(c_mid, y, F[i - 1]);
      y = e;
      axpy(0.5 * tau, k2, y);
      FieldState k3 = lin(c_mid, y, F[i - 1]);
      y = e;
      axpy(tau, k3, y);
      FieldState k4 = lin(c_lo, y, F[i - 2]);
      axpy(tau / 6.0, k1, e);
      axpy(tau / 3.0, k2, e);
      axpy(tau / 3.0, k3, e);
      axpy(tau / 6.0, k4, e);
      e.t = tk(i - 2);
      for (int q = 0; q < g.n; ++q)
        if (!std::isfinite(e.rho[q]) || !std::isfinite(e.v[q]))
          fail(ErrorKind::divergence, tag + ": linear solve blew up at t=" + std::to_string(e.t));
      eta[i - 2] = e;
      c_hi = std::move(c_lo);
    }
    deta[0] = lin(c_hi, eta[0], F[0]);
    // midpoints by cubic Hermite
    for (int m = 0; m < N; ++m) {
      const int a = 2 * m, b = a + 2;
      FieldState o(g.n, tk(a + 1));
      for (int q = 0; q < g.n; ++q) {
        o.rho[q] = 0.5 * (eta[a].rho[q] + eta[b].rho[q]) + dt / 8.0 * (deta[a].rho[q] - deta[b].rho[q]);
        o.v[q] = 0.5 * (eta[a].v[q] + eta[b].v[q]) + dt / 8.0 * (deta[a].v[q] - deta[b].v[q]);
      }
      eta[a + 1] = std::move(o);
    }
    // f^{j+1} = RHS(S) + L eta - RHS(S + eta)
    for (int k = 0; k < L; ++k) {
      FieldState Sn = S[k];
      axpy(1.0, eta[k], Sn);
      FieldState f = rhs_nonlinear(d, S[k], cf);
      axpy(1.0, linearized_rhs(d, hessian_coefficients(d, S[k]), eta[k], cf), f);
      axpy(-1.0, rhs_nonlinear(d, Sn, cf), f);
      f.t = tk(k);
      F[k] = std::move(f);
      S[k] = std::move(Sn);
    }
    std::vector<FieldState> snap;
    for (int i = 0; i < R; ++i) snap.push_back(eta[2 * i * stride]);
    out.eta_list.push_back(std::move(snap));
    record(F);
    out.iterations = it + 1;
    double prev = out.sup_residual[out.sup_residual.size() - 2], now = out.sup_residual.back();
    if (!std::isfinite(now) || now > opt.divergence_factor * prev)
      fail(ErrorKind::divergence, tag + ": residual grew from " + std::to_string(prev) + " to " +
                                      std::to_string(now));
  }
  return out;
}

std::vector<DecompositionRecord> track_parameters(const Discretization& d, const FieldState& U,
                                                  const MultiSolitonConfig& cfg, double t) {
  PartitionBundle pb = partition_of_unity(cfg, t, d.grid());
  std::vector<DecompositionRecord> recs;
  for (int k = 0; k < cfg.size(); ++k) {
    FieldState cu = U;
    for (int i = 0; i < U.size(); ++i) {
      cu.rho[i] *= pb.chi[k][i];
      cu.v[i] *= pb.chi[k][i];
    }
    FieldState bg = sample_profile(cfg.waves[k], d.grid(), cfg.center(k, t), cfg.interp_points);
    bool kink = k == 0 && cfg.leading_kink;
    DecompositionRecord r = decompose(d, cu, bg, cfg.waves[k].spec.right, !kink);
    r.t = t;
    recs.push_back(std::move(r));
  }
  return recs;
}

double modified_energy(const Discretization& d, const FieldState& U, const MultiSolitonConfig& cfg, double t,
                       const FieldState* eta) {
  FieldState S = assemble_S(cfg, t, d.grid());
  if (eta) axpy(1.0, *eta, S);
  double e = inner(apply_d2H(d, S, U), U, d.h());
  if (cfg.size() == 1) {
    double ru = 0.0;
    for (int i = 0; i < U.size(); ++i) ru += U.rho[i] * U.v[i];
    return e - cfg.speed(0) * 2.0 * d.h() * ru;
  }
  PartitionBundle pb = partition_of_unity(cfg, t, d.grid());
  for (int k = 0; k < cfg.size(); ++k) {
    double ru = 0.0;
    for (int i = 0; i < U.size(); ++i) ru += pb.chi[k][i] * pb.chi[k][i] * U.rho[i] * U.v[i];
    e -= cfg.speed(k) * 2.0 * d.h() * ru;
  }
  return e;
}

}  // namespace ek
