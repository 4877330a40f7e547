#include "ek/profiles.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <string>

#include "ek/error.hpp"

namespace ek {

namespace odeint = boost::numeric::odeint;

double reduced_f(const FluidModel& m, double rho, double j, double q) {
  return j * j / (2.0 * rho * rho) - q + m.g(rho);
}

double reduced_f_prime(const FluidModel& m, double rho, double j) {
  return -j * j / (rho * rho * rho) + m.g1(rho);
}

double reduced_F_quotient(const FluidModel& m, double rho, double j, double anchor) {
  const double d = rho - anchor;
  auto g1 = [&](double t) { return (1.0 - t) * m.g1(anchor + t * d); };
  return -j * j / (2.0 * anchor * anchor * rho) + boost::math::quadrature::gauss<double, 20>::integrate(g1, 0.0, 1.0);
}

double reduced_F(const FluidModel& m, double rho, double j, double q, double anchor) {
  const double d = rho - anchor;
  return reduced_f(m, anchor, j, q) * d + d * d * reduced_F_quotient(m, rho, j, anchor);
}

std::pair<double, double> first_integrals(const FluidModel& m, const EndState& right, double c) {
  m.check(right.rho);
  double j = right.rho * (right.v - c);
  double q = j * j / (2.0 * right.rho * right.rho) + m.g(right.rho);
  return {j, q};
}

ConditionReport kink_conditions(const FluidModel& m, double rm, double rp, double j, double q) {
  m.check(rm);
  m.check(rp);
  if (rm == rp) fail(ErrorKind::precondition, "kink endstates coincide");
  ConditionReport r;
  r.f_minus = reduced_f(m, rm, j, q);
  r.f_plus = reduced_f(m, rp, j, q);
  r.cond_j_minus = reduced_f_prime(m, rm, j) > 0.0;
  r.cond_j_plus = reduced_f_prime(m, rp, j) > 0.0;

  auto f = [&](double s) { return reduced_f(m, s, j, q); };
  double err = 0.0, l1 = 0.0;
  r.area = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, rm, rp, 20, 1e-10, &err, &l1);
  if (!(err <= 1e-10 * l1 + 1e-15)) fail(ErrorKind::numerical, "area quadrature did not converge");

  const int samples = 2000;
  int last = 0;
  for (int i = 1; i < samples; ++i) {
    double s = rm + (rp - rm) * i / samples;
    double v = f(s);
    int sg = v > 1e-14 ? 1 : (v < -1e-14 ? -1 : 0);
    if (sg != 0) {
      if (last != 0 && sg != last) ++r.f_sign_changes;
      last = sg;
    }
  }
  return r;
}

TravelingWaveSpec solve_kink_endstates(const FluidModel& m, double c, const KinkGuess& guess) {
  m.check(guess.rho_minus);
  m.check(guess.rho_plus);
  const double s = guess.v_plus - c;
  double rm = guess.rho_minus, rp = guess.rho_plus;
  double j = rp * s;
  double q = j * j / (2.0 * rp * rp) + m.g(rp);

  auto residual = [&](double a, double b, double qq) {
    double jj = b * s;
    Eigen::Vector3d r;
    r(0) = reduced_f(m, a, jj, qq);
    r(1) = reduced_f(m, b, jj, qq);
    r(2) = 0.5 * jj * jj * (1.0 / a - 1.0 / b) - qq * (b - a) + m.Gfun(b) - m.Gfun(a);
    return r;
  };

  const double scale = std::abs(rp - rm);
  Eigen::Vector3d r = residual(rm, rp, q);
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    if (r.cwiseAbs().maxCoeff() <= 1e-12) {
      converged = true;
      break;
    }
    j = rp * s;
    Eigen::Matrix3d jac;
    jac << reduced_f_prime(m, rm, j), j * s / (rm * rm), -1.0,  //
        0.0, m.g1(rp), -1.0,                                     //
        -reduced_f(m, rm, j, q), reduced_f(m, rp, j, q) + j * s * (1.0 / rm - 1.0 / rp), -(rp - rm);
    Eigen::Vector3d step = jac.fullPivLu().solve(-r);
    if (!step.allFinite()) break;
    double lam = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls, lam *= 0.5) {
      double a = rm + lam * step(0), b = rp + lam * step(1), qq = q + lam * step(2);
      if (!m.in_domain(a) || !m.in_domain(b)) continue;
      Eigen::Vector3d rn = residual(a, b, qq);
      if (rn.norm() < (1.0 - 1e-4 * lam) * r.norm() || rn.norm() < 1e-13) {
        rm = a, rp = b, q = qq, r = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    if (std::abs(rp - rm) < 1e-3 * scale)
      fail(ErrorKind::no_kink_found, "Newton iteration collapsed onto a trivial root rho- = rho+");
  }
  if (!converged || r.cwiseAbs().maxCoeff() > 1e-10)
    fail(ErrorKind::no_kink_found, "kink endstate iteration did not converge");
  if (std::abs(rp - rm) < 1e-3 * scale)
    fail(ErrorKind::no_kink_found, "collapsed onto a trivial root rho- = rho+");

  j = rp * s;
  if (reduced_f_prime(m, rm, j) <= 0.0 || reduced_f_prime(m, rp, j) <= 0.0)
    fail(ErrorKind::saddle_violation, "endstate is not a saddle point of the profile ODE (rho-=" + std::to_string(rm) + ", rho+=" + std::to_string(rp) + ")");

  TravelingWaveSpec spec;
  spec.c = c;
  spec.j = j;
  spec.q = q;
  spec.right = {rp, guess.v_plus};
  spec.left = {rm, c + j / rm};
  spec.kind = WaveKind::kink;
  return spec;
}

namespace {

double tail_rate(const FluidModel& m, double rho, double j) {
  double fp = reduced_f_prime(m, rho, j);
  return fp > 0.0 ? std::sqrt(fp / m.K(rho)) : 0.0;
}

struct Branch {
  std::vector<double> rho, drho;
};

// Integrates rho(s), s >= 0, from rho(0) = rho0 monotonically towards `target`.
// second_order starts with the (rho, rho') system, needed at a turning point where F has a simple zero.
Branch integrate_branch(const FluidModel& m, double j, double q, double rho0, double target, double amp,
                        bool second_order, const std::vector<double>& s) {
  Branch out;
  out.rho.resize(s.size());
  out.drho.resize(s.size());
  const double dir = target > rho0 ? 1.0 : -1.0;
  const double lambda = tail_rate(m, target, j);
  const double thr = 1e-6 * amp;
  std::size_t k = 0;
  double x = 0.0;
  double rho = rho0;

  auto Fk = [&](double r) { return std::max(2.0 * reduced_F(m, r, j, q, target) / m.K(r), 0.0); };

  if (second_order) {
    using S2 = std::array<double, 2>;
    auto sys = [&](const S2& y, S2& dy, double) {
      dy[0] = y[1];
      dy[1] = (reduced_f(m, y[0], j, q) - 0.5 * m.K1(y[0]) * y[1] * y[1]) / m.K(y[0]);
    };
    const double level = rho0 + 0.5 * (target - rho0);
    auto st = odeint::make_dense_output(1e-14, 1e-13, odeint::runge_kutta_dopri5<S2>());
    st.initialize(S2{rho0, 0.0}, 0.0, 1e-3);
    while (true) {
      auto [t0, t1] = st.do_step(sys);
      S2 y1 = st.current_state();
      bool crossed = dir * (y1[0] - level) >= 0.0;
      double tend = t1;
      if (crossed) {
        double a = t0, b = t1;
        S2 ym;
        for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
          double mid = 0.5 * (a + b);
          st.calc_state(mid, ym);
          (dir * (ym[0] - level) >= 0.0 ? b : a) = mid;
        }
        tend = b;
      }
      S2 y;
      while (k < s.size() && s[k] <= tend) {
        if (s[k] <= 0.0)
          y = S2{rho0, 0.0};
        else
          st.calc_state(std::max(s[k], t0), y);
        out.rho[k] = y[0];
        out.drho[k] = y[1];
        ++k;
      }
      if (k == s.size()) return out;
      if (crossed) {
        x = tend;
        st.calc_state(tend, y);
        rho = y[0];
        break;
      }
      if (t1 > 1e6) fail(ErrorKind::profile, "turning-point integration did not reach mid amplitude");
    }
  }

  using S1 = std::array<double, 1>;
  auto sys1 = [&](const S1& y, S1& dy, double) { dy[0] = dir * std::sqrt(Fk(y[0])); };
  if (Fk(rho) <= 0.0) fail(ErrorKind::profile, "F is not positive on the open interval");
  auto st = odeint::make_dense_output(1e-14, 1e-13, odeint::runge_kutta_dopri5<S1>());
  st.initialize(S1{rho}, x, 1e-3);
  double xs = x, rs = rho;
  while (true) {
    auto [t0, t1] = st.do_step(sys1);
    S1 y1 = st.current_state();
    bool done = dir * (target - y1[0]) <= thr;
    double tend = t1;
    if (done) {
      double a = t0, b = t1;
      S1 ym;
      for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
        double mid = 0.5 * (a + b);
        st.calc_state(mid, ym);
        (dir * (target - ym[0]) <= thr ? b : a) = mid;
      }
      tend = b;
    }
    S1 y;
    while (k < s.size() && s[k] <= tend) {
      if (s[k] <= x)
        y[0] = rho;
      else
        st.calc_state(std::max(s[k], t0), y);
      out.rho[k] = y[0];
      out.drho[k] = dir * std::sqrt(Fk(y[0]));
      ++k;
    }
    if (k == s.size()) return out;
    if (done) {
      xs = tend;
      st.calc_state(tend, y);
      rs = y[0];
      break;
    }
    if (t1 - x > 1e6) fail(ErrorKind::profile, "profile integration did not approach the endstate");
  }
  if (!(lambda > 0.0)) fail(ErrorKind::profile, "endstate has no exponential tail (sonic degeneracy)");
  const double d = std::abs(target - rs);
  for (; k < s.size(); ++k) {
    double e = d * std::exp(-lambda * (s[k] - xs));
    out.rho[k] = target - dir * e;
    out.drho[k] = dir * lambda * e;
  }
  return out;
}

std::vector<double> symmetric_grid(double hw, int n) {
  std::vector<double> xi(n);
  for (int i = 0; i < n; ++i) xi[i] = static_cast<double>(2 * i - (n - 1)) * hw / static_cast<double>(n - 1);
  return xi;
}

void auto_sampling(double rate, double& hw, int& n) {
  if (hw <= 0.0) hw = std::max(36.0 / rate, 10.0);
  if (n <= 0) n = 9001;
  if (n < 16) fail(ErrorKind::configuration, "profile needs at least 16 points");
}

}  // namespace

WaveProfile kink_profile(const FluidModel& m, const TravelingWaveSpec& spec, double hw, int n) {
  const double rm = spec.left.rho, rp = spec.right.rho;
  ConditionReport cr = kink_conditions(m, rm, rp, spec.j, spec.q);
  const double tol = 1e-8 * (1.0 + std::abs(spec.q));
  if (std::abs(cr.f_minus) > tol || std::abs(cr.f_plus) > tol || std::abs(cr.area) > tol * std::abs(rp - rm))
    fail(ErrorKind::profile, "kink conditions are not satisfied by the given spec");
  if (!cr.cond_j_minus || !cr.cond_j_plus) fail(ErrorKind::saddle_violation, "kink endstates are not saddles");

  WaveProfile p;
  p.spec = spec;
  p.spec.kind = WaveKind::kink;
  p.tail_rate_left = tail_rate(m, rm, spec.j);
  p.tail_rate_right = tail_rate(m, rp, spec.j);
  auto_sampling(std::min(p.tail_rate_left, p.tail_rate_right), hw, n);
  p.xi = symmetric_grid(hw, n);

  const double mid = 0.5 * (rm + rp);
  const double amp = std::abs(rp - rm);
  for (int i = 1; i < 50; ++i) {
    double r = rm + (rp - rm) * i / 50.0;
    double anchor = std::abs(r - rm) < std::abs(r - rp) ? rm : rp;
    if (reduced_F(m, r, spec.j, spec.q, anchor) <= 0.0) fail(ErrorKind::profile, "F < 0 between the endstates");
  }

  const int half = n / 2;  // first index with xi >= 0 is half when n odd, half when n even
  std::vector<double> s;
  for (int i = half; i < n; ++i) s.push_back(std::max(p.xi[i], 0.0));
  Branch up = integrate_branch(m, spec.j, spec.q, mid, rp, amp, false, s);
  std::vector<double> sl;
  for (int i = n - 1 - half; i >= 0; --i) sl.push_back(std::max(-p.xi[i], 0.0));
  Branch dn = integrate_branch(m, spec.j, spec.q, mid, rm, amp, false, sl);

  p.rho.assign(n, 0.0);
  p.rho_x.assign(n, 0.0);
  for (int i = half; i < n; ++i) {
    p.rho[i] = up.rho[i - half];
    p.rho_x[i] = up.drho[i - half];
  }
  for (int i = n - 1 - half, k = 0; i >= 0; --i, ++k) {
    if (i >= half) continue;
    p.rho[i] = dn.rho[k];
    p.rho_x[i] = -dn.drho[k];
  }
  p.v.resize(n);
  for (int i = 0; i < n; ++i) p.v[i] = spec.c + spec.j / p.rho[i];
  p.rho_min = *std::min_element(p.rho.begin(), p.rho.end());
  return p;
}

TravelingWaveSpec soliton_spec(const FluidModel& m, const EndState& right, double c) {
  m.check(right.rho);
  double s2 = (right.v - c) * (right.v - c);
  if (!(s2 < sound_speed_sq(m, right.rho)))
    fail(ErrorKind::precondition, "speed is not strictly subsonic relative to the endstate");
  auto [j, q] = first_integrals(m, right, c);
  TravelingWaveSpec spec;
  spec.c = c;
  spec.j = j;
  spec.q = q;
  spec.left = right;
  spec.right = right;
  spec.kind = WaveKind::soliton;
  return spec;
}

double soliton_min_density(const FluidModel& m, const EndState& right, double c) {
  TravelingWaveSpec spec = soliton_spec(m, right, c);
  const double rp = right.rho;
  auto F = [&](double r) { return reduced_F(m, r, spec.j, spec.q, rp); };
  double delta = 1e-9 * rp;
  if (!(F(rp - delta) > 0.0)) fail(ErrorKind::no_soliton, "degenerate soliton: rho_m coincides with rho+");
  const double lo = m.rho_domain.lo;
  double prev = delta;
  while (true) {
    double next = prev * 1.05;
    double r = rp - next;
    if (!(r > lo)) {
      r = lo + 1e-12 * std::max(1.0, std::abs(lo));
      next = rp - r;
      if (!(next > prev) || F(r) > 0.0) fail(ErrorKind::no_soliton, "F stays positive down to the domain edge");
    }
    if (!(F(r) > 0.0)) {
      double a = r, b = rp - prev;
      std::uintmax_t iters = 200;
      auto tol = [](double x, double y) { return std::abs(x - y) < 1e-15; };
      auto res = boost::math::tools::toms748_solve(F, a, b, F(a), F(b), tol, iters);
      return 0.5 * (res.first + res.second);
    }
    prev = next;
  }
}

WaveProfile soliton_profile(const FluidModel& m, const EndState& right, double c, double hw, int n) {
  TravelingWaveSpec spec = soliton_spec(m, right, c);
  double rmin = soliton_min_density(m, right, c);
  WaveProfile p;
  p.spec = spec;
  p.rho_min = rmin;
  p.tail_rate_left = p.tail_rate_right = tail_rate(m, right.rho, spec.j);
  if (!(p.tail_rate_right > 0.0)) fail(ErrorKind::no_soliton, "sonic endstate has no exponential tail");
  auto_sampling(p.tail_rate_right, hw, n);
  p.xi = symmetric_grid(hw, n);

  const int half = n / 2;
  std::vector<double> s;
  for (int i = half; i < n; ++i) s.push_back(std::max(p.xi[i], 0.0));
  Branch b = integrate_branch(m, spec.j, spec.q, rmin, right.rho, std::abs(right.rho - rmin), true, s);
  p.rho.assign(n, 0.0);
  p.rho_x.assign(n, 0.0);
  for (int i = half; i < n; ++i) {
    p.rho[i] = b.rho[i - half];
    p.rho_x[i] = b.drho[i - half];
    p.rho[n - 1 - i] = p.rho[i];
    p.rho_x[n - 1 - i] = -p.rho_x[i];
  }
  p.v.resize(n);
  for (int i = 0; i < n; ++i) p.v[i] = c + spec.j / p.rho[i];
  return p;
}

SaddleRoots saddle_check(const FluidModel& m, double rho, double j) {
  m.check(rho);
  SaddleRoots r;
  r.discriminant = m.g1(rho) - j * j / (rho * rho * rho);
  std::complex<double> l = std::sqrt(std::complex<double>(r.discriminant, 0.0));
  r.lambda_plus = l;
  r.lambda_minus = -l;
  r.saddle = r.discriminant > 0.0;
  return r;
}

Eigen::Matrix<double, 3, 5> kink_manifold_jacobian(const FluidModel& m, const TravelingWaveSpec& spec) {
  const double rm = spec.left.rho, rp = spec.right.rho, j = spec.j;
  Eigen::Matrix<double, 3, 5> d;
  d << -j * j / (rm * rm * rm) + m.g1(rm), 0.0, j / (rm * rm), -1.0, 0.0,  //
      0.0, -j * j / (rp * rp * rp) + m.g1(rp), j / (rp * rp), -1.0, 0.0,   //
      0.0, 0.0, 0.5 * j * j * (1.0 / rm - 1.0 / rp), rm - rp, 0.0;
  return d;
}

int numerical_rank(const Eigen::MatrixXd& a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  int r = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > rel_tol * sv(0)) ++r;
  return r;
}

int kink_manifold_rank(const FluidModel& m, const TravelingWaveSpec& spec) {
  return numerical_rank(kink_manifold_jacobian(m, spec));
}

double transonic_speed(const FluidModel& m, const EndState& right, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::precondition, "transonic parameter must lie in (0,1)");
  double cs2 = sound_speed_sq(m, right.rho);
  if (!(cs2 > 0.0)) fail(ErrorKind::precondition, "endstate is not in a hyperbolic region (g' <= 0)");
  return right.v + std::sqrt(cs2 * (1.0 - eps));
}

std::vector<WaveProfile> transonic_family(const FluidModel& m, const EndState& right,
                                          const std::vector<double>& eps_list, double hw, int n) {
  std::vector<WaveProfile> out;
  for (double e : eps_list) out.push_back(soliton_profile(m, right, transonic_speed(m, right, e), hw, n));
  return out;
}

namespace {

double lagrange(const std::vector<double>& tab, double x0, double h, double x, int points) {
  const int n = static_cast<int>(tab.size());
  const double u = (x - x0) / h;
  int i0 = static_cast<int>(std::floor(u)) - points / 2 + 1;
  i0 = std::clamp(i0, 0, n - points);
  double s = 0.0;
  for (int a = 0; a < points; ++a) {
    double w = 1.0;
    for (int b = 0; b < points; ++b)
      if (b != a) w *= (u - (i0 + b)) / static_cast<double>(a - b);
    s += w * tab[i0 + a];
  }
  return s;
}

}  // namespace

double WaveProfile::rho_at(double x, int points) const {
  const double x0 = xi.front(), x1 = xi.back();
  if (x < x0 || x > x1) {
    bool left = x < x0;
    double end = left ? spec.left.rho : spec.right.rho;
    double edge = left ? rho.front() : rho.back();
    double rate = left ? tail_rate_left : tail_rate_right;
    double dist = left ? x0 - x : x - x1;
    return end + (edge - end) * std::exp(-rate * dist);
  }
  return lagrange(rho, x0, spacing(), x, points);
}

double WaveProfile::rho_x_at(double x, int points) const {
  const double x0 = xi.front(), x1 = xi.back();
  if (x < x0 || x > x1) {
    bool left = x < x0;
    double end = left ? spec.left.rho : spec.right.rho;
    double edge = left ? rho.front() : rho.back();
    double rate = left ? tail_rate_left : tail_rate_right;
    double dist = left ? x0 - x : x - x1;
    return (left ? 1.0 : -1.0) * rate * (edge - end) * std::exp(-rate * dist);
  }
  return lagrange(rho_x, x0, spacing(), x, points);
}

double WaveProfile::v_at(double x, int points) const { return spec.c + spec.j / rho_at(x, points); }

double profile_ode_residual(const FluidModel& m, const WaveProfile& p) {
  const int n = static_cast<int>(p.size());
  const double h = p.spacing();
  const auto& r = p.rho;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    double d;
    if (i >= 2 && i <= n - 3)
      d = (r[i - 2] - 8.0 * r[i - 1] + 8.0 * r[i + 1] - r[i + 2]) / (12.0 * h);
    else if (i < 2)
      d = (-25.0 * r[i] + 48.0 * r[i + 1] - 36.0 * r[i + 2] + 16.0 * r[i + 3] - 3.0 * r[i + 4]) / (12.0 * h);
    else
      d = (25.0 * r[i] - 48.0 * r[i - 1] + 36.0 * r[i - 2] - 16.0 * r[i - 3] + 3.0 * r[i - 4]) / (12.0 * h);
    double anchor = p.spec.right.rho;
    if (p.spec.kind == WaveKind::kink &&
        std::abs(r[i] - p.spec.left.rho) < std::abs(r[i] - p.spec.right.rho))
      anchor = p.spec.left.rho;
    double F = reduced_F(m, r[i], p.spec.j, p.spec.q, anchor);
    worst = std::max(worst, std::abs(0.5 * m.K(r[i]) * d * d - F));
  }
  return worst;
}

}  // namespace ek
