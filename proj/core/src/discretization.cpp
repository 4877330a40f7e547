#include "ek/discretization.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "ek/error.hpp"

namespace ek {

Stencil parse_stencil(std::string_view s) {
  if (s == "fd2") return Stencil::fd2;
  if (s == "fd4") return Stencil::fd4;
  if (s == "spectral") return Stencil::spectral;
  fail(ErrorKind::configuration, "unknown stencil '" + std::string(s) + "'");
}

const char* to_string(Stencil s) {
  switch (s) {
    case Stencil::fd2: return "fd2";
    case Stencil::fd4: return "fd4";
    case Stencil::spectral: return "spectral";
  }
  return "?";
}

namespace {

constexpr int kPad = 3;

struct Weights {
  int count;
  int off[4];
  double w[4];
};

Weights interp_weights(Stencil s) {
  if (s == Stencil::fd2) return {2, {0, 1}, {0.5, 0.5}};
  return {4, {-1, 0, 1, 2}, {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16}};
}

Weights diff_weights(Stencil s, double h) {
  if (s == Stencil::fd2) return {2, {0, 1}, {-1.0 / h, 1.0 / h}};
  return {4, {-1, 0, 1, 2}, {1.0 / (24 * h), -27.0 / (24 * h), 27.0 / (24 * h), -1.0 / (24 * h)}};
}

Weights center_weights(Stencil s, double h) {
  if (s == Stencil::fd2) return {2, {-1, 1}, {-0.5 / h, 0.5 / h}};
  return {4, {-2, -1, 1, 2}, {1.0 / (12 * h), -8.0 / (12 * h), 8.0 / (12 * h), -1.0 / (12 * h)}};
}

}  // namespace

struct Discretization::Fft {
  int n;
  double* in;
  fftw_complex* spec;
  fftw_plan fwd, bwd;
  std::vector<double> k;

  Fft(int n_, double length) : n(n_) {
    in = fftw_alloc_real(n);
    spec = fftw_alloc_complex(n / 2 + 1);
    fwd = fftw_plan_dft_r2c_1d(n, in, spec, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_1d(n, spec, in, FFTW_ESTIMATE);
    k.resize(n / 2 + 1);
    for (int j = 0; j <= n / 2; ++j) k[j] = 2.0 * std::numbers::pi * j / length;
    if (n % 2 == 0) k[n / 2] = 0.0;
  }
  ~Fft() {
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
    fftw_free(in);
    fftw_free(spec);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;
};

Discretization::Discretization(FluidModel model, Grid grid, Stencil stencil)
    : model_(std::move(model)), grid_(grid), stencil_(stencil) {
  if (grid_.n < 16) fail(ErrorKind::configuration, "grid needs n >= 16");
  if (stencil_ == Stencil::spectral) {
    if (grid_.boundary != Boundary::periodic)
      fail(ErrorKind::configuration, "spectral stencil requires a periodic grid");
    fft_ = std::make_shared<Fft>(grid_.n, grid_.length());
    n_edges_ = grid_.n;
    first_edge_ = 0;
    half_ = 0;
    return;
  }
  half_ = stencil_ == Stencil::fd2 ? 1 : 2;
  if (grid_.boundary == Boundary::periodic) {
    n_edges_ = grid_.n;
    first_edge_ = 0;
  } else {
    first_edge_ = -half_;
    n_edges_ = grid_.n + 2 * half_ - 1;
  }
}

void Discretization::pad(const Vec& f, double gl, double gr, Vec& p) const {
  const int n = grid_.n;
  p.resize(n + 2 * kPad);
  for (int i = 0; i < n; ++i) p[i + kPad] = f[i];
  if (grid_.boundary == Boundary::periodic) {
    for (int i = 0; i < kPad; ++i) {
      p[i] = f[n - kPad + i];
      p[n + kPad + i] = f[i];
    }
  } else {
    for (int i = 0; i < kPad; ++i) {
      p[i] = gl;
      p[n + kPad + i] = gr;
    }
  }
}

void Discretization::spectral_diff(const Vec& f, Vec& out) const {
  Fft& F = *fft_;
  const int n = F.n;
  for (int i = 0; i < n; ++i) F.in[i] = f[i];
  fftw_execute(F.fwd);
  for (int j = 0; j <= n / 2; ++j) {
    double re = F.spec[j][0], im = F.spec[j][1];
    F.spec[j][0] = -F.k[j] * im / n;
    F.spec[j][1] = F.k[j] * re / n;
  }
  fftw_execute(F.bwd);
  out.resize(n);
  for (int i = 0; i < n; ++i) out[i] = F.in[i];
}

void Discretization::interp(const Vec& f, double gl, double gr, Vec& out) const {
  if (stencil_ == Stencil::spectral) {
    out = f;
    return;
  }
  Vec p;
  pad(f, gl, gr, p);
  Weights w = interp_weights(stencil_);
  out.assign(n_edges_, 0.0);
  for (int k = 0; k < n_edges_; ++k) {
    int e = first_edge_ + k + kPad;
    double s = 0.0;
    for (int a = 0; a < w.count; ++a) s += w.w[a] * p[e + w.off[a]];
    out[k] = s;
  }
}

void Discretization::diff(const Vec& f, double gl, double gr, Vec& out) const {
  if (stencil_ == Stencil::spectral) {
    spectral_diff(f, out);
    return;
  }
  Vec p;
  pad(f, gl, gr, p);
  Weights w = diff_weights(stencil_, grid_.h);
  out.assign(n_edges_, 0.0);
  for (int k = 0; k < n_edges_; ++k) {
    int e = first_edge_ + k + kPad;
    double s = 0.0;
    for (int a = 0; a < w.count; ++a) s += w.w[a] * p[e + w.off[a]];
    out[k] = s;
  }
}

namespace {

void transpose_apply(const Weights& w, const Vec& e, Vec& out, int n, int first, bool periodic) {
  const int ne = static_cast<int>(e.size());
  for (int k = 0; k < ne; ++k) {
    const int edge = first + k;
    for (int a = 0; a < w.count; ++a) {
      int node = edge + w.off[a];
      if (periodic)
        node = (node % n + n) % n;
      else if (node < 0 || node >= n)
        continue;
      out[node] += w.w[a] * e[k];
    }
  }
}

}  // namespace

void Discretization::interp_t(const Vec& e, Vec& out, bool accumulate) const {
  const int n = grid_.n;
  if (!accumulate) out.assign(n, 0.0);
  if (stencil_ == Stencil::spectral) {
    for (int i = 0; i < n; ++i) out[i] += e[i];
    return;
  }
  transpose_apply(interp_weights(stencil_), e, out, n, first_edge_, grid_.boundary == Boundary::periodic);
}

void Discretization::diff_t(const Vec& e, Vec& out, bool accumulate) const {
  const int n = grid_.n;
  if (!accumulate) out.assign(n, 0.0);
  if (stencil_ == Stencil::spectral) {
    Vec d;
    spectral_diff(e, d);
    for (int i = 0; i < n; ++i) out[i] -= d[i];
    return;
  }
  transpose_apply(diff_weights(stencil_, grid_.h), e, out, n, first_edge_,
                  grid_.boundary == Boundary::periodic);
}

void Discretization::center(const Vec& f, double gl, double gr, Vec& out) const {
  if (stencil_ == Stencil::spectral) {
    spectral_diff(f, out);
    return;
  }
  const int n = grid_.n;
  Vec p;
  pad(f, gl, gr, p);
  Weights w = center_weights(stencil_, grid_.h);
  out.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int a = 0; a < w.count; ++a) s += w.w[a] * p[i + kPad + w.off[a]];
    out[i] = s;
  }
}

namespace {

double ghost_l(const Discretization& d, double EndState::*f) { return d.grid().left.*f; }
double ghost_r(const Discretization& d, double EndState::*f) { return d.grid().right.*f; }

}  // namespace

HessianCoefficients hessian_coefficients(const Discretization& d, const FieldState& bg) {
  const FluidModel& m = d.model();
  HessianCoefficients c;
  const int n = d.n();
  c.rho = bg.rho;
  c.v = bg.v;
  c.g1.resize(n);
  for (int i = 0; i < n; ++i) c.g1[i] = m.g1(bg.rho[i]);
  Vec re, de;
  d.interp(bg.rho, ghost_l(d, &EndState::rho), ghost_r(d, &EndState::rho), re);
  d.diff(bg.rho, ghost_l(d, &EndState::rho), ghost_r(d, &EndState::rho), de);
  const int ne = d.edges();
  c.k2.resize(ne);
  c.k1e.resize(ne);
  c.k0.resize(ne);
  for (int k = 0; k < ne; ++k) {
    c.k2[k] = 0.5 * m.K2(re[k]) * de[k] * de[k];
    c.k1e[k] = m.K1(re[k]) * de[k];
    c.k0[k] = m.K(re[k]);
  }
  return c;
}

double discrete_H(const Discretization& d, const FieldState& s, const EndState& ref) {
  const FluidModel& m = d.model();
  const int n = d.n();
  const double l1 = 0.5 * ref.v * ref.v + m.g(ref.rho);
  const double l2 = ref.rho * ref.v;
  const double e0 = 0.5 * ref.rho * ref.v * ref.v + m.Gfun(ref.rho);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = s.rho[i], v = s.v[i];
    if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::state, "vacuum in energy evaluation");
    sum += 0.5 * r * v * v + m.Gfun(r) - e0 - l1 * (r - ref.rho) - l2 * (v - ref.v);
  }
  Vec re, de;
  d.interp(s.rho, ghost_l(d, &EndState::rho), ghost_r(d, &EndState::rho), re);
  d.diff(s.rho, ghost_l(d, &EndState::rho), ghost_r(d, &EndState::rho), de);
  for (int k = 0; k < d.edges(); ++k) sum += 0.5 * m.K(re[k]) * de[k] * de[k];
  return d.h() * sum;
}

double discrete_P(const FieldState& s, const EndState& ref, double h) {
  double sum = 0.0;
  for (int i = 0; i < s.size(); ++i) sum += (s.rho[i] - ref.rho) * (s.v[i] - ref.v);
  return h * sum;
}

double discrete_P(const Discretization& d, const FieldState& s, const EndState& ref) {
  return discrete_P(s, ref, d.h());
}

FieldState delta_H(const Discretization& d, const FieldState& s) {
  const FluidModel& m = d.model();
  const int n = d.n();
  FieldState out(n, s.t);
  for (int i = 0; i < n; ++i) {
    if (!(s.rho[i] > 0.0) || !std::isfinite(s.rho[i])) fail(ErrorKind::state, "vacuum in delta_H");
    out.rho[i] = 0.5 * s.v[i] * s.v[i] + m.g(s.rho[i]);
    out.v[i] = s.rho[i] * s.v[i];
  }
  Vec re, de;
  d.interp(s.rho, ghost_l(d, &EndState::rho), ghost_r(d, &EndState::rho), re);
  d.diff(s.rho, ghost_l(d, &EndState::rho), ghost_r(d, &EndState::rho), de);
  const int ne = d.edges();
  Vec a(ne), b(ne);
  for (int k = 0; k < ne; ++k) {
    a[k] = 0.5 * m.K1(re[k]) * de[k] * de[k];
    b[k] = m.K(re[k]) * de[k];
  }
  d.interp_t(a, out.rho, true);
  d.diff_t(b, out.rho, true);
  return out;
}

FieldState apply_d2H(const Discretization& d, const HessianCoefficients& c, const FieldState& u) {
  const int n = d.n();
  FieldState out(n, u.t);
  Vec t1, t2;
  d.interp(u.rho, 0.0, 0.0, t1);
  d.diff(u.rho, 0.0, 0.0, t2);
  const int ne = d.edges();
  Vec A(ne), B(ne);
  for (int k = 0; k < ne; ++k) {
    A[k] = c.k2[k] * t1[k] + c.k1e[k] * t2[k];
    B[k] = c.k1e[k] * t1[k] + c.k0[k] * t2[k];
  }
  for (int i = 0; i < n; ++i) {
    out.rho[i] = c.g1[i] * u.rho[i] + c.v[i] * u.v[i];
    out.v[i] = c.v[i] * u.rho[i] + c.rho[i] * u.v[i];
  }
  d.interp_t(A, out.rho, true);
  d.diff_t(B, out.rho, true);
  return out;
}

FieldState apply_d2H(const Discretization& d, const FieldState& bg, const FieldState& u) {
  return apply_d2H(d, hessian_coefficients(d, bg), u);
}

double inner(const FieldState& a, const FieldState& b, double h) {
  double s = 0.0;
  for (int i = 0; i < a.size(); ++i) s += a.rho[i] * b.rho[i] + a.v[i] * b.v[i];
  return h * s;
}

double norm_H0(const Discretization& d, const FieldState& u) {
  Vec dr = d.center(u.rho, 0.0, 0.0);
  double a = 0.0, b = 0.0;
  for (int i = 0; i < d.n(); ++i) {
    a += u.rho[i] * u.rho[i] + dr[i] * dr[i];
    b += u.v[i] * u.v[i];
  }
  return std::sqrt(d.h() * a) + std::sqrt(d.h() * b);
}

}  // namespace ek
