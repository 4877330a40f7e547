#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ek/discretization.hpp"
#include "ek/error.hpp"
#include "ek/stability.hpp"
#include "support/random_fields.hpp"

using namespace ek;

namespace {

template <class F>
ErrorKind kind_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::state;
}

FieldState constant_state(int n, double rho, double v) {
  FieldState s(n);
  for (int i = 0; i < n; ++i) {
    s.rho[i] = rho;
    s.v[i] = v;
  }
  return s;
}

double sup_dev(const std::vector<double>& f) {
  double mean = 0;
  for (double x : f) mean += x;
  mean /= static_cast<double>(f.size());
  double s = 0;
  for (double x : f) s = std::max(s, std::abs(x - mean));
  return s;
}

}  // namespace

TEST_SUITE("discretization") {

TEST_CASE("grid construction") {
  CHECK(kind_of([] { Grid::periodic(0, 1, 8); }) == ErrorKind::configuration);
  CHECK(kind_of([] { Grid::periodic(1, 0, 32); }) == ErrorKind::configuration);
  Grid p = Grid::periodic(-1, 1, 16);
  CHECK(p.h == doctest::Approx(0.125));
  Grid c = Grid::clamped(-1, 1, 17, {}, {});
  CHECK(c.h == doctest::Approx(0.125));
  CHECK(c.x(16) == doctest::Approx(1.0));
}

TEST_CASE("finite differences") {
  Grid g = Grid::periodic(0, 2 * std::numbers::pi, 64);
  std::vector<double> one(64, 2.5);
  for (int order : {2, 4}) {
    for (double x : dx(one, g, order)) CHECK(x == 0.0);
  }
  auto sin_error = [](int n, int order) {
    Grid g = Grid::periodic(0, 2 * std::numbers::pi, n);
    std::vector<double> f(n);
    for (int i = 0; i < n; ++i) f[i] = std::sin(3 * g.x(i));
    auto df = dx(f, g, order);
    double e = 0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(df[i] - 3 * std::cos(3 * g.x(i))));
    return e;
  };
  CHECK(sin_error(64, 2) / sin_error(128, 2) == doctest::Approx(4.0).epsilon(0.05));
  CHECK(sin_error(64, 4) / sin_error(128, 4) == doctest::Approx(16.0).epsilon(0.05));

  Grid c = Grid::clamped(0, 3, 31, {}, {});
  std::vector<double> ramp(31);
  for (int i = 0; i < 31; ++i) ramp[i] = 2.0 * c.x(i) - 1.0;
  for (int order : {2, 4})
    for (double x : dx(ramp, c, order)) CHECK(x == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("energy and momentum of constant states vanish") {
  for (auto m : {gross_pitaevskii(), cubic_vdw()}) {
    for (Stencil st : {Stencil::fd2, Stencil::fd4, Stencil::spectral}) {
      Discretization d(m, Grid::periodic(-10, 10, 64), st);
      FieldState s = constant_state(64, 3.0, 0.4);
      CHECK(std::abs(discrete_H(d, s, {3.0, 0.4})) < 1e-13);
      CHECK(discrete_P(d, s, {3.0, 0.4}) == 0.0);
    }
  }
  Discretization d(gross_pitaevskii(), Grid::periodic(-10, 10, 64), Stencil::fd2);
  FieldState vac = constant_state(64, 1.0, 0.0);
  vac.rho[10] = -0.1;
  CHECK(kind_of([&] { discrete_H(d, vac, {1.0, 0.0}); }) == ErrorKind::state);
  CHECK(kind_of([&] { delta_H(d, vac); }) == ErrorKind::state);
}

TEST_CASE("discrete energy converges at second order") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  auto H = [&](int n) {
    Discretization d(gp, Grid::periodic(-40, 40, n), Stencil::fd2);
    return discrete_H(d, sample_profile(p, d.grid()), {1.0, 0.0});
  };
  double h1 = H(256), h2 = H(512), h3 = H(1024);
  CHECK(h1 > 0.0);
  CHECK((h1 - h2) / (h2 - h3) == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("momentum on the profile table and under translation") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  FieldState tab;
  tab.rho = p.rho;
  tab.v = p.v;
  CHECK(discrete_P(tab, {1.0, 0.0}, p.spacing()) == doctest::Approx(momentum_of_profile(gp, p)).epsilon(1e-10));

  Grid g = Grid::periodic(-50, 50, 1024);
  double P0 = discrete_P(sample_profile(p, g, 0.0), {1.0, 0.0}, g.h);
  double P1 = discrete_P(sample_profile(p, g, 3.7311), {1.0, 0.0}, g.h);
  CHECK(P1 == doctest::Approx(P0).epsilon(1e-8));
}

TEST_CASE("first variation") {
  auto gp = gross_pitaevskii();
  Discretization d(gp, Grid::periodic(-10, 10, 64), Stencil::fd4);
  auto dh = delta_H(d, constant_state(64, 1.7, 0.3));
  for (int i = 0; i < 64; ++i) {
    CHECK(dh.rho[i] == doctest::Approx(gp.g(1.7) + 0.045).epsilon(1e-13));
    CHECK(dh.v[i] == doctest::Approx(1.7 * 0.3).epsilon(1e-13));
  }

  // dH - c dP is constant along a traveling wave, up to O(h^2)
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  auto dev = [&](int n) {
    Discretization dn(gp, Grid::periodic(-40, 40, n), Stencil::fd2);
    FieldState s = sample_profile(p, dn.grid());
    FieldState e = delta_H(dn, s);
    FieldState dp = momentum_direction(s, {1.0, 0.0});
    axpy(-0.6, dp, e);
    return std::max(sup_dev(e.rho), sup_dev(e.v));
  };
  double d1 = dev(512), d2 = dev(1024);
  CHECK(d1 < 1e-2);
  CHECK(d1 / d2 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("Gateaux derivative of the energy") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  for (Stencil st : {Stencil::fd2, Stencil::fd4, Stencil::spectral}) {
    Discretization d(gp, Grid::periodic(-40, 40, 512), st);
    FieldState V = sample_profile(p, d.grid());
    FieldState W = testing::random_field(d.grid(), 7);
    auto err = [&](double eps) {
      FieldState a = V, b = V;
      axpy(eps, W, a);
      axpy(-eps, W, b);
      double fd = (discrete_H(d, a, {1.0, 0.0}) - discrete_H(d, b, {1.0, 0.0})) / (2 * eps);
      return std::abs(fd - inner(delta_H(d, V), W, d.h()));
    };
    CHECK(err(1e-2) / err(1e-3) >= 80.0);
  }
}

TEST_CASE("second variation") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  for (Stencil st : {Stencil::fd2, Stencil::fd4, Stencil::spectral}) {
    CAPTURE(to_string(st));
    Discretization d(gp, Grid::periodic(-40, 40, 512), st);
    FieldState V = sample_profile(p, d.grid());
    FieldState zero(d.n());
    FieldState z = apply_d2H(d, V, zero);
    for (int i = 0; i < d.n(); ++i) {
      CHECK(z.rho[i] == 0.0);
      CHECK(z.v[i] == 0.0);
    }

    FieldState U = testing::random_field(d.grid(), 11), W = testing::random_field(d.grid(), 12);
    double a = inner(apply_d2H(d, V, U), W, d.h()), b = inner(U, apply_d2H(d, V, W), d.h());
    CHECK(std::abs(a - b) <= 1e-10 * std::max(std::abs(a), std::abs(b)));

    FieldState base = delta_H(d, V);
    FieldState lin = apply_d2H(d, V, U);
    auto err = [&](double eps) {
      FieldState Ve = V;
      axpy(eps, U, Ve);
      FieldState q = delta_H(d, Ve);
      axpy(-1.0, base, q);
      for (int i = 0; i < d.n(); ++i) {
        q.rho[i] = q.rho[i] / eps - lin.rho[i];
        q.v[i] = q.v[i] / eps - lin.v[i];
      }
      return std::sqrt(inner(q, q, d.h()));
    };
    double ratio = err(1e-3) / err(1e-4);
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 12.0);
  }
}

}
