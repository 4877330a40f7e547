#include <doctest.h>

#include <cmath>
#include <random>

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

// closed form for K = 1/rho, g = rho - 1, right state (1, 0)
double gp_momentum(double c) { return 4.0 * std::acos(c) - 4.0 * c * std::sqrt(1.0 - c * c); }

// Gaussian sums with exact derivatives, for the continuous bilinear form
struct Bumps {
  std::vector<double> a, x0, w;
  double operator()(double x) const {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::exp(-std::pow((x - x0[k]) / w[k], 2));
    return s;
  }
  double prime(double x) const {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
      double y = (x - x0[k]) / w[k];
      s += -2.0 * y / w[k] * a[k] * std::exp(-y * y);
    }
    return s;
  }
};

Bumps random_bumps(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> pos(-15, 15), wid(1.5, 3.0), amp(-1, 1);
  Bumps b;
  for (int k = 0; k < 5; ++k) {
    b.a.push_back(amp(rng));
    b.x0.push_back(pos(rng));
    b.w.push_back(wid(rng));
  }
  return b;
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("momentum of the dark soliton") {
  auto gp = gross_pitaevskii();
  for (double c : {0.3, 0.6, 0.85}) {
    CAPTURE(c);
    auto p = soliton_profile(gp, {1.0, 0.0}, c);
    auto est = momentum_estimates(gp, p);
    CHECK(est.grid == doctest::Approx(gp_momentum(c)).epsilon(1e-8));
    CHECK(est.quadrature == doctest::Approx(gp_momentum(c)).epsilon(1e-8));
    CHECK(momentum_of_profile(gp, p) > 0.0);
  }
  auto mirrored = soliton_profile(gp, {1.0, 0.0}, -0.6);
  CHECK(momentum_of_profile(gp, mirrored) == doctest::Approx(-gp_momentum(0.6)).epsilon(1e-8));
}

TEST_CASE("constant state carries no momentum") {
  FieldState s(64);
  for (int i = 0; i < 64; ++i) {
    s.rho[i] = 1.3;
    s.v[i] = -0.2;
  }
  CHECK(discrete_P(s, {1.3, -0.2}, 0.1) == 0.0);
}

TEST_CASE("dP/dc") {
  auto gp = gross_pitaevskii();
  auto r = dPdc(gp, {1.0, 0.0}, 0.6, 1e-3);
  CHECK(r.dPdc < 0.0);
  CHECK(r.verdict == Verdict::stable);
  CHECK(r.m2 == -r.dPdc);
  CHECK(r.dPdc == doctest::Approx(-8.0 * 0.8).epsilon(1e-6));
  CHECK(kind_of([&] { dPdc(gp, {1.0, 0.0}, 0.9995, 1e-3); }) == ErrorKind::precondition);
}

TEST_CASE("transonic scans") {
  auto gp = gross_pitaevskii();
  auto s = transonic_stability_scan(gp, {1.0, 0.0}, {0.32, 0.16, 0.08, 0.04});
  CHECK(s.hypothesis_ok);
  CHECK(s.slope == doctest::Approx(1.5).epsilon(0.1 / 1.5));
  for (std::size_t i = 1; i < s.rows.size(); ++i) CHECK(s.rows[i].P < s.rows[i - 1].P);
  auto tiny = transonic_stability_scan(gp, {1.0, 0.0}, {1e-3, 1e-4});
  CHECK(tiny.rows[1].P < tiny.rows[0].P);
  CHECK(tiny.rows[1].P < 1e-5);

  auto cu = transonic_stability_scan(cubic_vdw(), {3.0, 0.0}, {0.05});
  CHECK(cubic_vdw().g2(3.0) > 0.0);
  CHECK(cu.rows[0].dPdc < 0.0);
  CHECK(cu.dPdc_negative);

  // g'' < 0 at the endstate
  auto concave = constant_k(1.0, Polynomial{{-1.5, 2.0, -0.5}});
  auto bad = transonic_stability_scan(concave, {1.0, 0.0}, {0.2, 0.1});
  CHECK(bad.rows.size() == 2);
  CHECK_FALSE(bad.hypothesis_ok);
}

TEST_CASE("derivative of the instability functional is minus the momentum") {
  auto gp = gross_pitaevskii();
  const double hc = 1e-3;
  for (double c : {0.4, 0.6, 0.8}) {
    CAPTURE(c);
    auto m = [&](double s) { return instability_momentum(gp, soliton_profile(gp, {1.0, 0.0}, s, 60.0, 12001)); };
    double dm = (m(c + hc) - m(c - hc)) / (2 * hc);
    double P = momentum_of_profile(gp, soliton_profile(gp, {1.0, 0.0}, c, 60.0, 12001));
    CHECK(dm == doctest::Approx(-P).epsilon(1e-5));
  }
}

TEST_CASE("second variation at a constant state") {
  auto gp = gross_pitaevskii();
  Discretization d(gp, Grid::periodic(-20, 20, 64), Stencil::fd2);
  FieldState bg(64);
  for (int i = 0; i < 64; ++i) bg.rho[i] = 1.0;
  Eigen::MatrixXd M = assemble_d2E(d, bg, 0.6);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  // [[g', v - c], [v - c, rho]] = [[1, -0.6], [-0.6, 1]]
  CHECK(es.eigenvalues().minCoeff() == doctest::Approx(0.4).epsilon(1e-12));
  int neg = 0;
  for (int i = 0; i < M.rows(); ++i) neg += es.eigenvalues()(i) < 0.0;
  CHECK(neg == 0);
}

TEST_CASE("assembled operator is symmetric") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  for (Stencil st : {Stencil::fd2, Stencil::fd4, Stencil::spectral}) {
    Discretization d(gp, Grid::periodic(-40, 40, 256), st);
    Eigen::MatrixXd M = assemble_d2E(d, p);
    CHECK((M - M.transpose()).norm() / M.norm() <= 1e-12);
  }
}

TEST_CASE("quadratic form matches the continuous bilinear form") {
  auto gp = gross_pitaevskii();
  const double c = 0.6;
  auto p = soliton_profile(gp, {1.0, 0.0}, c);
  Grid g = Grid::periodic(-40, 40, 512);
  Discretization d(gp, g, Stencil::spectral);
  FieldState bg = sample_profile(p, g);
  Eigen::MatrixXd M = assemble_d2E(d, bg, c);
  std::mt19937_64 rng(321);
  for (int trial = 0; trial < 10; ++trial) {
    Bumps r = random_bumps(rng), u = random_bumps(rng);
    Eigen::VectorXd U(2 * g.n);
    double form = 0;
    for (int i = 0; i < g.n; ++i) {
      const double x = g.x(i);
      U(i) = r(x);
      U(g.n + i) = u(x);
      const double rho = p.rho_at(x, 8), rx = p.rho_x_at(x, 8), v = p.v_at(x, 8);
      const double K = gp.K(rho), K1 = gp.K1(rho), K2 = gp.K2(rho);
      form += (gp.g1(rho) + 0.5 * K2 * rx * rx) * r(x) * r(x) + 2.0 * K1 * rx * r(x) * r.prime(x) +
              K * r.prime(x) * r.prime(x) + 2.0 * (v - c) * r(x) * u(x) + rho * u(x) * u(x);
    }
    form *= g.h;
    double disc = g.h * U.dot(M * U);
    CHECK(disc == doctest::Approx(form).epsilon(1e-8));
  }
}

TEST_CASE("soliton spectrum") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  Discretization d(gp, Grid::periodic(-40, 40, 512), Stencil::fd2);
  auto rep = spectrum_d2E(assemble_d2E(d, p), d, gp, p, 1e-3);
  CHECK(rep.n_negative == 1);
  CHECK(rep.kernel_residual < 1e-2);
  CHECK(rep.jordan_residual < 1e-2);
}

TEST_CASE("jordan residual shrinks with the speed step") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  Discretization d(gp, Grid::periodic(-40, 40, 512), Stencil::spectral);
  Eigen::MatrixXd M = assemble_d2E(d, p);
  double coarse = spectrum_d2E(M, d, gp, p, 4e-2).jordan_residual;
  double fine = spectrum_d2E(M, d, gp, p, 1e-2).jordan_residual;
  CHECK(fine < coarse);
}

TEST_CASE("kernel residual of the sampled profile converges at second order") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  auto kr = [&](int n) {
    Discretization d(gp, Grid::periodic(-40, 40, n), Stencil::fd2);
    return kernel_residual(d, sample_profile(p, d.grid()), 0.6);
  };
  double ratio = kr(1024) / kr(2048);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("kinks: no negative directions, converging kernel") {
  auto cu = cubic_vdw();
  auto s = solve_kink_endstates(cu, 0.0, {1.1, 2.9, 0.0});
  auto p = kink_profile(cu, s);
  auto disc = [&](int n) {
    return Discretization(cu, Grid::clamped(-30, 30, n, s.left, s.right), Stencil::fd2);
  };
  auto d = disc(400);
  auto rep = spectrum_d2E(assemble_d2E(d, p), d, cu, p, 0.0);
  CHECK(rep.n_negative == 0);
  auto kr = [&](int n) {
    auto dn = disc(n);
    return kernel_residual(dn, sample_profile(p, dn.grid()), 0.0);
  };
  double ratio = kr(801) / kr(1601);
  CHECK(ratio >= 3.5);
  CHECK(ratio <= 4.5);
}

TEST_CASE("decomposition") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  Discretization d(gp, Grid::periodic(-40, 40, 512), Stencil::fd2);
  FieldState bg = discrete_traveling_wave(d, p);
  const double h = d.h();
  FieldState dp = momentum_direction(bg, {1.0, 0.0});
  FieldState tr = translation_mode(d, bg);
  CHECK(std::abs(inner(dp, tr, h)) <= 1e-12 * std::sqrt(inner(dp, dp, h) * inner(tr, tr, h)));

  auto a = decompose(d, tr, bg, {1.0, 0.0});
  CHECK(std::abs(a.alpha) < 1e-12);
  CHECK(a.beta == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::sqrt(inner(a.W, a.W, h)) < 1e-12);

  auto b = decompose(d, dp, bg, {1.0, 0.0});
  CHECK(b.alpha == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(b.beta) < 1e-12);

  for (int seed = 0; seed < 10; ++seed) {
    FieldState U = testing::random_field(d.grid(), 40 + seed);
    auto rec = decompose(d, U, bg, {1.0, 0.0});
    const double nw = std::sqrt(inner(rec.W, rec.W, h));
    CHECK(std::abs(inner(rec.W, dp, h)) <= 1e-10 * nw * std::sqrt(inner(dp, dp, h)));
    CHECK(std::abs(inner(rec.W, tr, h)) <= 1e-10 * nw * std::sqrt(inner(tr, tr, h)));
    FieldState back = rec.W;
    axpy(rec.alpha, dp, back);
    axpy(rec.beta, tr, back);
    axpy(-1.0, U, back);
    CHECK(std::sqrt(inner(back, back, h)) <= 1e-12 * std::sqrt(inner(U, U, h)));
  }

  FieldState flat(d.n());
  for (int i = 0; i < d.n(); ++i) flat.rho[i] = 1.0;
  CHECK(kind_of([&] { decompose(d, tr, flat, {1.0, 0.0}); }) == ErrorKind::precondition);
}

TEST_CASE("positivity on the constrained subspace") {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  Discretization d(gp, Grid::periodic(-40, 40, 512), Stencil::fd2);
  FieldState bg = discrete_traveling_wave(d, p);
  HessianCoefficients coef = hessian_coefficients(d, bg);
  double m = 1e300;
  for (int seed = 0; seed < 200; ++seed) {
    FieldState W = decompose(d, testing::random_field(d.grid(), 1000 + seed), bg, {1.0, 0.0}).W;
    double q = inner(apply_d2E(d, coef, W, 0.6), W, d.h());
    double nw = norm_H0(d, W);
    m = std::min(m, q / (nw * nw));
  }
  MESSAGE("fitted lower bound m = " << m);
  CHECK(m > 0.0);
}

}
