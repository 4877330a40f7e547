#include "ek/fluid_model.hpp"

#include <cmath>
#include <limits>

#include "ek/error.hpp"

namespace ek {

double Polynomial::operator()(double x) const {
  double s = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * x + *it;
  return s;
}

Polynomial Polynomial::derivative() const {
  Polynomial d;
  for (std::size_t k = 1; k < c.size(); ++k) d.c.push_back(static_cast<double>(k) * c[k]);
  if (d.c.empty()) d.c.push_back(0.0);
  return d;
}

Polynomial Polynomial::antiderivative(double anchor) const {
  Polynomial p;
  p.c.push_back(0.0);
  for (std::size_t k = 0; k < c.size(); ++k) p.c.push_back(c[k] / static_cast<double>(k + 1));
  p.c[0] = -p(anchor);
  return p;
}

int Polynomial::degree() const {
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k)
    if (c[k] != 0.0) return k;
  return 0;
}

void FluidModel::check(double rho) const {
  if (!(rho_domain.contains(rho)))
    fail(ErrorKind::domain, name + ": density " + std::to_string(rho) + " outside (" +
                                std::to_string(rho_domain.lo) + ", " + std::to_string(rho_domain.hi) + ")");
}

namespace {

const double kInf = std::numeric_limits<double>::infinity();

void attach_polynomial(FluidModel& m, const Polynomial& g, double anchor) {
  if (g.c.empty()) fail(ErrorKind::configuration, "empty pressure polynomial");
  if (g.degree() > 5) fail(ErrorKind::configuration, "pressure polynomial degree exceeds 5");
  Polynomial d1 = g.derivative();
  Polynomial d2 = d1.derivative();
  Polynomial G = g.antiderivative(anchor);
  m.g = [g](double r) { return g(r); };
  m.g1 = [d1](double r) { return d1(r); };
  m.g2 = [d2](double r) { return d2(r); };
  m.Gfun = [G](double r) { return G(r); };
  m.rho_anchor = anchor;
}

}  // namespace

FluidModel gross_pitaevskii() {
  FluidModel m;
  m.name = "gross_pitaevskii";
  m.g = [](double r) { return r - 1.0; };
  m.g1 = [](double) { return 1.0; };
  m.g2 = [](double) { return 0.0; };
  m.Gfun = [](double r) { return 0.5 * (r - 1.0) * (r - 1.0); };
  m.rho_anchor = 1.0;
  m.K = [](double r) { return 1.0 / r; };
  m.K1 = [](double r) { return -1.0 / (r * r); };
  m.K2 = [](double r) { return 2.0 / (r * r * r); };
  m.rho_domain = {0.0, kInf};
  return m;
}

FluidModel cubic_vdw() {
  FluidModel m;
  m.name = "cubic_vdw";
  m.g = [](double r) { return (r - 1.0) * (r - 2.0) * (r - 3.0); };
  m.g1 = [](double r) { return 3.0 * r * r - 12.0 * r + 11.0; };
  m.g2 = [](double r) { return 6.0 * r - 12.0; };
  m.Gfun = [](double r) {
    double a = (r - 1.0) * (r - 3.0);
    return 0.25 * a * a;
  };
  m.rho_anchor = 1.0;
  m.K = [](double) { return 1.0; };
  m.K1 = [](double) { return 0.0; };
  m.K2 = [](double) { return 0.0; };
  m.rho_domain = {0.0, kInf};
  return m;
}

FluidModel constant_k(double kval, const Polynomial& g, double anchor) {
  if (!(kval > 0.0)) fail(ErrorKind::configuration, "constant capillarity must be positive");
  FluidModel m;
  m.name = "constant_K";
  attach_polynomial(m, g, anchor);
  m.K = [kval](double) { return kval; };
  m.K1 = [](double) { return 0.0; };
  m.K2 = [](double) { return 0.0; };
  m.rho_domain = {0.0, kInf};
  return m;
}

FluidModel power_law_k(double kval, double p, const Polynomial& g, double anchor) {
  if (!(kval > 0.0)) fail(ErrorKind::configuration, "capillarity prefactor must be positive");
  FluidModel m;
  m.name = "power_law_K";
  attach_polynomial(m, g, anchor);
  m.K = [kval, p](double r) { return kval * std::pow(r, p); };
  m.K1 = [kval, p](double r) { return kval * p * std::pow(r, p - 1.0); };
  m.K2 = [kval, p](double r) { return kval * p * (p - 1.0) * std::pow(r, p - 2.0); };
  m.rho_domain = {0.0, kInf};
  return m;
}

FluidModel builtin_model(std::string_view name, double kval, const Polynomial& g, double anchor) {
  if (name == "gross_pitaevskii") return gross_pitaevskii();
  if (name == "cubic_vdw") return cubic_vdw();
  if (name == "constant_K") return constant_k(kval, g, anchor);
  fail(ErrorKind::configuration, "unknown model '" + std::string(name) + "'");
}

double sound_speed_sq(const FluidModel& m, double rho) {
  m.check(rho);
  return rho * m.g1(rho);
}

}  // namespace ek
