#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ek {

using ScalarFn = std::function<double(double)>;

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x > lo && x < hi; }
};

// Dense coefficients, c[k] multiplies x^k.
struct Polynomial {
  std::vector<double> c;

  double operator()(double x) const;
  Polynomial derivative() const;
  // Primitive vanishing at `anchor`.
  Polynomial antiderivative(double anchor) const;
  int degree() const;
};

struct FluidModel {
  std::string name;
  ScalarFn g, g1, g2;
  ScalarFn Gfun;  // Gfun' = g, Gfun(rho_anchor) = 0
  double rho_anchor = 1.0;
  ScalarFn K, K1, K2;
  Interval rho_domain{0.0, 1e300};

  // Throws ErrorKind::domain when rho is outside rho_domain.
  void check(double rho) const;
  bool in_domain(double rho) const { return rho_domain.contains(rho); }
};

FluidModel gross_pitaevskii();
FluidModel cubic_vdw();
// K == kval, user polynomial g; G anchored at `anchor`.
FluidModel constant_k(double kval, const Polynomial& g, double anchor = 1.0);
// K = kval * rho^power, polynomial g.
FluidModel power_law_k(double kval, double power, const Polynomial& g, double anchor = 1.0);

// Names: "gross_pitaevskii", "cubic_vdw", "constant_K". The last one uses kval and g.
FluidModel builtin_model(std::string_view name, double kval = 1.0, const Polynomial& g = {{-1.0, 1.0}},
                         double anchor = 1.0);

double sound_speed_sq(const FluidModel& m, double rho);

}  // namespace ek
