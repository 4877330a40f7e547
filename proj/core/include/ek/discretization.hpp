#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "ek/fluid_model.hpp"
#include "ek/grid.hpp"

namespace ek {

enum class Stencil { fd2, fd4, spectral };

Stencil parse_stencil(std::string_view s);
const char* to_string(Stencil s);

using Vec = std::vector<double>;

// Staggered stencil operators for the discrete energy
//   H_d = h sum_i [rho v^2/2 + G(rho)] + h sum_e K(I rho) (E rho)^2 / 2,
// with I: nodes -> edges (interpolation), E: nodes -> edges (difference), D: centred nodal derivative.
// Spectral: I = identity, E = D = Fourier derivative (periodic only).
// Clamped grids read ghost values outside [0, n); transposes are restricted to interior nodes.
// Copies share FFT scratch space: use one instance per thread.
class Discretization {
 public:
  Discretization(FluidModel model, Grid grid, Stencil stencil = Stencil::fd2);

  const FluidModel& model() const { return model_; }
  const Grid& grid() const { return grid_; }
  Stencil stencil() const { return stencil_; }
  int n() const { return grid_.n; }
  double h() const { return grid_.h; }
  int edges() const { return n_edges_; }

  void interp(const Vec& f, double gl, double gr, Vec& out) const;
  void diff(const Vec& f, double gl, double gr, Vec& out) const;
  // out (+)= I^T e, E^T e
  void interp_t(const Vec& e, Vec& out, bool accumulate) const;
  void diff_t(const Vec& e, Vec& out, bool accumulate) const;
  void center(const Vec& f, double gl, double gr, Vec& out) const;

  Vec center(const Vec& f, double gl = 0.0, double gr = 0.0) const {
    Vec o;
    center(f, gl, gr, o);
    return o;
  }

 private:
  struct Fft;
  void pad(const Vec& f, double gl, double gr, Vec& p) const;
  void spectral_diff(const Vec& f, Vec& out) const;

  FluidModel model_;
  Grid grid_;
  Stencil stencil_;
  int half_ = 1;  // s: edges use nodes e-s+1 .. e+s
  int n_edges_ = 0;
  int first_edge_ = 0;
  std::shared_ptr<Fft> fft_;
};

// Coefficients of the second variation at a background state.
struct HessianCoefficients {
  Vec g1, rho, v;          // nodal
  Vec k2, k1e, k0;         // edge: K''(I rho)(E rho)^2/2, K'(I rho)(E rho), K(I rho)
};

HessianCoefficients hessian_coefficients(const Discretization& d, const FieldState& bg);

// Reference endstate used for renormalisation; clamped grids use grid().right.
double discrete_H(const Discretization& d, const FieldState& s, const EndState& ref);
double discrete_P(const FieldState& s, const EndState& ref, double h);
double discrete_P(const Discretization& d, const FieldState& s, const EndState& ref);

FieldState delta_H(const Discretization& d, const FieldState& s);
FieldState apply_d2H(const Discretization& d, const FieldState& bg, const FieldState& u);
FieldState apply_d2H(const Discretization& d, const HessianCoefficients& c, const FieldState& u);

// Discrete L2 inner product h sum (a.rho b.rho + a.v b.v).
double inner(const FieldState& a, const FieldState& b, double h);
// ||r||_{H^1} + ||u||_{L^2}, derivative by the centred stencil D.
double norm_H0(const Discretization& d, const FieldState& u);

}  // namespace ek
