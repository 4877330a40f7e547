#pragma once

#include <Eigen/Dense>
#include <complex>
#include <utility>
#include <vector>

#include "ek/fluid_model.hpp"

namespace ek {

struct EndState {
  double rho = 1.0;
  double v = 0.0;
};

enum class WaveKind { kink, soliton };

struct TravelingWaveSpec {
  double c = 0.0;
  double j = 0.0;
  double q = 0.0;
  EndState left;  // kinks only; solitons repeat `right`
  EndState right;
  WaveKind kind = WaveKind::soliton;
};

struct ConditionReport {
  double f_minus = 0.0;
  double f_plus = 0.0;
  double area = 0.0;
  bool cond_j_minus = false;
  bool cond_j_plus = false;
  int f_sign_changes = 0;  // sign changes of f strictly inside (rho-, rho+)
};

struct WaveProfile {
  std::vector<double> xi, rho, v, rho_x;
  TravelingWaveSpec spec;
  double rho_min = 0.0;
  double tail_rate_left = 0.0;   // decay rate of |rho - rho_end| as xi -> -inf
  double tail_rate_right = 0.0;  // same for xi -> +inf

  std::size_t size() const { return xi.size(); }
  double half_width() const { return xi.back(); }
  double spacing() const { return (xi.back() - xi.front()) / static_cast<double>(xi.size() - 1); }
  // Lagrange interpolation with `points` nodes (even); exponential tails outside the table.
  double rho_at(double x, int points = 4) const;
  double v_at(double x, int points = 4) const;
  double rho_x_at(double x, int points = 4) const;
};

struct SaddleRoots {
  double discriminant = 0.0;  // g'(rho) - j^2/rho^3
  std::complex<double> lambda_plus, lambda_minus;
  bool saddle = false;
};

// Reduced traveling-wave functions: f = j^2/(2 rho^2) - q + g, F' = f.
double reduced_f(const FluidModel& m, double rho, double j, double q);
double reduced_f_prime(const FluidModel& m, double rho, double j);
// F anchored at `anchor` (F(anchor) = 0), evaluated as F = f(anchor) d + d^2 Phi, d = rho - anchor.
double reduced_F(const FluidModel& m, double rho, double j, double q, double anchor);
// Phi above: -j^2/(2 anchor^2 rho) + int_0^1 (1-t) g'(anchor + t d) dt.
double reduced_F_quotient(const FluidModel& m, double rho, double j, double anchor);

std::pair<double, double> first_integrals(const FluidModel& m, const EndState& right, double c);

ConditionReport kink_conditions(const FluidModel& m, double rho_minus, double rho_plus, double j, double q);

struct KinkGuess {
  double rho_minus = 0.0;
  double rho_plus = 0.0;
  double v_plus = 0.0;
};
TravelingWaveSpec solve_kink_endstates(const FluidModel& m, double c, const KinkGuess& guess);

// half_width <= 0 or n <= 0 selects automatic sampling from the tail rates.
WaveProfile kink_profile(const FluidModel& m, const TravelingWaveSpec& spec, double half_width = 0.0, int n = 0);

TravelingWaveSpec soliton_spec(const FluidModel& m, const EndState& right, double c);
double soliton_min_density(const FluidModel& m, const EndState& right, double c);
WaveProfile soliton_profile(const FluidModel& m, const EndState& right, double c, double half_width = 0.0,
                            int n = 0);

SaddleRoots saddle_check(const FluidModel& m, double rho, double j);

Eigen::Matrix<double, 3, 5> kink_manifold_jacobian(const FluidModel& m, const TravelingWaveSpec& spec);
int numerical_rank(const Eigen::MatrixXd& a, double rel_tol = 1e-10);
int kink_manifold_rank(const FluidModel& m, const TravelingWaveSpec& spec);

double transonic_speed(const FluidModel& m, const EndState& right, double eps);
std::vector<WaveProfile> transonic_family(const FluidModel& m, const EndState& right,
                                          const std::vector<double>& eps_list, double half_width = 0.0,
                                          int n = 0);

// max_i |K(rho_i) rho'_i^2 / 2 - F(rho_i)| with rho' from fourth-order differences of the table.
double profile_ode_residual(const FluidModel& m, const WaveProfile& p);

}  // namespace ek
