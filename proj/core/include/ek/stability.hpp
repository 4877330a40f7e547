#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ek/discretization.hpp"
#include "ek/profiles.hpp"

namespace ek {

enum class Verdict { stable, unstable, marginal };
const char* to_string(Verdict v);

struct StabilityReport {
  double c = 0.0;
  double P = 0.0;
  double dPdc = 0.0;
  double m2 = 0.0;  // m''(c) = -dP/dc
  Verdict verdict = Verdict::marginal;
};

struct MomentumEstimate {
  double grid = 0.0;        // trapezoid of (rho - rho+)(v - v+)
  double quadrature = 0.0;  // density-variable integral
};

// Throws ErrorKind::resolution if the two estimates differ by more than 1e-6 (relative).
double momentum_of_profile(const FluidModel& m, const WaveProfile& p);
MomentumEstimate momentum_estimates(const FluidModel& m, const WaveProfile& p);

// H - cP - l1 P1 - l2 P2 on the profile table; its c-derivative is -P.
double instability_momentum(const FluidModel& m, const WaveProfile& p);

// Central difference in c with one Richardson refinement (h_c and h_c/2).
StabilityReport dPdc(const FluidModel& m, const EndState& right, double c, double h_c = 1e-3,
                     double half_width = 0.0, int n = 0);

struct TransonicRow {
  double eps = 0.0, c = 0.0, delta = 0.0, P = 0.0, dPddelta = 0.0, dPdc = 0.0;
};

struct TransonicScan {
  std::vector<TransonicRow> rows;
  double slope = 0.0;  // log P vs log delta over the smallest decade of eps
  bool dPddelta_positive = false;
  bool dPdc_negative = false;
  bool hypothesis_ok = false;  // g''(rho+) >= 0
};

TransonicScan transonic_stability_scan(const FluidModel& m, const EndState& right, const std::vector<double>& eps);

// Newton-polished discrete traveling wave: solves dH_d - c dP = const on the grid
// with v = c + j/rho exactly, starting from the sampled continuous profile.
FieldState discrete_traveling_wave(const Discretization& d, const WaveProfile& p, double x_center = 0.0,
                                   double tol = 1e-13);

// Dense matrix of d2H - c d2P at bg, unknown ordering (r_0..r_{n-1}, u_0..u_{n-1}).
Eigen::MatrixXd assemble_d2E(const Discretization& d, const FieldState& bg, double c);
Eigen::MatrixXd assemble_d2E(const Discretization& d, const WaveProfile& p, bool polish = true);

// d2E U for a background (matrix free)
FieldState apply_d2E(const Discretization& d, const HessianCoefficients& coef, const FieldState& u, double c);

struct SpectralReport {
  std::vector<double> eigenvalues;  // sorted ascending
  int n_negative = 0;
  double kernel_residual = 0.0;
  double jordan_residual = 0.0;
  double grid_spacing = 0.0;
};

// Translation direction D U (centred stencil of the grid; ghosts at the endstates).
FieldState translation_mode(const Discretization& d, const FieldState& bg);
// dP at bg: (v - v+, rho - rho+).
FieldState momentum_direction(const FieldState& bg, const EndState& ref);

double kernel_residual(const Discretization& d, const FieldState& bg, double c);

// Eigenvalues of M, kernel residual at bg, and Jordan residual with backgrounds at c +- h_c.
// h_c <= 0 skips the Jordan residual (kinks).
SpectralReport spectrum_d2E(const Eigen::MatrixXd& M, const Discretization& d, const FluidModel& m,
                            const WaveProfile& p, double h_c, bool polish = true);

struct DecompositionRecord {
  double alpha = 0.0;
  double beta = 0.0;
  FieldState W;
  double t = 0.0;
};

// U = alpha dP + beta D U^c + W with W L2-orthogonal to both directions.
DecompositionRecord decompose(const Discretization& d, const FieldState& U, const FieldState& bg,
                              const EndState& ref, bool use_alpha = true);

}  // namespace ek
