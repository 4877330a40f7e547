#pragma once

#include <functional>
#include <vector>

#include "ek/discretization.hpp"
#include "ek/stability.hpp"

namespace ek {

// Waves ordered left to right with increasing speeds. Wave k sits at
//   x1 + (c_k - c_frame) t + A_2 + ... + A_k
// in grid coordinates (the grid moves with speed c_frame).
struct MultiSolitonConfig {
  std::vector<WaveProfile> waves;
  std::vector<double> offsets;  // A_2 .. A_n
  bool leading_kink = false;
  double x1 = 0.0;
  double frame_speed = 0.0;
  double tail_margin = 0.0;  // 0: 23 / tail rate of each wave
  int interp_points = 8;

  int size() const { return static_cast<int>(waves.size()); }
  double speed(int k) const { return waves[k].spec.c; }
  // c_{k+1/2} for k = 0 .. n-2
  double midspeed(int k) const { return 0.5 * (speed(k) + speed(k + 1)); }
  double c0() const;
  double min_offset() const;
  double center(int k, double t) const;
  const EndState& background() const { return waves.back().spec.right; }
  double margin(int k) const;
  void validate() const;
};

// All offsets equal to A; wave 1 at x1.
MultiSolitonConfig make_config(std::vector<WaveProfile> waves, double A, double x1 = 0.0,
                               double frame_speed = 0.0, bool leading_kink = false);

// Throws ErrorKind::window if a centre is closer than its tail margin to the grid ends.
void check_window(const MultiSolitonConfig& cfg, double t, const Grid& grid);

FieldState assemble_S(const MultiSolitonConfig& cfg, double t, const Grid& grid);
// Exact time derivative of the ansatz (profiles translate rigidly).
FieldState assemble_dSdt(const MultiSolitonConfig& cfg, double t, const Grid& grid);

// C^infinity ramp: 0 for s <= 0, 1 for s >= 1/2.
double smooth_step(double s);
double smooth_step_prime(double s);

struct PartitionBundle {
  std::vector<Vec> chi, phi;
  std::vector<Vec> dchi_dx, dchi_dt;
  double t = 0.0;
  double min_phi2 = 0.0;  // min over the grid of sum phi_k^2
};

PartitionBundle partition_of_unity(const MultiSolitonConfig& cfg, double t, const Grid& grid);

using StateProvider = std::function<FieldState(double t)>;

struct ResidualResult {
  FieldState f;
  double norm = 0.0;  // norm_H0
};

// f = dV/dt - J D (dH - c_frame dP)[V], dV/dt by central difference with step dt_fd.
ResidualResult residual(const Discretization& d, const StateProvider& V, double t, double dt_fd,
                        double c_frame = 0.0);
// Same with a known time derivative.
ResidualResult residual(const Discretization& d, const FieldState& V, const FieldState& dVdt, double c_frame = 0.0);

struct NewtonOptions {
  double T_end = 0.0;  // 0: time at which the smallest separation has doubled
  double dt = 0.0;     // 0: CFL step of the ansatz
  int max_iters = 4;
  double floor = -1.0;  // < 0: measured on the single waves
  int records = 201;    // stored snapshots in [0, T_end]
  double divergence_factor = 10.0;
};

struct ApproximateSolution {
  MultiSolitonConfig config;
  Grid grid;
  double T_end = 0.0, dt = 0.0;
  double floor = 0.0;
  int iterations = 0;
  std::vector<double> record_times;
  // residual_history[j][i] = ||f^j(record_times[i])||
  std::vector<std::vector<double>> residual_history;
  std::vector<double> sup_residual;
  // eta_list[j][i] = eta^{j+1} at record_times[i]
  std::vector<std::vector<FieldState>> eta_list;

  // S + sum eta^j, cubic interpolation of the corrections between records.
  FieldState correction(double t) const;
  FieldState state(double t) const;
  StateProvider provider() const;
};

// Largest residual of each single wave of cfg alone, sampled at a few times in [0, T_end].
double discretization_floor(const Discretization& d, const MultiSolitonConfig& cfg, double T_end);

double default_T_end(const MultiSolitonConfig& cfg);

// Throws ErrorKind::divergence (naming the iteration) on blow-up or residual growth.
ApproximateSolution newton_iterate(const Discretization& d, const MultiSolitonConfig& cfg,
                                   const NewtonOptions& opt = {});

// chi_k U decomposed against wave k at time t; the leading kink has alpha = 0.
std::vector<DecompositionRecord> track_parameters(const Discretization& d, const FieldState& U,
                                                  const MultiSolitonConfig& cfg, double t);

// <d2H[S + eta] U, U> - sum c_k <d2P chi_k U, chi_k U>, eta = 0 if null.
double modified_energy(const Discretization& d, const FieldState& U, const MultiSolitonConfig& cfg, double t,
                       const FieldState* eta = nullptr);

}  // namespace ek
