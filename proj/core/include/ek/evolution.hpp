#pragma once

#include <functional>
#include <string_view>

#include "ek/discretization.hpp"

namespace ek {

enum class Scheme { rk4_primitive, rk4_gauge };

Scheme parse_scheme(std::string_view s);

// Conservative semidiscretisation  dV/dt = J D (dH - c_frame dP).
// c_frame != 0 evolves in the frame moving at speed c_frame.
FieldState rhs_nonlinear(const Discretization& d, const FieldState& s, double c_frame = 0.0);

// One RK4 step. Throws ErrorKind::blowup on vacuum or non-finite values.
FieldState step_nonlinear(const Discretization& d, const FieldState& s, double dt, Scheme scheme,
                          double c_frame = 0.0);

// Gauge variables w = sqrt(K/rho) D rho, z = v + i w, a = sqrt(rho K).
GaugeState to_gauge(const Discretization& d, const FieldState& s);
FieldState from_gauge(const GaugeState& g);
GaugeState step_gauge(const Discretization& d, const GaugeState& g, double dt, double c_frame = 0.0);

double cfl_dt(const Discretization& d, const FieldState& s, double safety = 0.25);

// Linearised operator  U -> J D (d2H[bg] - c_frame d2P) U.
FieldState linearized_rhs(const Discretization& d, const HessianCoefficients& c, const FieldState& u,
                          double c_frame = 0.0);

using BackgroundFn = std::function<FieldState(double t)>;

// RK4 step of the linearised flow about a time-dependent background evaluated at t, t+dt/2, t+dt.
FieldState step_linearized(const Discretization& d, const BackgroundFn& bg, const FieldState& u, double dt,
                           double c_frame = 0.0);
// Frozen background (co-moving checks): coefficients computed once by the caller.
FieldState step_linearized(const Discretization& d, const HessianCoefficients& c, const FieldState& u, double dt,
                           double c_frame = 0.0);

}  // namespace ek
