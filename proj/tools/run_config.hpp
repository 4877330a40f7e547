#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ek/fluid_model.hpp"
#include "ek/grid.hpp"
#include "ek/profiles.hpp"

namespace ekcli {

using nlohmann::json;

struct ModelConfig {
  std::string name = "gross_pitaevskii";
  double K = 1.0;                        // constant_K only
  std::vector<double> g{-1.0, 1.0};      // constant_K only, coefficients of rho^k
  double anchor = 1.0;
  // sampling range for the `model` table
  double table_lo = 0.05, table_hi = 4.0;
  int table_n = 80;
};

struct ProfileConfig {
  std::string kind = "soliton";          // soliton | kink
  double c = 0.6;
  std::vector<double> guess{1.1, 2.9, 0.0};  // kink: rho-, rho+, v+
  double half_width = 0.0;               // 0: automatic
  int n = 0;
};

struct ScanConfig {
  std::vector<double> speeds{0.4, 0.6, 0.8};
  std::vector<double> eps;               // transonic scan when non-empty
  double h_c = 1e-3;
};

struct GridConfig {
  double lo = -40.0, hi = 40.0;
  int n = 1024;
  std::string boundary = "periodic";
  std::string stencil = "fd2";
};

struct SimulateConfig {
  double T = 5.0;
  double dt = 0.0;                       // 0: CFL step
  double cfl = 0.25;
  std::string scheme = "rk4_primitive";
  double frame_speed = 0.0;
  int snapshot_stride = 0;               // 0: no snapshots
  int log_stride = 100;
};

struct NewtonConfig {
  std::vector<double> speeds{0.8, 0.9};
  double A = 30.0;
  std::vector<double> offsets;           // default: all equal to A
  bool leading_kink = false;
  double frame_speed = -1.0;             // < 0: mean of the extreme speeds
  double h = 0.45;                       // grid spacing, domain sized from the tails
  std::string stencil = "spectral";
  double T_end = 0.0;                    // 0: separation doubling time
  int max_iters = 4;
  int records = 201;
  double T_evolve = 10.0;                // multisoliton-demo only
};

struct RunConfig {
  ModelConfig model;
  ek::EndState endstate;
  ProfileConfig profile;
  ScanConfig scan;
  GridConfig grid;
  SimulateConfig simulate;
  NewtonConfig newton;
};

// Missing keys keep their defaults; unknown keys are rejected. Throws ek::Error (configuration).
RunConfig from_json(const json& j);
json to_json(const RunConfig& c);
void validate(const RunConfig& c);

ek::FluidModel make_model(const ModelConfig& m);
ek::Grid make_grid(const GridConfig& g, const ek::EndState& left, const ek::EndState& right);

}  // namespace ekcli
