#include "commands.hpp"

#include <Eigen/Core>
#include <boost/version.hpp>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "ek/error.hpp"
#include "ek/evolution.hpp"
#include "ek/multisoliton.hpp"
#include "ek/stability.hpp"

#ifndef EK_VERSION
#define EK_VERSION "unknown"
#endif

namespace ekcli {

namespace fs = std::filesystem;
using namespace ek;

namespace {

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& p, const std::vector<std::string>& header) : out_(p) {
    if (!out_) fail(ErrorKind::configuration, "cannot write " + p.string());
    line(header);
  }
  void row(const std::vector<double>& v) {
    std::vector<std::string> s;
    for (double x : v) s.push_back(num(x));
    line(s);
  }
  void line(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

struct Context {
  const RunConfig& cfg;
  fs::path out;
  int verbosity;
  json manifest;

  void log(int level, const std::string& msg) const {
    if (verbosity >= level) std::fprintf(stderr, "%s\n", msg.c_str());
  }
  void output(const std::string& name) { manifest["outputs"].push_back(name); }
  json& norms() { return manifest["norms"]; }
};

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p);
  f << j.dump(2) << '\n';
}

json endstate_json(const EndState& e) { return {{"rho", e.rho}, {"v", e.v}}; }

WaveProfile build_profile(const FluidModel& m, const RunConfig& c) {
  const ProfileConfig& p = c.profile;
  if (p.kind == "kink") {
    TravelingWaveSpec s = solve_kink_endstates(m, p.c, {p.guess[0], p.guess[1], p.guess[2]});
    return kink_profile(m, s, p.half_width, p.n);
  }
  return soliton_profile(m, c.endstate, p.c, p.half_width, p.n);
}

// ---- subcommands ----

void cmd_model(Context& ctx) {
  const ModelConfig& mc = ctx.cfg.model;
  FluidModel m = make_model(mc);
  Csv csv(ctx.out / "model.csv", {"rho", "g", "g1", "g2", "G", "K", "K1", "K2", "sound_speed_sq"});
  for (int i = 0; i < mc.table_n; ++i) {
    double r = mc.table_lo + (mc.table_hi - mc.table_lo) * i / (mc.table_n - 1);
    if (!m.in_domain(r)) continue;
    csv.row({r, m.g(r), m.g1(r), m.g2(r), m.Gfun(r), m.K(r), m.K1(r), m.K2(r), sound_speed_sq(m, r)});
  }
  ctx.output("model.csv");
  ctx.norms()["sound_speed_sq_at_endstate"] = sound_speed_sq(m, ctx.cfg.endstate.rho);
}

void cmd_profile(Context& ctx) {
  FluidModel m = make_model(ctx.cfg.model);
  WaveProfile p = build_profile(m, ctx.cfg);
  Csv csv(ctx.out / "profile.csv", {"xi", "rho", "v"});
  for (std::size_t i = 0; i < p.size(); ++i) csv.row({p.xi[i], p.rho[i], p.v[i]});
  json side = {{"kind", p.spec.kind == WaveKind::kink ? "kink" : "soliton"},
               {"c", p.spec.c},
               {"j", p.spec.j},
               {"q", p.spec.q},
               {"rho_m", p.rho_min},
               {"left", endstate_json(p.spec.left)},
               {"right", endstate_json(p.spec.right)},
               {"half_width", p.half_width()},
               {"n", p.size()},
               {"tail_rate_left", p.tail_rate_left},
               {"tail_rate_right", p.tail_rate_right},
               {"ode_residual", profile_ode_residual(m, p)}};
  if (p.spec.kind == WaveKind::soliton) {
    MomentumEstimate e = momentum_estimates(m, p);
    side["momentum_grid"] = e.grid;
    side["momentum_quadrature"] = e.quadrature;
  }
  write_json(ctx.out / "profile.json", side);
  ctx.output("profile.csv");
  ctx.output("profile.json");
  ctx.norms()["ode_residual"] = side["ode_residual"];
  ctx.norms()["rho_m"] = p.rho_min;
}

void cmd_stability_scan(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  FluidModel m = make_model(c.model);
  if (!c.scan.speeds.empty()) {
    Csv csv(ctx.out / "stability.csv", {"c", "P", "dPdc", "m2", "verdict"});
    for (double s : c.scan.speeds) {
      StabilityReport r = dPdc(m, c.endstate, s, c.scan.h_c);
      csv.line({num(r.c), num(r.P), num(r.dPdc), num(r.m2), to_string(r.verdict)});
      ctx.log(2, "c=" + num(s) + " dP/dc=" + num(r.dPdc));
    }
    ctx.output("stability.csv");
  }
  if (!c.scan.eps.empty()) {
    TransonicScan t = transonic_stability_scan(m, c.endstate, c.scan.eps);
    Csv csv(ctx.out / "transonic.csv", {"eps", "c", "delta", "P", "dPddelta", "dPdc", "dPdc_negative"});
    for (const TransonicRow& r : t.rows)
      csv.line({num(r.eps), num(r.c), num(r.delta), num(r.P), num(r.dPddelta), num(r.dPdc),
                r.dPdc < 0.0 ? "true" : "false"});
    ctx.output("transonic.csv");
    ctx.norms()["transonic_slope"] = t.slope;
    ctx.norms()["dPddelta_positive"] = t.dPddelta_positive;
    ctx.norms()["dPdc_negative"] = t.dPdc_negative;
    ctx.norms()["hypothesis_ok"] = t.hypothesis_ok;
  }
}

Grid profile_grid(const RunConfig& c, const WaveProfile& p) {
  return make_grid(c.grid, p.spec.kind == WaveKind::kink ? p.spec.left : p.spec.right, p.spec.right);
}

void cmd_spectrum(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  FluidModel m = make_model(c.model);
  WaveProfile p = build_profile(m, c);
  Discretization d(m, profile_grid(c, p), parse_stencil(c.grid.stencil));
  Eigen::MatrixXd M = assemble_d2E(d, p);
  double hc = p.spec.kind == WaveKind::soliton ? c.scan.h_c : 0.0;
  SpectralReport r = spectrum_d2E(M, d, m, p, hc);
  json j = {{"n_negative", r.n_negative},
            {"kernel_residual", r.kernel_residual},
            {"jordan_residual", r.jordan_residual},
            {"grid_spacing", r.grid_spacing},
            {"lowest", std::vector<double>(r.eigenvalues.begin(),
                                           r.eigenvalues.begin() + std::min<std::size_t>(10, r.eigenvalues.size()))}};
  write_json(ctx.out / "spectrum.json", j);
  Csv csv(ctx.out / "eigenvalues.csv", {"index", "eigenvalue"});
  for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) csv.row({static_cast<double>(i), r.eigenvalues[i]});
  ctx.output("spectrum.json");
  ctx.output("eigenvalues.csv");
  ctx.norms()["n_negative"] = r.n_negative;
  ctx.norms()["kernel_residual"] = r.kernel_residual;
  ctx.norms()["jordan_residual"] = r.jordan_residual;
}

void write_snapshot(const fs::path& p, const Grid& g, const FieldState& s) {
  Csv csv(p, {"x", "rho", "v"});
  for (int i = 0; i < g.n; ++i) csv.row({g.x(i), s.rho[i], s.v[i]});
}

void cmd_simulate(Context& ctx) {
  const RunConfig& c = ctx.cfg;
  const SimulateConfig& sc = c.simulate;
  FluidModel m = make_model(c.model);
  WaveProfile p = build_profile(m, c);
  Grid g = profile_grid(c, p);
  Discretization d(m, g, parse_stencil(c.grid.stencil));
  FieldState s = sample_profile(p, g);
  if (g.boundary == Boundary::periodic) {
    double seam = std::max(std::abs(s.rho.front() - p.spec.right.rho), std::abs(s.rho.back() - p.spec.right.rho));
    if (seam > 1e-10) ctx.log(1, "warning: profile tail at the periodic seam is " + num(seam) + " (> 1e-10)");
  }
  double dt = sc.dt > 0.0 ? sc.dt : cfl_dt(d, s, sc.cfl);
  const int N = static_cast<int>(std::ceil(sc.T / dt));
  dt = sc.T / N;
  const Scheme scheme = parse_scheme(sc.scheme);
  const EndState ref = p.spec.right;
  const double H0 = discrete_H(d, s, ref), P0 = discrete_P(d, s, ref);
  Csv log(ctx.out / "conservation.csv", {"t", "H", "P", "min_rho"});
  auto record = [&](const FieldState& u, double t) {
    log.row({t, discrete_H(d, u, ref), discrete_P(d, u, ref), *std::min_element(u.rho.begin(), u.rho.end())});
  };
  record(s, 0.0);
  ctx.output("conservation.csv");
  int snap = 0;
  auto snapshot = [&](const FieldState& u) {
    char name[32];
    std::snprintf(name, sizeof name, "snap_%05d.csv", snap++);
    write_snapshot(ctx.out / name, g, u);
    ctx.output(name);
  };
  if (sc.snapshot_stride > 0) snapshot(s);
  for (int k = 1; k <= N; ++k) {
    s = step_nonlinear(d, s, dt, scheme, sc.frame_speed);
    s.t = k * dt;
    if (k % sc.log_stride == 0 || k == N) record(s, s.t);
    if (sc.snapshot_stride > 0 && (k % sc.snapshot_stride == 0 || k == N)) snapshot(s);
  }
  double shape = 0.0;
  const double shift = (p.spec.c - sc.frame_speed) * sc.T;
  for (int i = 0; i < g.n; ++i) {
    double x = g.x(i) - shift;
    if (g.boundary == Boundary::periodic) x = g.x0 + std::fmod(std::fmod(x - g.x0, g.length()) + g.length(), g.length());
    shape = std::max(shape, std::abs(s.rho[i] - p.rho_at(x, 8)));
  }
  ctx.norms()["steps"] = N;
  ctx.norms()["dt"] = dt;
  ctx.norms()["shape_error"] = shape;
  ctx.norms()["H_drift"] = std::abs(discrete_H(d, s, ref) - H0) / std::max(1.0, std::abs(H0));
  ctx.norms()["P_drift"] = std::abs(discrete_P(d, s, ref) - P0) / std::max(1.0, std::abs(P0));
}

struct NewtonRun {
  FluidModel model;
  MultiSolitonConfig cfg;
  Grid grid;
};

NewtonRun newton_setup(const RunConfig& c) {
  const NewtonConfig& nc = c.newton;
  NewtonRun r{make_model(c.model), {}, {}};
  std::vector<WaveProfile> waves;
  EndState bg = c.endstate;
  for (std::size_t k = 0; k < nc.speeds.size(); ++k) {
    if (k == 0 && nc.leading_kink) {
      const auto& gs = c.profile.guess;
      TravelingWaveSpec s = solve_kink_endstates(r.model, nc.speeds[0], {gs[0], gs[1], gs[2]});
      waves.push_back(kink_profile(r.model, s));
      bg = s.right;
    } else {
      waves.push_back(soliton_profile(r.model, bg, nc.speeds[k]));
    }
  }
  double fs = nc.frame_speed >= 0.0 ? nc.frame_speed : 0.5 * (nc.speeds.front() + nc.speeds.back());
  r.cfg = make_config(std::move(waves), nc.A, 0.0, fs, nc.leading_kink);
  if (!nc.offsets.empty()) r.cfg.offsets = nc.offsets;
  r.cfg.validate();
  double T = nc.T_end > 0.0 ? nc.T_end : default_T_end(r.cfg);
  T = std::max(T, nc.T_evolve);
  double lo = 1e300, hi = -1e300;
  for (int k = 0; k < r.cfg.size(); ++k)
    for (double t : {0.0, T}) {
      lo = std::min(lo, r.cfg.center(k, t) - r.cfg.margin(k) - 1.0);
      hi = std::max(hi, r.cfg.center(k, t) + r.cfg.margin(k) + 1.0);
    }
  int n = static_cast<int>(std::ceil((hi - lo) / nc.h));
  n += n % 2;
  if (nc.leading_kink)
    r.grid = Grid::clamped(lo, hi, n, r.cfg.waves[0].spec.left, r.cfg.background());
  else
    r.grid = Grid::periodic(lo, hi, n);
  return r;
}

ApproximateSolution newton_core(Context& ctx, const NewtonRun& nr, const Discretization& d) {
  const NewtonConfig& nc = ctx.cfg.newton;
  NewtonOptions opt;
  opt.T_end = nc.T_end;
  opt.max_iters = nc.max_iters;
  opt.records = nc.records;
  ApproximateSolution sol = newton_iterate(d, nr.cfg, opt);
  json iters = json::array();
  for (std::size_t j = 0; j < sol.residual_history.size(); ++j) {
    std::string name = "residual_" + std::to_string(j) + ".csv";
    Csv csv(ctx.out / name, {"t", "residual"});
    for (std::size_t i = 0; i < sol.record_times.size(); ++i)
      csv.row({sol.record_times[i], sol.residual_history[j][i]});
    ctx.output(name);
    json it = {{"iteration", j}, {"sup_residual", sol.sup_residual[j]}, {"residual_csv", name}};
    std::printf("%s\n", it.dump().c_str());
    iters.push_back(it);
  }
  std::fflush(stdout);
  write_json(ctx.out / "newton.json", iters);
  ctx.output("newton.json");
  ctx.manifest["discretization_floor"] = sol.floor;
  ctx.norms()["iterations"] = sol.iterations;
  ctx.norms()["T_end"] = sol.T_end;
  ctx.norms()["dt"] = sol.dt;
  ctx.norms()["grid_n"] = nr.grid.n;
  ctx.norms()["grid_lo"] = nr.grid.x0;
  ctx.norms()["sup_residual"] = sol.sup_residual;
  return sol;
}

void cmd_newton(Context& ctx) {
  NewtonRun nr = newton_setup(ctx.cfg);
  Discretization d(nr.model, nr.grid, parse_stencil(ctx.cfg.newton.stencil));
  newton_core(ctx, nr, d);
}

void cmd_multisoliton_demo(Context& ctx) {
  NewtonRun nr = newton_setup(ctx.cfg);
  Discretization d(nr.model, nr.grid, parse_stencil(ctx.cfg.newton.stencil));
  ApproximateSolution sol = newton_core(ctx, nr, d);
  FieldState V = sol.state(0.0);
  auto dist = [&](const FieldState& u, double t) {
    FieldState e = u;
    axpy(-1.0, assemble_S(nr.cfg, t, nr.grid), e);
    return norm_H0(d, e);
  };
  const double T = ctx.cfg.newton.T_evolve, fs = nr.cfg.frame_speed;
  double dt = cfl_dt(d, V);
  const int N = static_cast<int>(std::ceil(T / dt));
  dt = T / N;
  Csv csv(ctx.out / "distance.csv", {"t", "distance_to_S", "min_rho"});
  const double d0 = dist(V, 0.0);
  double worst = d0;
  csv.row({0.0, d0, *std::min_element(V.rho.begin(), V.rho.end())});
  for (int k = 1; k <= N; ++k) {
    V = step_nonlinear(d, V, dt, Scheme::rk4_primitive, fs);
    V.t = k * dt;
    if (k % 50 == 0 || k == N) {
      double dk = dist(V, V.t);
      worst = std::max(worst, dk);
      csv.row({V.t, dk, *std::min_element(V.rho.begin(), V.rho.end())});
    }
  }
  ctx.output("distance.csv");
  ctx.norms()["distance_initial"] = d0;
  ctx.norms()["distance_max"] = worst;
}

const std::map<std::string, std::function<void(Context&)>>& table() {
  static const std::map<std::string, std::function<void(Context&)>> t{
      {"model", cmd_model},       {"profile", cmd_profile}, {"stability-scan", cmd_stability_scan},
      {"spectrum", cmd_spectrum}, {"simulate", cmd_simulate}, {"newton", cmd_newton},
      {"multisoliton-demo", cmd_multisoliton_demo}};
  return t;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"model",    "profile", "stability-scan",   "spectrum",
                                              "simulate", "newton",  "multisoliton-demo"};
  return names;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorKind::configuration, "config: cannot open " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::configuration, std::string("config: ") + e.what());
  }
  return from_json(j);
}

int run(const std::string& sub, const RunConfig& cfg, const std::string& out_dir, int verbosity) {
  auto it = table().find(sub);
  if (it == table().end()) {
    std::fprintf(stderr, "unknown subcommand '%s'\n", sub.c_str());
    return 2;
  }
  Context ctx{cfg, out_dir, verbosity, json::object()};
  try {
    validate(cfg);
    fs::create_directories(ctx.out);
  } catch (const ek::Error& e) {
    std::fprintf(stderr, "invalid configuration: %s\n", e.what());
    return 2;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "cannot create output directory: %s\n", e.what());
    return 2;
  }
  ctx.manifest["subcommand"] = sub;
  ctx.manifest["version"] = EK_VERSION;
  ctx.manifest["libraries"] = {{"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                             "." + std::to_string(EIGEN_MINOR_VERSION)},
                               {"boost", BOOST_LIB_VERSION}};
  ctx.manifest["config"] = to_json(cfg);
  ctx.manifest["outputs"] = json::array();
  ctx.manifest["norms"] = json::object();
  ctx.manifest["discretization_floor"] = nullptr;  // measured by newton and multisoliton-demo
  ctx.log(1, sub + ": writing to " + ctx.out.string());
  try {
    it->second(ctx);
  } catch (const ek::Error& e) {
    const bool invalid = is_validation_error(e.kind());
    std::fprintf(stderr, "%s: %s\n", invalid ? "invalid input" : "numerical failure", e.what());
    if (!invalid) {
      json diag = {{"subcommand", sub},
                   {"kind", to_string(e.kind())},
                   {"message", e.what()},
                   {"config", to_json(cfg)},
                   {"partial_norms", ctx.manifest["norms"]}};
      write_json(ctx.out / "diagnostic.json", diag);
    }
    return invalid ? 2 : 3;
  }
  write_json(ctx.out / "manifest.json", ctx.manifest);
  ctx.log(1, sub + ": done");
  return 0;
}

}  // namespace ekcli
