#include "run_config.hpp"

#include <set>

#include "ek/discretization.hpp"
#include "ek/error.hpp"

namespace ekcli {

namespace {

using ek::ErrorKind;
using ek::fail;

// Reads the keys of one section; anything left over is an unknown field.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::configuration, path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      fail(ErrorKind::configuration, field(key) + ": " + e.what());
    }
  }

  Section sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    static const json empty = json::object();
    return Section(it == j_.end() ? empty : *it, field(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(ErrorKind::configuration, field(it.key()) + ": unknown field");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void require(bool ok, const std::string& fieldname, const std::string& what) {
  if (!ok) fail(ErrorKind::configuration, fieldname + ": " + what);
}

}  // namespace

RunConfig from_json(const json& j) {
  RunConfig c;
  Section root(j, "");
  {
    Section s = root.sub("model");
    s.get("name", c.model.name);
    s.get("K", c.model.K);
    s.get("g", c.model.g);
    s.get("anchor", c.model.anchor);
    s.get("table_lo", c.model.table_lo);
    s.get("table_hi", c.model.table_hi);
    s.get("table_n", c.model.table_n);
    s.finish();
  }
  {
    Section s = root.sub("endstate");
    s.get("rho", c.endstate.rho);
    s.get("v", c.endstate.v);
    s.finish();
  }
  {
    Section s = root.sub("profile");
    s.get("kind", c.profile.kind);
    s.get("c", c.profile.c);
    s.get("guess", c.profile.guess);
    s.get("half_width", c.profile.half_width);
    s.get("n", c.profile.n);
    s.finish();
  }
  {
    Section s = root.sub("scan");
    s.get("speeds", c.scan.speeds);
    s.get("eps", c.scan.eps);
    s.get("h_c", c.scan.h_c);
    s.finish();
  }
  {
    Section s = root.sub("grid");
    s.get("lo", c.grid.lo);
    s.get("hi", c.grid.hi);
    s.get("n", c.grid.n);
    s.get("boundary", c.grid.boundary);
    s.get("stencil", c.grid.stencil);
    s.finish();
  }
  {
    Section s = root.sub("simulate");
    s.get("T", c.simulate.T);
    s.get("dt", c.simulate.dt);
    s.get("cfl", c.simulate.cfl);
    s.get("scheme", c.simulate.scheme);
    s.get("frame_speed", c.simulate.frame_speed);
    s.get("snapshot_stride", c.simulate.snapshot_stride);
    s.get("log_stride", c.simulate.log_stride);
    s.finish();
  }
  {
    Section s = root.sub("newton");
    s.get("speeds", c.newton.speeds);
    s.get("A", c.newton.A);
    s.get("offsets", c.newton.offsets);
    s.get("leading_kink", c.newton.leading_kink);
    s.get("frame_speed", c.newton.frame_speed);
    s.get("h", c.newton.h);
    s.get("stencil", c.newton.stencil);
    s.get("T_end", c.newton.T_end);
    s.get("max_iters", c.newton.max_iters);
    s.get("records", c.newton.records);
    s.get("T_evolve", c.newton.T_evolve);
    s.finish();
  }
  root.finish();
  validate(c);
  return c;
}

json to_json(const RunConfig& c) {
  json j;
  j["model"] = {{"name", c.model.name},       {"K", c.model.K},
                {"g", c.model.g},             {"anchor", c.model.anchor},
                {"table_lo", c.model.table_lo}, {"table_hi", c.model.table_hi},
                {"table_n", c.model.table_n}};
  j["endstate"] = {{"rho", c.endstate.rho}, {"v", c.endstate.v}};
  j["profile"] = {{"kind", c.profile.kind},
                  {"c", c.profile.c},
                  {"guess", c.profile.guess},
                  {"half_width", c.profile.half_width},
                  {"n", c.profile.n}};
  j["scan"] = {{"speeds", c.scan.speeds}, {"eps", c.scan.eps}, {"h_c", c.scan.h_c}};
  j["grid"] = {{"lo", c.grid.lo},
               {"hi", c.grid.hi},
               {"n", c.grid.n},
               {"boundary", c.grid.boundary},
               {"stencil", c.grid.stencil}};
  j["simulate"] = {{"T", c.simulate.T},
                   {"dt", c.simulate.dt},
                   {"cfl", c.simulate.cfl},
                   {"scheme", c.simulate.scheme},
                   {"frame_speed", c.simulate.frame_speed},
                   {"snapshot_stride", c.simulate.snapshot_stride},
                   {"log_stride", c.simulate.log_stride}};
  j["newton"] = {{"speeds", c.newton.speeds},       {"A", c.newton.A},
                 {"offsets", c.newton.offsets},     {"leading_kink", c.newton.leading_kink},
                 {"frame_speed", c.newton.frame_speed}, {"h", c.newton.h},
                 {"stencil", c.newton.stencil},     {"T_end", c.newton.T_end},
                 {"max_iters", c.newton.max_iters}, {"records", c.newton.records},
                 {"T_evolve", c.newton.T_evolve}};
  return j;
}

void validate(const RunConfig& c) {
  const std::set<std::string> models{"gross_pitaevskii", "cubic_vdw", "constant_K"};
  require(models.count(c.model.name) > 0, "model.name", "unknown model '" + c.model.name + "'");
  require(c.model.K > 0.0, "model.K", "must be positive");
  require(!c.model.g.empty() && c.model.g.size() <= 6, "model.g", "needs 1..6 coefficients (degree <= 5)");
  require(c.model.table_n >= 2, "model.table_n", "must be >= 2");
  require(c.model.table_hi > c.model.table_lo, "model.table_hi", "must exceed table_lo");
  require(c.endstate.rho > 0.0, "endstate.rho", "must be positive");
  require(c.profile.kind == "soliton" || c.profile.kind == "kink", "profile.kind", "soliton or kink");
  require(c.profile.guess.size() == 3, "profile.guess", "expects [rho-, rho+, v+]");
  require(c.profile.half_width >= 0.0, "profile.half_width", "must be >= 0");
  require(c.profile.n == 0 || c.profile.n >= 16, "profile.n", "must be 0 (auto) or >= 16");
  require(c.scan.h_c > 0.0, "scan.h_c", "must be positive");
  for (double e : c.scan.eps) require(e > 0.0 && e < 1.0, "scan.eps", "entries must lie in (0, 1)");
  require(c.grid.n >= 16, "grid.n", "must be >= 16");
  require(c.grid.hi > c.grid.lo, "grid.hi", "must exceed grid.lo");
  require(c.grid.boundary == "periodic" || c.grid.boundary == "clamped", "grid.boundary", "periodic or clamped");
  try {
    (void)ek::parse_stencil(c.grid.stencil);
  } catch (const ek::Error&) {
    require(false, "grid.stencil", "fd2, fd4 or spectral");
  }
  require(c.simulate.T > 0.0, "simulate.T", "must be positive");
  require(c.simulate.dt >= 0.0, "simulate.dt", "must be >= 0");
  require(c.simulate.cfl > 0.0 && c.simulate.cfl <= 1.0, "simulate.cfl", "must lie in (0, 1]");
  require(c.simulate.scheme == "rk4_primitive" || c.simulate.scheme == "rk4_gauge", "simulate.scheme",
          "rk4_primitive or rk4_gauge");
  require(c.simulate.snapshot_stride >= 0, "simulate.snapshot_stride", "must be >= 0");
  require(c.simulate.log_stride >= 1, "simulate.log_stride", "must be >= 1");
  require(!c.newton.speeds.empty(), "newton.speeds", "at least one wave");
  require(c.newton.A > 0.0, "newton.A", "must be positive");
  require(c.newton.offsets.empty() || c.newton.offsets.size() + 1 == c.newton.speeds.size(), "newton.offsets",
          "one offset per wave after the first");
  for (double o : c.newton.offsets) require(o >= c.newton.A, "newton.offsets", "each offset must be >= A");
  require(c.newton.h > 0.0, "newton.h", "must be positive");
  try {
    (void)ek::parse_stencil(c.newton.stencil);
  } catch (const ek::Error&) {
    require(false, "newton.stencil", "fd2, fd4 or spectral");
  }
  require(c.newton.T_end >= 0.0, "newton.T_end", "must be >= 0");
  require(c.newton.max_iters >= 0, "newton.max_iters", "must be >= 0");
  require(c.newton.records >= 2, "newton.records", "must be >= 2");
  require(c.newton.T_evolve > 0.0, "newton.T_evolve", "must be positive");
}

ek::FluidModel make_model(const ModelConfig& m) {
  return ek::builtin_model(m.name, m.K, ek::Polynomial{m.g}, m.anchor);
}

ek::Grid make_grid(const GridConfig& g, const ek::EndState& left, const ek::EndState& right) {
  if (g.boundary == "clamped") return ek::Grid::clamped(g.lo, g.hi, g.n, left, right);
  return ek::Grid::periodic(g.lo, g.hi, g.n);
}

}  // namespace ekcli
