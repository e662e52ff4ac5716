#include "eulerlab/solver.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "eulerlab/errors.hpp"
#include "eulerlab/parallel.hpp"
#include "eulerlab/provenance.hpp"

namespace eulerlab::solver {

using nlohmann::json;

std::string to_string(System s) { return s == System::complete ? "complete" : "isentropic"; }

System system_from_string(const std::string& s) {
  if (s == "complete") return System::complete;
  if (s == "isentropic") return System::isentropic;
  throw ArgumentError("system: expected 'complete' or 'isentropic', got '" + s + "'");
}

double Scenario::param(const std::string& key, double fallback) const {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

std::vector<std::string> scenario_names() {
  return {"constant", "riemann", "sod", "rarefaction", "smooth_wave"};
}

void validate(const SolverConfig& c) {
  if (c.dims != 1 && c.dims != 2) throw ArgumentError("dims: must be 1 or 2");
  if (c.cells < 4) throw ArgumentError("cells: must be >= 4");
  if (!(c.cfl > 0.0 && c.cfl <= 0.5)) throw ArgumentError("cfl: must lie in (0, 0.5]");
  if (!(c.t_end > 0.0) || !std::isfinite(c.t_end)) throw ArgumentError("t_end: must be positive");
  if (c.flux != "llf") throw ArgumentError("flux: only 'llf' is available");
  const auto names = scenario_names();
  if (std::find(names.begin(), names.end(), c.init.id) == names.end()) {
    throw ArgumentError("init.id: unknown scenario '" + c.init.id + "'");
  }
  if (c.snapshot_times.empty() && c.snapshot_count < 1) {
    throw ArgumentError("snapshot_count: must be >= 1");
  }
  for (std::size_t k = 0; k < c.snapshot_times.size(); ++k) {
    const double t = c.snapshot_times[k];
    if (!(t > 0.0 && t <= c.t_end * (1.0 + 1e-14))) {
      throw ArgumentError("snapshot_times: entries must lie in (0, t_end]");
    }
    if (k > 0 && !(t > c.snapshot_times[k - 1])) {
      throw ArgumentError("snapshot_times: entries must increase");
    }
  }
  if (c.transverse_amplitude != 0.0 && c.dims != 2) {
    throw ArgumentError("transverse_amplitude: needs dims = 2");
  }
  if (!(std::abs(c.transverse_amplitude) < 1.0)) {
    throw ArgumentError("transverse_amplitude: must be < 1 in magnitude");
  }
  if (c.max_steps < 1) throw ArgumentError("max_steps: must be positive");
}

json to_json(const SolverConfig& c) {
  json init = {{"id", c.init.id}, {"params", c.init.params}};
  json j = {{"system", to_string(c.system)},
            {"gamma", c.params.gamma()},
            {"dims", c.dims},
            {"cells", c.cells},
            {"cfl", c.cfl},
            {"t_end", c.t_end},
            {"flux", c.flux},
            {"init", init},
            {"snapshot_count", c.snapshot_count},
            {"snapshot_times", c.snapshot_times},
            {"transverse_amplitude", c.transverse_amplitude},
            {"max_steps", c.max_steps}};
  return j;
}

namespace {

template <typename T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ArgumentError(std::string(key) + ": " + e.what());
  }
}

}  // namespace

SolverConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ArgumentError("solver config must be a JSON object");
  static const std::vector<std::string> known = {
      "system", "gamma",          "dims",           "cells",    "cfl",
      "t_end",  "flux",           "init",           "snapshot_count",
      "snapshot_times", "transverse_amplitude", "max_steps"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ArgumentError(key + ": unknown solver config field");
    }
  }
  SolverConfig c;
  c.system = system_from_string(field<std::string>(j, "system", "complete"));
  const double gamma = field<double>(j, "gamma", 1.4);
  try {
    c.params = thermo::GasParams(gamma);
  } catch (const std::exception& e) {
    throw ArgumentError(std::string("gamma: ") + e.what());
  }
  c.dims = field<int>(j, "dims", c.dims);
  c.cells = field<int>(j, "cells", c.cells);
  c.cfl = field<double>(j, "cfl", c.cfl);
  c.t_end = field<double>(j, "t_end", c.t_end);
  c.flux = field<std::string>(j, "flux", c.flux);
  if (j.contains("init")) {
    const auto& init = j.at("init");
    if (!init.is_object()) throw ArgumentError("init: must be an object");
    c.init.id = field<std::string>(init, "id", c.init.id);
    if (init.contains("params")) {
      try {
        c.init.params = init.at("params").get<std::map<std::string, double>>();
      } catch (const json::exception& e) {
        throw ArgumentError(std::string("init.params: ") + e.what());
      }
    }
  }
  c.snapshot_count = field<int>(j, "snapshot_count", c.snapshot_count);
  c.snapshot_times = field<std::vector<double>>(j, "snapshot_times", c.snapshot_times);
  c.transverse_amplitude = field<double>(j, "transverse_amplitude", c.transverse_amplitude);
  c.max_steps = field<long>(j, "max_steps", c.max_steps);
  validate(c);
  return c;
}

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  for (const auto& s : snapshots) out.push_back(s.t);
  return out;
}

// ---------------------------------------------------------------------------
// Conserved-variable kernels

namespace {

/// Cellwise state vectors: rho, m_x, [m_y], [E].
struct State {
  int dims = 1;
  bool complete = true;
  std::vector<std::vector<double>> v;

  int vars() const { return static_cast<int>(v.size()); }
  int energy_index() const { return 1 + dims; }
};

struct Closure {
  System system;
  double gamma;

  double pressure(const double* u, int dims) const {
    const double rho = u[0];
    if (system == System::isentropic) return std::pow(rho, gamma);
    double m2 = 0.0;
    for (int d = 0; d < dims; ++d) m2 += u[1 + d] * u[1 + d];
    return (gamma - 1.0) * (u[1 + dims] - 0.5 * m2 / rho);
  }
  double sound(double rho, double p) const { return std::sqrt(gamma * p / rho); }
};

constexpr int kMaxVars = 4;

void physical_flux(const Closure& cl, const double* u, int dims, int axis, double* f, double& speed) {
  const double rho = u[0];
  const double vel = u[1 + axis] / rho;
  const double p = cl.pressure(u, dims);
  f[0] = u[1 + axis];
  for (int d = 0; d < dims; ++d) f[1 + d] = u[1 + d] * vel;
  f[1 + axis] += p;
  if (cl.system == System::complete) f[1 + dims] = (u[1 + dims] + p) * vel;
  speed = std::abs(vel) + cl.sound(rho, std::max(p, 0.0));
}

State to_state(const Snapshot& s, System system) {
  State st;
  st.dims = s.rho.grid().dims();
  st.complete = system == System::complete;
  st.v.emplace_back(s.rho.values().begin(), s.rho.values().end());
  for (const auto& m : s.mom) st.v.emplace_back(m.values().begin(), m.values().end());
  if (st.complete) st.v.emplace_back(s.energy.values().begin(), s.energy.values().end());
  return st;
}

Snapshot to_snapshot(const State& st, const PeriodicGrid& g, double t, const Closure& cl) {
  Snapshot s;
  s.t = t;
  s.rho = ScalarField(g, st.v[0]);
  for (int d = 0; d < st.dims; ++d) s.mom.emplace_back(g, st.v[1 + d]);
  if (st.complete) {
    s.energy = ScalarField(g, st.v[st.energy_index()]);
  } else {
    s.energy = ScalarField(g);
    for (std::size_t k = 0; k < g.cell_count(); ++k) {
      double m2 = 0.0;
      for (int d = 0; d < st.dims; ++d) m2 += st.v[1 + d][k] * st.v[1 + d][k];
      const double rho = st.v[0][k];
      s.energy[k] = 0.5 * m2 / rho + std::pow(rho, cl.gamma) / (cl.gamma - 1.0);
    }
  }
  return s;
}

/// Throws SolverAbort on vacuum, negative pressure or non-finite values.
void check_admissible(const State& st, const Closure& cl, double t) {
  const std::size_t n = st.v[0].size();
  double u[kMaxVars];
  for (std::size_t k = 0; k < n; ++k) {
    for (int q = 0; q < st.vars(); ++q) u[q] = st.v[q][k];
    bool finite = true;
    for (int q = 0; q < st.vars(); ++q) finite = finite && std::isfinite(u[q]);
    if (!finite || u[0] < thermo::kVacuumFloor) {
      throw SolverAbort("vacuum or non-finite density at cell " + std::to_string(k) +
                        ", t = " + format_double(t));
    }
    const double p = cl.pressure(u, st.dims);
    if (!(p >= thermo::kVacuumFloor)) {
      throw SolverAbort("non-positive pressure at cell " + std::to_string(k) +
                        ", t = " + format_double(t));
    }
  }
}

/// Sum over axes of max wave speed / dx.
double wave_rate(const State& st, const Closure& cl, const PeriodicGrid& g) {
  const std::size_t n = st.v[0].size();
  double total = 0.0;
  double u[kMaxVars], f[kMaxVars];
  for (int axis = 0; axis < st.dims; ++axis) {
    double smax = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      for (int q = 0; q < st.vars(); ++q) u[q] = st.v[q][k];
      double s = 0.0;
      physical_flux(cl, u, st.dims, axis, f, s);
      smax = std::max(smax, s);
    }
    total += smax / g.cell_width();
  }
  return total;
}

/// L(U) = -sum_axis (F_{k+1/2} - F_{k-1/2}) / dx with the local Lax-Friedrichs flux.
void residual(const State& st, const Closure& cl, const PeriodicGrid& g, State& out) {
  const std::size_t n = st.v[0].size();
  const int nv = st.vars();
  for (auto& c : out.v) std::fill(c.begin(), c.end(), 0.0);
  std::vector<std::vector<double>> face(static_cast<std::size_t>(nv), std::vector<double>(n));
  const double inv_dx = 1.0 / g.cell_width();
  for (int axis = 0; axis < st.dims; ++axis) {
    // face[q][k] holds the flux through the upper face of cell k along `axis`.
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      double ul[kMaxVars], ur[kMaxVars], fl[kMaxVars], fr[kMaxVars];
      for (std::size_t k = begin; k < end; ++k) {
        const auto c = g.coords(k);
        const std::size_t r = axis == 0 ? g.index(c[0] + 1, c[1]) : g.index(c[0], c[1] + 1);
        for (int q = 0; q < nv; ++q) {
          ul[q] = st.v[q][k];
          ur[q] = st.v[q][r];
        }
        double sl = 0.0, sr = 0.0;
        physical_flux(cl, ul, st.dims, axis, fl, sl);
        physical_flux(cl, ur, st.dims, axis, fr, sr);
        const double a = std::max(sl, sr);
        for (int q = 0; q < nv; ++q) face[q][k] = 0.5 * (fl[q] + fr[q]) - 0.5 * a * (ur[q] - ul[q]);
      }
    });
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
      for (std::size_t k = begin; k < end; ++k) {
        const auto c = g.coords(k);
        const std::size_t l = axis == 0 ? g.index(c[0] - 1, c[1]) : g.index(c[0], c[1] - 1);
        for (int q = 0; q < nv; ++q) out.v[q][k] -= (face[q][k] - face[q][l]) * inv_dx;
      }
    });
  }
}

thermo::PrimitiveState scenario_point(const SolverConfig& c, double x) {
  const auto& s = c.init;
  thermo::PrimitiveState w;
  auto set = [&](double rho, double u, double p) {
    w.rho = rho;
    w.vel = {u, 0.0};
    w.theta = p / rho;
  };
  if (s.id == "constant") {
    set(s.param("rho", 1.0), s.param("u", 0.0), s.param("p", 1.0));
    w.vel[1] = s.param("v", 0.0);
  } else if (s.id == "riemann" || s.id == "sod") {
    if (x < 0.0) {
      set(s.param("rho_l", 1.0), s.param("u_l", 0.0), s.param("p_l", 1.0));
    } else {
      set(s.param("rho_r", 0.125), s.param("u_r", 0.0), s.param("p_r", 0.1));
    }
  } else if (s.id == "rarefaction") {
    const double u0 = s.param("u0", 0.2);
    const double ramp = s.param("ramp", 0.5);
    if (!(ramp > 0.0 && ramp < 1.0)) throw ArgumentError("init.params.ramp: must lie in (0, 1)");
    const double sign = x < 0.0 ? -1.0 : 1.0;
    set(s.param("rho", 1.0), u0 * sign * std::min(1.0, (1.0 - std::abs(x)) / ramp),
        s.param("p", 1.0));
  } else if (s.id == "smooth_wave") {
    set(1.0 + s.param("amplitude", 0.2) * std::sin(std::numbers::pi * x), s.param("u", 0.5),
        s.param("p", 1.0));
  } else {
    throw ArgumentError("init.id: unknown scenario '" + s.id + "'");
  }
  return w;
}

/// Rejects Riemann data whose exact solution opens a vacuum, at the centre jump
/// or at the periodic seam: u_right - u_left >= 2 (c_left + c_right) / (gamma - 1).
void require_no_vacuum(const SolverConfig& c) {
  if (c.init.id != "riemann" && c.init.id != "sod") return;
  const double gm = c.params.gamma();
  const auto l = scenario_point(c, -0.5), r = scenario_point(c, 0.5);
  auto sound = [&](const thermo::PrimitiveState& w) {
    return c.system == System::complete ? std::sqrt(gm * w.theta)
                                        : std::sqrt(gm * std::pow(w.rho, gm - 1.0));
  };
  const double room = 2.0 * (sound(l) + sound(r)) / (gm - 1.0);
  const double jump = std::max(r.vel[0] - l.vel[0], l.vel[0] - r.vel[0]);
  if (jump >= room) {
    throw DomainError("Riemann data generates vacuum (velocity jump " + format_double(jump) +
                      " >= " + format_double(room) + ")");
  }
}

}  // namespace

Snapshot initial_state(const SolverConfig& c) {
  validate(c);
  require_no_vacuum(c);
  const PeriodicGrid g(c.dims, c.cells);
  Snapshot s;
  s.rho = ScalarField(g);
  s.energy = ScalarField(g);
  for (int d = 0; d < c.dims; ++d) s.mom.emplace_back(g);
  const double gm = c.params.gamma();
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    const auto ij = g.coords(k);
    auto w = scenario_point(c, g.center(ij[0]));
    const double p = w.rho * w.theta;
    if (c.dims == 2 && c.transverse_amplitude != 0.0) {
      w.rho *= 1.0 + c.transverse_amplitude * std::sin(std::numbers::pi * g.center(ij[1]));
    }
    if (!(w.rho >= thermo::kVacuumFloor) || !(p >= thermo::kVacuumFloor)) {
      throw DomainError("initial data has vacuum or non-positive pressure at cell " +
                        std::to_string(k));
    }
    s.rho[k] = w.rho;
    double ke = 0.0;
    for (int d = 0; d < c.dims; ++d) {
      s.mom[d][k] = w.rho * w.vel[d];
      ke += 0.5 * w.rho * w.vel[d] * w.vel[d];
    }
    const double pr = c.system == System::complete ? p : std::pow(w.rho, gm);
    s.energy[k] = ke + pr / (gm - 1.0);
  }
  return s;
}

Trajectory run(const SolverConfig& config) {
  validate(config);
  const auto start = std::chrono::steady_clock::now();
  const PeriodicGrid g(config.dims, config.cells);
  const Closure cl{config.system, config.params.gamma()};

  Trajectory traj;
  traj.system = config.system;
  traj.params = config.params;
  traj.grid = g;
  traj.config = to_json(config);
  traj.config_hash = config_hash(traj.config);

  std::vector<double> targets = config.snapshot_times;
  if (targets.empty()) {
    for (int k = 1; k <= config.snapshot_count; ++k) {
      targets.push_back(config.t_end * k / config.snapshot_count);
    }
  }
  targets.back() = std::min(targets.back(), config.t_end);

  const Snapshot init = initial_state(config);
  traj.snapshots.push_back(init);
  State u = to_state(init, config.system);
  check_admissible(u, cl, 0.0);
  State k1 = u, stage = u, k2 = u;

  double t = 0.0;
  long steps = 0;
  for (double target : targets) {
    while (t < target) {
      if (++steps > config.max_steps) {
        throw SolverAbort("step limit " + std::to_string(config.max_steps) + " reached at t = " +
                          format_double(t));
      }
      const double rate = wave_rate(u, cl, g);
      double dt = config.cfl / rate;
      if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw SolverAbort("time step collapsed at t = " + format_double(t));
      }
      bool last = false;
      if (t + dt >= target - 1e-14 * std::max(1.0, target)) {
        dt = target - t;
        last = true;
      }
      residual(u, cl, g, k1);
      for (int q = 0; q < u.vars(); ++q) {
        for (std::size_t c = 0; c < u.v[q].size(); ++c) stage.v[q][c] = u.v[q][c] + dt * k1.v[q][c];
      }
      check_admissible(stage, cl, t + dt);
      if (dt * wave_rate(stage, cl, g) > 1.0) {
        throw SolverAbort("CFL violation in the second stage at t = " + format_double(t) +
                          " (Courant number " + format_double(dt * wave_rate(stage, cl, g)) + ")");
      }
      residual(stage, cl, g, k2);
      for (int q = 0; q < u.vars(); ++q) {
        for (std::size_t c = 0; c < u.v[q].size(); ++c) {
          u.v[q][c] = 0.5 * u.v[q][c] + 0.5 * (stage.v[q][c] + dt * k2.v[q][c]);
        }
      }
      check_admissible(u, cl, t + dt);
      t = last ? target : t + dt;
    }
    traj.snapshots.push_back(to_snapshot(u, g, t, cl));
  }
  traj.steps = steps;
  traj.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

VectorField velocity(const Snapshot& s) {
  std::vector<ScalarField> comps;
  for (const auto& m : s.mom) {
    ScalarField v(s.rho.grid());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = m[k] / s.rho[k];
    comps.push_back(std::move(v));
  }
  return VectorField(std::move(comps));
}

ScalarField temperature(const Snapshot& s, const thermo::GasParams& params) {
  ScalarField th(s.rho.grid());
  for (std::size_t k = 0; k < th.size(); ++k) {
    double m2 = 0.0;
    for (const auto& m : s.mom) m2 += m[k] * m[k];
    th[k] = (s.energy[k] - 0.5 * m2 / s.rho[k]) / (s.rho[k] * params.cv());
  }
  return th;
}

ScalarField pressure(const Snapshot& s, System system, const thermo::GasParams& params) {
  if (system == System::isentropic) {
    return map(s.rho, [g = params.gamma()](double r) { return std::pow(r, g); });
  }
  return s.rho * temperature(s, params);
}

Trajectory restrict_trajectory(const Trajectory& fine, const PeriodicGrid& coarse) {
  Trajectory out = fine;
  out.grid = coarse;
  for (auto& s : out.snapshots) {
    s.rho = restrict_average(s.rho, coarse);
    for (auto& m : s.mom) m = restrict_average(m, coarse);
    s.energy = restrict_average(s.energy, coarse);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Exact Riemann solver

ExactRiemann::ExactRiemann(const RiemannState& left, const RiemannState& right, double gamma,
                           double tolerance)
    : left_(left), right_(right), gamma_(gamma) {
  for (const auto* s : {&left, &right}) {
    if (!(s->rho >= thermo::kVacuumFloor) || !(s->p >= thermo::kVacuumFloor)) {
      throw DomainError("Riemann states need positive density and pressure");
    }
  }
  if (!(gamma > 1.0)) throw DomainError("gamma must exceed 1");
  cl_ = std::sqrt(gamma * left.p / left.rho);
  cr_ = std::sqrt(gamma * right.p / right.rho);
  const double du = right.u - left.u;
  if (2.0 / (gamma - 1.0) * (cl_ + cr_) <= du) {
    throw DomainError("Riemann data generates vacuum (pressure positivity condition fails)");
  }
  // Primitive-variable guess, then Newton on f_L(p) + f_R(p) + du = 0.
  double p = 0.5 * (left.p + right.p) - 0.125 * du * (left.rho + right.rho) * (cl_ + cr_);
  p = std::max(p, tolerance);
  for (iterations_ = 1; iterations_ <= 100; ++iterations_) {
    double dl = 0.0, dr = 0.0;
    const double f = wave_function(p, left, cl_, dl) + wave_function(p, right, cr_, dr) + du;
    double next = p - f / (dl + dr);
    if (next <= 0.0) next = 0.5 * p;
    const double change = 2.0 * std::abs(next - p) / (next + p);
    p = next;
    if (change < tolerance) break;
  }
  if (iterations_ > 100) throw RangeError("exact Riemann solver: Newton did not converge");
  p_star_ = p;
  double dl = 0.0, dr = 0.0;
  u_star_ = 0.5 * (left.u + right.u) +
            0.5 * (wave_function(p, right, cr_, dr) - wave_function(p, left, cl_, dl));
}

double ExactRiemann::wave_function(double p, const RiemannState& s, double c, double& deriv) const {
  const double g = gamma_;
  if (p > s.p) {
    const double a = 2.0 / ((g + 1.0) * s.rho);
    const double b = (g - 1.0) / (g + 1.0) * s.p;
    const double q = std::sqrt(a / (p + b));
    deriv = q * (1.0 - 0.5 * (p - s.p) / (b + p));
    return (p - s.p) * q;
  }
  const double r = p / s.p;
  deriv = 1.0 / (s.rho * c) * std::pow(r, -(g + 1.0) / (2.0 * g));
  return 2.0 * c / (g - 1.0) * (std::pow(r, (g - 1.0) / (2.0 * g)) - 1.0);
}

RiemannState ExactRiemann::sample(double xi) const {
  const double g = gamma_;
  const double gm = (g - 1.0) / (g + 1.0);
  const double ps = p_star_, us = u_star_;
  if (xi <= us) {
    const auto& L = left_;
    if (ps > L.p) {
      const double sl = L.u - cl_ * std::sqrt((g + 1.0) / (2.0 * g) * ps / L.p + (g - 1.0) / (2.0 * g));
      if (xi <= sl) return L;
      return {L.rho * (ps / L.p + gm) / (gm * ps / L.p + 1.0), us, ps};
    }
    const double head = L.u - cl_;
    const double cstar = cl_ * std::pow(ps / L.p, (g - 1.0) / (2.0 * g));
    const double tail = us - cstar;
    if (xi <= head) return L;
    if (xi >= tail) return {L.rho * std::pow(ps / L.p, 1.0 / g), us, ps};
    const double c = 2.0 / (g + 1.0) * (cl_ + 0.5 * (g - 1.0) * (L.u - xi));
    const double rho = L.rho * std::pow(c / cl_, 2.0 / (g - 1.0));
    return {rho, 2.0 / (g + 1.0) * (cl_ + 0.5 * (g - 1.0) * L.u + xi),
            L.p * std::pow(c / cl_, 2.0 * g / (g - 1.0))};
  }
  const auto& R = right_;
  if (ps > R.p) {
    const double sr = R.u + cr_ * std::sqrt((g + 1.0) / (2.0 * g) * ps / R.p + (g - 1.0) / (2.0 * g));
    if (xi >= sr) return R;
    return {R.rho * (ps / R.p + gm) / (gm * ps / R.p + 1.0), us, ps};
  }
  const double head = R.u + cr_;
  const double cstar = cr_ * std::pow(ps / R.p, (g - 1.0) / (2.0 * g));
  const double tail = us + cstar;
  if (xi >= head) return R;
  if (xi <= tail) return {R.rho * std::pow(ps / R.p, 1.0 / g), us, ps};
  const double c = 2.0 / (g + 1.0) * (cr_ - 0.5 * (g - 1.0) * (R.u - xi));
  const double rho = R.rho * std::pow(c / cr_, 2.0 / (g - 1.0));
  return {rho, 2.0 / (g + 1.0) * (-cr_ + 0.5 * (g - 1.0) * R.u + xi),
          R.p * std::pow(c / cr_, 2.0 * g / (g - 1.0))};
}

RiemannState periodic_riemann_exact(const ExactRiemann& main, const ExactRiemann& seam, double x,
                                    double t) {
  if (!(t > 0.0)) throw ArgumentError("exact solution needs t > 0");
  if (std::abs(x) <= 0.5) return main.sample(x / t);
  return seam.sample((x - (x > 0.0 ? 1.0 : -1.0)) / t);
}

// ---------------------------------------------------------------------------
// Test functions and weak residuals

namespace {

double bump(double z) {
  if (std::abs(z) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - z * z));
}

double dbump(double z) {
  if (std::abs(z) >= 1.0) return 0.0;
  const double q = 1.0 - z * z;
  return bump(z) * (-2.0 * z / (q * q));
}

double fold(double d) {
  d = std::fmod(d + 1.0, 2.0);
  if (d < 0.0) d += 2.0;
  return d - 1.0;
}

}  // namespace

TestFunction bump_test(double t0, double rt, double x0, double rx, double y0, double ry) {
  if (!(rt > 0.0 && rx > 0.0 && rx <= 1.0)) throw ArgumentError("bump test: radii out of range");
  if (!(t0 - rt >= 0.0)) throw ArgumentError("bump test: support must lie in t > 0");
  const bool use_y = ry > 0.0 && ry < 1.0;
  auto tx = [=](double t, double x, double y, int which) {
    const double zt = (t - t0) / rt, zx = fold(x - x0) / rx, zy = fold(y - y0) / ry;
    const double bt = which == 1 ? dbump(zt) / rt : bump(zt);
    const double bx = which == 2 ? dbump(zx) / rx : bump(zx);
    const double by = !use_y ? (which == 3 ? 0.0 : 1.0) : (which == 3 ? dbump(zy) / ry : bump(zy));
    return bt * bx * by;
  };
  TestFunction f;
  f.name = "bump";
  f.value = [tx](double t, double x, double y) { return tx(t, x, y, 0); };
  f.dt = [tx](double t, double x, double y) { return tx(t, x, y, 1); };
  f.dx = [tx](double t, double x, double y) { return tx(t, x, y, 2); };
  f.dy = [tx](double t, double x, double y) { return tx(t, x, y, 3); };
  return f;
}

TestFunction trig_test(double t0, double rt, int k, double phase) {
  if (!(rt > 0.0) || !(t0 - rt >= 0.0)) throw ArgumentError("trig test: support must lie in t > 0");
  const double w = k * std::numbers::pi;
  TestFunction f;
  f.name = "trig";
  f.value = [=](double t, double x, double) {
    return bump((t - t0) / rt) * 0.5 * (1.0 + std::cos(w * x + phase));
  };
  f.dt = [=](double t, double x, double) {
    return dbump((t - t0) / rt) / rt * 0.5 * (1.0 + std::cos(w * x + phase));
  };
  f.dx = [=](double t, double x, double) {
    return bump((t - t0) / rt) * (-0.5 * w * std::sin(w * x + phase));
  };
  f.dy = [](double, double, double) { return 0.0; };
  return f;
}

TestFunction test_function(const std::string& name, const std::map<std::string, double>& p) {
  auto get = [&](const char* key, double fallback) {
    const auto it = p.find(key);
    return it == p.end() ? fallback : it->second;
  };
  if (name == "bump") {
    return bump_test(get("t0", 0.1), get("rt", 0.05), get("x0", 0.0), get("rx", 0.25),
                     get("y0", 0.0), get("ry", 0.0));
  }
  if (name == "trig") {
    return trig_test(get("t0", 0.1), get("rt", 0.05), static_cast<int>(get("k", 1.0)),
                     get("phase", 0.0));
  }
  throw ArgumentError("unknown test function '" + name + "' (expected bump or trig)");
}

namespace {

/// Conserved density and flux of one cell, as seen by a weak residual.
struct CellTerms {
  double density = 0.0;
  std::array<double, 2> flux{};
};

using CellIntegrand = std::function<CellTerms(const Snapshot&, std::size_t)>;

/// Integral of density*phi_t + flux.grad(phi) with the data linear in time
/// between snapshots. The phi_t part is integrated by parts exactly on each
/// interval and grad(phi) is a periodic central difference, so both parts
/// telescope: a constant state has zero residual up to rounding.
double space_time(const Trajectory& traj, const TestFunction& phi, const CellIntegrand& f) {
  const auto& s = traj.snapshots;
  if (s.size() < 2) throw ArgumentError("weak residual needs at least two snapshots");
  const auto& g = traj.grid;
  const int dims = g.dims();
  const std::size_t cells = g.cell_count();
  const double h = g.cell_width();
  static constexpr std::array<double, 3> gauss_x{-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr std::array<double, 3> gauss_w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

  std::vector<CellTerms> prev(cells), next(cells);
  for (std::size_t k = 0; k < cells; ++k) prev[k] = f(s[0], k);
  std::vector<double> xs(cells), ys(cells, 0.0);
  for (std::size_t k = 0; k < cells; ++k) {
    const auto c = g.coords(k);
    xs[k] = g.center(c[0]);
    if (dims == 2) ys[k] = g.center(c[1]);
  }

  CompensatedSum total;
  for (std::size_t n = 0; n + 1 < s.size(); ++n) {
    const double a = s[n].t, b = s[n + 1].t, span = b - a;
    if (!(span > 0.0)) throw ArgumentError("snapshot times must increase");
    for (std::size_t k = 0; k < cells; ++k) next[k] = f(s[n + 1], k);
    for (std::size_t k = 0; k < cells; ++k) {
      const double x = xs[k], y = ys[k];
      double mean = 0.0;  // (1/span) * integral of phi over [a, b]
      double flux = 0.0;
      for (std::size_t q = 0; q < gauss_x.size(); ++q) {
        const double lam = 0.5 * (1.0 + gauss_x[q]);
        const double t = a + lam * span;
        const double w = 0.5 * gauss_w[q];
        mean += w * phi.value(t, x, y);
        const double gx = (phi.value(t, x + h, y) - phi.value(t, x - h, y)) / (2.0 * h);
        double dot = ((1.0 - lam) * prev[k].flux[0] + lam * next[k].flux[0]) * gx;
        if (dims == 2) {
          const double gy = (phi.value(t, x, y + h) - phi.value(t, x, y - h)) / (2.0 * h);
          dot += ((1.0 - lam) * prev[k].flux[1] + lam * next[k].flux[1]) * gy;
        }
        flux += w * dot;
      }
      const double early = mean - phi.value(a, x, y);
      const double late = phi.value(b, x, y) - mean;
      total.add((prev[k].density * early + next[k].density * late +
                 span * flux) * g.cell_volume());
    }
    std::swap(prev, next);
  }
  return total.value();
}

double cell_pressure(const Trajectory& traj, const Snapshot& s, std::size_t k) {
  const double rho = s.rho[k];
  const double gm = traj.params.gamma();
  if (traj.system == System::isentropic) return std::pow(rho, gm);
  double m2 = 0.0;
  for (const auto& m : s.mom) m2 += m[k] * m[k];
  return (gm - 1.0) * (s.energy[k] - 0.5 * m2 / rho);
}

}  // namespace

double weak_residual(const Trajectory& traj, const TestFunction& phi, Balance which) {
  const int dims = traj.grid.dims();
  return space_time(traj, phi, [&](const Snapshot& s, std::size_t k) {
    const double rho = s.rho[k];
    const double ux = s.mom[0][k] / rho;
    const double uy = dims == 2 ? s.mom[1][k] / rho : 0.0;
    switch (which) {
      case Balance::mass:
        return CellTerms{rho, {rho * ux, rho * uy}};
      case Balance::momentum: {
        const double p = cell_pressure(traj, s, k);
        return CellTerms{s.mom[0][k], {s.mom[0][k] * ux + p, s.mom[0][k] * uy}};
      }
      case Balance::energy: {
        const double p = cell_pressure(traj, s, k);
        const double e = s.energy[k];
        return CellTerms{e, {(e + p) * ux, (e + p) * uy}};
      }
    }
    return CellTerms{};
  });
}

double entropy_residual(const Trajectory& traj, const TestFunction& phi) {
  const int dims = traj.grid.dims();
  const double cv = traj.params.cv();
  const bool complete = traj.system == System::complete;
  return space_time(traj, phi, [&](const Snapshot& s, std::size_t k) {
    const double rho = s.rho[k];
    const double ux = s.mom[0][k] / rho;
    const double uy = dims == 2 ? s.mom[1][k] / rho : 0.0;
    const double p = cell_pressure(traj, s, k);
    if (complete) {
      // -(eta phi_t + eta u.grad phi) with eta = rho s
      const double eta = rho * (cv * std::log(p / rho) - std::log(rho));
      return CellTerms{-eta, {-eta * ux, -eta * uy}};
    }
    const double e = s.energy[k];
    return CellTerms{e, {(e + p) * ux, (e + p) * uy}};
  });
}

// ---------------------------------------------------------------------------
// Trajectory IO

void write_trajectory(const std::string& dir, const Trajectory& traj, const std::string& comment) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  json meta;
  meta["format"] = "eulerlab-trajectory";
  meta["version"] = std::string(kVersion);
  meta["system"] = to_string(traj.system);
  meta["gamma"] = traj.params.gamma();
  meta["dims"] = traj.grid.dims();
  meta["cells"] = traj.grid.cells_per_dim();
  meta["config_hash"] = traj.config_hash;
  meta["config"] = traj.config;
  meta["wall_time"] = traj.wall_time;
  meta["steps"] = traj.steps;
  json snaps = json::array();
  std::vector<std::string> names = {"rho", "m_x"};
  if (traj.grid.dims() == 2) names.push_back("m_y");
  names.push_back("E");
  for (std::size_t n = 0; n < traj.snapshots.size(); ++n) {
    const auto& s = traj.snapshots[n];
    const std::string file = "t_" + std::to_string(n) + ".csv";
    std::vector<ScalarField> fields{s.rho};
    for (const auto& m : s.mom) fields.push_back(m);
    fields.push_back(s.energy);
    write_fields_csv((fs::path(dir) / file).string(), names, fields,
                     comment + " t=" + format_double(s.t));
    snaps.push_back({{"index", n}, {"t", s.t}, {"file", file}});
  }
  meta["snapshots"] = snaps;
  std::ofstream out(fs::path(dir) / "meta.json");
  if (!out) throw ArgumentError("cannot write " + dir + "/meta.json");
  out << meta.dump(2) << '\n';
}

Trajectory read_trajectory(const std::string& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(fs::path(dir) / "meta.json");
  if (!in) throw ArgumentError("no meta.json in trajectory directory " + dir);
  json meta;
  try {
    in >> meta;
  } catch (const json::exception& e) {
    throw ArgumentError(dir + "/meta.json: " + e.what());
  }
  Trajectory traj;
  try {
    traj.system = system_from_string(meta.at("system").get<std::string>());
    traj.params = thermo::GasParams(meta.at("gamma").get<double>());
    traj.grid = PeriodicGrid(meta.at("dims").get<int>(), meta.at("cells").get<int>());
    traj.config_hash = meta.value("config_hash", "");
    traj.config = meta.value("config", json::object());
    traj.wall_time = meta.value("wall_time", 0.0);
    traj.steps = meta.value("steps", 0L);
    for (const auto& e : meta.at("snapshots")) {
      const auto table = read_fields_csv((fs::path(dir) / e.at("file").get<std::string>()).string());
      if (table.grid != traj.grid) throw ArgumentError("snapshot grid differs from meta.json");
      const std::size_t expected = traj.grid.dims() == 2 ? 4 : 3;
      if (table.fields.size() != expected) {
        throw ArgumentError("snapshot " + e.at("file").get<std::string>() + " has " +
                            std::to_string(table.fields.size()) + " fields, expected " +
                            std::to_string(expected));
      }
      Snapshot s;
      s.t = e.at("t").get<double>();
      s.rho = table.fields[0];
      for (int d = 0; d < traj.grid.dims(); ++d) s.mom.push_back(table.fields[1 + d]);
      s.energy = table.fields.back();
      traj.snapshots.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw ArgumentError(dir + "/meta.json: " + e.what());
  }
  return traj;
}

}  // namespace eulerlab::solver
