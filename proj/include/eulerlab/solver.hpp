#pragma once

// First-order finite-volume solver (local Lax-Friedrichs flux, two-stage SSP
// Runge-Kutta) for the complete and isentropic Euler systems on periodic grids,
// plus the exact Riemann solver used as its oracle and the weak-form residuals.

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "eulerlab/grid.hpp"
#include "eulerlab/thermo.hpp"

namespace eulerlab::solver {

enum class System { complete, isentropic };

std::string to_string(System s);
System system_from_string(const std::string& s);

/// Scenario id plus named parameters; see scenario_names() for the registry.
struct Scenario {
  std::string id = "sod";
  std::map<std::string, double> params;
  double param(const std::string& key, double fallback) const;
};

/// Registered scenarios: constant, riemann, sod, rarefaction, smooth_wave.
std::vector<std::string> scenario_names();

struct SolverConfig {
  System system = System::complete;
  thermo::GasParams params{1.4};
  int dims = 1;
  int cells = 256;
  double cfl = 0.4;
  double t_end = 0.2;
  std::string flux = "llf";
  Scenario init;
  /// Snapshot times in (0, t_end]; t = 0 is always stored. When empty,
  /// snapshot_count uniformly spaced times are used.
  std::vector<double> snapshot_times;
  int snapshot_count = 10;
  /// Amplitude of a transverse sin(pi y) density perturbation (2D only).
  double transverse_amplitude = 0.0;
  long max_steps = 10'000'000;
};

/// Validates invariants (cfl in (0, 0.5], t_end > 0, ...); throws ArgumentError.
void validate(const SolverConfig& config);

nlohmann::json to_json(const SolverConfig& config);
/// Missing keys keep their defaults; malformed values throw ArgumentError
/// naming the field.
SolverConfig config_from_json(const nlohmann::json& j);

/// Conserved fields at one time. For the isentropic system `energy` holds the
/// mechanical energy 0.5 rho |u|^2 + rho^gamma / (gamma - 1).
struct Snapshot {
  double t = 0.0;
  ScalarField rho{PeriodicGrid(1, 4)};
  std::vector<ScalarField> mom;
  ScalarField energy{PeriodicGrid(1, 4)};
};

struct Trajectory {
  System system = System::complete;
  thermo::GasParams params{1.4};
  PeriodicGrid grid{1, 4};
  std::vector<Snapshot> snapshots;
  std::string config_hash;
  nlohmann::json config;
  double wall_time = 0.0;
  long steps = 0;

  std::vector<double> times() const;
};

/// Initial conserved state at t = 0.
Snapshot initial_state(const SolverConfig& config);

Trajectory run(const SolverConfig& config);

/// Velocity components m / rho.
VectorField velocity(const Snapshot& s);
/// Temperature from (rho, m, E) of the complete system.
ScalarField temperature(const Snapshot& s, const thermo::GasParams& params);
ScalarField pressure(const Snapshot& s, System system, const thermo::GasParams& params);

/// Restricts every snapshot to a coarser grid by conservative averaging.
Trajectory restrict_trajectory(const Trajectory& fine, const PeriodicGrid& coarse);

// ---------------------------------------------------------------------------
// Exact Riemann solver for p = rho theta, gamma-law gas.

struct RiemannState {
  double rho = 1.0;
  double u = 0.0;
  double p = 1.0;
};

class ExactRiemann {
 public:
  /// Throws DomainError for non-positive states or vacuum-generating data.
  ExactRiemann(const RiemannState& left, const RiemannState& right, double gamma,
               double tolerance = 1e-12);

  double p_star() const { return p_star_; }
  double u_star() const { return u_star_; }
  int iterations() const { return iterations_; }
  /// Self-similar solution at xi = x / t.
  RiemannState sample(double xi) const;

 private:
  double wave_function(double p, const RiemannState& s, double c, double& deriv) const;

  RiemannState left_, right_;
  double gamma_;
  double cl_, cr_;
  double p_star_ = 0.0;
  double u_star_ = 0.0;
  int iterations_ = 0;
};

/// Exact solution of a riemann/sod scenario on the periodic domain at time t,
/// valid while the waves from x = 0 and from the +-1 seam have not met.
RiemannState periodic_riemann_exact(const ExactRiemann& main, const ExactRiemann& seam, double x,
                                    double t);

// ---------------------------------------------------------------------------
// Weak residuals

/// Smooth space-time test function with its partial derivatives.
struct TestFunction {
  std::string name;
  std::function<double(double t, double x, double y)> value;
  std::function<double(double t, double x, double y)> dt;
  std::function<double(double t, double x, double y)> dx;
  std::function<double(double t, double x, double y)> dy;
};

/// Tensor bump, supported in |t - t0| < rt and periodic |x - x0| < rx (and y).
TestFunction bump_test(double t0, double rt, double x0, double rx, double y0 = 0.0,
                       double ry = 1.0);
/// Time bump times 0.5 (1 + cos(k pi x + phase)) (nonnegative, periodic in x).
TestFunction trig_test(double t0, double rt, int k, double phase = 0.0);
/// Registry: "bump" (t0, rt, x0, rx, y0, ry) and "trig" (t0, rt, k, phase).
TestFunction test_function(const std::string& name, const std::map<std::string, double>& p);

enum class Balance { mass, momentum, energy };

/// int int U phi_t + F(U) . grad phi dx dt with U linear in time between
/// snapshots; the phi_t part is integrated by parts exactly and grad phi is a
/// periodic central difference, so constant states give zero up to rounding.
/// Momentum uses the x component.
double weak_residual(const Trajectory& traj, const TestFunction& phi, Balance which);

/// Entropy production -int int (eta phi_t + q . grad phi) for phi >= 0, with
/// (eta, q) = (rho s, rho s u) for the complete system and (-E, -(E + p) u)
/// for the isentropic one. Admissible solutions give a value >= 0.
double entropy_residual(const Trajectory& traj, const TestFunction& phi);

// ---------------------------------------------------------------------------
// Trajectory directories: meta.json plus t_<index>.csv per snapshot.

void write_trajectory(const std::string& dir, const Trajectory& traj, const std::string& comment);
Trajectory read_trajectory(const std::string& dir);

}  // namespace eulerlab::solver
