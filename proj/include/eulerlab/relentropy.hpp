#pragma once

// Relative entropy between a candidate state (rho, m, S) and a reference
// (r, u, T):
//   E = 0.5 rho |m/rho - u|^2
//     + rho e(Theta) - T rho s(rho, Theta) - dH_T/dr(r, T) (rho - r) - H_T(r, T)
// with Theta = theta_of(rho, S). The thermal part is evaluated in the
// cancellation-free form
//   rho cV T phi(Theta/T - 1) + T (rho log(rho/r) - (rho - r)),  phi(x) = x - log(1 + x).

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eulerlab/conditions.hpp"
#include "eulerlab/solver.hpp"
#include "eulerlab/thermo.hpp"

namespace eulerlab::relentropy {

struct Density {
  double kinetic = 0.0;
  double thermal = 0.0;
  double total = 0.0;
};

Density density(const thermo::EntropicState& state, const thermo::PrimitiveState& ref,
                const thermo::GasParams& params);
/// Same functional with the candidate given by its temperature directly (exact 0 at equality).
Density density(const thermo::PrimitiveState& state, const thermo::PrimitiveState& ref,
                const thermo::GasParams& params);

/// Isentropic analogue: 0.5 rho |du|^2 + P(rho) - P'(r)(rho - r) - P(r), P = rho^gamma/(gamma-1).
Density density_isentropic(double rho, const thermo::Vec2& vel, double r,
                           const thermo::Vec2& ref_vel, const thermo::GasParams& params);

/// Box [r, R] x [theta_lo, theta_hi] holding densities and temperatures of both states.
struct StateBox {
  double rho_lo = 0.5;
  double rho_hi = 2.0;
  double theta_lo = 0.5;
  double theta_hi = 2.0;

  bool contains(double rho, double theta) const;
};

/// 0.5 rho |du|^2 + |rho - r|^2 + |Theta - T|^2.
double quadratic(const thermo::PrimitiveState& state, const thermo::PrimitiveState& ref);

struct Coercivity {
  double constant = 0.0;       // 0.9 x sampled minimum ratio
  double sampled_min = 0.0;
  std::size_t samples = 0;
  double velocity_range = 1.0; // |du| components sampled in [-range, range]
};

/// Candidate-reference distances are drawn log-uniformly over this many octaves.
inline constexpr double kCoercivityOctaves = 20.0;

/// Sobol dimension of one sample: reference (2), far point (2), distance (1), velocity (N).
unsigned coercivity_dimension(int dims);

/// Maps a unit-cube point to (candidate, reference): the reference is uniform in
/// the box, the candidate lies on the segment towards a second uniform point at a
/// log-uniform fraction of its length, with velocity offset scaled alike.
std::pair<thermo::PrimitiveState, thermo::PrimitiveState> sample_pair(std::span<const double> q,
                                                                      const StateBox& box,
                                                                      double velocity_range,
                                                                      int dims);

/// Minimises E / quadratic over `samples` Sobol pairs from sample_pair; `skip`
/// discards that many leading points so a second call sees fresh samples.
Coercivity estimate_coercivity(const StateBox& box, const thermo::GasParams& params,
                               std::size_t samples = 100000, std::uint64_t skip = 0,
                               double velocity_range = 1.0, int dims = 1);

struct Gap {
  double gap = 0.0;
  double relative_entropy = 0.0;
  double quadratic = 0.0;
  /// Out-of-box pairs use 0.5 rho |du|^2 + 1 + |rho s| + e as the quadratic.
  bool in_box = true;
};

Gap coercivity_gap(const thermo::PrimitiveState& state, const thermo::PrimitiveState& ref,
                   const StateBox& box, const Coercivity& c, const thermo::GasParams& params);

/// Applies f(point) to `count` Sobol points in [0,1)^dim after skipping `skip`.
void sobol_points(unsigned dim, std::size_t count, std::uint64_t skip,
                  const std::function<void(std::span<const double>)>& f);

/// Cell-volume weighted integral of the density between two snapshots on the
/// same grid; `b` is the reference.
double total(const solver::Snapshot& a, const solver::Snapshot& b, solver::System system,
             const thermo::GasParams& params);
/// Per-cell densities (total).
ScalarField density_field(const solver::Snapshot& a, const solver::Snapshot& b,
                          solver::System system, const thermo::GasParams& params);

// ---------------------------------------------------------------------------
// Stability monitor

struct MonitorOptions {
  double sigma = -1.0;           // start of the cumulative check; < 0: 2 x snapshot spacing
  double margin = 0.0;           // slack added to K in the per-interval test
  double floor = 1e-14;          // intervals with integral below this are skipped
  conditions::TestBasis basis = conditions::default_basis();
  std::size_t coercivity_samples = 100000;
};

struct TraceRow {
  double t = 0.0;
  double integral_E = 0.0;
  double oslip_C = 0.0;          // expansion-sense constant of the reference velocity
  double compression_C = 0.0;    // compression-sense constant (J1 bound)
  double K_thermo = 0.0;
  double fitted_K = 0.0;         // on [t_prev, t]; NaN for the first row and skipped rows
  double J1 = 0.0;               // -int rho w . grad(v) w,  w = u - v
  double gronwall_bound = 0.0;   // integral_E(sigma) exp(int_sigma^t K)
  bool skipped = false;
  bool interval_pass = true;
  bool cumulative_pass = true;
  bool j1_pass = true;
};

struct Trace {
  std::vector<TraceRow> rows;
  double sigma = 0.0;
  double kappa = 0.0;            // K_thermo structural factor M / (2 C^)
  double coercivity = 0.0;
  StateBox box;
  bool heuristic_thermo = true;  // K_thermo is a measured, not a proven, bound
  bool interval_pass = true;
  bool cumulative_pass = true;
  bool j1_pass = true;
  double terminal_integral() const { return rows.empty() ? 0.0 : rows.back().integral_E; }
};

/// `a` is the candidate, `b` the regular reference; a finer `b` is restricted
/// to a's grid. Both must carry the same snapshot times.
Trace gronwall_monitor(const solver::Trajectory& a, const solver::Trajectory& b,
                       const MonitorOptions& options = {});

void write_trace_csv(const std::string& path, const Trace& trace, const std::string& comment);

}  // namespace eulerlab::relentropy
