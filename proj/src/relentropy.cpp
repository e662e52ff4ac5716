#include "eulerlab/relentropy.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <boost/random/sobol.hpp>

#include "eulerlab/errors.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab::relentropy {

using thermo::GasParams;
using thermo::PrimitiveState;

namespace {

// x - log(1 + x) >= 0, accurate near 0.
double phi(double x) {
  if (std::abs(x) < 1e-4) return x * x * (0.5 + x * (-1.0 / 3.0 + 0.25 * x));
  return x - std::log1p(x);
}

// (1 + y) log(1 + y) - y >= 0, accurate near 0.
double psi(double y) {
  if (std::abs(y) < 1e-4) return y * y * (0.5 + y * (-1.0 / 6.0 + y / 12.0));
  return (1.0 + y) * std::log1p(y) - y;
}

void require_positive(double v, const char* what) {
  if (!(v >= thermo::kVacuumFloor) || !std::isfinite(v)) {
    throw DomainError(std::string(what) + " must be positive and finite");
  }
}

}  // namespace

Density density(const PrimitiveState& s, const PrimitiveState& ref, const GasParams& params) {
  require_positive(s.rho, "density");
  require_positive(s.theta, "temperature");
  require_positive(ref.rho, "reference density");
  require_positive(ref.theta, "reference temperature");
  Density d;
  const double du0 = s.vel[0] - ref.vel[0];
  const double du1 = s.vel[1] - ref.vel[1];
  d.kinetic = 0.5 * s.rho * (du0 * du0 + du1 * du1);
  const double T = ref.theta;
  d.thermal = s.rho * params.cv() * T * phi(s.theta / T - 1.0) + T * ref.rho * psi(s.rho / ref.rho - 1.0);
  d.total = d.kinetic + d.thermal;
  return d;
}

Density density(const thermo::EntropicState& s, const PrimitiveState& ref, const GasParams& params) {
  require_positive(s.rho, "density");
  PrimitiveState p;
  p.rho = s.rho;
  p.vel = {s.mom[0] / s.rho, s.mom[1] / s.rho};
  p.theta = thermo::theta_of(s.rho, s.entropy, params);
  return density(p, ref, params);
}

Density density_isentropic(double rho, const thermo::Vec2& vel, double r,
                           const thermo::Vec2& ref_vel, const GasParams& params) {
  require_positive(rho, "density");
  require_positive(r, "reference density");
  const double g = params.gamma();
  Density d;
  const double du0 = vel[0] - ref_vel[0];
  const double du1 = vel[1] - ref_vel[1];
  d.kinetic = 0.5 * rho * (du0 * du0 + du1 * du1);
  // P(rho) - P'(r)(rho - r) - P(r) = r^gamma / (gamma - 1) * ((1+y)^gamma - 1 - gamma y)
  const double y = rho / r - 1.0;
  double bracket;
  if (std::abs(y) < 1e-4) {
    bracket = g * (g - 1.0) / 2.0 * y * y * (1.0 + (g - 2.0) / 3.0 * y);
  } else {
    bracket = std::pow(1.0 + y, g) - 1.0 - g * y;
  }
  d.thermal = std::pow(r, g) / (g - 1.0) * bracket;
  d.total = d.kinetic + d.thermal;
  return d;
}

bool StateBox::contains(double rho, double theta) const {
  return rho >= rho_lo && rho <= rho_hi && theta >= theta_lo && theta <= theta_hi;
}

double quadratic(const PrimitiveState& s, const PrimitiveState& ref) {
  const double du0 = s.vel[0] - ref.vel[0];
  const double du1 = s.vel[1] - ref.vel[1];
  const double dr = s.rho - ref.rho;
  const double dt = s.theta - ref.theta;
  return 0.5 * s.rho * (du0 * du0 + du1 * du1) + dr * dr + dt * dt;
}

void sobol_points(unsigned dim, std::size_t count, std::uint64_t skip,
                  const std::function<void(std::span<const double>)>& f) {
  boost::random::sobol gen(dim);
  if (skip > 0) gen.discard(skip * dim);
  std::vector<double> pt(dim);
  const double scale = std::ldexp(1.0, -64);
  for (std::size_t n = 0; n < count; ++n) {
    for (unsigned d = 0; d < dim; ++d) pt[d] = static_cast<double>(gen()) * scale;
    f(pt);
  }
}

unsigned coercivity_dimension(int dims) { return static_cast<unsigned>(5 + dims); }

std::pair<PrimitiveState, PrimitiveState> sample_pair(std::span<const double> q, const StateBox& box,
                                                      double velocity_range, int dims) {
  PrimitiveState a, b;
  b.rho = box.rho_lo + (box.rho_hi - box.rho_lo) * q[0];
  b.theta = box.theta_lo + (box.theta_hi - box.theta_lo) * q[1];
  const double far_rho = box.rho_lo + (box.rho_hi - box.rho_lo) * q[2];
  const double far_theta = box.theta_lo + (box.theta_hi - box.theta_lo) * q[3];
  // Log-uniform distance to the reference, so near-diagonal pairs (where the
  // ratio approaches its Hessian limit) are as well covered as distant ones.
  const double lambda = std::exp2(-kCoercivityOctaves * q[4]);
  a.rho = b.rho + lambda * (far_rho - b.rho);
  a.theta = b.theta + lambda * (far_theta - b.theta);
  for (int d = 0; d < dims; ++d) a.vel[d] = lambda * velocity_range * (2.0 * q[5 + d] - 1.0);
  return {a, b};
}

Coercivity estimate_coercivity(const StateBox& box, const GasParams& params, std::size_t samples,
                               std::uint64_t skip, double velocity_range, int dims) {
  if (!(box.rho_lo > 0.0 && box.rho_lo < box.rho_hi && box.theta_lo > 0.0 &&
        box.theta_lo < box.theta_hi)) {
    throw ArgumentError("coercivity box must satisfy 0 < lo < hi in both variables");
  }
  if (dims != 1 && dims != 2) throw ArgumentError("coercivity: dims must be 1 or 2");
  if (samples == 0) throw ArgumentError("coercivity: need at least one sample");
  double worst = std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  sobol_points(coercivity_dimension(dims), samples, skip, [&](std::span<const double> q) {
    const auto [a, b] = sample_pair(q, box, velocity_range, dims);
    const double quad = quadratic(a, b);
    if (quad < 1e-24) return;
    worst = std::min(worst, density(a, b, params).total / quad);
    ++used;
  });
  if (used == 0) throw ArgumentError("coercivity: every sample was degenerate");
  Coercivity c;
  c.sampled_min = worst;
  c.constant = 0.9 * worst;
  c.samples = used;
  c.velocity_range = velocity_range;
  return c;
}

Gap coercivity_gap(const PrimitiveState& s, const PrimitiveState& ref, const StateBox& box,
                   const Coercivity& c, const GasParams& params) {
  Gap g;
  g.relative_entropy = density(s, ref, params).total;
  g.in_box = box.contains(s.rho, s.theta) && box.contains(ref.rho, ref.theta);
  if (g.in_box) {
    g.quadratic = quadratic(s, ref);
  } else {
    const double du0 = s.vel[0] - ref.vel[0];
    const double du1 = s.vel[1] - ref.vel[1];
    g.quadratic = 0.5 * s.rho * (du0 * du0 + du1 * du1) + 1.0 +
                  std::abs(s.rho * thermo::entropy(s.rho, s.theta, params)) +
                  thermo::internal_energy(s.theta, params);
  }
  g.gap = g.relative_entropy - c.constant * g.quadratic;
  return g;
}

namespace {

void require_same_grid(const solver::Snapshot& a, const solver::Snapshot& b) {
  if (a.rho.grid() != b.rho.grid()) throw ArgumentError("relative entropy: grids differ");
}

double cell_density(const solver::Snapshot& a, const solver::Snapshot& b, std::size_t k,
                    solver::System system, const GasParams& params) {
  const int dims = a.rho.grid().dims();
  thermo::Vec2 ua{0.0, 0.0}, ub{0.0, 0.0};
  double ma2 = 0.0, mb2 = 0.0;
  for (int d = 0; d < dims; ++d) {
    ua[d] = a.mom[d][k] / a.rho[k];
    ub[d] = b.mom[d][k] / b.rho[k];
    ma2 += a.mom[d][k] * a.mom[d][k];
    mb2 += b.mom[d][k] * b.mom[d][k];
  }
  if (system == solver::System::isentropic) {
    return density_isentropic(a.rho[k], ua, b.rho[k], ub, params).total;
  }
  const double theta_a = (a.energy[k] - 0.5 * ma2 / a.rho[k]) / (a.rho[k] * params.cv());
  const double theta_b = (b.energy[k] - 0.5 * mb2 / b.rho[k]) / (b.rho[k] * params.cv());
  thermo::EntropicState sa;
  sa.rho = a.rho[k];
  sa.mom = {a.rho[k] * ua[0], a.rho[k] * ua[1]};
  sa.entropy = a.rho[k] * thermo::entropy(a.rho[k], theta_a, params);
  PrimitiveState ref;
  ref.rho = b.rho[k];
  ref.vel = ub;
  ref.theta = theta_b;
  return density(sa, ref, params).total;
}

}  // namespace

ScalarField density_field(const solver::Snapshot& a, const solver::Snapshot& b,
                          solver::System system, const GasParams& params) {
  require_same_grid(a, b);
  ScalarField out(a.rho.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = cell_density(a, b, k, system, params);
  return out;
}

double total(const solver::Snapshot& a, const solver::Snapshot& b, solver::System system,
             const GasParams& params) {
  return integral(density_field(a, b, system, params));
}

// ---------------------------------------------------------------------------
// Monitor

namespace {

/// sup over the box of the spectral norm of the Hessian of rho s(rho, Theta):
/// [[-1/rho, cV/Theta], [cV/Theta, -cV rho/Theta^2]].
double entropy_hessian_bound(const StateBox& box, const GasParams& params) {
  double m = 0.0;
  const int n = 50;
  for (int i = 0; i < n; ++i) {
    const double rho = box.rho_lo + (box.rho_hi - box.rho_lo) * i / (n - 1);
    for (int j = 0; j < n; ++j) {
      const double th = box.theta_lo + (box.theta_hi - box.theta_lo) * j / (n - 1);
      const double a = -1.0 / rho;
      const double b = params.cv() / th;
      const double c = -params.cv() * rho / (th * th);
      const double mean = 0.5 * (a + c);
      const double rad = std::hypot(0.5 * (a - c), b);
      m = std::max({m, std::abs(mean + rad), std::abs(mean - rad)});
    }
  }
  return m;
}

double sup_magnitude(const VectorField& v) { return lp_norm(v, std::numeric_limits<double>::infinity()); }

}  // namespace

Trace gronwall_monitor(const solver::Trajectory& a_in, const solver::Trajectory& b_in,
                       const MonitorOptions& options) {
  if (a_in.system != b_in.system) throw ArgumentError("monitor: trajectories solve different systems");
  if (a_in.params.gamma() != b_in.params.gamma()) throw ArgumentError("monitor: gamma differs");
  if (a_in.snapshots.size() != b_in.snapshots.size() || a_in.snapshots.size() < 2) {
    throw ArgumentError("monitor: trajectories need the same (>= 2) number of snapshots");
  }
  for (std::size_t n = 0; n < a_in.snapshots.size(); ++n) {
    const double ta = a_in.snapshots[n].t, tb = b_in.snapshots[n].t;
    if (std::abs(ta - tb) > 1e-12 * std::max(1.0, std::abs(ta))) {
      throw ArgumentError("monitor: snapshot times differ at index " + std::to_string(n));
    }
  }
  const solver::Trajectory* b = &b_in;
  solver::Trajectory restricted;
  if (b_in.grid != a_in.grid) {
    const int fa = a_in.grid.cells_per_dim(), fb = b_in.grid.cells_per_dim();
    if (b_in.grid.dims() != a_in.grid.dims() || fb % fa != 0) {
      throw ArgumentError("monitor: reference grid must refine the candidate grid");
    }
    restricted = solver::restrict_trajectory(b_in, a_in.grid);
    b = &restricted;
  }
  const auto& a = a_in;
  const auto& params = a.params;
  const auto system = a.system;
  const auto& grid = a.grid;
  const std::size_t ns = a.snapshots.size();

  Trace trace;
  const double spacing = a.snapshots[1].t - a.snapshots[0].t;
  trace.sigma = options.sigma >= 0.0 ? options.sigma : 2.0 * spacing;

  // Thermal coefficient.
  std::vector<ScalarField> temps;
  if (system == solver::System::complete) {
    StateBox box{std::numeric_limits<double>::infinity(), 0.0,
                 std::numeric_limits<double>::infinity(), 0.0};
    for (const auto* tr : {&a, b}) {
      for (const auto& s : tr->snapshots) {
        const auto th = solver::temperature(s, params);
        for (std::size_t k = 0; k < th.size(); ++k) {
          box.rho_lo = std::min(box.rho_lo, s.rho[k]);
          box.rho_hi = std::max(box.rho_hi, s.rho[k]);
          box.theta_lo = std::min(box.theta_lo, th[k]);
          box.theta_hi = std::max(box.theta_hi, th[k]);
        }
      }
    }
    // Degenerate (constant) states still need a box with interior.
    if (box.rho_hi - box.rho_lo < 1e-6) box.rho_hi = box.rho_lo * (1.0 + 1e-3);
    if (box.theta_hi - box.theta_lo < 1e-6) box.theta_hi = box.theta_lo * (1.0 + 1e-3);
    trace.box = box;
    const auto coercive = estimate_coercivity(box, params, options.coercivity_samples, 0,
                                              1.0, grid.dims());
    trace.coercivity = coercive.constant;
    trace.kappa = entropy_hessian_bound(box, params) / (2.0 * coercive.constant);
    for (const auto& s : b->snapshots) temps.push_back(solver::temperature(s, params));
  }

  const auto dirs = conditions::default_directions(grid.dims());
  trace.rows.resize(ns);
  for (std::size_t n = 0; n < ns; ++n) {
    auto& row = trace.rows[n];
    const auto& sa = a.snapshots[n];
    const auto& sb = b->snapshots[n];
    row.t = sa.t;
    row.integral_E = total(sa, sb, system, params);
    const auto v = solver::velocity(sb);
    row.oslip_C = conditions::oslip_weak_min_C(v, dirs, options.basis, conditions::Sense::expansion).min_C;
    row.compression_C =
        conditions::oslip_weak_min_C(v, dirs, options.basis, conditions::Sense::compression).min_C;
    if (!temps.empty()) {
      const std::size_t lo = n == 0 ? 0 : n - 1;
      const std::size_t hi = n + 1 == ns ? n : n + 1;
      const double dtT = lp_norm((1.0 / (b->snapshots[hi].t - b->snapshots[lo].t)) *
                                     (temps[hi] - temps[lo]),
                                 std::numeric_limits<double>::infinity());
      row.K_thermo = trace.kappa * (dtT + sup_magnitude(v) * sup_magnitude(grad(temps[n])));
    }
    // J1 = -int rho_a w . grad(v) w.
    const auto ua = solver::velocity(sa);
    std::vector<VectorField> dv;
    for (int d = 0; d < grid.dims(); ++d) dv.push_back(grad(v[d]));
    CompensatedSum j1;
    for (std::size_t k = 0; k < grid.cell_count(); ++k) {
      double q = 0.0;
      for (int i = 0; i < grid.dims(); ++i) {
        for (int j = 0; j < grid.dims(); ++j) {
          q += (ua[i][k] - v[i][k]) * dv[i][j][k] * (ua[j][k] - v[j][k]);
        }
      }
      j1.add(-sa.rho[k] * q);
    }
    row.J1 = j1.value() * grid.cell_volume();
    row.j1_pass = row.J1 <= 2.0 * std::max(row.compression_C, 0.0) * row.integral_E + 1e-14;
    row.fitted_K = std::numeric_limits<double>::quiet_NaN();
  }

  const auto k_of = [&](const TraceRow& r) { return std::max(r.oslip_C, 0.0) + r.K_thermo; };
  std::size_t start = ns;
  for (std::size_t n = 0; n < ns; ++n) {
    if (trace.rows[n].t >= trace.sigma - 1e-12) {
      start = n;
      break;
    }
  }
  if (start == ns) throw ArgumentError("monitor: sigma lies beyond the last snapshot");

  double exponent = 0.0;
  for (std::size_t n = 0; n < ns; ++n) {
    auto& row = trace.rows[n];
    if (n > 0) {
      const auto& prev = trace.rows[n - 1];
      const double dt = row.t - prev.t;
      if (prev.integral_E < options.floor && row.integral_E < options.floor) {
        row.skipped = true;
      } else {
        row.fitted_K = (row.integral_E - prev.integral_E) /
                       (0.5 * dt * (row.integral_E + prev.integral_E));
        // Intervals before sigma are reported but not gated.
        const double allowed = 0.5 * (k_of(row) + k_of(prev)) + options.margin;
        row.interval_pass = n <= start || row.fitted_K <= allowed;
      }
      if (n > start) exponent += 0.5 * dt * (k_of(row) + k_of(prev));
    }
    if (n >= start) {
      const double base = trace.rows[start].integral_E;
      row.gronwall_bound = base * std::exp(exponent);
      row.cumulative_pass =
          row.integral_E <= std::max(row.gronwall_bound * (1.0 + 1e-12), options.floor);
    }
    trace.interval_pass = trace.interval_pass && row.interval_pass;
    trace.cumulative_pass = trace.cumulative_pass && row.cumulative_pass;
    trace.j1_pass = trace.j1_pass && row.j1_pass;
  }
  return trace;
}

void write_trace_csv(const std::string& path, const Trace& trace, const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "# sigma=" << format_double(trace.sigma) << " kappa=" << format_double(trace.kappa)
      << " coercivity=" << format_double(trace.coercivity) << " K_thermo=heuristic\n";
  out << "t,integral_E,oslip_C,fitted_K,pass,K_thermo,compression_C,J1,gronwall_bound,skipped\n";
  for (const auto& r : trace.rows) {
    out << format_double(r.t) << ',' << format_double(r.integral_E) << ','
        << format_double(r.oslip_C) << ',' << (std::isnan(r.fitted_K) ? "" : format_double(r.fitted_K))
        << ',' << ((r.interval_pass && r.cumulative_pass) ? 1 : 0) << ','
        << format_double(r.K_thermo) << ',' << format_double(r.compression_C) << ','
        << format_double(r.J1) << ',' << format_double(r.gronwall_bound) << ','
        << (r.skipped ? 1 : 0) << '\n';
  }
}

}  // namespace eulerlab::relentropy
