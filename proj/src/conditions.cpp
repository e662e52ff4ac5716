#include "eulerlab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "eulerlab/besov.hpp"
#include "eulerlab/errors.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab::conditions {

namespace {

double bump(double z) {
  if (std::abs(z) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - z * z));
}

/// Central difference of the sampled bump, h = dx / r. Summation by parts turns
/// sum u dphi into -sum phi (central difference of u), so every ratio below is a
/// phi-weighted mean of discrete slopes.
double dbump(double z, double h) { return (bump(z + h) - bump(z - h)) / (2.0 * h); }

/// Signed periodic offset x - c folded into [-1, 1).
double fold(double d) {
  d = std::fmod(d + 1.0, 2.0);
  if (d < 0.0) d += 2.0;
  return d - 1.0;
}

struct SupportCell {
  int i = 0;
  double z = 0.0;  // (x - c) / r
};

std::vector<SupportCell> support(const PeriodicGrid& g, double centre, double radius) {
  std::vector<SupportCell> out;
  const double dx = g.cell_width();
  const int n = g.cells_per_dim();
  const int lo = static_cast<int>(std::floor((centre - radius + 1.0) / dx - 0.5)) - 2;
  const int hi = static_cast<int>(std::ceil((centre + radius + 1.0) / dx - 0.5)) + 2;
  for (int i = lo; i <= hi && i - lo < n; ++i) {
    const int w = ((i % n) + n) % n;
    const double z = fold(g.center(w) - centre) / radius;
    if (std::abs(z) < 1.0 + dx / radius) out.push_back({w, z});
  }
  return out;
}

}  // namespace

std::vector<Direction> default_directions(int dims, int count) {
  if (dims == 1) return {{1.0, 0.0}, {-1.0, 0.0}};
  if (dims != 2) throw ArgumentError("directions exist for 1D and 2D only");
  if (count < 1) throw ArgumentError("direction count must be positive");
  std::vector<Direction> out;
  for (int k = 0; k < count; ++k) {
    const double a = 2.0 * std::numbers::pi * k / count;
    out.push_back({std::cos(a), std::sin(a)});
  }
  return out;
}

TestBasis default_basis(double base_radius, int level) {
  if (!(base_radius > 0.0 && base_radius <= 0.5)) throw ArgumentError("base radius must lie in (0, 0.5]");
  if (level < 0) throw ArgumentError("basis level must be >= 0");
  return TestBasis{{base_radius, base_radius / 2.0, base_radius / 4.0}, level};
}

std::vector<double> basis_centres(double radius, int level) {
  const double spacing = std::ldexp(radius, -(level + 1));
  const auto count = static_cast<long>(std::floor(2.0 / spacing + 1e-9));
  std::vector<double> out;
  const long half = count / 2;
  for (long k = -half; k < count - half; ++k) out.push_back(k * spacing);
  return out;
}

WeakResult oslip_weak_min_C(const VectorField& u, std::span<const Direction> directions,
                            const TestBasis& basis, Sense sense) {
  if (directions.empty()) throw ArgumentError("oslip: empty direction set");
  if (basis.radii.empty()) throw ArgumentError("oslip: empty test basis");
  const auto& g = u.grid();
  const int dims = g.dims();
  if (u.components() != dims) throw ArgumentError("oslip: velocity needs one component per axis");
  const double sign = sense == Sense::expansion ? -1.0 : 1.0;
  const double vol = g.cell_volume();

  WeakResult best;
  bool first = true;
  for (double r : basis.radii) {
    if (r < g.cell_width()) {
      throw ResolutionError("test bump radius " + format_double(r) + " is below one cell");
    }
    const auto centres = basis_centres(r, basis.level);
    std::vector<std::vector<SupportCell>> cols;
    for (double c : centres) cols.push_back(support(g, c, r));
    const std::size_t ny = dims == 2 ? centres.size() : 1;
    const double h = g.cell_width() / r;
    for (std::size_t cy = 0; cy < ny; ++cy) {
      for (std::size_t cx = 0; cx < centres.size(); ++cx) {
        // I[a][b] = int u_a d_b phi, den = int phi.
        double I[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        double den = 0.0;
        if (dims == 1) {
          for (const auto& s : cols[cx]) {
            den += bump(s.z) * vol;
            I[0][0] += u[0][static_cast<std::size_t>(s.i)] * dbump(s.z, h) / r * vol;
          }
        } else {
          for (const auto& sy : cols[cy]) {
            const double by = bump(sy.z), dby = dbump(sy.z, h) / r;
            for (const auto& sx : cols[cx]) {
              const double bx = bump(sx.z), dbx = dbump(sx.z, h) / r;
              const std::size_t k = g.index(sx.i, sy.i);
              const double grad[2] = {dbx * by, bx * dby};
              den += bx * by * vol;
              for (int a = 0; a < 2; ++a) {
                for (int b = 0; b < 2; ++b) I[a][b] += u[a][k] * grad[b] * vol;
              }
            }
          }
        }
        if (den <= 0.0) continue;
        for (std::size_t d = 0; d < directions.size(); ++d) {
          const auto& xi = directions[d];
          const double n2 = xi[0] * xi[0] + xi[1] * xi[1];
          double q = 0.0;
          for (int a = 0; a < dims; ++a) {
            for (int b = 0; b < dims; ++b) q += xi[a] * xi[b] * I[a][b];
          }
          const double ratio = sign * q / (n2 * den);
          if (first || ratio > best.min_C) {
            first = false;
            best.min_C = ratio;
            best.direction = d;
            best.radius = r;
            best.centre = {centres[cx], dims == 2 ? centres[cy] : 0.0};
          }
        }
      }
    }
  }
  return best;
}

std::vector<LatticeShift> default_steps(int dims) {
  if (dims == 1) return {{1, 0}, {-1, 0}};
  return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
}

DiscreteResult oslip_discrete(const VectorField& u, std::span<const LatticeShift> steps,
                              bool mask_wrap, Sense sense) {
  if (steps.empty()) throw ArgumentError("oslip: empty step set");
  const auto& g = u.grid();
  const int dims = g.dims();
  if (u.components() != dims) throw ArgumentError("oslip: velocity needs one component per axis");
  const int n = g.cells_per_dim();
  const double sign = sense == Sense::expansion ? 1.0 : -1.0;
  DiscreteResult best;
  bool first = true;
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    const auto c = g.coords(k);
    for (const auto& h : steps) {
      if (h.di == 0 && h.dj == 0) throw ArgumentError("oslip: zero lattice step");
      const int ti = c[0] + h.di;
      const int tj = c[1] + (dims == 2 ? h.dj : 0);
      const bool wraps = ti < 0 || ti >= n || (dims == 2 && (tj < 0 || tj >= n));
      if (wraps && mask_wrap) continue;
      const std::size_t t = g.index(ti, tj);
      const double len = h.length(g);
      const double xi[2] = {h.di * g.cell_width() / len, h.dj * g.cell_width() / len};
      double q = 0.0;
      for (int a = 0; a < dims; ++a) q += xi[a] * (u[a][t] - u[a][k]);
      const double v = sign * q / len;
      if (first || v > best.discrete_C) {
        first = false;
        best.discrete_C = v;
        best.cell = k;
        best.step = h;
        best.wrap_dominated = wraps;
      }
    }
  }
  return best;
}

VectorField fan_field(const PeriodicGrid& grid, double tau) {
  if (!(tau > 0.0)) throw ArgumentError("fan time must be positive");
  VectorField u(grid, grid.dims());
  for (std::size_t k = 0; k < grid.cell_count(); ++k) {
    const double x = grid.center(grid.coords(k)[0]);
    u[0][k] = std::clamp(x / tau, -1.0, 1.0);
  }
  return u;
}

L1Report l1_report(std::span<const double> times, std::span<const double> values, double delta,
                   double t_end, double tolerance) {
  if (times.size() != values.size()) throw ArgumentError("l1_report: size mismatch");
  if (!(delta > 0.0)) throw ArgumentError("l1_report: delta must be positive");
  if (!(t_end > delta)) throw ArgumentError("l1_report: need t_end > delta");
  if (times.size() < 2) throw ArgumentError("l1_report: need at least two samples");
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw ArgumentError("l1_report: times must increase");
  }
  L1Report rep;
  rep.l1_partial.assign(times.size(), 0.0);
  const auto pos = [&](std::size_t k) { return std::max(values[k], 0.0); };
  CompensatedSum acc;
  for (std::size_t k = 0; k + 1 < times.size(); ++k) {
    const double a = std::max(times[k], delta);
    const double b = std::min(times[k + 1], t_end);
    if (b > a) {
      const double span = times[k + 1] - times[k];
      const auto lerp = [&](double t) {
        return pos(k) + (pos(k + 1) - pos(k)) * (t - times[k]) / span;
      };
      acc.add(0.5 * (b - a) * (lerp(a) + lerp(b)));
    }
    if (times[k + 1] >= delta) rep.l1_partial[k + 1] = acc.value();
  }
  rep.l1_norm = acc.value();

  std::vector<double> ft, fv;
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] >= delta && times[k] <= 4.0 * delta && values[k] > 0.0) {
      ft.push_back(times[k]);
      fv.push_back(values[k]);
    }
  }
  if (ft.size() < 3) {
    ft.clear();
    fv.clear();
    for (std::size_t k = 0; k < times.size() && ft.size() < 3; ++k) {
      if (times[k] >= delta && times[k] <= t_end && values[k] > 0.0) {
        ft.push_back(times[k]);
        fv.push_back(values[k]);
      }
    }
  }
  if (ft.size() >= 3) {
    const auto fit = besov::fit_log_log(ft, fv, 0);
    if (!fit.degenerate) {
      rep.fit_ok = true;
      rep.fit_b = -fit.slope;
      rep.fit_a = std::exp(fit.intercept);
      rep.integrability_doubtful = rep.fit_b >= 1.0 - tolerance;
    }
  }
  return rep;
}

void write_oslip_csv(const std::string& path, std::span<const OslipRow> rows,
                     const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "tau,min_C,discrete_C,l1_partial,flags\n";
  for (const auto& r : rows) {
    out << format_double(r.tau) << ',' << format_double(r.min_C) << ','
        << format_double(r.discrete_C) << ',' << format_double(r.l1_partial) << ',' << r.flags
        << '\n';
  }
}

}  // namespace eulerlab::conditions
