#include "eulerlab/grid.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "eulerlab/errors.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab {

// ---------------------------------------------------------------------------
// PeriodicGrid

PeriodicGrid::PeriodicGrid(int dims, int cells_per_dim) : dims_(dims), n_(cells_per_dim) {
  if (dims != 1 && dims != 2) {
    throw ArgumentError("grid dimension must be 1 or 2, got " + std::to_string(dims));
  }
  if (cells_per_dim < 4) {
    throw ArgumentError("cells_per_dim must be >= 4, got " + std::to_string(cells_per_dim));
  }
}

double PeriodicGrid::cell_volume() const {
  return dims_ == 1 ? cell_width() : cell_width() * cell_width();
}

std::size_t PeriodicGrid::cell_count() const {
  return dims_ == 1 ? static_cast<std::size_t>(n_)
                    : static_cast<std::size_t>(n_) * static_cast<std::size_t>(n_);
}

std::size_t PeriodicGrid::index(int i, int j) const {
  const int ii = ((i % n_) + n_) % n_;
  if (dims_ == 1) return static_cast<std::size_t>(ii);
  const int jj = ((j % n_) + n_) % n_;
  return static_cast<std::size_t>(jj) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(ii);
}

std::array<int, 2> PeriodicGrid::coords(std::size_t idx) const {
  if (dims_ == 1) return {static_cast<int>(idx), 0};
  return {static_cast<int>(idx % n_), static_cast<int>(idx / n_)};
}

// ---------------------------------------------------------------------------
// Fields

ScalarField::ScalarField(const PeriodicGrid& grid, double fill)
    : grid_(grid), values_(grid.cell_count(), fill) {}

ScalarField::ScalarField(const PeriodicGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count()) {
    throw ArgumentError("field value count " + std::to_string(values_.size()) +
                        " does not match cell count " + std::to_string(grid_.cell_count()));
  }
}

ScalarField ScalarField::from_function(const PeriodicGrid& grid,
                                       const std::function<double(double, double)>& fn) {
  ScalarField f(grid);
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto c = grid.coords(k);
    const double x = grid.center(c[0]);
    const double y = grid.dims() == 2 ? grid.center(c[1]) : 0.0;
    f[k] = fn(x, y);
  }
  return f;
}

void ScalarField::require_finite(const std::string& what) const {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      throw DomainError(what + ": non-finite value at cell " + std::to_string(k));
    }
  }
}

VectorField::VectorField(const PeriodicGrid& grid, int components) : grid_(grid) {
  comps_.assign(static_cast<std::size_t>(components), ScalarField(grid));
}

VectorField::VectorField(std::vector<ScalarField> components)
    : grid_(components.empty() ? PeriodicGrid(1, 4) : components.front().grid()),
      comps_(std::move(components)) {
  if (comps_.empty()) throw ArgumentError("vector field needs at least one component");
  for (const auto& c : comps_) {
    if (c.grid() != grid_) throw ArgumentError("vector field components live on different grids");
  }
}

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid()) throw ArgumentError("fields live on different grids");
}

template <typename Op>
ScalarField zip(const ScalarField& a, const ScalarField& b, Op op) {
  require_same_grid(a, b);
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = op(a[k], b[k]);
  return out;
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, [](double x, double y) { return x + y; });
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, [](double x, double y) { return x - y; });
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, [](double x, double y) { return x * y; });
}
ScalarField operator*(double c, const ScalarField& a) {
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = c * a[k];
  return out;
}
ScalarField map(const ScalarField& a, const std::function<double(double)>& fn) {
  ScalarField out(a.grid());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = fn(a[k]);
  return out;
}

// ---------------------------------------------------------------------------
// Shifts

double LatticeShift::length(const PeriodicGrid& g) const {
  return g.cell_width() * std::hypot(static_cast<double>(di), static_cast<double>(dj));
}

ScalarField shift(const ScalarField& f, LatticeShift h) {
  const auto& g = f.grid();
  ScalarField out(g);
  if (g.dims() == 1) {
    const int n = g.cells_per_dim();
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = f[g.index(i + h.di)];
    return out;
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto c = g.coords(k);
    out[k] = f[g.index(c[0] + h.di, c[1] + h.dj)];
  }
  return out;
}

SnappedShift shift_by(const ScalarField& f, std::array<double, 2> h) {
  const double dx = f.grid().cell_width();
  const double ri = h[0] / dx;
  const double rj = f.grid().dims() == 2 ? h[1] / dx : 0.0;
  LatticeShift lat{static_cast<int>(std::lround(ri)), static_cast<int>(std::lround(rj))};
  const bool snapped = std::abs(ri - lat.di) > 1e-9 || std::abs(rj - lat.dj) > 1e-9;
  return {shift(f, lat), lat, snapped};
}

// ---------------------------------------------------------------------------
// Mollifier

Mollifier::Mollifier(const PeriodicGrid& grid, double epsilon) : grid_(grid), eps_(epsilon) {
  const double dx = grid.cell_width();
  if (!(epsilon >= 2.0 * dx * (1.0 - 1e-12))) {
    throw ResolutionError("mollifier radius " + std::to_string(epsilon) +
                          " is below two cell widths (" + std::to_string(2.0 * dx) + ")");
  }
  if (epsilon > 0.5) {
    throw ResolutionError("mollifier radius must not exceed a quarter of the period");
  }
  const int reach = static_cast<int>(std::ceil(epsilon / dx));
  const int jreach = grid.dims() == 2 ? reach : 0;

  auto kernel = [&](int di, int dj, double& k, std::array<double, 2>& dk) {
    const double y0 = di * dx;
    const double y1 = dj * dx;
    const double z2 = (y0 * y0 + y1 * y1) / (epsilon * epsilon);
    if (z2 >= 1.0) {
      k = 0.0;
      dk = {0.0, 0.0};
      return;
    }
    const double q = 1.0 - z2;
    k = std::exp(-1.0 / q);
    const double c = -2.0 * k / (q * q * epsilon * epsilon);
    dk = {c * y0, c * y1};
  };

  // Centre tap first, then (+y, -y) pairs: antisymmetric gradient weights then
  // cancel exactly in any in-order sum over taps.
  std::vector<Tap> raw;
  {
    Tap t;
    kernel(0, 0, t.weight, t.dweight);
    raw.push_back(t);
  }
  for (int dj = 0; dj <= jreach; ++dj) {
    for (int di = -reach; di <= reach; ++di) {
      if (dj == 0 && di <= 0) continue;
      Tap a;
      a.di = di;
      a.dj = dj;
      kernel(di, dj, a.weight, a.dweight);
      if (a.weight <= 0.0) continue;
      Tap b = a;
      b.di = -di;
      b.dj = -dj;
      b.dweight = {-a.dweight[0], -a.dweight[1]};
      raw.push_back(a);
      raw.push_back(b);
    }
  }
  CompensatedSum total;
  for (const auto& t : raw) total.add(t.weight);
  const double z = total.value();
  for (auto& t : raw) {
    t.weight /= z;
    t.dweight = {t.dweight[0] / z, t.dweight[1] / z};
  }
  taps_ = std::move(raw);
}

double Mollifier::gradient_mass() const {
  double s = 0.0;
  for (const auto& t : taps_) s += std::hypot(t.dweight[0], t.dweight[1]);
  return s;
}

ScalarField mollify(const ScalarField& f, const Mollifier& m) {
  if (f.grid() != m.grid()) throw ArgumentError("mollifier built for a different grid");
  const auto& g = f.grid();
  ScalarField out(g);
  const auto taps = m.taps();
  parallel_for(out.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto c = g.coords(k);
      double acc = 0.0;
      for (const auto& t : taps) acc += t.weight * f[g.index(c[0] - t.di, c[1] - t.dj)];
      out[k] = acc;
    }
  });
  return out;
}

VectorField mollify(const VectorField& f, const Mollifier& m) {
  std::vector<ScalarField> comps;
  for (int d = 0; d < f.components(); ++d) comps.push_back(mollify(f[d], m));
  return VectorField(std::move(comps));
}

VectorField mollified_gradient(const ScalarField& f, const Mollifier& m) {
  if (f.grid() != m.grid()) throw ArgumentError("mollifier built for a different grid");
  const auto& g = f.grid();
  const int dims = g.dims();
  VectorField out(g, dims);
  const auto taps = m.taps();
  parallel_for(f.size(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      const auto c = g.coords(k);
      double acc0 = 0.0;
      double acc1 = 0.0;
      for (const auto& t : taps) {
        const double v = f[g.index(c[0] - t.di, c[1] - t.dj)];
        acc0 += t.dweight[0] * v;
        acc1 += t.dweight[1] * v;
      }
      out[0][k] = acc0;
      if (dims == 2) out[1][k] = acc1;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Norms and differential operators

namespace {

bool included(const CellMask& mask, std::size_t k) { return mask.empty() || mask[k] != 0; }

double lp_from_magnitudes(const std::function<double(std::size_t)>& mag, std::size_t n,
                          double vol, double p, const CellMask& mask) {
  if (!(p >= 1.0)) throw DomainError("L^p norm requires p >= 1, got " + std::to_string(p));
  if (!mask.empty() && mask.size() != n) throw ArgumentError("mask size does not match field");
  if (std::isinf(p)) {
    double mx = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (included(mask, k)) mx = std::max(mx, mag(k));
    return mx;
  }
  CompensatedSum s;
  if (p == 1.0) {
    for (std::size_t k = 0; k < n; ++k)
      if (included(mask, k)) s.add(mag(k));
    return s.value() * vol;
  }
  if (p == 2.0) {
    for (std::size_t k = 0; k < n; ++k)
      if (included(mask, k)) {
        const double a = mag(k);
        s.add(a * a);
      }
    return std::sqrt(s.value() * vol);
  }
  for (std::size_t k = 0; k < n; ++k)
    if (included(mask, k)) s.add(std::pow(mag(k), p));
  return std::pow(s.value() * vol, 1.0 / p);
}

}  // namespace

double lp_norm(const ScalarField& f, double p, const CellMask& mask) {
  return lp_from_magnitudes([&](std::size_t k) { return std::abs(f[k]); }, f.size(),
                            f.grid().cell_volume(), p, mask);
}

double lp_norm(std::span<const ScalarField> comps, double p, const CellMask& mask) {
  if (comps.empty()) throw ArgumentError("lp_norm of an empty component list");
  for (const auto& c : comps)
    if (c.grid() != comps[0].grid()) throw ArgumentError("components live on different grids");
  if (comps.size() == 1) return lp_norm(comps[0], p, mask);
  return lp_from_magnitudes(
      [&](std::size_t k) {
        double s = 0.0;
        for (const auto& c : comps) s += c[k] * c[k];
        return std::sqrt(s);
      },
      comps[0].size(), comps[0].grid().cell_volume(), p, mask);
}

double lp_norm(const VectorField& f, double p, const CellMask& mask) {
  std::vector<ScalarField> comps;
  for (int d = 0; d < f.components(); ++d) comps.push_back(f[d]);
  return lp_norm(std::span<const ScalarField>(comps), p, mask);
}

double integral(const ScalarField& f) {
  CompensatedSum s;
  for (double v : f.values()) s.add(v);
  return s.value() * f.grid().cell_volume();
}

VectorField grad(const ScalarField& f) {
  const auto& g = f.grid();
  const double inv = 1.0 / (2.0 * g.cell_width());
  VectorField out(g, g.dims());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const auto c = g.coords(k);
    out[0][k] = (f[g.index(c[0] + 1, c[1])] - f[g.index(c[0] - 1, c[1])]) * inv;
    if (g.dims() == 2) out[1][k] = (f[g.index(c[0], c[1] + 1)] - f[g.index(c[0], c[1] - 1)]) * inv;
  }
  return out;
}

ScalarField div(const VectorField& v) {
  const auto& g = v.grid();
  if (v.components() != g.dims()) throw ArgumentError("div needs one component per dimension");
  const double inv = 1.0 / (2.0 * g.cell_width());
  ScalarField out(g);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto c = g.coords(k);
    double acc = (v[0][g.index(c[0] + 1, c[1])] - v[0][g.index(c[0] - 1, c[1])]) * inv;
    if (g.dims() == 2) acc += (v[1][g.index(c[0], c[1] + 1)] - v[1][g.index(c[0], c[1] - 1)]) * inv;
    out[k] = acc;
  }
  return out;
}

ScalarField weierstrass_field(double alpha, int levels, const PeriodicGrid& grid, double offset) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ArgumentError("weierstrass exponent must lie in (0, 1]");
  }
  if (levels < 0 || levels > 40) throw ArgumentError("weierstrass levels out of range");
  const int n = grid.cells_per_dim();
  std::vector<double> w1(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    const double x = grid.center(i) + offset;
    double acc = 0.0;
    for (int k = 0; k <= levels; ++k) {
      const double freq = std::ldexp(1.0, k);
      acc += std::pow(2.0, -alpha * k) * std::cos(freq * std::numbers::pi * x);
    }
    w1[static_cast<std::size_t>(i)] = acc;
  }
  if (grid.dims() == 1) return ScalarField(grid, std::move(w1));
  ScalarField out(grid);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto c = grid.coords(k);
    out[k] = w1[static_cast<std::size_t>(c[0])] * w1[static_cast<std::size_t>(c[1])];
  }
  return out;
}

ScalarField restrict_average(const ScalarField& f, const PeriodicGrid& coarse) {
  const auto& fine = f.grid();
  if (fine.dims() != coarse.dims() || fine.cells_per_dim() % coarse.cells_per_dim() != 0) {
    throw ArgumentError("coarse grid resolution must divide the fine resolution");
  }
  const int r = fine.cells_per_dim() / coarse.cells_per_dim();
  ScalarField out(coarse);
  const double scale = fine.dims() == 1 ? 1.0 / r : 1.0 / (static_cast<double>(r) * r);
  for (std::size_t k = 0; k < out.size(); ++k) {
    const auto c = coarse.coords(k);
    double acc = 0.0;
    if (fine.dims() == 1) {
      for (int a = 0; a < r; ++a) acc += f[fine.index(c[0] * r + a)];
    } else {
      for (int b = 0; b < r; ++b)
        for (int a = 0; a < r; ++a) acc += f[fine.index(c[0] * r + a, c[1] * r + b)];
    }
    out[k] = acc * scale;
  }
  return out;
}

CellMask window_mask(const PeriodicGrid& grid, double lo, double hi, double margin) {
  CellMask mask(grid.cell_count(), 0);
  const auto inside = [&](double x) { return x >= lo + margin && x <= hi - margin; };
  for (std::size_t k = 0; k < mask.size(); ++k) {
    const auto c = grid.coords(k);
    bool in = inside(grid.center(c[0]));
    if (grid.dims() == 2) in = in && inside(grid.center(c[1]));
    mask[k] = in ? 1 : 0;
  }
  return mask;
}

// ---------------------------------------------------------------------------
// CSV snapshots

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_fields_csv(const std::string& path, const std::vector<std::string>& names,
                      std::span<const ScalarField> fields, const std::string& comment) {
  if (fields.empty() || names.size() != fields.size()) {
    throw ArgumentError("write_fields_csv: need one name per field");
  }
  const auto& g = fields[0].grid();
  for (const auto& f : fields)
    if (f.grid() != g) throw ArgumentError("write_fields_csv: fields on different grids");
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  if (!comment.empty()) out << "# " << comment << '\n';
  out << 'x';
  if (g.dims() == 2) out << ",y";
  for (const auto& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    const auto c = g.coords(k);
    out << format_double(g.center(c[0]));
    if (g.dims() == 2) out << ',' << format_double(g.center(c[1]));
    for (const auto& f : fields) out << ',' << format_double(f[k]);
    out << '\n';
  }
  if (!out) throw ArgumentError("write failed for " + path);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) {
    while (!cur.empty() && (cur.back() == '\r' || cur.back() == ' ')) cur.pop_back();
    cells.push_back(cur);
  }
  return cells;
}

double parse_double(const std::string& s, const std::string& path, std::size_t row) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  while (first < last && *first == ' ') ++first;
  if (first < last && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw ArgumentError(path + ": cannot parse '" + s + "' on data row " + std::to_string(row));
  }
  return v;
}

}  // namespace

FieldTable read_fields_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path);
  std::string line;
  FieldTable table;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (table.comment.empty()) {
        table.comment = line.substr(1);
        if (!table.comment.empty() && table.comment[0] == ' ') table.comment.erase(0, 1);
      }
      continue;
    }
    header = split_csv(line);
    break;
  }
  if (header.size() < 2 || header[0] != "x") throw ArgumentError(path + ": header must start with x");
  const int dims = header.size() >= 3 && header[1] == "y" ? 2 : 1;
  const std::size_t first_value = static_cast<std::size_t>(dims);
  table.names.assign(header.begin() + static_cast<std::ptrdiff_t>(first_value), header.end());
  if (table.names.empty()) throw ArgumentError(path + ": no value columns");

  std::vector<std::vector<double>> cols(table.names.size());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw ArgumentError(path + ": row " + std::to_string(row) + " has " +
                          std::to_string(cells.size()) + " columns, expected " +
                          std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < cols.size(); ++c)
      cols[c].push_back(parse_double(cells[first_value + c], path, row));
    ++row;
  }
  int n = 0;
  if (dims == 1) {
    n = static_cast<int>(row);
  } else {
    n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(row))));
    if (static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != row) {
      throw ArgumentError(path + ": 2D snapshot row count is not a perfect square");
    }
  }
  table.grid = PeriodicGrid(dims, n);
  for (auto& c : cols) table.fields.emplace_back(table.grid, std::move(c));
  return table;
}

}  // namespace eulerlab
