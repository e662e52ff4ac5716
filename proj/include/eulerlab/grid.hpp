#pragma once

// Periodic cell-centred grids on [-1, 1]^N (N = 1, 2) with +-1 identified, and
// the field operations the estimate modules are built on.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace eulerlab {

class PeriodicGrid {
 public:
  PeriodicGrid(int dims, int cells_per_dim);

  int dims() const { return dims_; }
  int cells_per_dim() const { return n_; }
  double cell_width() const { return 2.0 / n_; }
  double cell_volume() const;
  std::size_t cell_count() const;
  /// Cell-centre coordinate along any axis.
  double center(int i) const { return -1.0 + (i + 0.5) * cell_width(); }
  /// Linear index with periodic wrap of both coordinates (j ignored in 1D).
  std::size_t index(int i, int j = 0) const;
  std::array<int, 2> coords(std::size_t idx) const;

  bool operator==(const PeriodicGrid& o) const { return dims_ == o.dims_ && n_ == o.n_; }
  bool operator!=(const PeriodicGrid& o) const { return !(*this == o); }

 private:
  int dims_;
  int n_;
};

class ScalarField {
 public:
  explicit ScalarField(const PeriodicGrid& grid, double fill = 0.0);
  ScalarField(const PeriodicGrid& grid, std::vector<double> values);

  static ScalarField from_function(const PeriodicGrid& grid,
                                   const std::function<double(double, double)>& fn);

  const PeriodicGrid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double at(int i, int j = 0) const { return values_[grid_.index(i, j)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Throws DomainError if any value is NaN or infinite.
  void require_finite(const std::string& what) const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

/// N scalar components on a common grid.
class VectorField {
 public:
  VectorField(const PeriodicGrid& grid, int components);
  explicit VectorField(std::vector<ScalarField> components);

  const PeriodicGrid& grid() const { return grid_; }
  int components() const { return static_cast<int>(comps_.size()); }
  const ScalarField& operator[](int d) const { return comps_[d]; }
  ScalarField& operator[](int d) { return comps_[d]; }

 private:
  PeriodicGrid grid_;
  std::vector<ScalarField> comps_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double c, const ScalarField& a);
ScalarField map(const ScalarField& a, const std::function<double(double)>& fn);

/// Per-cell inclusion mask; empty means every cell.
using CellMask = std::vector<unsigned char>;

/// Lattice translation in whole cells.
struct LatticeShift {
  int di = 0;
  int dj = 0;
  /// Euclidean length in domain units.
  double length(const PeriodicGrid& g) const;
  bool operator==(const LatticeShift&) const = default;
};

/// Periodic translate: shift(f, h)(x) = f(x + h).
ScalarField shift(const ScalarField& f, LatticeShift h);

struct SnappedShift {
  ScalarField field;
  LatticeShift applied;
  bool snapped = false;  // h was not a lattice vector
};

/// Shift by a physical vector, snapping to the nearest lattice vector.
SnappedShift shift_by(const ScalarField& f, std::array<double, 2> h);

/// Discretised bump exp(-1/(1-|y/eps|^2)) on the lattice, normalised so that
/// sum(weight) = 1 (weights already include the cell volume).
class Mollifier {
 public:
  Mollifier(const PeriodicGrid& grid, double epsilon);

  struct Tap {
    int di = 0;
    int dj = 0;
    double weight = 0.0;
    /// Gradient of the kernel times cell volume, same normalisation.
    std::array<double, 2> dweight{0.0, 0.0};
  };

  double epsilon() const { return eps_; }
  const PeriodicGrid& grid() const { return grid_; }
  std::span<const Tap> taps() const { return taps_; }
  /// Discrete L1 norm of the kernel gradient.
  double gradient_mass() const;

 private:
  PeriodicGrid grid_;
  double eps_;
  std::vector<Tap> taps_;
};

/// Periodic convolution f * eta_eps.
ScalarField mollify(const ScalarField& f, const Mollifier& m);
VectorField mollify(const VectorField& f, const Mollifier& m);
/// grad(f * eta_eps) = f * grad(eta_eps), evaluated with the kernel gradient.
VectorField mollified_gradient(const ScalarField& f, const Mollifier& m);

/// Cell-volume weighted L^p norm (p = infinity allowed), compensated and in a
/// fixed summation order.
double lp_norm(const ScalarField& f, double p, const CellMask& mask = {});
/// L^p norm of the pointwise Euclidean magnitude.
double lp_norm(const VectorField& f, double p, const CellMask& mask = {});
double lp_norm(std::span<const ScalarField> comps, double p, const CellMask& mask = {});
double integral(const ScalarField& f);

/// Second-order central differences.
VectorField grad(const ScalarField& f);
ScalarField div(const VectorField& v);

/// W(x) = sum_{k=0}^{levels} 2^{-alpha k} cos(2^k pi (x + offset)); the 2D field
/// is the tensor product W(x) W(y).
ScalarField weierstrass_field(double alpha, int levels, const PeriodicGrid& grid,
                              double offset = 0.0);

/// Conservative restriction to a coarser grid whose resolution divides this one.
ScalarField restrict_average(const ScalarField& f, const PeriodicGrid& coarse);

/// Cells at distance >= margin from the edges of the window [lo, hi]^N.
CellMask window_mask(const PeriodicGrid& grid, double lo, double hi, double margin);

// Field snapshot CSV: optional '#' comment line, header "x[,y],name1[,name2...]",
// one row per cell in row-major order, values with 17 significant digits.
struct FieldTable {
  PeriodicGrid grid{1, 4};
  std::vector<std::string> names;
  std::vector<ScalarField> fields;
  std::string comment;
};

void write_fields_csv(const std::string& path, const std::vector<std::string>& names,
                      std::span<const ScalarField> fields, const std::string& comment = {});
FieldTable read_fields_csv(const std::string& path);
std::string format_double(double v);

}  // namespace eulerlab
