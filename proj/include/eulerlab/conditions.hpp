#pragma once

// One-sided Lipschitz bounds on a velocity field.
//
// Weak form, for unit directions xi and nonnegative bumps phi:
//   expansion:   C >= -int xi.u (xi.grad) phi / int phi   (= weighted mean of d_xi(xi.u))
//   compression: C >=  int xi.u (xi.grad) phi / int phi   (= weighted mean of -d_xi(xi.u))
// The smallest admissible C over the tested family is the max of the ratios.

#include <span>
#include <string>
#include <vector>

#include "eulerlab/grid.hpp"

namespace eulerlab::conditions {

enum class Sense {
  expansion,    // bounds xi^T grad(u) xi from above (fan gives 1/tau)
  compression,  // bounds -xi^T grad(u) xi from above
};

using Direction = std::array<double, 2>;

/// {+e1, -e1} in 1D; `count` equispaced unit vectors in 2D.
std::vector<Direction> default_directions(int dims, int count = 16);

/// Translated smooth bumps b((x - c)/r) (tensor products in 2D).
struct TestBasis {
  std::vector<double> radii;  // support radii
  int level = 0;              // centre spacing is radius / 2^(level+1)
};

/// Three dyadic radii base, base/2, base/4.
TestBasis default_basis(double base_radius = 0.125, int level = 0);

/// Centres used for one radius: multiples of the spacing, 0 included, covering [-1, 1).
std::vector<double> basis_centres(double radius, int level);

struct WeakResult {
  double min_C = 0.0;
  // Extremal (direction, radius, centre) pair; lowest index wins ties.
  std::size_t direction = 0;
  double radius = 0.0;
  std::array<double, 2> centre{0.0, 0.0};
};

/// Requires non-empty directions and basis (ArgumentError otherwise) and
/// u.components() == grid dims.
WeakResult oslip_weak_min_C(const VectorField& u, std::span<const Direction> directions,
                            const TestBasis& basis, Sense sense = Sense::expansion);

struct DiscreteResult {
  double discrete_C = 0.0;
  std::size_t cell = 0;
  LatticeShift step;
  bool wrap_dominated = false;  // the max came from a pair straddling the +-1 seam
};

/// max over cells x and steps h of xi_h.(u(x + h) - u(x)) / |h| with xi_h = h/|h|
/// (negated for Sense::compression). With mask_wrap, pairs crossing the seam are skipped.
DiscreteResult oslip_discrete(const VectorField& u, std::span<const LatticeShift> steps,
                              bool mask_wrap = false, Sense sense = Sense::expansion);

/// Unit steps +-e1 (and +-e2, +-(e1 +- e2) in 2D).
std::vector<LatticeShift> default_steps(int dims);

/// u = clamp(x / tau, -1, 1) e1 (extended invariantly in y in 2D).
VectorField fan_field(const PeriodicGrid& grid, double tau);

struct L1Report {
  double l1_norm = 0.0;           // int_delta^T max(C, 0) dtau (trapezoid)
  std::vector<double> l1_partial; // running integral at each sample >= delta
  double fit_a = 0.0;             // C ~ a / tau^b near delta
  double fit_b = 0.0;
  bool fit_ok = false;
  bool integrability_doubtful = false;  // fit_b >= 1 - tolerance
};

inline constexpr double kIntegrabilityTolerance = 0.05;

/// Samples must be sorted by time. The fit uses samples in [delta, 4 delta]
/// (at least the first three at or after delta).
L1Report l1_report(std::span<const double> times, std::span<const double> values, double delta,
                   double t_end, double tolerance = kIntegrabilityTolerance);

struct OslipRow {
  double tau = 0.0;
  double min_C = 0.0;
  double discrete_C = 0.0;
  double l1_partial = 0.0;
  std::string flags;
};

void write_oslip_csv(const std::string& path, std::span<const OslipRow> rows,
                     const std::string& comment);

}  // namespace eulerlab::conditions
