#pragma once

// Besov B^{beta,inf}_p semi-norms over lattice shift sets, regularity fits and
// the three mollifier estimates
//   |f_eps - f|_p <= |f|_B eps^a,  sup_{|h|<=eps} |f(.+h) - f|_p <= |f|_B eps^a,
//   |grad f_eps|_p <= |f|_B eps^(a-1).

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "eulerlab/grid.hpp"

namespace eulerlab::besov {

using ShiftSet = std::vector<LatticeShift>;

/// Dyadic shifts 1, 2, 4, ... cells along each axis up to a quarter period,
/// plus the matching diagonals in 2D.
ShiftSet dyadic_shifts(const PeriodicGrid& grid, bool diagonals = true);
/// Every axis (and diagonal, in 2D) lattice shift of length 1..max_cells cells.
ShiftSet dense_shifts(const PeriodicGrid& grid, int max_cells);
/// All lattice vectors with 0 < |h| <= radius.
ShiftSet ball_shifts(const PeriodicGrid& grid, double radius);

/// max over h in shifts of |f(.+h) - f|_p / |h|^beta.
double seminorm(const ScalarField& f, double beta, double p, const ShiftSet& shifts);

/// |f(.+h) - f|_p for every shift, in the order given.
std::vector<double> increment_norms(const ScalarField& f, double p, const ShiftSet& shifts);

/// Least-squares line through (log x, log y) after dropping `trim` points at
/// each end of the (sorted) sample.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS of log residuals over fitted points
  std::size_t first = 0;  // fitted index range [first, last)
  std::size_t last = 0;   // one past the last fitted index
  bool degenerate = false;
};

RateFit fit_log_log(std::span<const double> x, std::span<const double> y, std::size_t trim);

/// Points trimmed at each end of every rate fit.
inline constexpr std::size_t kFitTrim = 2;

struct RegularityFit {
  double fitted_alpha = 0.0;  // +inf when the field is constant
  double residual = 0.0;
  bool degenerate = false;
  std::vector<double> shift_lengths;
  std::vector<double> increments;
  std::size_t trim = 0;
};

/// Slope of log|f(.+h) - f|_p against log|h| over dyadic axis-0 shifts of
/// min_cells .. max_cells cells (both powers of two, >= 3 octaves apart).
RegularityFit fit_regularity(const ScalarField& f, double p, int min_cells, int max_cells,
                             std::size_t trim = kFitTrim);

struct MollifierRates {
  std::vector<double> eps;
  std::vector<double> smoothing_error;    // |f_eps - f|_p
  std::vector<double> local_increment;    // sup_{|h| <= eps} |f(.+h) - f|_p
  std::vector<double> mollified_gradient; // |grad f_eps|_p
  double seminorm = 0.0;                  // measured |f|_{B^{alpha,inf}_p}
  double alpha = 0.0;
  double p = 0.0;
  RateFit slope_smoothing;
  RateFit slope_increment;
  RateFit slope_gradient;
  /// Per-eps one-sided checks against seminorm * eps^alpha (resp. eps^(alpha-1)).
  std::vector<bool> holds_smoothing;
  std::vector<bool> holds_increment;
  std::vector<bool> holds_gradient;
};

/// Evaluates the three estimates at each eps. `shifts` is the set the semi-norm
/// is measured on; when empty, every axis shift up to a quarter period is used.
MollifierRates verify_mollifier_rates(const ScalarField& f, double alpha, double p,
                                      std::span<const double> eps, const ShiftSet& shifts = {},
                                      double slack = 0.0);

/// Dyadic radii 2^lo_exp .. 2^hi_exp (lo_exp < hi_exp, both <= 0).
std::vector<double> dyadic_range(int lo_exp, int hi_exp);

/// Time regularity of a uniformly sampled sequence of snapshots:
/// max over lags k of |f(t + k dt) - f(t)|_{L^p(time x space)} / (k dt)^beta.
double time_seminorm(std::span<const ScalarField> snapshots, double dt, double beta, double p,
                     std::span<const int> lags);

struct BesovReport {
  double p = 0.0;
  std::vector<double> beta_grid;
  std::vector<double> seminorms;
  RegularityFit fit;
  ShiftSet shift_set;
  std::vector<MollifierRates> mollifier;  // zero or one entry
};

/// Writes the report as CSV rows quantity,beta_or_eps,value,slope,residual.
void write_report_csv(const std::string& path, const BesovReport& report,
                      const std::string& comment);

}  // namespace eulerlab::besov
