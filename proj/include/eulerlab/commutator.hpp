#pragma once

// Mollification commutators.
//
// Chain rule:   grad G(F_eps) - (grad G(F))_eps, split as
//   A = DG(F_eps) grad F_eps - DG(F) grad F_eps
//   B = DG(F) grad F_eps - (grad G(F))_eps
// and bounded by sum_{|g|=2} eps^{sum g_j a_j - 1} sup_K|d^g G| prod |f_j|^{g_j}_{B^{a_j,inf}_p}
// in L^{p/2}.
//
// Bilinear / triple products: rho_eps u_eps - (rho u)_eps and
// rho_eps u_eps u_eps - (rho u u)_eps.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "eulerlab/besov.hpp"
#include "eulerlab/grid.hpp"
#include "eulerlab/thermo.hpp"

namespace eulerlab::commutator {

/// A C^2 map G: R^k -> R with closed-form first and second derivatives.
struct Nonlinearity {
  std::string name;
  int arity = 1;
  std::function<double(std::span<const double>)> value;
  /// Writes dG/dy_j into out[j].
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  /// Writes d2G/dy_i dy_j into out[i * arity + j].
  std::function<void(std::span<const double>, std::span<double>)> hessian;
};

Nonlinearity square();                                       // y^2
Nonlinearity product();                                      // y1 * y2
Nonlinearity affine(std::vector<double> coeffs, double c0);  // c0 + sum c_j y_j
/// (rho, S) -> rho^gamma exp((gamma - 1) S / rho).
Nonlinearity pressure_tilde(const thermo::GasParams& params);
/// Registry lookup: "square", "product", "pressure_tilde". Unknown names throw ArgumentError.
Nonlinearity by_name(const std::string& name, const thermo::GasParams& params = thermo::GasParams{});

/// Axis-aligned box containing the convex set K the fields take values in.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
};

/// sup over the box of |d^g G| for one second-order multi-index (i <= j).
struct SecondDerivativeBound {
  int i = 0;
  int j = 0;
  double sup = 0.0;
};

/// Dense tensor sampling of the box, points_per_dim per axis (endpoints included).
std::vector<SecondDerivativeBound> sample_second_derivatives(const Nonlinearity& g, const Box& box,
                                                             int points_per_dim = 1000);

/// Measurement region. Periodic: the whole torus. Window: cells of [lo, hi]^N
/// at distance >= eps from the window edges.
struct Window {
  double lo = -1.0;
  double hi = 1.0;
};

struct Probe {
  std::vector<ScalarField> components;
  std::vector<double> alphas;  // declared regularity of each component
  Nonlinearity g;
  Box box;
  double p = 4.0;
  std::optional<Window> window;  // empty: periodic mode
};

struct ChainResult {
  double eps = 0.0;
  VectorField field{PeriodicGrid(1, 4), 1};  // grad G(F_eps) - (grad G(F))_eps
  VectorField term_a{PeriodicGrid(1, 4), 1};
  VectorField term_b{PeriodicGrid(1, 4), 1};
  double norm = 0.0;   // L^{p/2}
  double norm_a = 0.0;
  double norm_b = 0.0;
  double bound = 0.0;
  bool holds = false;  // norm <= bound
  /// max |term_a + term_b - field| relative to max |field| (absolute if field == 0).
  double split_defect = 0.0;
};

/// Semi-norms |f_j|_{B^{a_j,inf}_p} on every axis/diagonal shift up to a quarter period.
std::vector<double> measured_seminorms(const Probe& probe);

/// Evaluates the commutator and its split at one radius. `seminorms` and
/// `bounds` may be passed in to avoid recomputation across an eps scan.
ChainResult chain_commutator(const Probe& probe, double eps,
                             std::span<const double> seminorms = {},
                             std::span<const SecondDerivativeBound> bounds = {});

struct ChainRateReport {
  std::vector<ChainResult> points;  // fields dropped, norms kept
  std::vector<double> seminorms;
  std::vector<SecondDerivativeBound> second_derivatives;
  double predicted_slope = 0.0;  // min over g with sup > 0 of sum g_j a_j - 1
  besov::RateFit fit;
  besov::RateFit fit_a;
  besov::RateFit fit_b;
  bool rate_pass = false;   // fit.slope >= predicted - tolerance
  bool bound_pass = false;  // bound held at every eps
  double max_split_defect = 0.0;
};

ChainRateReport chain_rate_fit(const Probe& probe, std::span<const double> eps_range,
                               double tolerance = 0.1);

/// Throws DomainError naming the first cell whose value leaves the box.
void require_in_box(const Probe& probe);

struct BilinearResult {
  double eps = 0.0;
  ScalarField field{PeriodicGrid(1, 4)};  // rho_eps u_eps - (rho u)_eps
  double norm = 0.0;             // L^{p/2}
  double smoothing_term = 0.0;   // |(rho_eps, u_eps) - (rho, u)|_{L^p}^2
  double increment_term = 0.0;   // sup_{|y| <= eps} |(rho, u)(. - y) - (rho, u)|_{L^p}^2
  double triple_norm = 0.0;      // |rho_eps u_eps^2 - (rho u^2)_eps|_{L^{p/3}}
  bool holds = false;            // norm <= c0 * (smoothing_term + increment_term)
};

/// Constant in front of the difference-quotient bound. From
///   rho_eps u_eps - (rho u)_eps = (rho_eps - rho)(u_eps - u)
///                                 - int eta_eps(y) d_y rho d_y u dy
/// and Hoelder + Young, 1/2 always suffices; calibrate_bilinear_constant
/// measures how much of it a smooth pair uses.
inline constexpr double kBilinearC0 = 0.5;

BilinearResult bilinear_commutator(const ScalarField& rho, const ScalarField& u, double eps,
                                   double p = 3.0, double c0 = kBilinearC0);

struct BilinearRateReport {
  std::vector<BilinearResult> points;  // fields dropped
  besov::RateFit fit;
  besov::RateFit fit_triple;
  bool bound_pass = false;
};

BilinearRateReport bilinear_rate_fit(const ScalarField& rho, const ScalarField& u,
                                     std::span<const double> eps_range, double p = 3.0,
                                     double c0 = kBilinearC0);

/// Largest ratio norm / (smoothing_term + increment_term) over eps_range for the
/// smooth pair rho = 2 + sin(pi x), u = cos(pi x) on the given grid.
double calibrate_bilinear_constant(const PeriodicGrid& grid, std::span<const double> eps_range,
                                   double p = 3.0);

}  // namespace eulerlab::commutator
