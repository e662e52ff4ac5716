#pragma once

// Ideal-gas closure: Boyle's law p = rho*theta, caloric law e = cV*theta with
// cV*(gamma - 1) = 1, entropy s = cV*log(theta) - log(rho).

#include <array>

namespace eulerlab::thermo {

/// Densities and temperatures below this are treated as vacuum.
inline constexpr double kVacuumFloor = 1e-12;

using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

class GasParams {
 public:
  explicit GasParams(double gamma = 1.4);

  double gamma() const { return gamma_; }
  /// Specific heat at constant volume, derived as 1/(gamma - 1).
  double cv() const { return cv_; }

 private:
  double gamma_;
  double cv_;
};

/// (rho, u, theta). Unused velocity components are zero.
struct PrimitiveState {
  double rho = 1.0;
  Vec2 vel{0.0, 0.0};
  double theta = 1.0;
};

/// (rho, m, E) with E = 0.5*rho*|u|^2 + rho*e.
struct ConservedState {
  double rho = 1.0;
  Vec2 mom{0.0, 0.0};
  double energy = 0.0;
};

/// (rho, m, S) with S = rho*s(rho, theta).
struct EntropicState {
  double rho = 1.0;
  Vec2 mom{0.0, 0.0};
  double entropy = 0.0;
};

double pressure(double rho, double theta, const GasParams& params);
double internal_energy(double theta, const GasParams& params);
double entropy(double rho, double theta, const GasParams& params);

/// H_T(rho, theta) = rho*e(theta) - T*rho*s(rho, theta).
double ballistic_free_energy(double rho, double theta, double t_ref, const GasParams& params);

/// Temperature recovered from (rho, S): rho^(gamma-1) * exp((gamma-1) S / rho).
double theta_of(double rho, double total_entropy, const GasParams& params);

struct TildePressure {
  double value = 0.0;
  Vec2 grad{};   // (d/drho, d/dS)
  Mat2 hess{};
};

/// p~(rho, S) = p(rho, theta_of(rho, S)) = rho^gamma exp((gamma-1) S / rho) with
/// closed-form gradient and Hessian.
TildePressure tilde_pressure(double rho, double total_entropy, const GasParams& params);

/// Smallest eigenvalue of a symmetric 2x2 matrix.
double min_eigenvalue(const Mat2& m);

// Closed-form partial derivatives of the closures.
namespace deriv {
double dp_drho(double rho, double theta, const GasParams& params);
double dp_dtheta(double rho, double theta, const GasParams& params);
double de_drho(double theta, const GasParams& params);
double de_dtheta(double theta, const GasParams& params);
double ds_drho(double rho, double theta, const GasParams& params);
double ds_dtheta(double rho, double theta, const GasParams& params);
/// d/dr of H_T(r, theta) at fixed theta and T.
double dH_drho(double rho, double theta, double t_ref, const GasParams& params);
/// d/dtheta of H_T(r, theta) at fixed r and T.
double dH_dtheta(double rho, double theta, double t_ref, const GasParams& params);
/// d/dT of H_T(r, T), i.e. theta and the reference move together.
double dH_dref(double rho, double t_ref, const GasParams& params);
}  // namespace deriv

struct GibbsResidual {
  double rho_part = 0.0;    // |theta*ds/drho - (de/drho - p/rho^2)|
  double theta_part = 0.0;  // |theta*ds/dtheta - de/dtheta|
};

struct GibbsCheck {
  GibbsResidual analytic;
  GibbsResidual central_difference;
};

/// Gibbs identity residuals from closed-form derivatives and from central
/// differences with step fd_step (the latter is O(fd_step^2)).
GibbsCheck verify_gibbs(double rho, double theta, const GasParams& params, double fd_step);

struct P2Residual {
  double free_energy = 0.0;  // |r dH/dr - (H + p)|
  double entropy = 0.0;      // |r ds/dr + (1/r) dp/dT|
  double reference = 0.0;    // |dH/dT + r s|
};

struct P2Check {
  P2Residual analytic;
  P2Residual central_difference;
};

P2Check verify_P2(double rho, double t_ref, const GasParams& params, double fd_step = 1e-5);

ConservedState to_conserved(const PrimitiveState& s, const GasParams& params);
PrimitiveState to_primitive(const ConservedState& s, const GasParams& params);
EntropicState to_entropic(const PrimitiveState& s, const GasParams& params);
PrimitiveState from_entropic(const EntropicState& s, const GasParams& params);

double total_energy(const PrimitiveState& s, const GasParams& params);
double sound_speed(double rho, double theta, const GasParams& params);

}  // namespace eulerlab::thermo
