#include "eulerlab/thermo.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "eulerlab/errors.hpp"

namespace eulerlab::thermo {

namespace {

void require_positive(const char* name, double v) {
  if (!std::isfinite(v) || v < kVacuumFloor) {
    std::ostringstream os;
    os << name << " = " << v << " is outside the admissible range (must be >= " << kVacuumFloor
       << ")";
    throw DomainError(os.str());
  }
}

}  // namespace

GasParams::GasParams(double gamma) : gamma_(gamma), cv_(0.0) {
  if (!std::isfinite(gamma) || gamma <= 1.0) {
    throw DomainError("adiabatic index gamma must be > 1, got " + std::to_string(gamma));
  }
  cv_ = 1.0 / (gamma - 1.0);
}

double pressure(double rho, double theta, const GasParams&) {
  require_positive("rho", rho);
  require_positive("theta", theta);
  return rho * theta;
}

double internal_energy(double theta, const GasParams& params) {
  require_positive("theta", theta);
  return params.cv() * theta;
}

double entropy(double rho, double theta, const GasParams& params) {
  require_positive("rho", rho);
  require_positive("theta", theta);
  return params.cv() * std::log(theta) - std::log(rho);
}

double ballistic_free_energy(double rho, double theta, double t_ref, const GasParams& params) {
  require_positive("T_ref", t_ref);
  return rho * internal_energy(theta, params) - t_ref * rho * entropy(rho, theta, params);
}

double theta_of(double rho, double total_entropy, const GasParams& params) {
  require_positive("rho", rho);
  if (!std::isfinite(total_entropy)) {
    throw DomainError("total entropy S must be finite");
  }
  const double g1 = params.gamma() - 1.0;
  const double log_theta = g1 * std::log(rho) + g1 * total_entropy / rho;
  if (log_theta > std::log(std::numeric_limits<double>::max())) {
    std::ostringstream os;
    os << "theta_of overflow: log(Theta) = " << log_theta << " at rho = " << rho
       << ", S = " << total_entropy;
    throw RangeError(os.str());
  }
  return std::exp(log_theta);
}

TildePressure tilde_pressure(double rho, double total_entropy, const GasParams& params) {
  require_positive("rho", rho);
  const double g = params.gamma();
  const double a = g - 1.0;
  const double k = total_entropy / rho;
  const double log_value = g * std::log(rho) + a * k;
  if (log_value > std::log(std::numeric_limits<double>::max())) {
    throw RangeError("tilde_pressure overflow at rho = " + std::to_string(rho));
  }
  TildePressure out;
  out.value = std::exp(log_value);
  // log p~ = f(rho, S); Hess p~ = p~ (grad f grad f^T + Hess f).
  const double f_r = (g - a * k) / rho;
  const double f_s = a / rho;
  const double f_rr = (-g + 2.0 * a * k) / (rho * rho);
  const double f_rs = -a / (rho * rho);
  out.grad = {out.value * f_r, out.value * f_s};
  out.hess[0][0] = out.value * (f_r * f_r + f_rr);
  out.hess[0][1] = out.value * (f_r * f_s + f_rs);
  out.hess[1][0] = out.hess[0][1];
  out.hess[1][1] = out.value * f_s * f_s;
  return out;
}

double min_eigenvalue(const Mat2& m) {
  const double tr = 0.5 * (m[0][0] + m[1][1]);
  const double d = 0.5 * (m[0][0] - m[1][1]);
  const double off = 0.5 * (m[0][1] + m[1][0]);
  return tr - std::hypot(d, off);
}

namespace deriv {

double dp_drho(double rho, double theta, const GasParams&) {
  require_positive("rho", rho);
  require_positive("theta", theta);
  return theta;
}

double dp_dtheta(double rho, double theta, const GasParams&) {
  require_positive("rho", rho);
  require_positive("theta", theta);
  return rho;
}

double de_drho(double theta, const GasParams&) {
  require_positive("theta", theta);
  return 0.0;
}

double de_dtheta(double theta, const GasParams& params) {
  require_positive("theta", theta);
  return params.cv();
}

double ds_drho(double rho, double theta, const GasParams&) {
  require_positive("rho", rho);
  require_positive("theta", theta);
  return -1.0 / rho;
}

double ds_dtheta(double rho, double theta, const GasParams& params) {
  require_positive("rho", rho);
  require_positive("theta", theta);
  return params.cv() / theta;
}

double dH_drho(double rho, double theta, double t_ref, const GasParams& params) {
  // d/dr [r e - T r s] = e - T s - T r ds/dr = e - T s + T
  return internal_energy(theta, params) - t_ref * entropy(rho, theta, params) + t_ref;
}

double dH_dtheta(double rho, double theta, double t_ref, const GasParams& params) {
  return rho * de_dtheta(theta, params) - t_ref * rho * ds_dtheta(rho, theta, params);
}

double dH_dref(double rho, double t_ref, const GasParams& params) {
  // total derivative of T -> H_T(r, T): the theta-derivative vanishes at theta = T
  return dH_dtheta(rho, t_ref, t_ref, params) - rho * entropy(rho, t_ref, params);
}

}  // namespace deriv

GibbsCheck verify_gibbs(double rho, double theta, const GasParams& params, double fd_step) {
  require_positive("rho", rho);
  require_positive("theta", theta);
  if (!(fd_step > 0.0) || fd_step >= 0.5 * std::min(rho, theta)) {
    throw ArgumentError("verify_gibbs: fd_step must be positive and small relative to the state");
  }
  const double p = pressure(rho, theta, params);
  GibbsCheck out;
  out.analytic.rho_part = std::abs(theta * deriv::ds_drho(rho, theta, params) -
                                   (deriv::de_drho(theta, params) - p / (rho * rho)));
  out.analytic.theta_part =
      std::abs(theta * deriv::ds_dtheta(rho, theta, params) - deriv::de_dtheta(theta, params));

  const double h = fd_step;
  const auto s = [&](double r, double t) { return entropy(r, t, params); };
  const auto e = [&](double t) { return internal_energy(t, params); };
  const double ds_dr = (s(rho + h, theta) - s(rho - h, theta)) / (2.0 * h);
  const double ds_dt = (s(rho, theta + h) - s(rho, theta - h)) / (2.0 * h);
  const double de_dr = 0.0;  // e does not depend on rho
  const double de_dt = (e(theta + h) - e(theta - h)) / (2.0 * h);
  out.central_difference.rho_part = std::abs(theta * ds_dr - (de_dr - p / (rho * rho)));
  out.central_difference.theta_part = std::abs(theta * ds_dt - de_dt);
  return out;
}

P2Check verify_P2(double rho, double t_ref, const GasParams& params, double fd_step) {
  require_positive("r", rho);
  require_positive("T", t_ref);
  const double H = ballistic_free_energy(rho, t_ref, t_ref, params);
  const double p = pressure(rho, t_ref, params);
  const double s = entropy(rho, t_ref, params);

  P2Check out;
  out.analytic.free_energy = std::abs(rho * deriv::dH_drho(rho, t_ref, t_ref, params) - (H + p));
  out.analytic.entropy = std::abs(rho * deriv::ds_drho(rho, t_ref, params) +
                                  deriv::dp_dtheta(rho, t_ref, params) / rho);
  out.analytic.reference = std::abs(deriv::dH_dref(rho, t_ref, params) + rho * s);

  const double h = fd_step;
  const auto Hr = [&](double r) { return ballistic_free_energy(r, t_ref, t_ref, params); };
  const auto HT = [&](double T) { return ballistic_free_energy(rho, T, T, params); };
  const double dH_dr = (Hr(rho + h) - Hr(rho - h)) / (2.0 * h);
  const double ds_dr = (entropy(rho + h, t_ref, params) - entropy(rho - h, t_ref, params)) / (2.0 * h);
  const double dp_dT =
      (pressure(rho, t_ref + h, params) - pressure(rho, t_ref - h, params)) / (2.0 * h);
  const double dH_dT = (HT(t_ref + h) - HT(t_ref - h)) / (2.0 * h);
  out.central_difference.free_energy = std::abs(rho * dH_dr - (H + p));
  out.central_difference.entropy = std::abs(rho * ds_dr + dp_dT / rho);
  out.central_difference.reference = std::abs(dH_dT + rho * s);
  return out;
}

double total_energy(const PrimitiveState& s, const GasParams& params) {
  const double u2 = s.vel[0] * s.vel[0] + s.vel[1] * s.vel[1];
  return 0.5 * s.rho * u2 + s.rho * internal_energy(s.theta, params);
}

double sound_speed(double rho, double theta, const GasParams& params) {
  require_positive("rho", rho);
  require_positive("theta", theta);
  return std::sqrt(params.gamma() * theta);
}

ConservedState to_conserved(const PrimitiveState& s, const GasParams& params) {
  require_positive("rho", s.rho);
  ConservedState c;
  c.rho = s.rho;
  c.mom = {s.rho * s.vel[0], s.rho * s.vel[1]};
  c.energy = total_energy(s, params);
  return c;
}

PrimitiveState to_primitive(const ConservedState& c, const GasParams& params) {
  require_positive("rho", c.rho);
  PrimitiveState s;
  s.rho = c.rho;
  s.vel = {c.mom[0] / c.rho, c.mom[1] / c.rho};
  const double kinetic = 0.5 * (c.mom[0] * c.mom[0] + c.mom[1] * c.mom[1]) / c.rho;
  s.theta = (c.energy - kinetic) / (c.rho * params.cv());
  require_positive("theta", s.theta);
  return s;
}

EntropicState to_entropic(const PrimitiveState& s, const GasParams& params) {
  EntropicState e;
  e.rho = s.rho;
  e.mom = {s.rho * s.vel[0], s.rho * s.vel[1]};
  e.entropy = s.rho * entropy(s.rho, s.theta, params);
  return e;
}

PrimitiveState from_entropic(const EntropicState& e, const GasParams& params) {
  PrimitiveState s;
  s.rho = e.rho;
  s.theta = theta_of(e.rho, e.entropy, params);
  s.vel = {e.mom[0] / e.rho, e.mom[1] / e.rho};
  return s;
}

}  // namespace eulerlab::thermo
