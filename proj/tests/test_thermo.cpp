// Closure values, closed-form derivatives against finite-difference oracles,
// and the state conversions.

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "eulerlab/errors.hpp"
#include "eulerlab/thermo.hpp"

using namespace eulerlab;
using namespace eulerlab::thermo;

namespace {

const GasParams g2(2.0);
const double e = std::numbers::e;

/// Hessian oracle: central differences of the gradient, which is itself checked
/// against differences of values below. (Second differences of values at this
/// step are swamped by rounding.)
Mat2 fd_hessian(double rho, double S, const GasParams& p, double h) {
  const auto g = [&](double r, double s) { return tilde_pressure(r, s, p).grad; };
  const auto dr = [&](int k) { return (g(rho + h, S)[k] - g(rho - h, S)[k]) / (2 * h); };
  const auto ds = [&](int k) { return (g(rho, S + h)[k] - g(rho, S - h)[k]) / (2 * h); };
  Mat2 m{};
  m[0][0] = dr(0);
  m[1][1] = ds(1);
  m[0][1] = m[1][0] = 0.5 * (dr(1) + ds(0));
  return m;
}

}  // namespace

TEST_CASE("gas parameters tie cV to gamma") {
  CHECK(GasParams(2.0).cv() == 1.0);
  CHECK(GasParams(1.4).cv() * 0.4 == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(GasParams().gamma() == 1.4);
  CHECK_THROWS_AS(GasParams(1.0), DomainError);
  CHECK_THROWS_AS(GasParams(0.5), DomainError);
}

TEST_CASE("pressure, internal energy and entropy") {
  CHECK(pressure(1, 1, g2) == 1);
  CHECK(pressure(2, 3, g2) == 6);
  CHECK(pressure(0.5, 4, g2) == 2);
  CHECK(internal_energy(1, g2) == 1);
  CHECK(internal_energy(3, g2) == 3);
  CHECK(internal_energy(2, GasParams(1.4)) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(entropy(1, 1, g2) == 0);
  CHECK(entropy(1, e, g2) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(entropy(e, 1, g2) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(pressure(0, 1, g2), DomainError);
  CHECK_THROWS_AS(pressure(1, -1, g2), DomainError);
  CHECK_THROWS_AS(internal_energy(0, g2), DomainError);
  CHECK_THROWS_AS(entropy(1e-13, 1, g2), DomainError);
}

TEST_CASE("ballistic free energy closed forms") {
  CHECK(ballistic_free_energy(1, 1, 1, g2) == 1);
  CHECK(ballistic_free_energy(1, 1, 2, g2) == 1);
  CHECK(ballistic_free_energy(2, 1, 1, g2) == doctest::Approx(2 + 2 * std::log(2.0)).epsilon(1e-15));
  CHECK_THROWS_AS(ballistic_free_energy(1, 1, 0, g2), DomainError);
}

TEST_CASE("theta_of inverts the entropy") {
  CHECK(theta_of(1, 0, g2) == 1);
  CHECK(theta_of(2, 0, g2) == 2);
  CHECK(theta_of(1, 1, g2) == doctest::Approx(e).epsilon(1e-15));
  const GasParams air(1.4);
  double worst = 0;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      const double rho = 0.5 + 1.5 * i / 49, th = 0.5 + 1.5 * j / 49;
      worst = std::max(worst, std::abs(theta_of(rho, rho * entropy(rho, th, air), air) - th) / th);
    }
  }
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(theta_of(0, 0, g2), DomainError);
  CHECK_THROWS_AS(theta_of(1e-3, 10, g2), RangeError);
}

TEST_CASE("tilde pressure: values, closed-form derivatives and convexity") {
  CHECK(tilde_pressure(1, 0, g2).value == 1);
  CHECK(tilde_pressure(2, 0, g2).value == doctest::Approx(4).epsilon(1e-15));
  for (double gamma : {1.4, 2.0, 5.0 / 3.0}) {
    const GasParams p(gamma);
    for (auto [rho, S] : {std::pair{1.0, 0.0}, {0.7, 0.3}, {2.5, -1.0}}) {
      const auto t = tilde_pressure(rho, S, p);
      const auto fd = fd_hessian(rho, S, p, 1e-5);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          CHECK(t.hess[a][b] == doctest::Approx(fd[a][b]).epsilon(1e-6).scale(1.0));
        }
      }
      const double h = 1e-6;
      CHECK(t.grad[0] == doctest::Approx((tilde_pressure(rho + h, S, p).value -
                                          tilde_pressure(rho - h, S, p).value) / (2 * h)).epsilon(1e-8));
      CHECK(t.grad[1] == doctest::Approx((tilde_pressure(rho, S + h, p).value -
                                          tilde_pressure(rho, S - h, p).value) / (2 * h)).epsilon(1e-8));
      // Agrees with p(rho, theta_of(rho, S)).
      CHECK(t.value == doctest::Approx(pressure(rho, theta_of(rho, S, p), p)).epsilon(1e-14));
    }
  }
  CHECK(min_eigenvalue(tilde_pressure(1, 0, g2).hess) >= -1e-10);
  double worst = 1e300;
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) {
      worst = std::min(worst, min_eigenvalue(tilde_pressure(0.25 + 3.75 * i / 49, -2 + 4.0 * j / 49,
                                                            GasParams(1.4)).hess));
    }
  }
  CHECK(worst >= -1e-10);
  CHECK(min_eigenvalue(Mat2{{{2, 0}, {0, -1}}}) == -1);
  CHECK_THROWS_AS(tilde_pressure(0, 0, g2), DomainError);
}

TEST_CASE("Gibbs identity") {
  const auto a = verify_gibbs(1, 1, g2, 1e-4);
  CHECK(a.analytic.rho_part == 0);
  CHECK(a.analytic.theta_part == 0);
  const GasParams air(1.4);
  const auto b = verify_gibbs(2, 3, air, 1e-4);
  CHECK(b.analytic.rho_part < 1e-10);
  CHECK(b.analytic.theta_part < 1e-10);

  // Symbolic oracle: theta ds/drho = -theta/rho, de/drho - p/rho^2 = -theta/rho.
  CHECK(deriv::ds_drho(2, 3, air) * 3 == doctest::Approx(-1.5).epsilon(1e-15));
  CHECK(deriv::de_drho(3, air) == 0);

  // Halving h divides the central-difference residual by about 4.
  const auto c1 = verify_gibbs(2, 3, air, 1e-2);
  const auto c2 = verify_gibbs(2, 3, air, 5e-3);
  const double r1 = c1.central_difference.rho_part + c1.central_difference.theta_part;
  const double r2 = c2.central_difference.rho_part + c2.central_difference.theta_part;
  CHECK(r1 / r2 == doctest::Approx(4.0).epsilon(0.05));
  CHECK_THROWS_AS(verify_gibbs(1, 1, g2, 0.0), ArgumentError);
}

TEST_CASE("P2 identities") {
  const auto z = verify_P2(1, 1, g2);
  CHECK(z.analytic.free_energy == 0);
  CHECK(z.analytic.entropy == 0);
  CHECK(z.analytic.reference == 0);
  CHECK(deriv::dH_dref(1, 1, g2) == 0);
  const GasParams air(1.4);
  double worst = 0, fd_worst = 0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      const auto r = verify_P2(0.5 + 1.5 * i / 19, 0.5 + 1.5 * j / 19, air);
      worst = std::max({worst, r.analytic.free_energy, r.analytic.entropy, r.analytic.reference});
      fd_worst = std::max({fd_worst, r.central_difference.free_energy, r.central_difference.entropy,
                           r.central_difference.reference});
    }
  }
  CHECK(worst < 1e-10);
  CHECK(fd_worst < 1e-7);
}

TEST_CASE("conversions preserve the total energy") {
  const GasParams air(1.4);
  const PrimitiveState s{1.3, {0.4, -0.7}, 1.9};
  const double E = total_energy(s, air);
  const auto c = to_conserved(s, air);
  CHECK(c.energy == doctest::Approx(E).epsilon(1e-12));
  const auto back = to_primitive(c, air);
  CHECK(total_energy(back, air) == doctest::Approx(E).epsilon(1e-12));
  const auto ent = to_entropic(s, air);
  const auto from = from_entropic(ent, air);
  CHECK(total_energy(from, air) == doctest::Approx(E).epsilon(1e-12));
  CHECK(from.theta == doctest::Approx(s.theta).epsilon(1e-12));
  CHECK(sound_speed(1, 1, air) == doctest::Approx(std::sqrt(1.4)).epsilon(1e-15));
  CHECK_THROWS_AS(to_primitive(ConservedState{1, {1, 0}, 0.4}, air), DomainError);
}
