// Chain-rule and product commutators against direct evaluations.

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "eulerlab/commutator.hpp"
#include "eulerlab/errors.hpp"

using namespace eulerlab;
using namespace eulerlab::commutator;
using std::numbers::pi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ScalarField smooth(const PeriodicGrid& g, double phase) {
  return ScalarField::from_function(g, [=](double x, double) { return std::sin(pi * x + phase); });
}

ScalarField noise(const PeriodicGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

void check_derivatives(const Nonlinearity& g, std::vector<double> y) {
  const int n = g.arity;
  std::vector<double> grad(n), hess(n * n), gp(n), gm(n);
  g.gradient(y, grad);
  g.hessian(y, hess);
  const double h = 1e-6;
  for (int j = 0; j < n; ++j) {
    auto yp = y, ym = y;
    yp[j] += h;
    ym[j] -= h;
    CHECK(grad[j] == doctest::Approx((g.value(yp) - g.value(ym)) / (2 * h)).epsilon(1e-7));
    g.gradient(yp, gp);
    g.gradient(ym, gm);
    for (int i = 0; i < n; ++i) {
      CHECK(hess[i * n + j] == doctest::Approx((gp[i] - gm[i]) / (2 * h)).epsilon(1e-7));
    }
  }
}

}  // namespace

TEST_CASE("nonlinearity registry and closed-form derivatives") {
  const thermo::GasParams air(1.4);
  check_derivatives(square(), {0.7});
  check_derivatives(product(), {0.3, -1.2});
  check_derivatives(affine({2.0, -1.0}, 0.5), {1.0, 2.0});
  check_derivatives(pressure_tilde(air), {1.3, 0.4});
  CHECK(by_name("square").value(std::vector<double>{3.0}) == 9.0);
  CHECK(by_name("product").arity == 2);
  CHECK(by_name("pressure_tilde", air).value(std::vector<double>{2.0, 0.0}) ==
        doctest::Approx(std::pow(2.0, 1.4)).epsilon(1e-14));
  CHECK_THROWS_AS(by_name("cube"), ArgumentError);
}

TEST_CASE("sampled second-derivative suprema") {
  const auto sq = sample_second_derivatives(square(), {{-3.0}, {3.0}}, 100);
  REQUIRE(sq.size() == 1);
  CHECK(sq[0].sup == 2.0);
  const auto pr = sample_second_derivatives(product(), {{-1.0, -1.0}, {1.0, 1.0}}, 50);
  REQUIRE(pr.size() == 3);
  for (const auto& b : pr) CHECK(b.sup == (b.i != b.j ? 1.0 : 0.0));
  // d2/drho2 of rho^2 exp(S / rho) on a box, compared with a dense direct scan.
  const thermo::GasParams g2(2.0);
  const auto pt = sample_second_derivatives(pressure_tilde(g2), {{0.5, -0.5}, {2.0, 0.5}}, 200);
  double direct = 0.0;
  for (int a = 0; a < 200; ++a) {
    for (int b = 0; b < 200; ++b) {
      direct = std::max(direct, std::abs(thermo::tilde_pressure(0.5 + 1.5 * a / 199, -0.5 + 1.0 * b / 199, g2).hess[0][0]));
    }
  }
  CHECK(pt[0].sup == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("chain commutator equals its direct evaluation and its split") {
  const PeriodicGrid g(1, 512);
  Probe p;
  p.components = {smooth(g, 0.3) + 0.2 * noise(g, 1)};
  p.alphas = {0.5};
  p.g = square();
  p.box = {{-2.0}, {2.0}};
  const double eps = 0.05;
  const auto r = chain_commutator(p, eps);
  const Mollifier m(g, eps);
  const auto& f = p.components[0];
  // grad(F_eps^2) - (F^2) * grad(eta) = 2 F_eps (F * grad eta) - (F^2) * grad eta.
  const auto direct = 2.0 * mollify(f, m) * mollified_gradient(f, m)[0] - mollified_gradient(f * f, m)[0];
  CHECK(lp_norm(r.field[0] - direct, kInf) <= 1e-12 * lp_norm(direct, kInf));
  CHECK(r.split_defect <= 1e-12);
  CHECK(lp_norm(r.term_a[0] + r.term_b[0] - r.field[0], kInf) <= 1e-12 * lp_norm(direct, kInf));
  CHECK(r.norm == doctest::Approx(lp_norm(r.field, 2.0)).epsilon(1e-14));
}

TEST_CASE("affine maps commute with mollification") {
  const PeriodicGrid g(1, 256);
  Probe p;
  p.components = {noise(g, 4), noise(g, 5)};
  p.alphas = {0.3, 0.3};
  p.g = affine({1.5, -0.5}, 2.0);
  p.box = {{-1.0, -1.0}, {1.0, 1.0}};
  const auto r = chain_commutator(p, 0.1);
  CHECK(r.norm <= 1e-12);
  const auto rep = chain_rate_fit(p, besov::dyadic_range(-6, -3));
  CHECK(rep.rate_pass);
}

TEST_CASE("chain commutator rates on Weierstrass probes") {
  const PeriodicGrid g(1, 8192);
  const auto eps = besov::dyadic_range(-10, -4);
  Probe p;
  p.components = {weierstrass_field(0.6, 13, g)};
  p.alphas = {0.6};
  p.g = square();
  p.box = {{-5.0}, {5.0}};
  const auto rep = chain_rate_fit(p, eps);
  CHECK(rep.predicted_slope == doctest::Approx(0.2));
  CHECK(rep.fit.slope >= rep.predicted_slope - 0.1);
  CHECK(rep.bound_pass);
  CHECK(rep.rate_pass);
  CHECK(rep.max_split_defect <= 1e-12);
  CHECK(rep.points.size() == eps.size());
  CHECK_THROWS_AS(chain_rate_fit(p, besov::dyadic_range(-6, -4)), ArgumentError);
}

TEST_CASE("values leaving the box are rejected by cell") {
  const PeriodicGrid g(1, 64);
  Probe p;
  p.components = {ScalarField(g, 1.0)};
  p.components[0][17] = 9.0;
  p.alphas = {0.5};
  p.g = square();
  p.box = {{-2.0}, {2.0}};
  CHECK_THROWS_WITH_AS(require_in_box(p), doctest::Contains("17"), DomainError);
}

TEST_CASE("bilinear commutator: direct form and the difference-quotient identity") {
  const PeriodicGrid g(1, 1024);
  const auto rho = 2.0 * ScalarField(g, 1.0) + 0.5 * noise(g, 8);
  const auto u = noise(g, 9);
  const double eps = 0.02;
  const auto r = bilinear_commutator(rho, u, eps, 3.0);
  const Mollifier m(g, eps);
  const auto direct = mollify(rho, m) * mollify(u, m) - mollify(rho * u, m);
  CHECK(lp_norm(r.field - direct, kInf) <= 1e-13);

  // rho_e u_e - (rho u)_e = (rho_e - rho)(u_e - u) - sum_y w(y) d_y rho d_y u.
  ScalarField rhs = (mollify(rho, m) - rho) * (mollify(u, m) - u);
  for (const auto& t : m.taps()) {
    const LatticeShift h{-t.di, -t.dj};
    rhs = rhs - t.weight * ((shift(rho, h) - rho) * (shift(u, h) - u));
  }
  CHECK(lp_norm(r.field - rhs, kInf) <= 1e-12);

  const auto triple = mollify(rho, m) * mollify(u, m) * mollify(u, m) - mollify(rho * u * u, m);
  CHECK(r.triple_norm == doctest::Approx(lp_norm(triple, 1.0)).epsilon(1e-12));
  CHECK(r.holds);
  CHECK_THROWS_AS(bilinear_commutator(rho, u, eps, 2.0), ArgumentError);
}

TEST_CASE("the constant 1/2 covers rough and smooth pairs") {
  const PeriodicGrid g(1, 2048);
  const auto eps = besov::dyadic_range(-8, -3);
  for (unsigned seed : {1u, 2u, 3u}) {
    const auto rep = bilinear_rate_fit(noise(g, seed), noise(g, seed + 10), eps);
    CHECK(rep.bound_pass);
  }
  const double c = calibrate_bilinear_constant(g, eps);
  CHECK(c > 0.0);
  CHECK(c <= kBilinearC0);
}
