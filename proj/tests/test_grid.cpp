// Periodic grids, norms, shifts, mollification and the Weierstrass synthesiser.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>
#include <numbers>
#include <random>

#include "eulerlab/errors.hpp"
#include "eulerlab/grid.hpp"

using namespace eulerlab;
using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

namespace {

ScalarField random_field(const PeriodicGrid& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

ScalarField sine(const PeriodicGrid& g) {
  return ScalarField::from_function(g, [](double x, double) { return std::sin(pi * x); });
}

/// Continuous multiplier int eta_eps(y) cos(pi y) dy of the normalised bump,
/// by fine midpoint quadrature (independent of the lattice kernel).
double bump_multiplier(double eps) {
  const int n = 200000;
  double num = 0.0, den = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = -1.0 + (k + 0.5) * 2.0 / n;
    const double b = std::exp(-1.0 / (1.0 - z * z));
    num += b * std::cos(pi * eps * z);
    den += b;
  }
  return num / den;
}

}  // namespace

TEST_CASE("grid geometry and indexing") {
  const PeriodicGrid g(2, 8);
  CHECK(g.cell_width() == 0.25);
  CHECK(g.cell_count() == 64);
  CHECK(g.cell_volume() == 0.0625);
  CHECK(g.center(0) == -0.875);
  CHECK(g.index(-1, 0) == g.index(7, 0));
  CHECK(g.index(8, 9) == g.index(0, 1));
  const auto c = g.coords(g.index(3, 5));
  CHECK(c[0] == 3);
  CHECK(c[1] == 5);
  CHECK_THROWS_AS(PeriodicGrid(3, 8), ArgumentError);
  CHECK_THROWS_AS(PeriodicGrid(1, 3), ArgumentError);
}

TEST_CASE("L^p norms") {
  for (int dims : {1, 2}) {
    const PeriodicGrid g(dims, 16);
    const ScalarField one(g, 1.0);
    CHECK(lp_norm(one, 1.0) == doctest::Approx(std::pow(2.0, dims)).epsilon(1e-14));
    CHECK(lp_norm(one, kInf) == 1.0);
    CHECK(integral(one) == doctest::Approx(std::pow(2.0, dims)).epsilon(1e-14));
  }
  const PeriodicGrid g(1, 64);
  CHECK_THROWS_AS(lp_norm(ScalarField(g, 1.0), 0.5), DomainError);
  // |sin(pi x)|_2^2 over [-1, 1] is exactly 1 for the midpoint rule.
  CHECK(lp_norm(sine(g), 2.0) == doctest::Approx(1.0).epsilon(1e-13));
  const auto f = random_field(g, 3);
  CHECK(lp_norm(f, 3.0) == lp_norm(f, 3.0));  // fixed summation order
  CHECK(lp_norm(f, 2.0, window_mask(g, -0.5, 0.5, 0.0)) < lp_norm(f, 2.0));
}

TEST_CASE("shifts are periodic isometries") {
  const PeriodicGrid g(2, 16);
  const auto f = random_field(g, 7);
  const auto id = shift(f, {0, 0});
  CHECK(std::equal(id.values().begin(), id.values().end(), f.values().begin()));
  const auto full = shift(f, {16, -16});
  CHECK(std::equal(full.values().begin(), full.values().end(), f.values().begin()));
  for (double p : {1.0, 2.0, 3.5, kInf}) {
    const auto s = shift(f, {3, -5});
    CHECK(lp_norm(s, p) == doctest::Approx(lp_norm(f, p)).epsilon(1e-14));
    CHECK(lp_norm(s - f, p) <= 2 * lp_norm(f, p));
  }
  CHECK(shift(f, {1, 0}).at(2, 3) == f.at(3, 3));
  const auto snapped = shift_by(f, {0.3, 0.0});
  CHECK(snapped.snapped);
  CHECK(snapped.applied == LatticeShift{2, 0});
  CHECK_FALSE(shift_by(f, {0.25, 0.125}).snapped);
}

TEST_CASE("mollifier kernel invariants") {
  for (int dims : {1, 2}) {
    const PeriodicGrid g(dims, 64);
    const Mollifier m(g, 0.2);
    double mass = 0.0;
    for (const auto& t : m.taps()) {
      mass += t.weight;
      CHECK(t.weight >= 0.0);
      CHECK(std::hypot(t.di, t.dj) * g.cell_width() < 0.2);
    }
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  }
  const PeriodicGrid g(1, 64);
  CHECK_THROWS_AS(Mollifier(g, 0.03), ResolutionError);
  CHECK_NOTHROW(Mollifier(g, 2 * g.cell_width()));
}

TEST_CASE("mollification: fixed points, mass, contraction, commuting with shifts") {
  for (int dims : {1, 2}) {
    const PeriodicGrid g(dims, 32);
    const Mollifier m(g, 0.25);
    const auto c = mollify(ScalarField(g, 3.5), m);
    for (std::size_t k = 0; k < c.size(); ++k) CHECK(c[k] == doctest::Approx(3.5).epsilon(1e-14));
    const auto f = random_field(g, 11 + dims);
    const auto fe = mollify(f, m);
    CHECK(integral(fe) == doctest::Approx(integral(f)).epsilon(1e-12).scale(1.0));
    for (double p : {1.0, 2.0, 4.0, kInf}) CHECK(lp_norm(fe, p) <= lp_norm(f, p) + 1e-12);
    const LatticeShift h{5, dims == 2 ? -3 : 0};
    const auto a = shift(mollify(f, m), h);
    const auto b = mollify(shift(f, h), m);
    CHECK(lp_norm(a - b, kInf) == 0.0);
  }
}

TEST_CASE("mollifying a sine matches the continuous convolution, error ~ eps^2") {
  const PeriodicGrid g(1, 4096);
  const auto f = sine(g);
  std::vector<double> eps, err;
  for (double e : {0.4, 0.2, 0.1, 0.05}) {
    const auto fe = mollify(f, Mollifier(g, e));
    const auto oracle = bump_multiplier(e) * f;
    CHECK(lp_norm(fe - oracle, kInf) < 1e-5);
    eps.push_back(e);
    err.push_back(lp_norm(fe - f, 2.0));
  }
  for (std::size_t k = 1; k < eps.size(); ++k) {
    const double slope = std::log(err[k - 1] / err[k]) / std::log(eps[k - 1] / eps[k]);
    CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
  }
}

TEST_CASE("mollified gradient approximates the derivative") {
  const PeriodicGrid g(1, 2048);
  const auto f = sine(g);
  const Mollifier m(g, 0.05);
  const auto d = mollified_gradient(f, m);
  const auto expect = (bump_multiplier(0.05) * pi) *
                      ScalarField::from_function(g, [](double x, double) { return std::cos(pi * x); });
  CHECK(lp_norm(d[0] - expect, kInf) < 1e-3);
}

TEST_CASE("grad and div") {
  const PeriodicGrid g(2, 16);
  const auto z = grad(ScalarField(g, 2.0));
  CHECK(lp_norm(z, kInf) == 0.0);
  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const PeriodicGrid h(1, n);
    const auto lap = div(grad(sine(h)));
    errs.push_back(lp_norm(lap + pi * pi * sine(h), kInf));
  }
  CHECK(std::log2(errs[0] / errs[1]) == doctest::Approx(2.0).epsilon(0.05));
  CHECK(std::log2(errs[1] / errs[2]) == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("Weierstrass field") {
  const PeriodicGrid g(1, 1024);
  for (double alpha : {0.3, 0.6, 1.0}) {
    const auto w = weierstrass_field(alpha, 10, g);
    CHECK(lp_norm(w, kInf) <= 1.0 / (1.0 - std::pow(2.0, -alpha)));
  }
  // Direct evaluation oracle.
  const auto w = weierstrass_field(0.5, 4, g, 0.1);
  const double x = g.center(100);
  double direct = 0.0;
  for (int k = 0; k <= 4; ++k) direct += std::pow(2.0, -0.5 * k) * std::cos(std::ldexp(pi, k) * (x + 0.1));
  CHECK(w[100] == doctest::Approx(direct).epsilon(1e-13));
  const PeriodicGrid g2(2, 32);
  const auto w2 = weierstrass_field(0.5, 5, g2);
  const auto w1 = weierstrass_field(0.5, 5, PeriodicGrid(1, 32));
  CHECK(w2.at(3, 7) == doctest::Approx(w1[3] * w1[7]).epsilon(1e-14));
  CHECK_THROWS_AS(weierstrass_field(0.0, 4, g), ArgumentError);
}

TEST_CASE("restriction and window masks") {
  const PeriodicGrid fine(1, 64), coarse(1, 16);
  const auto f = random_field(fine, 5);
  const auto r = restrict_average(f, coarse);
  CHECK(integral(r) == doctest::Approx(integral(f)).epsilon(1e-13).scale(1.0));
  CHECK(r[0] == doctest::Approx((f[0] + f[1] + f[2] + f[3]) / 4).epsilon(1e-15));
  CHECK_THROWS_AS(restrict_average(f, PeriodicGrid(1, 24)), ArgumentError);
  const auto mask = window_mask(coarse, -0.5, 0.5, 0.125);
  int on = 0;
  for (auto m : mask) on += m;
  CHECK(on == 6);
}

TEST_CASE("field CSV round trip is bit exact") {
  const auto dir = std::filesystem::temp_directory_path() / "eulerlab_grid_test";
  std::filesystem::create_directories(dir);
  for (int dims : {1, 2}) {
    const PeriodicGrid g(dims, 8);
    const std::vector<ScalarField> fields = {random_field(g, 1), random_field(g, 2)};
    const auto path = (dir / ("f" + std::to_string(dims) + ".csv")).string();
    write_fields_csv(path, {"u", "v"}, fields, "hello");
    const auto t = read_fields_csv(path);
    CHECK(t.grid == g);
    CHECK(t.comment == "hello");
    REQUIRE(t.names.size() == 2);
    CHECK(t.names[1] == "v");
    for (int c = 0; c < 2; ++c) {
      CHECK(std::equal(t.fields[c].values().begin(), t.fields[c].values().end(),
                       fields[c].values().begin()));
    }
  }
  CHECK_THROWS_AS(read_fields_csv((dir / "missing.csv").string()), ArgumentError);
  CHECK(format_double(0.1) == "0.10000000000000001");
}
