// Semi-norms, rate fits and the three mollifier estimates.

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "eulerlab/besov.hpp"
#include "eulerlab/errors.hpp"

using namespace eulerlab;
using namespace eulerlab::besov;
using std::numbers::pi;

namespace {

ScalarField sine(const PeriodicGrid& g) {
  return ScalarField::from_function(g, [](double x, double) { return std::sin(pi * x); });
}

}  // namespace

TEST_CASE("shift generators") {
  const PeriodicGrid g1(1, 64);
  const auto dy = dyadic_shifts(g1);
  CHECK(dy.size() == 5);  // 1..16 cells; periodic increments are even in h
  const auto dense = dense_shifts(g1, 16);
  CHECK(dense.size() == 16);
  const PeriodicGrid g2(2, 32);
  for (const auto& h : ball_shifts(g2, 0.2)) {
    CHECK(h.length(g2) <= 0.2 + 1e-12);
    CHECK_FALSE((h.di == 0 && h.dj == 0));
  }
  CHECK_FALSE(ball_shifts(g2, 0.2).empty());
}

TEST_CASE("increment norms of a sine match the closed form") {
  const PeriodicGrid g(1, 256);
  const auto f = sine(g);
  const ShiftSet shifts = {{1, 0}, {4, 0}, {-16, 0}, {64, 0}};
  const auto inc = increment_norms(f, 2.0, shifts);
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    const double h = shifts[k].length(g);
    // |sin(pi(x+h)) - sin(pi x)|_2 = 2 |sin(pi h / 2)| |cos|_2 = 2 |sin(pi h / 2)|.
    CHECK(inc[k] == doctest::Approx(2 * std::abs(std::sin(pi * h / 2))).epsilon(1e-12));
  }
  // beta = 1 semi-norm is attained at the shortest shift: 2 sin(pi dx / 2) / dx.
  const double dx = g.cell_width();
  CHECK(seminorm(f, 1.0, 2.0, shifts) == doctest::Approx(2 * std::sin(pi * dx / 2) / dx).epsilon(1e-12));
  CHECK(seminorm(ScalarField(g, 4.0), 0.5, 3.0, shifts) == 0.0);
  CHECK_THROWS_AS(seminorm(f, 0.5, 2.0, {}), ArgumentError);
  CHECK_THROWS_AS(seminorm(f, 0.5, 2.0, {{0, 0}}), ArgumentError);
  CHECK_THROWS_AS(seminorm(f, 1.5, 2.0, shifts), ArgumentError);
}

TEST_CASE("log-log fit recovers an exact power law") {
  std::vector<double> x, y;
  for (int k = 0; k < 9; ++k) {
    x.push_back(std::ldexp(1.0, -k));
    y.push_back(3.0 * std::pow(x.back(), 0.7));
  }
  for (std::size_t trim : {std::size_t{0}, kFitTrim}) {
    const auto f = fit_log_log(x, y, trim);
    CHECK(f.slope == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(std::exp(f.intercept) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.residual < 1e-12);
    CHECK(f.last - f.first == 9 - 2 * trim);
  }
  // Too few points for the trim: nothing is dropped.
  const std::vector<double> x4(x.begin(), x.begin() + 4), y4(y.begin(), y.begin() + 4);
  CHECK(fit_log_log(x4, y4, kFitTrim).last - fit_log_log(x4, y4, kFitTrim).first == 4);
  CHECK_THROWS_AS(fit_log_log(std::vector<double>{1, 2}, std::vector<double>{1, 2}, 0), ArgumentError);
}

TEST_CASE("regularity of Weierstrass fields") {
  const PeriodicGrid g(1, 8192);
  for (double alpha : {0.4, 0.6, 0.8}) {
    const auto fit = fit_regularity(weierstrass_field(alpha, 13, g), 3.0, 1, 256);
    CHECK(fit.fitted_alpha == doctest::Approx(alpha).epsilon(0.05 / alpha));
  }
  // Smooth fields look Lipschitz.
  CHECK(fit_regularity(sine(g), 3.0, 1, 256).fitted_alpha == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::isinf(fit_regularity(ScalarField(g, 1.0), 3.0, 1, 256).fitted_alpha));
  CHECK_THROWS_AS(fit_regularity(sine(g), 3.0, 1, 4), ArgumentError);
  CHECK_THROWS_AS(fit_regularity(sine(g), 3.0, 3, 64), ArgumentError);
  CHECK_THROWS_AS(fit_regularity(sine(g), 3.0, 1, 4096), ArgumentError);
}

TEST_CASE("mollifier estimates hold one-sidedly") {
  const PeriodicGrid g(1, 8192);
  const auto eps = dyadic_range(-10, -4);
  CHECK(eps.size() == 7);
  CHECK(eps.front() == std::ldexp(1.0, -10));
  for (double alpha : {0.4, 0.8}) {
    const auto m = verify_mollifier_rates(weierstrass_field(alpha, 13, g), alpha, 3.0, eps);
    for (std::size_t k = 0; k < eps.size(); ++k) {
      CHECK(m.holds_smoothing[k]);
      CHECK(m.holds_increment[k]);
      CHECK(m.holds_gradient[k]);
      CHECK(m.smoothing_error[k] <= m.seminorm * std::pow(eps[k], alpha));
    }
    CHECK(m.slope_smoothing.slope == doctest::Approx(alpha).epsilon(0.15 / alpha));
    CHECK(m.slope_gradient.slope == doctest::Approx(alpha - 1).epsilon(0.15 / (1 - alpha)));
  }
  CHECK_THROWS_AS(verify_mollifier_rates(sine(g), 0.5, 3.0, dyadic_range(-13, -4)), ResolutionError);
}

TEST_CASE("time semi-norm of a linear-in-time sequence") {
  const PeriodicGrid g(1, 32);
  const auto base = sine(g);
  std::vector<ScalarField> snaps;
  const double dt = 0.1;
  for (int k = 0; k < 6; ++k) snaps.push_back((k * dt) * base);
  const std::vector<int> lags = {1, 2, 3};
  // Lag 1 sees the longest time window: |g|_2 * ((6 - 1) dt)^(1/2).
  CHECK(time_seminorm(snaps, dt, 1.0, 2.0, lags) ==
        doctest::Approx(lp_norm(base, 2.0) * std::sqrt(5 * dt)).epsilon(1e-12));
  const std::vector<ScalarField> still(4, base);
  CHECK(time_seminorm(still, dt, 0.5, 2.0, lags) == 0.0);
  CHECK_THROWS_AS(time_seminorm(still, dt, 0.5, 2.0, std::vector<int>{4}), ArgumentError);
}

TEST_CASE("report CSV layout") {
  const PeriodicGrid g(1, 1024);
  BesovReport r;
  r.p = 3.0;
  r.beta_grid = {0.5};
  r.shift_set = dense_shifts(g, 8);
  r.seminorms = {seminorm(sine(g), 0.5, 3.0, r.shift_set)};
  r.fit = fit_regularity(sine(g), 3.0, 1, 16);
  const auto path = (std::filesystem::temp_directory_path() / "eulerlab_besov.csv").string();
  write_report_csv(path, r, "eulerlab test");
  std::ifstream in(path);
  std::string first, second;
  std::getline(in, first);
  std::getline(in, second);
  CHECK(first == "# eulerlab test");
  CHECK(second == "quantity,beta_or_eps,value,slope,residual");
}
