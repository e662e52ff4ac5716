#include "eulerlab/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>

#include "eulerlab/besov.hpp"
#include "eulerlab/commutator.hpp"
#include "eulerlab/conditions.hpp"
#include "eulerlab/errors.hpp"
#include "eulerlab/relentropy.hpp"
#include "eulerlab/solver.hpp"
#include "eulerlab/thermo.hpp"

namespace eulerlab::acceptance {

namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

/// n equispaced points on [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
  return out;
}

// Weierstrass fields and mollifier scans all live on this grid.
constexpr int kFineCells = 8192;
constexpr int kFineLevels = 13;

CriterionResult thermo_identities(const Options& o) {
  CriterionResult r{1, "thermodynamic identities", false, {}};
  double worst = 0.0;
  double fd_h = 0.0, fd_h2 = 0.0;
  const double h = 1e-3;
  for (double gamma : {o.gamma, 2.0}) {
    const thermo::GasParams gp(gamma);
    for (double rho : linspace(0.5, 2.0, 50)) {
      for (double theta : linspace(0.5, 2.0, 50)) {
        const auto g = thermo::verify_gibbs(rho, theta, gp, h);
        const auto g2 = thermo::verify_gibbs(rho, theta, gp, h / 2);
        const auto p = thermo::verify_P2(rho, theta, gp, h);
        const auto p2 = thermo::verify_P2(rho, theta, gp, h / 2);
        worst = std::max({worst, g.analytic.rho_part, g.analytic.theta_part, p.analytic.free_energy,
                          p.analytic.entropy, p.analytic.reference});
        fd_h = std::max({fd_h, g.central_difference.rho_part, g.central_difference.theta_part,
                         p.central_difference.free_energy, p.central_difference.entropy,
                         p.central_difference.reference});
        fd_h2 = std::max({fd_h2, g2.central_difference.rho_part, g2.central_difference.theta_part,
                          p2.central_difference.free_energy, p2.central_difference.entropy,
                          p2.central_difference.reference});
      }
    }
  }
  // Halving h must cut a second-order residual by about 4.
  const double ratio = fd_h / fd_h2;
  r.pass = worst <= 1e-10 && ratio >= 3.0 && ratio <= 5.0;
  r.detail = fmt("max analytic residual %.3g; central-difference residual %.3g -> %.3g (ratio %.2f)",
                 worst, fd_h, fd_h2, ratio);
  return r;
}

CriterionResult convexity(const Options& o) {
  CriterionResult r{2, "convexity of tilde pressure", false, {}};
  double worst = std::numeric_limits<double>::infinity();
  double at_rho = 0.0, at_s = 0.0;
  for (double gamma : {o.gamma, 2.0}) {
    const thermo::GasParams gp(gamma);
    for (double rho : linspace(0.25, 4.0, 50)) {
      for (double s : linspace(-2.0, 2.0, 50)) {
        const double ev = thermo::min_eigenvalue(thermo::tilde_pressure(rho, s, gp).hess);
        if (ev < worst) {
          worst = ev;
          at_rho = rho;
          at_s = s;
        }
      }
    }
  }
  r.pass = worst >= -1e-10;
  r.detail = fmt("min Hessian eigenvalue %.3g at (rho, S) = (%.3g, %.3g)", worst, at_rho, at_s);
  return r;
}

CriterionResult besov_machinery(const Options&) {
  CriterionResult r{3, "Besov semi-norms and mollifier estimates", false, {}};
  const PeriodicGrid g(1, kFineCells);
  const auto eps = besov::dyadic_range(-10, -4);
  bool ok = true;
  std::string detail;
  for (double alpha : {0.4, 0.6, 0.8}) {
    const auto w = weierstrass_field(alpha, kFineLevels, g);
    const auto fit = besov::fit_regularity(w, 3.0, 1, 256);
    const auto m = besov::verify_mollifier_rates(w, alpha, 3.0, eps);
    const auto all = [](const std::vector<bool>& v) {
      return std::all_of(v.begin(), v.end(), [](bool b) { return b; });
    };
    const bool fit_ok = !fit.degenerate && std::abs(fit.fitted_alpha - alpha) <= 0.1;
    const bool est_ok = all(m.holds_smoothing) && all(m.holds_increment) && all(m.holds_gradient);
    ok = ok && fit_ok && est_ok;
    detail += fmt("%salpha %.1f fit %.3f estimates %s", detail.empty() ? "" : "; ", alpha,
                  fit.fitted_alpha, est_ok ? "hold" : "VIOLATED");
  }
  r.pass = ok;
  r.detail = detail;
  return r;
}

CriterionResult chain_rates(const Options&) {
  CriterionResult r{4, "chain-rule commutator rates", false, {}};
  const PeriodicGrid g(1, kFineCells);
  const auto eps = besov::dyadic_range(-10, -4);
  using namespace commutator;
  Probe sq;
  sq.components = {weierstrass_field(0.6, kFineLevels, g)};
  sq.alphas = {0.6};
  sq.g = square();
  sq.box = {{-5.0}, {5.0}};
  sq.p = 4.0;
  Probe pr;
  pr.components = {weierstrass_field(0.4, kFineLevels, g), weierstrass_field(0.8, kFineLevels, g, 0.3)};
  pr.alphas = {0.4, 0.8};
  pr.g = product();
  pr.box = {{-5.0, -5.0}, {5.0, 5.0}};
  pr.p = 4.0;
  bool ok = true;
  std::string detail;
  for (const Probe* p : {&sq, &pr}) {
    const auto rep = chain_rate_fit(*p, eps);
    const bool split_ok = rep.max_split_defect <= 1e-12;
    ok = ok && rep.rate_pass && rep.bound_pass && split_ok;
    detail += fmt("%s%s slope %.3f (need >= %.3f) bound %s split %.2g", detail.empty() ? "" : "; ",
                  p->g.name.c_str(), rep.fit.slope, rep.predicted_slope - 0.1,
                  rep.bound_pass ? "holds" : "VIOLATED", rep.max_split_defect);
  }
  r.pass = ok;
  r.detail = detail;
  return r;
}

CriterionResult bilinear_rates(const Options&) {
  CriterionResult r{5, "bilinear and triple commutators", false, {}};
  const PeriodicGrid g(1, kFineCells);
  const auto eps = besov::dyadic_range(-10, -4);
  const double alpha = 0.4;
  const auto rho = 5.0 * ScalarField(g, 1.0) + weierstrass_field(alpha, kFineLevels, g);
  const auto u = weierstrass_field(alpha, kFineLevels, g, 0.25);
  const auto rep = commutator::bilinear_rate_fit(rho, u, eps, 3.0);
  const double need2 = 2.0 * alpha - 1.0 - 0.1;
  const double need3 = 3.0 * alpha - 1.0 - 0.1;
  r.pass = rep.fit.slope >= need2 && rep.fit_triple.slope >= need3 && rep.bound_pass;
  r.detail = fmt("bilinear slope %.3f (need >= %.2f), triple slope %.3f (need >= %.2f), "
                 "difference-quotient bound %s",
                 rep.fit.slope, need2, rep.fit_triple.slope, need3,
                 rep.bound_pass ? "holds" : "VIOLATED");
  return r;
}

CriterionResult relative_entropy(const Options& o) {
  CriterionResult r{6, "relative entropy coercivity", false, {}};
  const thermo::GasParams gp(o.gamma);
  const relentropy::StateBox box;
  constexpr std::size_t kSamples = 100000;
  const std::uint64_t skip = 2 * kSamples * o.seed;
  const auto c = relentropy::estimate_coercivity(box, gp, kSamples, skip);

  // Exact zero at equality when the temperature is given; the (rho, S) path
  // goes through theta_of and is held to rounding level.
  double at_equality = 0.0, via_entropy = 0.0;
  for (double rho : linspace(0.5, 2.0, 7)) {
    for (double theta : linspace(0.5, 2.0, 7)) {
      thermo::PrimitiveState s{rho, {0.3, -0.2}, theta};
      at_equality = std::max(at_equality, std::abs(relentropy::density(s, s, gp).total));
      via_entropy =
          std::max(via_entropy, std::abs(relentropy::density(thermo::to_entropic(s, gp), s, gp).total));
    }
  }

  double min_e = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  relentropy::sobol_points(relentropy::coercivity_dimension(1), kSamples, skip + kSamples,
                           [&](std::span<const double> q) {
                             const auto [a, b] = relentropy::sample_pair(q, box, c.velocity_range, 1);
                             const auto gap = relentropy::coercivity_gap(a, b, box, c, gp);
                             min_e = std::min(min_e, gap.relative_entropy);
                             min_gap = std::min(min_gap, gap.gap);
                           });
  r.pass = at_equality == 0.0 && via_entropy <= 1e-14 && min_e >= 0.0 && min_gap >= 0.0 && c.constant > 0.0;
  r.detail = fmt("C^ = %.4g (sampled min %.4g); |E| at equality %.3g (via entropy %.3g); "
                 "on %zu fresh samples min E %.3g, min gap %.3g",
                 c.constant, c.sampled_min, at_equality, via_entropy, kSamples, min_e, min_gap);
  return r;
}

CriterionResult solver_gate(const Options&) {
  CriterionResult r{7, "finite-volume solver", false, {}};
  solver::SolverConfig cfg;
  cfg.cells = 1024;
  cfg.t_end = 0.2;
  cfg.init.id = "sod";
  cfg.snapshot_count = 40;
  const auto tr = solver::run(cfg);
  const double gamma = cfg.params.gamma();
  const solver::RiemannState left{1.0, 0.0, 1.0}, right{0.125, 0.0, 0.1};
  const solver::ExactRiemann main(left, right, gamma), seam(right, left, gamma);

  const auto& g = tr.grid;
  const auto& last = tr.snapshots.back();
  double l1 = 0.0;
  for (int i = 0; i < g.cells_per_dim(); ++i) {
    const double x = g.center(i);
    l1 += std::abs(last.rho[static_cast<std::size_t>(i)] -
                   solver::periodic_riemann_exact(main, seam, x, last.t).rho) *
          g.cell_width();
  }

  double drift = 0.0;
  const double m0 = integral(tr.snapshots.front().rho);
  const double e0 = integral(tr.snapshots.front().energy);
  for (const auto& s : tr.snapshots) {
    drift = std::max({drift, std::abs(integral(s.rho) - m0) / m0,
                      std::abs(integral(s.energy) - e0) / e0});
  }

  // Entropy production on a family of nonnegative bumps, plus one riding the shock.
  const double dx = g.cell_width();
  const double c_pr = std::sqrt(gamma * right.p / right.rho);
  const double shock_speed =
      right.u + c_pr * std::sqrt((gamma + 1.0) / (2.0 * gamma) * main.p_star() / right.p +
                                 (gamma - 1.0) / (2.0 * gamma));
  const double t0 = 0.1, rt = 0.08, rx = 0.05;
  double min_prod = std::numeric_limits<double>::infinity();
  for (int k = -9; k <= 9; ++k) {
    min_prod = std::min(min_prod, solver::entropy_residual(tr, solver::bump_test(t0, rt, 0.1 * k, rx)));
  }
  const double at_shock = solver::entropy_residual(tr, solver::bump_test(t0, rt, shock_speed * t0, rx));
  min_prod = std::min(min_prod, at_shock);

  r.pass = l1 < 0.05 && drift <= 1e-10 && min_prod >= -dx && at_shock > 0.0;
  r.detail = fmt("L1 density error %.4f; conservation drift %.2g; entropy production min %.3g "
                 "(floor %.3g), at shock %.3g",
                 l1, drift, min_prod, -dx, at_shock);
  return r;
}

CriterionResult gronwall_gate(const Options&) {
  CriterionResult r{8, "Gronwall stability under refinement", false, {}};
  const auto go = [](int n) {
    solver::SolverConfig c;
    c.cells = n;
    c.t_end = 1.0;
    c.init.id = "rarefaction";
    c.snapshot_count = 40;
    return solver::run(c);
  };
  const auto t256 = go(256), t512 = go(512), t1024 = go(1024);
  relentropy::MonitorOptions mo;
  mo.sigma = 0.1;
  const auto coarse = relentropy::gronwall_monitor(t256, t512, mo);
  const auto fine = relentropy::gronwall_monitor(t512, t1024, mo);
  const double shrink = coarse.terminal_integral() / fine.terminal_integral();
  r.pass = coarse.cumulative_pass && fine.cumulative_pass && shrink >= 1.5;
  r.detail = fmt("cumulative bound %s/%s; terminal integral %.3g -> %.3g (shrink %.2f); "
                 "per-interval K %s/%s, J1 %s/%s (diagnostic)",
                 coarse.cumulative_pass ? "holds" : "VIOLATED",
                 fine.cumulative_pass ? "holds" : "VIOLATED", coarse.terminal_integral(),
                 fine.terminal_integral(), shrink, coarse.interval_pass ? "ok" : "exceeded",
                 fine.interval_pass ? "ok" : "exceeded", coarse.j1_pass ? "ok" : "exceeded",
                 fine.j1_pass ? "ok" : "exceeded");
  return r;
}

CriterionResult oslip_gate(const Options&) {
  CriterionResult r{9, "one-sided Lipschitz constants", false, {}};
  const PeriodicGrid g(1, 1024);
  const auto dirs = conditions::default_directions(1);
  const auto basis = conditions::default_basis();
  double worst = 0.0;
  for (int k = 0; k <= 18; ++k) {
    const double tau = 0.1 + 0.05 * k;
    const auto w = conditions::oslip_weak_min_C(conditions::fan_field(g, tau), dirs, basis);
    worst = std::max(worst, std::abs(w.min_C * tau - 1.0));
  }

  constexpr int kSamples = 100001;
  std::vector<double> t(kSamples), flat(kSamples), inv(kSamples);
  for (int k = 0; k < kSamples; ++k) {
    t[k] = 0.1 + 0.9 * k / (kSamples - 1);
    flat[k] = 0.7;
    inv[k] = 1.0 / t[k];
  }
  const double l1_flat = conditions::l1_report(t, flat, 0.1, 1.0).l1_norm;
  const double l1_inv = conditions::l1_report(t, inv, 0.1, 1.0).l1_norm;
  const double err_flat = std::abs(l1_flat - 0.7 * 0.9);
  const double err_inv = std::abs(l1_inv - std::log(10.0));
  r.pass = worst <= 0.1 && err_flat <= 1e-6 && err_inv <= 1e-6;
  r.detail = fmt("fan max |tau min_C - 1| = %.4f; L1 errors %.2g (constant), %.2g (1/tau)", worst,
                 err_flat, err_inv);
  return r;
}

using Gate = CriterionResult (*)(const Options&);
constexpr Gate kGates[kCriterionCount] = {thermo_identities, convexity,    besov_machinery,
                                          chain_rates,       bilinear_rates, relative_entropy,
                                          solver_gate,       gronwall_gate, oslip_gate};
constexpr const char* kNames[kCriterionCount] = {
    "thermodynamic identities",  "convexity of tilde pressure",
    "Besov semi-norms and mollifier estimates", "chain-rule commutator rates",
    "bilinear and triple commutators", "relative entropy coercivity",
    "finite-volume solver",      "Gronwall stability under refinement",
    "one-sided Lipschitz constants"};

}  // namespace

CriterionResult run_criterion(int id, const Options& options) {
  if (id < 1 || id > kCriterionCount) {
    throw ArgumentError("criterion id must lie in 1.." + std::to_string(kCriterionCount));
  }
  const auto start = std::chrono::steady_clock::now();
  CriterionResult r;
  try {
    r = kGates[id - 1](options);
  } catch (const std::exception& e) {
    r = CriterionResult{id, kNames[id - 1], false, std::string("error: ") + e.what()};
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::vector<CriterionResult> run_all(const Options& options) {
  std::vector<CriterionResult> out;
  for (int id = 1; id <= kCriterionCount; ++id) out.push_back(run_criterion(id, options));
  return out;
}

std::string format_line(const CriterionResult& r) {
  return "criterion " + std::to_string(r.id) + (r.pass ? " PASS " : " FAIL ") + r.name + ": " +
         r.detail;
}

}  // namespace eulerlab::acceptance
