#include "eulerlab/commutator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "eulerlab/errors.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab::commutator {

Nonlinearity square() {
  Nonlinearity g;
  g.name = "square";
  g.arity = 1;
  g.value = [](std::span<const double> y) { return y[0] * y[0]; };
  g.gradient = [](std::span<const double> y, std::span<double> out) { out[0] = 2.0 * y[0]; };
  g.hessian = [](std::span<const double>, std::span<double> out) { out[0] = 2.0; };
  return g;
}

Nonlinearity product() {
  Nonlinearity g;
  g.name = "product";
  g.arity = 2;
  g.value = [](std::span<const double> y) { return y[0] * y[1]; };
  g.gradient = [](std::span<const double> y, std::span<double> out) {
    out[0] = y[1];
    out[1] = y[0];
  };
  g.hessian = [](std::span<const double>, std::span<double> out) {
    out[0] = 0.0;
    out[1] = 1.0;
    out[2] = 1.0;
    out[3] = 0.0;
  };
  return g;
}

Nonlinearity affine(std::vector<double> coeffs, double c0) {
  if (coeffs.empty()) throw ArgumentError("affine map needs at least one coefficient");
  Nonlinearity g;
  g.name = "affine";
  g.arity = static_cast<int>(coeffs.size());
  g.value = [coeffs, c0](std::span<const double> y) {
    double v = c0;
    for (std::size_t j = 0; j < coeffs.size(); ++j) v += coeffs[j] * y[j];
    return v;
  };
  g.gradient = [coeffs](std::span<const double>, std::span<double> out) {
    std::copy(coeffs.begin(), coeffs.end(), out.begin());
  };
  g.hessian = [](std::span<const double>, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
  };
  return g;
}

Nonlinearity pressure_tilde(const thermo::GasParams& params) {
  Nonlinearity g;
  g.name = "pressure_tilde";
  g.arity = 2;
  g.value = [params](std::span<const double> y) {
    return thermo::tilde_pressure(y[0], y[1], params).value;
  };
  g.gradient = [params](std::span<const double> y, std::span<double> out) {
    const auto t = thermo::tilde_pressure(y[0], y[1], params);
    out[0] = t.grad[0];
    out[1] = t.grad[1];
  };
  g.hessian = [params](std::span<const double> y, std::span<double> out) {
    const auto t = thermo::tilde_pressure(y[0], y[1], params);
    out[0] = t.hess[0][0];
    out[1] = t.hess[0][1];
    out[2] = t.hess[1][0];
    out[3] = t.hess[1][1];
  };
  return g;
}

Nonlinearity by_name(const std::string& name, const thermo::GasParams& params) {
  if (name == "square") return square();
  if (name == "product") return product();
  if (name == "pressure_tilde") return pressure_tilde(params);
  throw ArgumentError("unknown nonlinearity '" + name +
                      "' (expected square, product or pressure_tilde)");
}

std::vector<SecondDerivativeBound> sample_second_derivatives(const Nonlinearity& g, const Box& box,
                                                             int points_per_dim) {
  const int k = g.arity;
  if (static_cast<int>(box.lo.size()) != k || static_cast<int>(box.hi.size()) != k) {
    throw ArgumentError("box dimension does not match the arity of " + g.name);
  }
  if (points_per_dim < 2) throw ArgumentError("need at least two sample points per axis");
  for (int j = 0; j < k; ++j) {
    if (!(box.lo[j] <= box.hi[j])) throw ArgumentError("box has lo > hi");
  }
  std::vector<SecondDerivativeBound> out;
  for (int i = 0; i < k; ++i) {
    for (int j = i; j < k; ++j) out.push_back({i, j, 0.0});
  }
  std::size_t total = 1;
  for (int j = 0; j < k; ++j) total *= static_cast<std::size_t>(points_per_dim);
  std::vector<double> y(k), h(static_cast<std::size_t>(k * k));
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t rem = n;
    for (int j = 0; j < k; ++j) {
      const auto q = rem % static_cast<std::size_t>(points_per_dim);
      rem /= static_cast<std::size_t>(points_per_dim);
      y[j] = box.lo[j] + (box.hi[j] - box.lo[j]) * static_cast<double>(q) / (points_per_dim - 1);
    }
    g.hessian(y, h);
    for (auto& b : out) b.sup = std::max(b.sup, std::abs(h[static_cast<std::size_t>(b.i * k + b.j)]));
  }
  return out;
}

void require_in_box(const Probe& probe) {
  const auto& comps = probe.components;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    for (std::size_t c = 0; c < comps[j].size(); ++c) {
      const double v = comps[j][c];
      if (!(v >= probe.box.lo[j] && v <= probe.box.hi[j])) {
        throw DomainError("component " + std::to_string(j) + " leaves the declared set K at cell " +
                          std::to_string(c) + " (value " + format_double(v) + ")");
      }
    }
  }
}

namespace {

void validate(const Probe& probe) {
  const auto k = static_cast<std::size_t>(probe.g.arity);
  if (probe.components.size() != k) {
    throw ArgumentError("probe has " + std::to_string(probe.components.size()) +
                        " components but " + probe.g.name + " takes " + std::to_string(k));
  }
  if (probe.alphas.size() != k) throw ArgumentError("one regularity exponent per component");
  if (!(probe.p >= 2.0)) throw ArgumentError("commutator probes need p >= 2");
  for (const auto& c : probe.components) {
    if (c.grid() != probe.components.front().grid()) {
      throw ArgumentError("probe components live on different grids");
    }
  }
  require_in_box(probe);
}

double lemma_bound(const Probe& probe, double eps, std::span<const double> seminorms,
                   std::span<const SecondDerivativeBound> bounds) {
  double total = 0.0;
  for (const auto& b : bounds) {
    if (b.sup == 0.0) continue;
    const double order = probe.alphas[b.i] + probe.alphas[b.j] - 1.0;
    total += std::pow(eps, order) * b.sup * seminorms[b.i] * seminorms[b.j];
  }
  return total;
}

}  // namespace

std::vector<double> measured_seminorms(const Probe& probe) {
  std::vector<double> out;
  for (std::size_t j = 0; j < probe.components.size(); ++j) {
    const auto& f = probe.components[j];
    const auto shifts = besov::dense_shifts(f.grid(), f.grid().cells_per_dim() / 4);
    out.push_back(besov::seminorm(f, probe.alphas[j], probe.p, shifts));
  }
  return out;
}

ChainResult chain_commutator(const Probe& probe, double eps, std::span<const double> seminorms,
                             std::span<const SecondDerivativeBound> bounds) {
  validate(probe);
  const auto& grid = probe.components.front().grid();
  const int k = probe.g.arity;
  const int dims = grid.dims();
  const Mollifier m(grid, eps);

  std::vector<double> own_seminorms;
  std::vector<SecondDerivativeBound> own_bounds;
  if (seminorms.empty()) {
    own_seminorms = measured_seminorms(probe);
    seminorms = own_seminorms;
  }
  if (bounds.empty()) {
    own_bounds = sample_second_derivatives(probe.g, probe.box);
    bounds = own_bounds;
  }

  std::vector<ScalarField> smooth;
  std::vector<VectorField> dsmooth;
  for (const auto& f : probe.components) {
    smooth.push_back(mollify(f, m));
    dsmooth.push_back(mollified_gradient(f, m));
  }
  ScalarField composed(grid);
  {
    std::vector<double> y(k);
    for (std::size_t c = 0; c < composed.size(); ++c) {
      for (int j = 0; j < k; ++j) y[j] = probe.components[j][c];
      composed[c] = probe.g.value(y);
    }
  }
  const VectorField dcomposed = mollified_gradient(composed, m);

  ChainResult r;
  r.eps = eps;
  r.field = VectorField(grid, dims);
  r.term_a = VectorField(grid, dims);
  r.term_b = VectorField(grid, dims);
  parallel_for(grid.cell_count(), [&](std::size_t begin, std::size_t end) {
    std::vector<double> y(k), ye(k), dg(k), dge(k);
    for (std::size_t c = begin; c < end; ++c) {
      for (int j = 0; j < k; ++j) {
        y[j] = probe.components[j][c];
        ye[j] = smooth[j][c];
      }
      probe.g.gradient(y, dg);
      probe.g.gradient(ye, dge);
      for (int d = 0; d < dims; ++d) {
        double a = 0.0, b = 0.0, full = 0.0;
        for (int j = 0; j < k; ++j) {
          const double gf = dsmooth[j][d][c];
          a += (dge[j] - dg[j]) * gf;
          b += dg[j] * gf;
          full += dge[j] * gf;
        }
        r.term_a[d][c] = a;
        r.term_b[d][c] = b - dcomposed[d][c];
        r.field[d][c] = full - dcomposed[d][c];
      }
    }
  });

  CellMask mask;
  if (probe.window) mask = window_mask(grid, probe.window->lo, probe.window->hi, eps);
  const double q = probe.p / 2.0;
  r.norm = lp_norm(r.field, q, mask);
  r.norm_a = lp_norm(r.term_a, q, mask);
  r.norm_b = lp_norm(r.term_b, q, mask);
  r.bound = lemma_bound(probe, eps, seminorms, bounds);
  r.holds = r.norm <= r.bound;

  double scale = 0.0, defect = 0.0;
  for (int d = 0; d < dims; ++d) {
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      scale = std::max(scale, std::abs(r.field[d][c]));
      defect = std::max(defect, std::abs(r.term_a[d][c] + r.term_b[d][c] - r.field[d][c]));
    }
  }
  r.split_defect = scale > 0.0 ? defect / scale : defect;
  return r;
}

ChainRateReport chain_rate_fit(const Probe& probe, std::span<const double> eps_range,
                               double tolerance) {
  if (eps_range.size() < 4) throw ArgumentError("eps range must span at least three octaves");
  const auto [lo, hi] = std::minmax_element(eps_range.begin(), eps_range.end());
  if (*hi < 8.0 * *lo * (1.0 - 1e-12)) {
    throw ArgumentError("eps range must span at least three octaves");
  }
  validate(probe);
  ChainRateReport rep;
  rep.seminorms = measured_seminorms(probe);
  rep.second_derivatives = sample_second_derivatives(probe.g, probe.box);
  rep.predicted_slope = std::numeric_limits<double>::infinity();
  for (const auto& b : rep.second_derivatives) {
    if (b.sup > 0.0) {
      rep.predicted_slope =
          std::min(rep.predicted_slope, probe.alphas[b.i] + probe.alphas[b.j] - 1.0);
    }
  }
  rep.bound_pass = true;
  std::vector<double> eps, norms, na, nb;
  for (double e : eps_range) {
    auto r = chain_commutator(probe, e, rep.seminorms, rep.second_derivatives);
    rep.bound_pass = rep.bound_pass && r.holds;
    rep.max_split_defect = std::max(rep.max_split_defect, r.split_defect);
    eps.push_back(e);
    norms.push_back(r.norm);
    na.push_back(r.norm_a);
    nb.push_back(r.norm_b);
    const PeriodicGrid g1(1, 4);
    r.field = VectorField(g1, 1);
    r.term_a = VectorField(g1, 1);
    r.term_b = VectorField(g1, 1);
    rep.points.push_back(std::move(r));
  }
  rep.fit = besov::fit_log_log(eps, norms, besov::kFitTrim);
  rep.fit_a = besov::fit_log_log(eps, na, besov::kFitTrim);
  rep.fit_b = besov::fit_log_log(eps, nb, besov::kFitTrim);
  if (std::isinf(rep.predicted_slope)) {
    // G affine: the commutator vanishes and there is no rate to meet.
    rep.rate_pass = std::all_of(norms.begin(), norms.end(), [](double v) { return v <= 1e-12; });
  } else {
    rep.rate_pass = !rep.fit.degenerate && rep.fit.slope >= rep.predicted_slope - tolerance;
  }
  return rep;
}

BilinearResult bilinear_commutator(const ScalarField& rho, const ScalarField& u, double eps,
                                   double p, double c0) {
  if (rho.grid() != u.grid()) throw ArgumentError("rho and u live on different grids");
  if (!(p >= 3.0)) throw ArgumentError("bilinear commutator needs p >= 3");
  const auto& grid = rho.grid();
  const Mollifier m(grid, eps);
  const ScalarField re = mollify(rho, m);
  const ScalarField ue = mollify(u, m);
  const ScalarField ru_e = mollify(rho * u, m);
  const ScalarField ruu_e = mollify(rho * u * u, m);

  BilinearResult r;
  r.eps = eps;
  r.field = re * ue - ru_e;
  r.norm = lp_norm(r.field, p / 2.0);
  r.triple_norm = lp_norm(re * ue * ue - ruu_e, p / 3.0);

  const std::vector<ScalarField> diff{re - rho, ue - u};
  const double s = lp_norm(std::span<const ScalarField>(diff), p);
  r.smoothing_term = s * s;
  double inc = 0.0;
  for (const auto& h : besov::ball_shifts(grid, eps)) {
    const std::vector<ScalarField> d{shift(rho, h) - rho, shift(u, h) - u};
    inc = std::max(inc, lp_norm(std::span<const ScalarField>(d), p));
  }
  r.increment_term = inc * inc;
  r.holds = r.norm <= c0 * (r.smoothing_term + r.increment_term);
  return r;
}

BilinearRateReport bilinear_rate_fit(const ScalarField& rho, const ScalarField& u,
                                     std::span<const double> eps_range, double p, double c0) {
  BilinearRateReport rep;
  rep.bound_pass = true;
  std::vector<double> eps, norms, triple;
  for (double e : eps_range) {
    auto r = bilinear_commutator(rho, u, e, p, c0);
    rep.bound_pass = rep.bound_pass && r.holds;
    eps.push_back(e);
    norms.push_back(r.norm);
    triple.push_back(r.triple_norm);
    r.field = ScalarField(PeriodicGrid(1, 4));
    rep.points.push_back(std::move(r));
  }
  rep.fit = besov::fit_log_log(eps, norms, besov::kFitTrim);
  rep.fit_triple = besov::fit_log_log(eps, triple, besov::kFitTrim);
  return rep;
}

double calibrate_bilinear_constant(const PeriodicGrid& grid, std::span<const double> eps_range,
                                   double p) {
  const double pi = std::acos(-1.0);
  const auto rho =
      ScalarField::from_function(grid, [pi](double x, double) { return 2.0 + std::sin(pi * x); });
  const auto u = ScalarField::from_function(grid, [pi](double x, double) { return std::cos(pi * x); });
  double worst = 0.0;
  for (double e : eps_range) {
    const auto r = bilinear_commutator(rho, u, e, p, std::numeric_limits<double>::infinity());
    worst = std::max(worst, r.norm / (r.smoothing_term + r.increment_term));
  }
  return worst;
}

}  // namespace eulerlab::commutator
