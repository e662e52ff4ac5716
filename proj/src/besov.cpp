#include "eulerlab/besov.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "eulerlab/errors.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab::besov {

namespace {

double power(double a, double p) {
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 3.0) return a * a * a;
  if (p == 4.0) {
    const double b = a * a;
    return b * b;
  }
  return std::pow(a, p);
}

double increment_norm(const ScalarField& f, double p, LatticeShift h) {
  const auto& g = f.grid();
  if (std::isinf(p)) {
    double mx = 0.0;
    for (std::size_t k = 0; k < f.size(); ++k) {
      const auto c = g.coords(k);
      mx = std::max(mx, std::abs(f[g.index(c[0] + h.di, c[1] + h.dj)] - f[k]));
    }
    return mx;
  }
  CompensatedSum s;
  if (g.dims() == 1) {
    const int n = g.cells_per_dim();
    for (int i = 0; i < n; ++i) {
      const double d = f[g.index(i + h.di)] - f[static_cast<std::size_t>(i)];
      s.add(power(std::abs(d), p));
    }
  } else {
    for (std::size_t k = 0; k < f.size(); ++k) {
      const auto c = g.coords(k);
      s.add(power(std::abs(f[g.index(c[0] + h.di, c[1] + h.dj)] - f[k]), p));
    }
  }
  return std::pow(s.value() * g.cell_volume(), 1.0 / p);
}

void require_shift_set(const PeriodicGrid& g, const ShiftSet& shifts) {
  if (shifts.empty()) throw ArgumentError("empty shift set");
  for (const auto& h : shifts) {
    if (h.di == 0 && h.dj == 0) throw ArgumentError("shift set contains the zero shift");
    if (h.length(g) > 0.5 + 1e-12) {
      throw ArgumentError("shift longer than a quarter period in shift set");
    }
  }
}

}  // namespace

ShiftSet dyadic_shifts(const PeriodicGrid& grid, bool diagonals) {
  ShiftSet out;
  const int quarter = grid.cells_per_dim() / 4;
  for (int s = 1; s <= quarter; s *= 2) {
    out.push_back({s, 0});
    if (grid.dims() == 2) {
      out.push_back({0, s});
      if (diagonals && LatticeShift{s, s}.length(grid) <= 0.5) {
        out.push_back({s, s});
        out.push_back({s, -s});
      }
    }
  }
  return out;
}

ShiftSet dense_shifts(const PeriodicGrid& grid, int max_cells) {
  ShiftSet out;
  const int cap = std::min(max_cells, grid.cells_per_dim() / 4);
  for (int s = 1; s <= cap; ++s) {
    out.push_back({s, 0});
    if (grid.dims() == 2) {
      out.push_back({0, s});
      if (LatticeShift{s, s}.length(grid) <= 0.5) {
        out.push_back({s, s});
        out.push_back({s, -s});
      }
    }
  }
  return out;
}

ShiftSet ball_shifts(const PeriodicGrid& grid, double radius) {
  ShiftSet out;
  const double dx = grid.cell_width();
  const int reach = static_cast<int>(std::floor(radius / dx + 1e-9));
  if (grid.dims() == 1) {
    for (int s = 1; s <= reach; ++s) out.push_back({s, 0});
    return out;
  }
  // h and -h give the same increment norm on a periodic grid: keep a half plane.
  for (int j = 0; j <= reach; ++j) {
    for (int i = -reach; i <= reach; ++i) {
      if (j == 0 && i <= 0) continue;
      const LatticeShift h{i, j};
      if (h.length(grid) <= radius * (1.0 + 1e-12)) out.push_back(h);
    }
  }
  return out;
}

std::vector<double> increment_norms(const ScalarField& f, double p, const ShiftSet& shifts) {
  if (!(p >= 1.0)) throw DomainError("L^p exponent must be >= 1");
  std::vector<double> out(shifts.size(), 0.0);
  parallel_for(shifts.size(), [&](std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) out[k] = increment_norm(f, p, shifts[k]);
  });
  return out;
}

double seminorm(const ScalarField& f, double beta, double p, const ShiftSet& shifts) {
  if (!(beta > 0.0 && beta <= 1.0)) throw ArgumentError("beta must lie in (0, 1]");
  require_shift_set(f.grid(), shifts);
  const auto incs = increment_norms(f, p, shifts);
  double best = 0.0;
  for (std::size_t k = 0; k < shifts.size(); ++k) {
    best = std::max(best, incs[k] / std::pow(shifts[k].length(f.grid()), beta));
  }
  return best;
}

RateFit fit_log_log(std::span<const double> x, std::span<const double> y, std::size_t trim) {
  if (x.size() != y.size()) throw ArgumentError("rate fit: x and y sizes differ");
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return x[a] < x[b]; });
  const std::size_t n = x.size();
  if (n < 2 * trim + 3) trim = 0;
  if (n < 3) throw ArgumentError("rate fit needs at least three points");
  RateFit fit;
  fit.first = trim;
  fit.last = n - trim;
  std::vector<double> lx, ly;
  for (std::size_t k = fit.first; k < fit.last; ++k) {
    const double xv = x[order[k]];
    const double yv = y[order[k]];
    if (!(xv > 0.0) || !(yv > 0.0) || !std::isfinite(yv)) {
      fit.degenerate = true;
      return fit;
    }
    lx.push_back(std::log(xv));
    ly.push_back(std::log(yv));
  }
  const double m = static_cast<double>(lx.size());
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    sxx += (lx[k] - mx) * (lx[k] - mx);
    sxy += (lx[k] - mx) * (ly[k] - my);
  }
  if (sxx <= 0.0) {
    fit.degenerate = true;
    return fit;
  }
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double rss = 0.0;
  for (std::size_t k = 0; k < lx.size(); ++k) {
    const double r = ly[k] - (fit.intercept + fit.slope * lx[k]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

RegularityFit fit_regularity(const ScalarField& f, double p, int min_cells, int max_cells,
                             std::size_t trim) {
  const auto is_pow2 = [](int v) { return v > 0 && (v & (v - 1)) == 0; };
  if (!is_pow2(min_cells) || !is_pow2(max_cells) || max_cells < 8 * min_cells) {
    throw ArgumentError("fit_regularity needs a dyadic shift range spanning >= 3 octaves");
  }
  if (max_cells > f.grid().cells_per_dim() / 4) {
    throw ArgumentError("fit_regularity: largest shift exceeds a quarter period");
  }
  ShiftSet shifts;
  for (int s = min_cells; s <= max_cells; s *= 2) shifts.push_back({s, 0});
  RegularityFit out;
  out.increments = increment_norms(f, p, shifts);
  for (const auto& h : shifts) out.shift_lengths.push_back(h.length(f.grid()));
  const bool all_zero =
      std::all_of(out.increments.begin(), out.increments.end(), [](double v) { return v == 0.0; });
  if (all_zero) {
    out.degenerate = true;
    out.fitted_alpha = std::numeric_limits<double>::infinity();
    return out;
  }
  const auto fit = fit_log_log(out.shift_lengths, out.increments, trim);
  out.degenerate = fit.degenerate;
  out.fitted_alpha = fit.slope;
  out.residual = fit.residual;
  out.trim = fit.first;
  return out;
}

std::vector<double> dyadic_range(int lo_exp, int hi_exp) {
  if (lo_exp > hi_exp) throw ArgumentError("dyadic_range: empty exponent range");
  std::vector<double> out;
  for (int e = lo_exp; e <= hi_exp; ++e) out.push_back(std::ldexp(1.0, e));
  return out;
}

MollifierRates verify_mollifier_rates(const ScalarField& f, double alpha, double p,
                                      std::span<const double> eps, const ShiftSet& shifts,
                                      double slack) {
  if (eps.empty()) throw ArgumentError("verify_mollifier_rates: empty eps range");
  const auto& g = f.grid();
  MollifierRates r;
  r.alpha = alpha;
  r.p = p;
  const ShiftSet set = shifts.empty() ? dense_shifts(g, g.cells_per_dim() / 4) : shifts;
  r.seminorm = seminorm(f, alpha, p, set);
  for (double e : eps) {
    const Mollifier m(g, e);  // throws ResolutionError when e < 2 dx
    const ScalarField fe = mollify(f, m);
    r.eps.push_back(e);
    r.smoothing_error.push_back(lp_norm(fe - f, p));
    const auto incs = increment_norms(f, p, ball_shifts(g, e));
    r.local_increment.push_back(incs.empty() ? 0.0 : *std::max_element(incs.begin(), incs.end()));
    r.mollified_gradient.push_back(lp_norm(mollified_gradient(f, m), p));
    const double b = r.seminorm * std::pow(e, alpha);
    const double bg = r.seminorm * std::pow(e, alpha - 1.0);
    r.holds_smoothing.push_back(r.smoothing_error.back() <= b * (1.0 + slack));
    r.holds_increment.push_back(r.local_increment.back() <= b * (1.0 + slack));
    r.holds_gradient.push_back(r.mollified_gradient.back() <= bg * (1.0 + slack));
  }
  if (r.eps.size() >= 3) {
    r.slope_smoothing = fit_log_log(r.eps, r.smoothing_error, kFitTrim);
    r.slope_increment = fit_log_log(r.eps, r.local_increment, kFitTrim);
    r.slope_gradient = fit_log_log(r.eps, r.mollified_gradient, kFitTrim);
  }
  return r;
}

double time_seminorm(std::span<const ScalarField> snapshots, double dt, double beta, double p,
                     std::span<const int> lags) {
  if (snapshots.size() < 2 || lags.empty()) throw ArgumentError("time_seminorm: not enough data");
  if (!(dt > 0.0)) throw ArgumentError("time_seminorm: dt must be positive");
  double best = 0.0;
  for (int lag : lags) {
    if (lag <= 0 || static_cast<std::size_t>(lag) >= snapshots.size()) {
      throw ArgumentError("time_seminorm: lag out of range");
    }
    CompensatedSum s;
    for (std::size_t t = 0; t + static_cast<std::size_t>(lag) < snapshots.size(); ++t) {
      const double n = lp_norm(snapshots[t + static_cast<std::size_t>(lag)] - snapshots[t], p);
      s.add(std::pow(n, p) * dt);
    }
    const double norm = std::pow(s.value(), 1.0 / p);
    best = std::max(best, norm / std::pow(lag * dt, beta));
  }
  return best;
}

void write_report_csv(const std::string& path, const BesovReport& report,
                      const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot open " + path + " for writing");
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "quantity,beta_or_eps,value,slope,residual\n";
  for (std::size_t k = 0; k < report.beta_grid.size(); ++k) {
    out << "seminorm," << format_double(report.beta_grid[k]) << ','
        << format_double(report.seminorms[k]) << ",,\n";
  }
  out << "fitted_alpha,," << format_double(report.fit.fitted_alpha) << ','
      << format_double(report.fit.fitted_alpha) << ',' << format_double(report.fit.residual) << '\n';
  for (std::size_t k = 0; k < report.fit.shift_lengths.size(); ++k) {
    out << "increment," << format_double(report.fit.shift_lengths[k]) << ','
        << format_double(report.fit.increments[k]) << ",,\n";
  }
  for (const auto& m : report.mollifier) {
    for (std::size_t k = 0; k < m.eps.size(); ++k) {
      out << "smoothing_error," << format_double(m.eps[k]) << ','
          << format_double(m.smoothing_error[k]) << ',' << format_double(m.slope_smoothing.slope)
          << ',' << format_double(m.slope_smoothing.residual) << '\n';
      out << "local_increment," << format_double(m.eps[k]) << ','
          << format_double(m.local_increment[k]) << ',' << format_double(m.slope_increment.slope)
          << ',' << format_double(m.slope_increment.residual) << '\n';
      out << "mollified_gradient," << format_double(m.eps[k]) << ','
          << format_double(m.mollified_gradient[k]) << ','
          << format_double(m.slope_gradient.slope) << ','
          << format_double(m.slope_gradient.residual) << '\n';
    }
    out << "measured_seminorm," << format_double(m.alpha) << ',' << format_double(m.seminorm)
        << ",,\n";
  }
}

}  // namespace eulerlab::besov
