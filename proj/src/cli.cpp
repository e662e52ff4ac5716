#include "eulerlab/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "eulerlab/acceptance.hpp"
#include "eulerlab/besov.hpp"
#include "eulerlab/commutator.hpp"
#include "eulerlab/conditions.hpp"
#include "eulerlab/errors.hpp"
#include "eulerlab/provenance.hpp"
#include "eulerlab/relentropy.hpp"
#include "eulerlab/solver.hpp"
#include "eulerlab/thermo.hpp"

namespace eulerlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

/// Flags shared by every subcommand.
struct Common {
  std::string config;
  std::string out;
  int grid_n = 0;      // 0: keep the config/default value
  double gamma = 0.0;  // 0: keep the config/default value
  unsigned long seed = 0;
};

/// Console rendering of a number; files keep full precision.
std::string brief(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

void add_common(CLI::App* sub, Common& c, const std::string& default_out) {
  c.out = default_out;
  sub->add_option("--config", c.config, "JSON configuration file")->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory")->capture_default_str();
  sub->add_option("--grid-n", c.grid_n, "Cells per dimension")->check(CLI::PositiveNumber);
  sub->add_option("--gamma", c.gamma, "Adiabatic index (> 1)");
  sub->add_option("--seed", c.seed, "Offset of the quasi-random sample stream");
}

json load_config(const Common& c) {
  if (c.config.empty()) return json::object();
  std::ifstream in(c.config);
  if (!in) throw ArgumentError("config: cannot open " + c.config);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw ArgumentError("config: top level must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
}

void check_keys(const json& j, std::initializer_list<const char*> known, const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
      throw ArgumentError(where + key + ": unknown field");
    }
  }
}

template <typename T>
T get(const json& j, const char* key, T fallback, const std::string& where = {}) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ArgumentError(where + key + ": wrong type (got " + j.at(key).dump() + ")");
  }
}

thermo::GasParams gas(double gamma) {
  try {
    return thermo::GasParams(gamma);
  } catch (const std::exception& e) {
    throw ArgumentError(std::string("gamma: ") + e.what());
  }
}

std::string prepare_out(const std::string& dir) {
  fs::create_directories(dir);
  return dir;
}

std::string path_in(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

// ---------------------------------------------------------------------------

int run_simulate(const Common& c, std::ostream& out) {
  json cfg = load_config(c);
  if (c.grid_n > 0) cfg["cells"] = c.grid_n;
  if (c.gamma != 0.0) cfg["gamma"] = c.gamma;
  const auto config = solver::config_from_json(cfg);
  const auto traj = solver::run(config);
  const auto comment = provenance_comment(solver::to_json(config));
  solver::write_trajectory(prepare_out(c.out), traj, comment);

  const auto& first = traj.snapshots.front();
  double drift = 0.0;
  for (const auto& s : traj.snapshots) {
    drift = std::max(drift, std::abs(integral(s.rho) - integral(first.rho)) / integral(first.rho));
    if (config.system == solver::System::complete) {
      drift = std::max(drift, std::abs(integral(s.energy) - integral(first.energy)) /
                                  std::abs(integral(first.energy)));
    }
  }
  const bool ok = drift <= 1e-10;
  out << "simulate " << (ok ? "PASS" : "FAIL") << ": " << traj.snapshots.size()
      << " snapshots, " << traj.steps << " steps, conservation drift " << brief(drift)
      << " -> " << c.out << '\n';
  return ok ? kExitPass : kExitFail;
}

ScalarField synthetic_or_file(const json& spec, int cells, const std::string& where) {
  check_keys(spec, {"weierstrass", "file", "column"}, where);
  if (spec.contains("file")) {
    const auto table = read_fields_csv(get<std::string>(spec, "file", "", where));
    const auto column = get<std::string>(spec, "column", table.names.front(), where);
    const auto it = std::find(table.names.begin(), table.names.end(), column);
    if (it == table.names.end()) throw ArgumentError(where + "column: no column '" + column + "'");
    return table.fields[static_cast<std::size_t>(it - table.names.begin())];
  }
  const json w = get<json>(spec, "weierstrass", json::object(), where);
  const std::string ww = where + "weierstrass.";
  check_keys(w, {"alpha", "levels", "offset"}, ww);
  const double alpha = get<double>(w, "alpha", 0.6, ww);
  const int levels = get<int>(w, "levels", static_cast<int>(std::ceil(std::log2(cells))), ww);
  return weierstrass_field(alpha, levels, PeriodicGrid(1, cells), get<double>(w, "offset", 0.0, ww));
}

/// Default dyadic exponents [-10, -4], raised so that eps >= 2 cell widths.
std::vector<int> default_eps_exp(int cells) {
  const int lo = std::max(-10, 2 - static_cast<int>(std::floor(std::log2(cells))));
  return {lo, std::max(-4, lo + 3)};
}

std::vector<double> eps_range(const json& cfg, std::vector<int> fallback) {
  const auto e = get<std::vector<int>>(cfg, "eps_exp", fallback);
  if (e.size() != 2 || e[0] >= e[1]) throw ArgumentError("eps_exp: need [lo, hi] with lo < hi");
  return besov::dyadic_range(e[0], e[1]);
}

int run_besov(const Common& c, const std::optional<std::string>& input,
              const std::optional<double>& alpha_flag, std::ostream& out) {
  json cfg = load_config(c);
  check_keys(cfg, {"field", "p", "alpha", "betas", "min_cells", "max_cells", "eps_exp", "cells"},
             "");
  const int cells = c.grid_n > 0 ? c.grid_n : get<int>(cfg, "cells", 8192);
  std::optional<double> alpha = alpha_flag;
  if (!alpha && cfg.contains("alpha")) alpha = get<double>(cfg, "alpha", 0.0);
  json field = get<json>(cfg, "field", json::object());
  if (input) field = {{"file", *input}};
  if (!field.contains("file") && !field.contains("weierstrass")) {
    field["weierstrass"] = {{"alpha", alpha.value_or(0.6)}};
  }
  const auto f = synthetic_or_file(field, cells, "field.");
  const int n = f.grid().cells_per_dim();

  besov::BesovReport rep;
  rep.p = get<double>(cfg, "p", 3.0);
  rep.beta_grid = get<std::vector<double>>(cfg, "betas", {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9});
  rep.shift_set = besov::dense_shifts(f.grid(), n / 4);
  for (double beta : rep.beta_grid) rep.seminorms.push_back(besov::seminorm(f, beta, rep.p, rep.shift_set));
  int max_cells = 8;
  while (max_cells * 2 <= n / 32) max_cells *= 2;
  max_cells = std::min(get<int>(cfg, "max_cells", max_cells), n / 4);
  rep.fit = besov::fit_regularity(f, rep.p, get<int>(cfg, "min_cells", 1), max_cells);
  bool ok = !rep.fit.degenerate;
  if (alpha) {
    const auto eps = eps_range(cfg, default_eps_exp(n));
    rep.mollifier.push_back(besov::verify_mollifier_rates(f, *alpha, rep.p, eps, rep.shift_set));
    const auto& m = rep.mollifier.back();
    for (std::size_t k = 0; k < eps.size(); ++k) {
      ok = ok && m.holds_smoothing[k] && m.holds_increment[k] && m.holds_gradient[k];
    }
  }
  json eff = cfg;
  eff["field"] = field;
  eff["cells"] = n;
  if (alpha) eff["alpha"] = *alpha;
  const auto path = path_in(prepare_out(c.out), "besov_report.csv");
  besov::write_report_csv(path, rep, provenance_comment(eff));
  out << "besov-fit " << (ok ? "PASS" : "FAIL") << ": fitted exponent "
      << brief(rep.fit.fitted_alpha) << " in L^" << rep.p;
  if (alpha) out << ", mollifier estimates " << (ok ? "hold" : "violated") << " for alpha " << *alpha;
  out << " -> " << path << '\n';
  return ok ? kExitPass : kExitFail;
}

int run_commutator(const Common& c, const std::optional<std::string>& g_flag, std::ostream& out) {
  json cfg = load_config(c);
  check_keys(cfg, {"g", "p", "alphas", "fields", "box", "cells", "eps_exp", "tolerance", "window"},
             "");
  const int cells = c.grid_n > 0 ? c.grid_n : get<int>(cfg, "cells", 8192);
  const auto params = gas(c.gamma != 0.0 ? c.gamma : 1.4);
  commutator::Probe probe;
  const auto gname = g_flag.value_or(get<std::string>(cfg, "g", "square"));
  probe.g = commutator::by_name(gname, params);
  probe.p = get<double>(cfg, "p", 4.0);
  probe.alphas = get<std::vector<double>>(cfg, "alphas", std::vector<double>(static_cast<std::size_t>(probe.g.arity), 0.6));
  json fields = get<json>(cfg, "fields", json::array());
  if (!fields.is_array()) throw ArgumentError("fields: must be an array");
  if (fields.empty()) {
    for (std::size_t j = 0; j < probe.alphas.size(); ++j) {
      fields.push_back({{"weierstrass", {{"alpha", probe.alphas[j]}, {"offset", 0.3 * static_cast<double>(j)}}}});
    }
  }
  for (std::size_t j = 0; j < fields.size(); ++j) {
    probe.components.push_back(synthetic_or_file(fields[j], cells, "fields[" + std::to_string(j) + "]."));
  }
  if (static_cast<int>(probe.components.size()) != probe.g.arity ||
      probe.alphas.size() != probe.components.size()) {
    throw ArgumentError("fields: " + gname + " needs " + std::to_string(probe.g.arity) +
                        " fields and as many alphas");
  }
  if (cfg.contains("box")) {
    const auto& b = cfg.at("box");
    check_keys(b, {"lo", "hi"}, "box.");
    probe.box = {get<std::vector<double>>(b, "lo", {}, "box."), get<std::vector<double>>(b, "hi", {}, "box.")};
  } else {
    // Value range of each field padded by 10 %.
    for (const auto& f : probe.components) {
      const auto [lo, hi] = std::minmax_element(f.values().begin(), f.values().end());
      const double pad = 0.1 * std::max(*hi - *lo, 1e-12);
      probe.box.lo.push_back(*lo - pad);
      probe.box.hi.push_back(*hi + pad);
    }
  }
  if (cfg.contains("window")) {
    const auto& w = cfg.at("window");
    check_keys(w, {"lo", "hi"}, "window.");
    probe.window = commutator::Window{get<double>(w, "lo", -1.0, "window."), get<double>(w, "hi", 1.0, "window.")};
  }
  const auto eps = eps_range(cfg, default_eps_exp(probe.components.front().grid().cells_per_dim()));
  const auto rep = commutator::chain_rate_fit(probe, eps, get<double>(cfg, "tolerance", 0.1));

  json eff = cfg;
  eff["g"] = gname;
  eff["cells"] = cells;
  eff["fields"] = fields;
  eff["box"] = {{"lo", probe.box.lo}, {"hi", probe.box.hi}};
  const auto path = path_in(prepare_out(c.out), "commutator.csv");
  std::ofstream csv(path);
  if (!csv) throw ArgumentError("cannot open " + path + " for writing");
  csv << "# " << provenance_comment(eff) << '\n';
  csv << "eps,norm,bound,pass,norm_a,norm_b,split_defect\n";
  for (const auto& p : rep.points) {
    csv << format_double(p.eps) << ',' << format_double(p.norm) << ',' << format_double(p.bound)
        << ',' << (p.holds ? 1 : 0) << ',' << format_double(p.norm_a) << ','
        << format_double(p.norm_b) << ',' << format_double(p.split_defect) << '\n';
  }
  const bool ok = rep.rate_pass && rep.bound_pass;
  out << "commutator-rate " << (ok ? "PASS" : "FAIL") << ": " << gname << " slope "
      << brief(rep.fit.slope) << " (predicted " << brief(rep.predicted_slope)
      << "), bound " << (rep.bound_pass ? "holds" : "violated") << " -> " << path << '\n';
  return ok ? kExitPass : kExitFail;
}

int run_relentropy(const Common& c, std::optional<std::string> cand, std::optional<std::string> ref,
                   std::ostream& out) {
  json cfg = load_config(c);
  check_keys(cfg, {"candidate", "reference", "sigma", "margin", "floor", "basis_radius", "basis_level"}, "");
  if (!cand && cfg.contains("candidate")) cand = get<std::string>(cfg, "candidate", "");
  if (!ref && cfg.contains("reference")) ref = get<std::string>(cfg, "reference", "");
  if (!cand || !ref) throw ArgumentError("candidate/reference: both trajectory directories are required");
  const auto a = solver::read_trajectory(*cand);
  const auto b = solver::read_trajectory(*ref);
  relentropy::MonitorOptions mo;
  mo.sigma = get<double>(cfg, "sigma", mo.sigma);
  mo.margin = get<double>(cfg, "margin", mo.margin);
  mo.floor = get<double>(cfg, "floor", mo.floor);
  mo.basis = conditions::default_basis(get<double>(cfg, "basis_radius", 0.125), get<int>(cfg, "basis_level", 0));
  const auto trace = relentropy::gronwall_monitor(a, b, mo);

  json eff = cfg;
  eff["candidate"] = a.config_hash;
  eff["reference"] = b.config_hash;
  const auto path = path_in(prepare_out(c.out), "trace.csv");
  relentropy::write_trace_csv(path, trace, provenance_comment(eff));
  const bool ok = trace.cumulative_pass;
  out << "relentropy " << (ok ? "PASS" : "FAIL") << ": terminal integral "
      << brief(trace.terminal_integral()) << ", cumulative bound "
      << (trace.cumulative_pass ? "holds" : "violated") << ", per-interval K "
      << (trace.interval_pass ? "ok" : "exceeded") << ", J1 " << (trace.j1_pass ? "ok" : "exceeded")
      << " -> " << path << '\n';
  return ok ? kExitPass : kExitFail;
}

int run_oslip(const Common& c, std::optional<std::string> input, std::optional<double> tau_flag,
              bool mask_flag, std::ostream& out) {
  json cfg = load_config(c);
  check_keys(cfg, {"input", "tau", "delta", "mask_wrap", "basis_radius", "basis_level", "directions"}, "");
  if (!input && cfg.contains("input")) input = get<std::string>(cfg, "input", "");
  if (!input) throw ArgumentError("input: a trajectory directory or field CSV is required");
  const bool mask = mask_flag || get<bool>(cfg, "mask_wrap", false);
  const auto basis =
      conditions::default_basis(get<double>(cfg, "basis_radius", 0.125), get<int>(cfg, "basis_level", 0));

  std::vector<double> taus;
  std::vector<VectorField> fields;
  if (fs::is_directory(*input)) {
    const auto traj = solver::read_trajectory(*input);
    for (const auto& s : traj.snapshots) {
      if (s.t <= 0.0) continue;
      taus.push_back(s.t);
      fields.push_back(solver::velocity(s));
    }
  } else {
    const auto table = read_fields_csv(*input);
    const int dims = table.grid.dims();
    if (static_cast<int>(table.fields.size()) < dims) throw ArgumentError("input: need one velocity column per axis");
    fields.emplace_back(std::vector<ScalarField>(table.fields.begin(), table.fields.begin() + dims));
    taus.push_back(tau_flag.value_or(get<double>(cfg, "tau", 1.0)));
  }
  if (fields.empty()) throw ArgumentError("input: no snapshots with t > 0");
  const int dims = fields.front().grid().dims();
  const auto dirs = conditions::default_directions(dims, get<int>(cfg, "directions", 16));
  const auto steps = conditions::default_steps(dims);

  std::vector<conditions::OslipRow> rows;
  std::vector<double> weak;
  bool ok = true;
  for (std::size_t k = 0; k < fields.size(); ++k) {
    const auto w = conditions::oslip_weak_min_C(fields[k], dirs, basis);
    const auto d = conditions::oslip_discrete(fields[k], steps, mask);
    conditions::OslipRow row{taus[k], w.min_C, d.discrete_C, 0.0, {}};
    std::string flags;
    if (mask) flags += "masked";
    if (d.wrap_dominated) flags += flags.empty() ? "wrap" : "|wrap";
    // The weak ratio is a bump-weighted mean of central slopes, so it cannot
    // exceed the largest one-sided slope (checked when no pair is masked).
    if (!mask && w.min_C > d.discrete_C + 1e-9 * std::max(1.0, std::abs(d.discrete_C))) {
      ok = false;
      flags += flags.empty() ? "weak>discrete" : "|weak>discrete";
    }
    row.flags = flags;
    rows.push_back(row);
    weak.push_back(w.min_C);
  }
  if (taus.size() >= 2) {
    const double delta = get<double>(cfg, "delta", taus.front());
    const auto l1 = conditions::l1_report(taus, weak, delta, taus.back());
    for (std::size_t k = 0; k < rows.size(); ++k) {
      rows[k].l1_partial = l1.l1_partial[k];
      if (l1.integrability_doubtful) rows[k].flags += rows[k].flags.empty() ? "doubtful" : "|doubtful";
    }
    out << "oslip-check: L1 norm " << brief(l1.l1_norm) << " on [" << brief(delta)
        << ", " << brief(taus.back()) << "]";
    if (l1.fit_ok) out << ", near-delta fit C ~ " << brief(l1.fit_a) << " / tau^" << brief(l1.fit_b);
    out << '\n';
  }
  json eff = cfg;
  eff["input"] = *input;
  eff["mask_wrap"] = mask;
  const auto path = path_in(prepare_out(c.out), "oslip.csv");
  conditions::write_oslip_csv(path, rows, provenance_comment(eff));
  out << "oslip-check " << (ok ? "PASS" : "FAIL") << ": " << rows.size() << " times, max min_C "
      << brief(*std::max_element(weak.begin(), weak.end())) << " -> " << path << '\n';
  return ok ? kExitPass : kExitFail;
}

int run_verify_thermo(const Common& c, std::ostream& out) {
  json cfg = load_config(c);
  check_keys(cfg, {"gamma", "samples", "fd_step"}, "");
  const double gamma = c.gamma != 0.0 ? c.gamma : get<double>(cfg, "gamma", 1.4);
  const auto params = gas(gamma);
  const int n = get<int>(cfg, "samples", 50);
  const double h = get<double>(cfg, "fd_step", 1e-3);
  if (n < 2) throw ArgumentError("samples: must be >= 2");
  if (!(h > 0.0)) throw ArgumentError("fd_step: must be positive");

  struct Row {
    std::string check;
    double value = 0.0;
    double threshold = 0.0;
    bool lower = false;  // value must be >= threshold instead of <=
  };
  std::vector<Row> rows = {{"gibbs_rho", 0, 1e-10},        {"gibbs_theta", 0, 1e-10},
                           {"p2_free_energy", 0, 1e-10},   {"p2_entropy", 0, 1e-10},
                           {"p2_reference", 0, 1e-10},     {"roundtrip_theta", 0, 1e-12},
                           {"tilde_hessian_min_eig", 1e300, -1e-10, true}};
  double fd = 0.0, fd2 = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double rho = 0.5 + 1.5 * i / (n - 1), theta = 0.5 + 1.5 * j / (n - 1);
      const auto g = thermo::verify_gibbs(rho, theta, params, h);
      const auto g2 = thermo::verify_gibbs(rho, theta, params, h / 2);
      const auto p = thermo::verify_P2(rho, theta, params);
      const double vals[] = {g.analytic.rho_part, g.analytic.theta_part, p.analytic.free_energy,
                             p.analytic.entropy, p.analytic.reference};
      for (int k = 0; k < 5; ++k) rows[k].value = std::max(rows[k].value, vals[k]);
      const double back = thermo::theta_of(rho, rho * thermo::entropy(rho, theta, params), params);
      rows[5].value = std::max(rows[5].value, std::abs(back - theta) / theta);
      fd = std::max({fd, g.central_difference.rho_part, g.central_difference.theta_part});
      fd2 = std::max({fd2, g2.central_difference.rho_part, g2.central_difference.theta_part});
      const double r2 = 0.25 + 3.75 * i / (n - 1), s2 = -2.0 + 4.0 * j / (n - 1);
      rows[6].value = std::min(rows[6].value,
                               thermo::min_eigenvalue(thermo::tilde_pressure(r2, s2, params).hess));
    }
  }
  rows.push_back({"fd_order_ratio", fd / fd2, 3.0, true});

  json eff = cfg;
  eff["gamma"] = gamma;
  eff["samples"] = n;
  eff["fd_step"] = h;
  const auto path = path_in(prepare_out(c.out), "thermo.csv");
  std::ofstream csv(path);
  if (!csv) throw ArgumentError("cannot open " + path + " for writing");
  csv << "# " << provenance_comment(eff) << '\n' << "check,value,threshold,pass\n";
  bool ok = true;
  for (const auto& r : rows) {
    const bool pass = r.lower ? r.value >= r.threshold : r.value <= r.threshold;
    ok = ok && pass;
    csv << r.check << ',' << format_double(r.value) << ',' << format_double(r.threshold) << ','
        << (pass ? 1 : 0) << '\n';
    out << "  " << r.check << " = " << brief(r.value) << (pass ? " ok" : " FAIL") << '\n';
  }
  out << "verify-thermo " << (ok ? "PASS" : "FAIL") << " (gamma " << gamma << ") -> " << path << '\n';
  return ok ? kExitPass : kExitFail;
}

int run_accept(const Common& c, const std::vector<int>& only, std::ostream& out) {
  json cfg = load_config(c);
  check_keys(cfg, {"gamma", "seed", "only"}, "");
  acceptance::Options o;
  o.gamma = c.gamma != 0.0 ? c.gamma : get<double>(cfg, "gamma", o.gamma);
  gas(o.gamma);
  o.seed = c.seed != 0 ? c.seed : get<unsigned long>(cfg, "seed", 0);
  auto ids = only.empty() ? get<std::vector<int>>(cfg, "only", {}) : only;
  if (ids.empty()) {
    for (int k = 1; k <= acceptance::kCriterionCount; ++k) ids.push_back(k);
  }
  for (int id : ids) {
    if (id < 1 || id > acceptance::kCriterionCount) throw ArgumentError("only: no criterion " + std::to_string(id));
  }
  json eff = {{"gamma", o.gamma}, {"seed", o.seed}, {"only", ids}};
  const auto path = path_in(prepare_out(c.out), "acceptance.csv");
  std::ofstream csv(path);
  if (!csv) throw ArgumentError("cannot open " + path + " for writing");
  csv << "# " << provenance_comment(eff) << '\n' << "criterion,name,pass,detail\n";
  bool ok = true;
  for (int id : ids) {
    const auto r = acceptance::run_criterion(id, o);
    ok = ok && r.pass;
    out << acceptance::format_line(r) << '\n' << std::flush;
    csv << r.id << ',' << r.name << ',' << (r.pass ? 1 : 0) << ",\"" << r.detail << "\"\n";
  }
  return ok ? kExitPass : kExitFail;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical laboratory for the complete and isentropic Euler systems", "eulerlab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  Common sim, bes, com, rel, osl, thm, acc;
  auto* s_sim = app.add_subcommand("simulate", "Run the finite-volume solver and write a trajectory");
  add_common(s_sim, sim, "trajectory");

  auto* s_bes = app.add_subcommand("besov-fit", "Besov semi-norms, regularity fit, mollifier estimates");
  add_common(s_bes, bes, "besov");
  std::optional<std::string> bes_input;
  std::optional<double> bes_alpha;
  s_bes->add_option("--input", bes_input, "Field CSV (default: synthetic Weierstrass field)")->check(CLI::ExistingFile);
  s_bes->add_option("--alpha", bes_alpha, "Declared regularity; enables the mollifier estimates");

  auto* s_com = app.add_subcommand("commutator-rate", "Chain-rule commutator decay and bound");
  add_common(s_com, com, "commutator");
  std::optional<std::string> com_g;
  s_com->add_option("--g", com_g, "Nonlinearity: square, product, pressure_tilde");

  auto* s_rel = app.add_subcommand("relentropy", "Relative-entropy trace between two trajectories");
  add_common(s_rel, rel, "relentropy");
  std::optional<std::string> rel_a, rel_b;
  s_rel->add_option("--candidate", rel_a, "Candidate trajectory directory")->check(CLI::ExistingDirectory);
  s_rel->add_option("--reference", rel_b, "Reference trajectory directory (same or finer grid)")->check(CLI::ExistingDirectory);

  auto* s_osl = app.add_subcommand("oslip-check", "One-sided Lipschitz constants of a velocity field");
  add_common(s_osl, osl, "oslip");
  std::optional<std::string> osl_input;
  std::optional<double> osl_tau;
  bool osl_mask = false;
  s_osl->add_option("--input", osl_input, "Trajectory directory or velocity field CSV")->check(CLI::ExistingPath);
  s_osl->add_option("--tau", osl_tau, "Time stamp for a single field");
  s_osl->add_flag("--mask-wrap", osl_mask, "Skip difference pairs across the +-1 seam");

  auto* s_thm = app.add_subcommand("verify-thermo", "Gibbs, P2, round-trip and convexity residuals");
  add_common(s_thm, thm, "thermo");

  auto* s_acc = app.add_subcommand("accept", "Run the acceptance criteria");
  add_common(s_acc, acc, "acceptance");
  std::vector<int> acc_only;
  s_acc->add_option("--only", acc_only, "Subset of criterion ids");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*s_sim) return run_simulate(sim, out);
    if (*s_bes) return run_besov(bes, bes_input, bes_alpha, out);
    if (*s_com) return run_commutator(com, com_g, out);
    if (*s_rel) return run_relentropy(rel, rel_a, rel_b, out);
    if (*s_osl) return run_oslip(osl, osl_input, osl_tau, osl_mask, out);
    if (*s_thm) return run_verify_thermo(thm, out);
    if (*s_acc) return run_accept(acc, acc_only, out);
  } catch (const ArgumentError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitUsage;
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace eulerlab::cli
