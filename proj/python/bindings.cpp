// Python bindings for the core library.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "eulerlab/acceptance.hpp"
#include "eulerlab/besov.hpp"
#include "eulerlab/cli.hpp"
#include "eulerlab/commutator.hpp"
#include "eulerlab/conditions.hpp"
#include "eulerlab/errors.hpp"
#include "eulerlab/grid.hpp"
#include "eulerlab/provenance.hpp"
#include "eulerlab/relentropy.hpp"
#include "eulerlab/solver.hpp"
#include "eulerlab/thermo.hpp"

namespace py = pybind11;
using namespace eulerlab;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array to_numpy(const ScalarField& f) {
  const auto& g = f.grid();
  const auto n = static_cast<py::ssize_t>(g.cells_per_dim());
  std::vector<py::ssize_t> shape(static_cast<std::size_t>(g.dims()), n);
  Array out(shape);
  double* dst = out.mutable_data();
  // Row j of the 2D array is y index j.
  for (std::size_t k = 0; k < g.cell_count(); ++k) {
    const auto c = g.coords(k);
    const std::size_t at = g.dims() == 1 ? static_cast<std::size_t>(c[0])
                                         : static_cast<std::size_t>(c[1]) * n + c[0];
    dst[at] = f[k];
  }
  return out;
}

ScalarField from_numpy(const Array& a) {
  if (a.ndim() == 1) {
    const auto n = static_cast<int>(a.shape(0));
    return ScalarField(PeriodicGrid(1, n), std::vector<double>(a.data(), a.data() + n));
  }
  if (a.ndim() != 2 || a.shape(0) != a.shape(1)) {
    throw ArgumentError("field arrays must be 1D or square 2D");
  }
  const auto n = static_cast<int>(a.shape(0));
  const PeriodicGrid g(2, n);
  ScalarField f(g);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) f[g.index(i, j)] = a.data()[static_cast<std::size_t>(j) * n + i];
  }
  return f;
}

thermo::PrimitiveState primitive(double rho, double u, double theta) {
  thermo::PrimitiveState s;
  s.rho = rho;
  s.vel = {u, 0.0};
  s.theta = theta;
  return s;
}

py::dict rate_fit(const besov::RateFit& f) {
  py::dict d;
  d["slope"] = f.slope;
  d["intercept"] = f.intercept;
  d["residual"] = f.residual;
  d["degenerate"] = f.degenerate;
  return d;
}

py::dict simulate(const std::string& config_json) {
  const auto cfg = solver::config_from_json(nlohmann::json::parse(config_json));
  const auto traj = solver::run(cfg);
  py::list rho, mom, energy;
  for (const auto& s : traj.snapshots) {
    rho.append(to_numpy(s.rho));
    py::list m;
    for (const auto& c : s.mom) m.append(to_numpy(c));
    mom.append(m);
    energy.append(to_numpy(s.energy));
  }
  py::dict d;
  d["times"] = traj.times();
  d["rho"] = rho;
  d["momentum"] = mom;
  d["energy"] = energy;
  d["steps"] = traj.steps;
  d["config_hash"] = traj.config_hash;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Numerical laboratory for the complete and isentropic Euler systems.";
  m.attr("__version__") = std::string(kVersion);

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<SolverAbort>(m, "SolverAbort", PyExc_RuntimeError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ValueError);
  py::register_exception<RangeError>(m, "RangeError", PyExc_ArithmeticError);

  // -- thermodynamics
  m.def("pressure", [](double rho, double theta, double gamma) {
    return thermo::pressure(rho, theta, thermo::GasParams(gamma));
  }, py::arg("rho"), py::arg("theta"), py::arg("gamma") = 1.4);
  m.def("entropy", [](double rho, double theta, double gamma) {
    return thermo::entropy(rho, theta, thermo::GasParams(gamma));
  }, py::arg("rho"), py::arg("theta"), py::arg("gamma") = 1.4);
  m.def("theta_of", [](double rho, double total_entropy, double gamma) {
    return thermo::theta_of(rho, total_entropy, thermo::GasParams(gamma));
  }, py::arg("rho"), py::arg("total_entropy"), py::arg("gamma") = 1.4,
     "Temperature recovered from density and total entropy rho*s.");
  m.def("tilde_pressure", [](double rho, double total_entropy, double gamma) {
    const auto t = thermo::tilde_pressure(rho, total_entropy, thermo::GasParams(gamma));
    return py::make_tuple(t.value, t.grad, t.hess);
  }, py::arg("rho"), py::arg("total_entropy"), py::arg("gamma") = 1.4,
     "(value, gradient, Hessian) of the pressure as a function of (rho, S).");
  m.def("gibbs_residual", [](double rho, double theta, double gamma, double step) {
    const auto c = thermo::verify_gibbs(rho, theta, thermo::GasParams(gamma), step);
    return py::make_tuple(std::max(c.analytic.rho_part, c.analytic.theta_part),
                          std::max(c.central_difference.rho_part, c.central_difference.theta_part));
  }, py::arg("rho"), py::arg("theta"), py::arg("gamma") = 1.4, py::arg("step") = 1e-3,
     "(analytic, central-difference) Gibbs residuals.");

  // -- fields and Besov regularity
  m.def("weierstrass", [](double alpha, int levels, int cells, int dims, double offset) {
    return to_numpy(weierstrass_field(alpha, levels, PeriodicGrid(dims, cells), offset));
  }, py::arg("alpha"), py::arg("levels"), py::arg("cells"), py::arg("dims") = 1,
     py::arg("offset") = 0.0);
  m.def("mollify", [](const Array& f, double eps) {
    const auto field = from_numpy(f);
    return to_numpy(mollify(field, Mollifier(field.grid(), eps)));
  }, py::arg("field"), py::arg("eps"));
  m.def("lp_norm", [](const Array& f, double p) { return lp_norm(from_numpy(f), p); },
        py::arg("field"), py::arg("p"));
  m.def("seminorm", [](const Array& f, double beta, double p, int max_cells) {
    const auto field = from_numpy(f);
    const int n = max_cells > 0 ? max_cells : field.grid().cells_per_dim() / 4;
    return besov::seminorm(field, beta, p, besov::dense_shifts(field.grid(), n));
  }, py::arg("field"), py::arg("beta"), py::arg("p"), py::arg("max_cells") = 0);
  m.def("fit_regularity", [](const Array& f, double p, int min_cells, int max_cells) {
    const auto r = besov::fit_regularity(from_numpy(f), p, min_cells, max_cells);
    py::dict d;
    d["alpha"] = r.fitted_alpha;
    d["residual"] = r.residual;
    d["degenerate"] = r.degenerate;
    d["shift_lengths"] = r.shift_lengths;
    d["increments"] = r.increments;
    return d;
  }, py::arg("field"), py::arg("p"), py::arg("min_cells"), py::arg("max_cells"));

  // -- commutators
  m.def("chain_commutator_rate", [](const std::string& g, const std::vector<Array>& fields,
                                    const std::vector<double>& alphas, std::vector<double> lo,
                                    std::vector<double> hi, const std::vector<double>& eps,
                                    double p, double tolerance) {
    commutator::Probe probe;
    probe.g = commutator::by_name(g);
    for (const auto& f : fields) probe.components.push_back(from_numpy(f));
    probe.alphas = alphas;
    probe.box.lo = std::move(lo);
    probe.box.hi = std::move(hi);
    probe.p = p;
    const auto r = commutator::chain_rate_fit(probe, eps, tolerance);
    std::vector<double> norms, bounds;
    for (const auto& pt : r.points) {
      norms.push_back(pt.norm);
      bounds.push_back(pt.bound);
    }
    py::dict d;
    d["eps"] = eps;
    d["norm"] = norms;
    d["bound"] = bounds;
    d["fit"] = rate_fit(r.fit);
    d["predicted_slope"] = r.predicted_slope;
    d["rate_pass"] = r.rate_pass;
    d["bound_pass"] = r.bound_pass;
    d["max_split_defect"] = r.max_split_defect;
    return d;
  }, py::arg("g"), py::arg("fields"), py::arg("alphas"), py::arg("lo"), py::arg("hi"),
     py::arg("eps"), py::arg("p") = 4.0, py::arg("tolerance") = 0.1);

  // -- relative entropy
  m.def("relative_entropy", [](std::array<double, 3> a, std::array<double, 3> b, double gamma) {
    return relentropy::density(primitive(a[0], a[1], a[2]), primitive(b[0], b[1], b[2]),
                               thermo::GasParams(gamma)).total;
  }, py::arg("candidate"), py::arg("reference"), py::arg("gamma") = 1.4,
     "Relative entropy density of (rho, u, theta) states.");
  m.def("estimate_coercivity", [](std::size_t samples, std::uint64_t skip, double gamma) {
    const auto c = relentropy::estimate_coercivity(relentropy::StateBox{}, thermo::GasParams(gamma),
                                                   samples, skip);
    return py::make_tuple(c.constant, c.sampled_min);
  }, py::arg("samples") = 100000, py::arg("skip") = 0, py::arg("gamma") = 1.4,
     "(constant, sampled minimum) over the box [0.5, 2]^2.");

  // -- solver
  m.def("simulate", &simulate, py::arg("config_json"),
        "Runs the solver on a JSON configuration; returns times and conserved fields.");
  m.def("riemann_exact", [](std::array<double, 3> left, std::array<double, 3> right, double gamma,
                            const std::vector<double>& xi) {
    const solver::ExactRiemann r({left[0], left[1], left[2]}, {right[0], right[1], right[2]}, gamma);
    std::vector<double> rho, u, p;
    for (double x : xi) {
      const auto s = r.sample(x);
      rho.push_back(s.rho);
      u.push_back(s.u);
      p.push_back(s.p);
    }
    py::dict d;
    d["p_star"] = r.p_star();
    d["u_star"] = r.u_star();
    d["rho"] = rho;
    d["u"] = u;
    d["p"] = p;
    return d;
  }, py::arg("left"), py::arg("right"), py::arg("gamma"), py::arg("xi"),
     "Exact solution at xi = x/t for (rho, u, p) states.");

  // -- one-sided Lipschitz constants
  m.def("oslip", [](const Array& u, bool mask_wrap) {
    VectorField v(std::vector<ScalarField>{from_numpy(u)});
    if (v.grid().dims() != 1) throw ArgumentError("oslip: expects a 1D velocity");
    const auto dirs = conditions::default_directions(1);
    const auto weak = conditions::oslip_weak_min_C(v, dirs, conditions::default_basis());
    const auto disc = conditions::oslip_discrete(v, conditions::default_steps(1), mask_wrap);
    return py::make_tuple(weak.min_C, disc.discrete_C);
  }, py::arg("velocity"), py::arg("mask_wrap") = false, "(weak, discrete) constants.");
  m.def("fan_field", [](int cells, double tau) {
    return to_numpy(conditions::fan_field(PeriodicGrid(1, cells), tau)[0]);
  }, py::arg("cells"), py::arg("tau"));

  // -- acceptance and command line
  m.def("run_criterion", [](int id, unsigned long seed) {
    acceptance::Options o;
    o.seed = seed;
    const auto r = acceptance::run_criterion(id, o);
    return py::make_tuple(r.pass, acceptance::format_line(r));
  }, py::arg("id"), py::arg("seed") = 0);
  m.def("cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::dispatch(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs a subcommand; returns (exit code, stdout, stderr).");
}
