#include "relaxhmc/diagnostics.hpp"
#include "relaxhmc/experiments.hpp"
#include "relaxhmc/hmc.hpp"
#include "relaxhmc/oracles.hpp"
#include "relaxhmc/targets.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace relaxhmc;

namespace {

Vector as_lambdas(const std::vector<double>& lambdas) {
  if (lambdas.empty()) throw std::invalid_argument("lambdas must be non-empty");
  Vector v(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) v[i] = lambdas[i];
  return v;
}

HmcConfig build_config(double step_size, int n_leapfrog, std::optional<double> integration_time,
                       int n_iterations, int n_burnin, std::uint64_t seed, bool adapt_step_size,
                       bool adapt_mass, double target_accept, int thin,
                       std::optional<Vector> init) {
  HmcConfig cfg;
  cfg.step_size = step_size;
  cfg.n_leapfrog = n_leapfrog;
  cfg.integration_time = integration_time;
  cfg.n_iterations = n_iterations;
  cfg.n_burnin = n_burnin;
  cfg.seed = seed;
  cfg.adapt_step_size = adapt_step_size;
  cfg.adapt_mass = adapt_mass;
  cfg.target_accept = target_accept;
  cfg.thin = thin;
  cfg.init = std::move(init);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "HMC sampling from constraint-relaxed posteriors";

  py::class_<OracleResult>(m, "OracleResult")
      .def_readonly("value", &OracleResult::value)
      .def_readonly("error_bound", &OracleResult::error_bound)
      .def_property_readonly("method",
                             [](const OracleResult& r) {
                               switch (r.method) {
                                 case OracleMethod::Analytic: return "analytic";
                                 case OracleMethod::Quadrature: return "quadrature";
                                 default: return "rejection-mc";
                               }
                             })
      .def("__repr__", [](const OracleResult& r) {
        return "OracleResult(value=" + std::to_string(r.value) +
               ", error_bound=" + std::to_string(r.error_bound) + ")";
      });

  py::class_<RelaxedTarget>(m, "RelaxedTarget")
      .def("log_density", &RelaxedTarget::log_relaxed_density, py::arg("theta"),
           "Unnormalized log relaxed posterior; raises outside the support box.")
      .def("grad_log_density", &RelaxedTarget::grad_log_relaxed_density, py::arg("theta"))
      .def("base_log_density", &RelaxedTarget::base_log_density, py::arg("theta"))
      .def("distance", [](const RelaxedTarget& t, const Vector& th) {
             return t.constraint_set().distance(th);
           },
           py::arg("theta"), "Weighted distance to the constraint set.")
      .def("constraints", [](const RelaxedTarget& t, const Vector& th) {
             return Vector(t.constraint_set().eval(th));
           },
           py::arg("theta"), "Vector of constraint values nu_j(theta).")
      .def("in_support", &RelaxedTarget::in_support, py::arg("theta"))
      .def("set_init_point", &RelaxedTarget::set_init_point, py::arg("theta"))
      .def_property_readonly("dim", &RelaxedTarget::dim)
      .def_property_readonly("lambdas", &RelaxedTarget::lambdas)
      .def_property_readonly("init_point", &RelaxedTarget::init_point)
      .def_property_readonly("jacobian_factor", &RelaxedTarget::jacobian_factor);

  m.def("gaussian_inequality",
        [](double ybar, int n, const std::vector<double>& lambdas) {
          return make_model(GaussianInequalitySpec{ybar, n}, as_lambdas(lambdas));
        },
        py::arg("ybar") = 1.2, py::arg("n") = 100,
        py::arg("lambdas") = std::vector<double>{1e-2},
        "Gaussian mean with the inequality constraint theta <= 1.");
  m.def("sphere_gaussian",
        [](const Vector& F, double sigma2, double box_halfwidth,
           const std::vector<double>& lambdas) {
          return make_model(SphereGaussianSpec{F, sigma2, box_halfwidth}, as_lambdas(lambdas));
        },
        py::arg("F"), py::arg("sigma2") = 0.1, py::arg("box_halfwidth") = 1.0,
        py::arg("lambdas") = std::vector<double>{1e-2},
        "Gaussian parent with the unit-sphere constraint (von Mises-Fisher limit).");
  m.def("sphere_t",
        [](const Vector& F, double sigma2, double m_df, double box_halfwidth,
           const std::vector<double>& lambdas) {
          return make_model(SphereTSpec{F, sigma2, m_df, box_halfwidth}, as_lambdas(lambdas));
        },
        py::arg("F"), py::arg("sigma2") = 0.1, py::arg("m") = 3.0,
        py::arg("box_halfwidth") = 1.0, py::arg("lambdas") = std::vector<double>{1e-2},
        "Multivariate t parent with the unit-sphere constraint.");
  m.def("torus_uniform",
        [](const std::vector<double>& lambdas) {
          return make_model(TorusUniformSpec{}, as_lambdas(lambdas));
        },
        py::arg("lambdas") = std::vector<double>{1e-2},
        "Flat density on the torus with the Jacobian factor on.");
  m.def("simplex_toy",
        [](const Vector& alpha, const std::vector<double>& lambdas) {
          return make_model(SimplexToySpec{alpha}, as_lambdas(lambdas));
        },
        py::arg("alpha"), py::arg("lambdas") = std::vector<double>{1e-2},
        "Dirichlet kernel with the simplex constraint.");
  m.def("factor_network",
        [](int n, int R, int d_true, std::uint64_t seed, int d, double laplace_scale,
           bool shrinkage, const std::vector<double>& lambdas) {
          FactorNetworkSpec spec{generate_factor_network_data(n, R, d_true, seed), d,
                                 laplace_scale, shrinkage};
          return make_model(spec, as_lambdas(lambdas));
        },
        py::arg("n") = 5, py::arg("R") = 10, py::arg("d_true") = 3, py::arg("seed") = 1,
        py::arg("d") = 3, py::arg("laplace_scale") = 1.0, py::arg("shrinkage") = true,
        py::arg("lambdas") = std::vector<double>{1e-3},
        "Bernoulli-logit factor model on synthetic network data; Stiefel constraint on U.");

  py::class_<Chain>(m, "Chain")
      .def_readonly("samples", &Chain::samples)
      .def_readonly("violations", &Chain::violations)
      .def_readonly("hamiltonian_errors", &Chain::hamiltonian_errors)
      .def_readonly("accept_rate", &Chain::accept_rate)
      .def_readonly("seed_used", &Chain::seed_used)
      .def_readonly("n_divergent", &Chain::n_divergent)
      .def_readonly("n_out_of_support", &Chain::n_out_of_support)
      .def_readonly("step_size_used", &Chain::step_size_used)
      .def_readonly("n_leapfrog_used", &Chain::n_leapfrog_used)
      .def_readonly("n_iterations", &Chain::n_iterations)
      .def_readonly("thin", &Chain::thin)
      .def("__repr__", [](const Chain& c) {
        return "Chain(" + std::to_string(c.samples.rows()) + " draws, accept_rate=" +
               std::to_string(c.accept_rate) + ")";
      });

  m.def("sample", [](const RelaxedTarget& target, double step_size, int n_leapfrog,
                     std::optional<double> integration_time, int n_iterations, int n_burnin,
                     std::uint64_t seed, bool adapt_step_size, bool adapt_mass,
                     double target_accept, int thin, std::optional<Vector> init) {
          return sample(target, build_config(step_size, n_leapfrog, integration_time,
                                             n_iterations, n_burnin, seed, adapt_step_size,
                                             adapt_mass, target_accept, thin, std::move(init)));
        },
        py::arg("target"), py::arg("step_size") = 0.1, py::arg("n_leapfrog") = 50,
        py::arg("integration_time") = std::nullopt, py::arg("n_iterations") = 2000,
        py::arg("n_burnin") = 1000, py::arg("seed") = 0, py::arg("adapt_step_size") = true,
        py::arg("adapt_mass") = false, py::arg("target_accept") = 0.8, py::arg("thin") = 1,
        py::arg("init") = std::nullopt, py::call_guard<py::gil_scoped_release>(),
        "Run HMC on a relaxed target; returns the kept draws and diagnostics.");

  m.def("truncated_normal_moments",
        [](double mu, double sigma2, double upper) {
          const TruncatedNormalMoments r = truncated_normal_moments(mu, sigma2, upper);
          return py::make_tuple(r.mean, r.variance);
        },
        py::arg("mu"), py::arg("sigma2"), py::arg("upper"),
        "Mean and variance of N(mu, sigma2) truncated to (-inf, upper].");
  m.def("sharp_expectation",
        [](const RelaxedTarget& target, const ScalarFn& g, int grid) {
          return sharp_expectation_quadrature(target, g, grid);
        },
        py::arg("target"), py::arg("g"), py::arg("grid") = kDefaultGrid2D,
        "Quadrature E[g] under the sharp (constrained) posterior.");
  m.def("relaxed_expectation",
        [](const RelaxedTarget& target, const ScalarFn& g, int grid) {
          return relaxed_expectation_quadrature(target, g, grid);
        },
        py::arg("target"), py::arg("g"), py::arg("grid") = kDefaultGrid2D,
        "Quadrature E[g] under the relaxed posterior.");
  m.def("bessel_i1_over_i0", &bessel_i1_over_i0, py::arg("x"));

  m.def("ess",
        [](const Vector& series) {
          const EssResult r = ess(series);
          return r.value;
        },
        py::arg("series"), "Effective sample size (initial monotone sequence estimator).");

  m.def("run_experiment",
        [](const std::string& config_json) {
          std::vector<std::string> errors;
          std::optional<ExperimentConfig> cfg = config_from_json(config_json, errors);
          if (!cfg) {
            std::string msg = "invalid experiment config";
            for (const std::string& e : errors) msg += "\n  " + e;
            throw std::invalid_argument(msg);
          }
          ExperimentResult res;
          {
            py::gil_scoped_release release;
            res = run_experiment(*cfg);
          }
          return summary_to_json(res);
        },
        py::arg("config_json"),
        "Run a catalog experiment from a JSON config; returns the summary JSON text.");
  m.def("experiment_names", []() {
    std::vector<std::string> names;
    for (Experiment e : experiment_catalog()) names.push_back(experiment_name(e));
    return names;
  });
}
