// Python bindings for the core operations: mixture construction, the exact
// oracle, the four solvers, mixing-matrix utilities, instance generation, and
// error metrics.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "factored/acep.hpp"
#include "factored/bench.hpp"
#include "factored/ep.hpp"
#include "factored/json_io.hpp"
#include "factored/pep.hpp"
#include "factored/quadrature.hpp"
#include "factored/vdbp.hpp"

namespace py = pybind11;
using namespace factored;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Moment approximation for products of 1-D Gaussian-mixture factors";

    py::register_exception<Error>(m, "FactoredError");

    py::enum_<IntegrabilityStatus>(m, "IntegrabilityStatus")
        .value("Integrable", IntegrabilityStatus::Integrable)
        .value("Boundary", IntegrabilityStatus::Boundary)
        .value("NonIntegrable", IntegrabilityStatus::NonIntegrable);

    py::enum_<Mode>(m, "Mode")
        .value("Strict", Mode::Strict)
        .value("Relaxed", Mode::Relaxed);

    py::enum_<SolveStatus>(m, "SolveStatus")
        .value("Converged", SolveStatus::Converged)
        .value("MaxIter", SolveStatus::MaxIter)
        .value("Failed", SolveStatus::Failed);

    py::enum_<MatrixKind>(m, "MatrixKind")
        .value("TrimmedHadamard", MatrixKind::TrimmedHadamard)
        .value("RandomProjected", MatrixKind::RandomProjected);

    py::class_<GaussianNat>(m, "GaussianNat")
        .def(py::init<>())
        .def(py::init([](double nu, double xi) { return GaussianNat{nu, xi}; }),
             py::arg("nu"), py::arg("xi"))
        .def_readwrite("nu", &GaussianNat::nu)
        .def_readwrite("xi", &GaussianNat::xi)
        .def("__repr__", [](const GaussianNat& g) {
            return "GaussianNat(nu=" + std::to_string(g.nu) +
                   ", xi=" + std::to_string(g.xi) + ")";
        });

    py::class_<GaussianMoment>(m, "GaussianMoment")
        .def(py::init<double, double>(), py::arg("mu"), py::arg("tau"))
        .def_readonly("mu", &GaussianMoment::mu)
        .def_readonly("tau", &GaussianMoment::tau);

    py::class_<PosteriorMoments>(m, "PosteriorMoments")
        .def_readonly("mean", &PosteriorMoments::mean)
        .def_readonly("variance", &PosteriorMoments::variance)
        .def_readonly("log_scale", &PosteriorMoments::log_scale);

    py::class_<Gmm1D>(m, "Gmm1D")
        .def(py::init<std::vector<double>, std::vector<double>, std::vector<double>>(),
             py::arg("weights"), py::arg("means"), py::arg("variances"))
        .def_property_readonly("weights", &Gmm1D::weights)
        .def_property_readonly("means", &Gmm1D::means)
        .def_property_readonly("variances", &Gmm1D::variances)
        .def("__len__", &Gmm1D::size);

    m.def("nat_from_moment", &nat_from_moment, py::arg("g"));
    m.def("moment_from_nat", &moment_from_nat, py::arg("g"));
    m.def(
        "reproduce_nat",
        [](const GaussianNat& a, const GaussianNat& b) {
            const NatProduct p = reproduce_nat(a, b);
            return py::make_tuple(p.log_scale, p.nat, p.non_integrable);
        },
        py::arg("a"), py::arg("b"),
        "Product of two natural-form Gaussians: (log_scale, nat, non_integrable)");
    m.def("check_integrability", &check_integrability, py::arg("f"), py::arg("cavity"));
    m.def(
        "gmm_times_gaussian",
        [](const Gmm1D& f, const GaussianNat& cavity) {
            const GmmPosterior p = gmm_times_gaussian(f, cavity);
            return py::make_tuple(p.weights, p.component_nats, p.moments);
        },
        py::arg("f"), py::arg("cavity"),
        "Posterior of a mixture against a Gaussian cavity: "
        "(weights, component_nats, moments)");
    m.def(
        "gmm_moments",
        [](const Gmm1D& f) {
            const auto [mean, variance] = gmm_moments(f);
            return py::make_tuple(mean, variance);
        },
        py::arg("f"));
    m.def("exact_product_moments", &exact_product_moments, py::arg("factors"),
          py::arg("cap") = kDefaultOracleCap);
    m.def("product_component_count", &product_component_count, py::arg("factors"));
    m.def("quadrature_product_moments", &quadrature_product_moments, py::arg("factors"));
    m.def("quadrature_posterior_moments", &quadrature_posterior_moments, py::arg("f"),
          py::arg("cavity"));

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_static("ep_defaults", &SolverConfig::ep_defaults)
        .def_static("vdbp_defaults", &SolverConfig::vdbp_defaults)
        .def_readwrite("tol", &SolverConfig::tol)
        .def_readwrite("max_sweeps", &SolverConfig::max_sweeps)
        .def_readwrite("mode", &SolverConfig::mode)
        .def_readwrite("damping", &SolverConfig::damping)
        .def_readwrite("init_nu", &SolverConfig::init_nu)
        .def_readwrite("init_xi", &SolverConfig::init_xi)
        .def_readwrite("clip_xi", &SolverConfig::clip_xi)
        .def_readwrite("epsilon", &SolverConfig::epsilon);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("mean", &Estimate::mean)
        .def_readonly("variance", &Estimate::variance)
        .def_readonly("per_copy_means", &Estimate::per_copy_means)
        .def_readonly("per_copy_variances", &Estimate::per_copy_variances)
        .def_readonly("iterations", &Estimate::iterations)
        .def_readonly("status", &Estimate::status)
        .def_readonly("failure_reason", &Estimate::failure_reason);

    py::class_<MixingMatrix>(m, "MixingMatrix")
        .def_readonly("a", &MixingMatrix::a)
        .def_readonly("kind", &MixingMatrix::kind);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("max_abs_row_sum", &ValidationReport::max_abs_row_sum)
        .def_readonly("singular_value_ratio", &ValidationReport::singular_value_ratio)
        .def_readonly("max_identity_deviation", &ValidationReport::max_identity_deviation)
        .def_readonly("row_sums_ok", &ValidationReport::row_sums_ok)
        .def_readonly("rank_ok", &ValidationReport::rank_ok)
        .def_readonly("identity_ok", &ValidationReport::identity_ok)
        .def_readonly("pass_", &ValidationReport::pass)
        .def_property_readonly("ok", [](const ValidationReport& r) { return r.pass; });

    m.def("build_mixing_matrix", &build_mixing_matrix, py::arg("n"), py::arg("kind"),
          py::arg("seed") = 0);
    m.def("validate_mixing_matrix", &validate_mixing_matrix, py::arg("m"));
    m.def(
        "run_vdbp",
        [](const std::vector<Gmm1D>& factors, const MixingMatrix& matrix,
           const SolverConfig& config) { return run_vdbp(factors, matrix, config); },
        py::arg("factors"), py::arg("matrix"),
        py::arg("config") = SolverConfig::vdbp_defaults());

    py::class_<PepStep>(m, "PepStep")
        .def_readonly("factor", &PepStep::factor)
        .def_readonly("updated", &PepStep::updated)
        .def_readonly("belief", &PepStep::belief);

    m.def("run_persistent_ep", &run_persistent_ep, py::arg("factors"),
          py::arg("config") = SolverConfig::ep_defaults());

    py::class_<AcepFactorUpdate>(m, "AcepFactorUpdate")
        .def_readonly("ref_component", &AcepFactorUpdate::ref_component)
        .def_readonly("log_rho", &AcepFactorUpdate::log_rho)
        .def_readonly("rho_bar", &AcepFactorUpdate::rho_bar)
        .def_readonly("mu_bf", &AcepFactorUpdate::mu_bf)
        .def_readonly("tau_bf", &AcepFactorUpdate::tau_bf)
        .def_readonly("xi_thres", &AcepFactorUpdate::xi_thres)
        .def_readonly("xi_out", &AcepFactorUpdate::xi_out)
        .def_readonly("nu_out", &AcepFactorUpdate::nu_out)
        .def_readonly("clipped_to_threshold", &AcepFactorUpdate::clipped_to_threshold);

    py::class_<AcepStep>(m, "AcepStep")
        .def_readonly("factor", &AcepStep::factor)
        .def_readonly("update", &AcepStep::update)
        .def_readonly("belief", &AcepStep::belief)
        .def_readonly("next_check", &AcepStep::next_check);

    m.def("update_factor_acep", &update_factor_acep, py::arg("f_n"), py::arg("cavity"),
          py::arg("f_next"), py::arg("msg_next"), py::arg("mode"));
    m.def("run_acep", &run_acep, py::arg("factors"),
          py::arg("config") = SolverConfig::ep_defaults());
    m.def(
        "run_clipping_ep",
        [](const std::vector<Gmm1D>& factors, const SolverConfig& config) {
            return run_clipping_ep(factors, config);
        },
        py::arg("factors"), py::arg("config") = SolverConfig::ep_defaults());
    m.def("acep_integrability", &acep_integrability, py::arg("f"), py::arg("cavity"));

    py::class_<RangeLaw>(m, "RangeLaw")
        .def(py::init([](double lo, double hi) { return RangeLaw{lo, hi}; }),
             py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &RangeLaw::lo)
        .def_readwrite("hi", &RangeLaw::hi);

    py::enum_<InstanceSpec::WeightLaw>(m, "WeightLaw")
        .value("UniformSimplex", InstanceSpec::WeightLaw::UniformSimplex)
        .value("Equal", InstanceSpec::WeightLaw::Equal);

    py::class_<InstanceSpec>(m, "InstanceSpec")
        .def(py::init<>())
        .def_readwrite("n_factors", &InstanceSpec::n_factors)
        .def_readwrite("components", &InstanceSpec::components)
        .def_readwrite("seed", &InstanceSpec::seed)
        .def_readwrite("weight_law", &InstanceSpec::weight_law)
        .def_readwrite("mean_law", &InstanceSpec::mean_law)
        .def_readwrite("var_law", &InstanceSpec::var_law);

    m.def("generate_instance", &generate_instance, py::arg("spec"));
    m.def(
        "nse",
        [](const Estimate& est, const PosteriorMoments& exact) {
            const NseResult r = nse(est, exact);
            return py::make_tuple(r.nse_mu, r.nse_tau);
        },
        py::arg("est"), py::arg("exact"));

    m.def("parse_instance_json", &parse_instance_json, py::arg("text"));
    m.def("instance_to_json", &instance_to_json, py::arg("factors"));
}
