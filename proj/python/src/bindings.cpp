#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <string>
#include <vector>

#include "foamlab/energy.hpp"
#include "foamlab/game.hpp"
#include "foamlab/needle.hpp"
#include "foamlab/scoring.hpp"
#include "foamlab/tiling.hpp"

namespace py = pybind11;
using namespace foamlab;

namespace {

using Vec = std::vector<double>;

std::shared_ptr<SymStrategy> named_strategy(const std::string& name)
{
    if (name == "parity")
        return std::make_shared<ParityStrategy>();
    if (name == "constant-0")
        return std::make_shared<ConstantStrategy>(0);
    if (name == "constant-1")
        return std::make_shared<ConstantStrategy>(1);
    throw py::value_error("unknown strategy " + name);
}

py::tuple rational(const Rational& r)
{
    return py::make_tuple(r.num, r.den);
}

} // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "foamlab core: tiling bodies, Monte Carlo estimators and symmetric odd cycle games";

    py::register_exception<SamplingBudgetError>(m, "SamplingBudgetError");
    py::register_exception<ResourceLimitError>(m, "ResourceLimitError");
    py::register_exception<CalibrationError>(m, "CalibrationError");

    py::class_<MCEstimate>(m, "MCEstimate")
        .def_readonly("value", &MCEstimate::value)
        .def_readonly("std_error", &MCEstimate::std_error)
        .def_readonly("n_samples", &MCEstimate::n_samples)
        .def_readonly("seed", &MCEstimate::seed)
        .def("upper", &MCEstimate::upper, py::arg("k") = 3.0)
        .def("lower", &MCEstimate::lower, py::arg("k") = 3.0)
        .def("__repr__", [](const MCEstimate& e) {
            return "MCEstimate(" + std::to_string(e.value) + " +- " + std::to_string(e.std_error) + ")";
        });

    py::class_<TilingParams>(m, "TilingParams")
        .def_static("standard", &TilingParams::standard, py::arg("n"), py::arg("seed"), py::arg("m") = 0)
        .def_static("small_dimension", &TilingParams::small_dimension, py::arg("n"), py::arg("seed"),
                    py::arg("m") = 0)
        .def_readonly("n", &TilingParams::n)
        .def_readonly("m", &TilingParams::m)
        .def_readonly("width_inv", &TilingParams::width_inv)
        .def_readonly("seed", &TilingParams::seed)
        .def_readonly("max_sampling_rounds", &TilingParams::max_sampling_rounds);

    py::class_<TilingBody, std::shared_ptr<TilingBody>>(m, "TilingBody")
        .def_property_readonly("dimension", &TilingBody::dimension)
        .def_property_readonly("kind", [](const TilingBody& b) { return to_string(b.kind()); })
        .def("round", [](const TilingBody& b, const Vec& x) { return b.round(x); }, py::arg("x"))
        .def("mod_cell", [](const TilingBody& b, const Vec& x) { return mod_cell(b, x); }, py::arg("x"))
        .def("fingerprint", &body_fingerprint, py::arg("probes") = 1000)
        .def("descriptor", [](const TilingBody& b) { return body_descriptor_json(b); });

    py::class_<CubeBody, TilingBody, std::shared_ptr<CubeBody>>(m, "CubeBody").def(py::init<int>(), py::arg("n"));

    py::class_<SymmetricBody, TilingBody, std::shared_ptr<SymmetricBody>>(m, "SymmetricBody")
        .def(py::init<TilingParams>(), py::arg("params"))
        .def_property_readonly("params", &SymmetricBody::params)
        .def("center", [](const SymmetricBody& b, const Vec& x) { return b.center(x).z; }, py::arg("x"));

    m.def(
        "body_from_descriptor",
        [](const std::string& text) { return std::shared_ptr<TilingBody>(body_from_descriptor(text)); },
        py::arg("json"));

    py::class_<StepFamily>(m, "StepFamily")
        .def_static("gaussian", &StepFamily::gaussian, py::arg("sigma"))
        .def_static("bernoulli", &StepFamily::bernoulli, py::arg("eps"), py::arg("n"))
        .def_static("disjoint_bernoulli", &StepFamily::disjoint_bernoulli, py::arg("eps"), py::arg("n"))
        .def_readonly("scale", &StepFamily::scale)
        .def_readonly("step", &StepFamily::step)
        .def("label", &StepFamily::label);

    py::class_<NoiseSensitivityReport>(m, "NoiseSensitivityReport")
        .def_readonly("ns", &NoiseSensitivityReport::ns)
        .def_readonly("condition_failure", &NoiseSensitivityReport::condition_failure)
        .def_readonly("budget_errors", &NoiseSensitivityReport::budget_errors);

    m.def("estimate_noise_sensitivity", &estimate_noise_sensitivity, py::arg("body"), py::arg("family"),
          py::arg("n_samples"), py::arg("seed"), py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("estimate_escape",
          py::overload_cast<const TilingBody&, const StepFamily&, std::uint64_t, int, std::uint64_t, unsigned>(
              &estimate_escape),
          py::arg("body"), py::arg("family"), py::arg("n_samples"), py::arg("k_subdiv"), py::arg("seed"),
          py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<AreaEstimate>(m, "AreaEstimate")
        .def_readonly("mean_crossings", &AreaEstimate::mean_crossings)
        .def_readonly("calibration_constant", &AreaEstimate::calibration_constant)
        .def_readonly("area", &AreaEstimate::area);
    m.def("calibrate_on_cube", &calibrate_on_cube, py::arg("n"), py::arg("delta"), py::arg("n_samples"),
          py::arg("k_subdiv"), py::arg("seed"), py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());
    m.def("estimate_surface_area", &estimate_surface_area, py::arg("body"), py::arg("delta"), py::arg("n_samples"),
          py::arg("k_subdiv"), py::arg("seed"), py::arg("workers") = 0, py::arg("calibration") = py::none(),
          py::call_guard<py::gil_scoped_release>());

    py::class_<EnergyParams>(m, "EnergyParams")
        .def(py::init<>())
        .def_static("defaults", &EnergyParams::defaults, py::arg("n"), py::arg("c") = 1.0)
        .def_readwrite("Z", &EnergyParams::Z)
        .def_readwrite("sigma", &EnergyParams::sigma);
    m.def("energy", [](const Vec& a, double Z) { return energy(a, Z); }, py::arg("a"), py::arg("Z"));
    m.def("energy_reference", [](const Vec& a, double Z) { return energy_reference(a, Z); }, py::arg("a"),
          py::arg("Z"));
    m.def("linearized_energy", [](const Vec& a, const Vec& u, double Z) { return linearized_energy(a, u, Z); },
          py::arg("a"), py::arg("u"), py::arg("Z"));
    m.def("is_good", [](const Vec& a) { return is_good(a); }, py::arg("a"));

    py::class_<LBExperimentReport>(m, "LBExperimentReport")
        .def_readonly("n", &LBExperimentReport::n)
        .def_readonly("escape_rate", &LBExperimentReport::escape_rate)
        .def_readonly("pr_energy_forward_gt_backward", &LBExperimentReport::pr_energy_forward_gt_backward)
        .def_readonly("goodness_rate", &LBExperimentReport::goodness_rate)
        .def_readonly("e1", &LBExperimentReport::e1)
        .def_readonly("e2", &LBExperimentReport::e2)
        .def_readonly("e3", &LBExperimentReport::e3)
        .def_readonly("e4", &LBExperimentReport::e4)
        .def_readonly("e5", &LBExperimentReport::e5)
        .def_readonly("e_all", &LBExperimentReport::e_all)
        .def_readonly("e_without_e5", &LBExperimentReport::e_without_e5);
    m.def("run_lb_experiment", &run_lb_experiment, py::arg("body"), py::arg("params"), py::arg("n_samples"),
          py::arg("seed"), py::arg("k_subdiv") = 64, py::arg("workers") = 0, py::call_guard<py::gil_scoped_release>());

    // Game values are returned as (numerator, denominator).
    m.def(
        "brute_force_value", [](int n, int t) { return rational(brute_force_value(n, t)); }, py::arg("n"),
        py::arg("t"));
    m.def(
        "exact_value",
        [](int n, int t, const std::string& strategy) { return rational(exact_value({n, t}, *named_strategy(strategy))); },
        py::arg("n"), py::arg("t"), py::arg("strategy"));
    m.def(
        "check_equivalence",
        [](int n, int t, const std::string& strategy) {
            const GameInstance g{n, t};
            const auto r = strategy == "all" ? check_equivalence_all(g) : check_equivalence(g, *named_strategy(strategy));
            py::dict d;
            d["strategies"] = r.strategies;
            d["pairs"] = r.pairs;
            d["counterexamples"] = r.counterexamples;
            d["parity_counterexamples"] = r.parity_counterexamples;
            d["strategies_with_counterexample"] = r.strategies_with_counterexample;
            d["first_counterexample"] = r.first_counterexample;
            return d;
        },
        py::arg("n"), py::arg("t"), py::arg("strategy") = "all");
    m.def("default_k", &default_k, py::arg("n"), py::arg("t"));

    py::class_<StrategyEvaluation>(m, "StrategyEvaluation")
        .def_readonly("success", &StrategyEvaluation::success)
        .def_readonly("answer_abort_rate", &StrategyEvaluation::answer_abort_rate)
        .def_readonly("challenge_abort_rate", &StrategyEvaluation::challenge_abort_rate);
    m.def(
        "evaluate_strategy",
        [](int n, int t, const std::string& strategy, std::uint64_t n_samples, std::uint64_t seed,
           std::shared_ptr<TilingBody> body, std::uint64_t n_per_box, unsigned workers) {
            const GameInstance g{n, t};
            std::shared_ptr<SymStrategy> s;
            if (strategy == "tiling") {
                if (!body)
                    body = std::make_shared<SymmetricBody>(TilingParams::small_dimension(t, seed));
                s = std::make_shared<TilingStrategy>(body, g, n_per_box, seed);
            } else {
                s = named_strategy(strategy);
            }
            py::gil_scoped_release release;
            return evaluate_strategy(g, *s, n_samples, seed, workers);
        },
        py::arg("n"), py::arg("t"), py::arg("strategy"), py::arg("n_samples"), py::arg("seed"),
        py::arg("body") = nullptr, py::arg("n_per_box") = 400, py::arg("workers") = 0);
}
