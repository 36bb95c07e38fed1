#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "qnes/analysis.hpp"
#include "qnes/driver.hpp"
#include "qnes/error.hpp"
#include "qnes/linalg.hpp"
#include "qnes/objectives.hpp"
#include "qnes/qn.hpp"

namespace py = pybind11;
using namespace qnes;

namespace
{
    Algorithm parse_algorithm(const std::string &s)
    {
        if (s == "qnes")
            return Algorithm::qnes;
        if (s == "hees")
            return Algorithm::hees;
        throw InvalidInput("unknown algorithm '" + s + "' (expected qnes or hees)");
    }

    // Python callables run on the calling thread; hold the GIL while evaluating.
    Objective wrap_callable(py::function f, int dim, std::optional<double> f_star, std::string name)
    {
        Objective obj;
        obj.name = std::move(name);
        obj.dim = dim;
        obj.f_star = f_star;
        obj.evaluator = [f](const Vector &x)
        {
            py::gil_scoped_acquire gil;
            return f(x).cast<double>();
        };
        return obj;
    }
}

PYBIND11_MODULE(_core, m)
{
    m.doc() = "Quasi-Newton and Hessian estimation evolution strategies.";

    py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
    py::register_exception<NumericalAbort>(m, "NumericalAbort", PyExc_ArithmeticError);

    py::enum_<Algorithm>(m, "Algorithm").value("hees", Algorithm::hees).value("qnes", Algorithm::qnes);
    py::enum_<GradientMode>(m, "GradientMode")
        .value("norm", GradientMode::norm)
        .value("exact", GradientMode::exact);
    py::enum_<CsaMode>(m, "CsaMode").value("grouped", CsaMode::grouped).value("literal", CsaMode::literal);

    py::class_<Objective>(m, "Objective")
        .def_readonly("name", &Objective::name)
        .def_readonly("dim", &Objective::dim)
        .def_readonly("f_star", &Objective::f_star)
        .def_readonly("x_star", &Objective::x_star)
        .def("__call__", [](const Objective &o, const Vector &x)
             {
                 if (x.size() != o.dim)
                     throw InvalidInput("point has dimension " + std::to_string(x.size()) + ", expected " +
                                        std::to_string(o.dim));
                 return o(x);
             })
        .def("gap", &Objective::gap)
        .def("__repr__", [](const Objective &o) { return "<Objective " + o.name + " d=" + std::to_string(o.dim) + ">"; });

    m.def("benchmark_names", [] { return std::vector<std::string>(benchmark_names().begin(), benchmark_names().end()); });
    m.def("make_benchmark", &make_benchmark, py::arg("name"), py::arg("dim"));
    m.def("make_diagonal_quadratic", &make_diagonal_quadratic, py::arg("h"));
    m.def("objective", &wrap_callable, py::arg("f"), py::arg("dim"), py::arg("f_star") = std::nullopt,
          py::arg("name") = "python", "Wrap a Python callable f(x) -> float.");

    py::class_<StrategyParams>(m, "StrategyParams")
        .def_readwrite("lambda_tilde", &StrategyParams::lambda_tilde)
        .def_readwrite("n_batches", &StrategyParams::n_batches)
        .def_readwrite("kappa", &StrategyParams::kappa)
        .def_readwrite("eta_a", &StrategyParams::eta_a)
        .def_readwrite("c_s", &StrategyParams::c_s)
        .def_readwrite("d_s", &StrategyParams::d_s)
        .def_readwrite("weights", &StrategyParams::weights)
        .def_readwrite("mu_eff_mirrored", &StrategyParams::mu_eff_mirrored)
        .def_readwrite("gradient_mode", &StrategyParams::gradient_mode)
        .def_readwrite("csa_mode", &StrategyParams::csa_mode);
    m.def("default_params", [](int d, const std::string &algo) { return default_params(d, parse_algorithm(algo)); },
          py::arg("dim"), py::arg("algo") = "qnes");
    m.def("params_for", &params_for, py::arg("dim"), py::arg("lambda_tilde"), py::arg("kappa") = 1e3,
          py::arg("eta_a") = 0.5);

    py::class_<StoppingCriteria>(m, "StoppingCriteria")
        .def(py::init<>())
        .def_static("defaults", &StoppingCriteria::defaults, py::arg("dim"))
        .def_readwrite("target_gap", &StoppingCriteria::target_gap)
        .def_readwrite("max_evals", &StoppingCriteria::max_evals)
        .def_readwrite("stagnation_window", &StoppingCriteria::stagnation_window)
        .def_readwrite("stagnation_tol", &StoppingCriteria::stagnation_tol);

    py::class_<RestartPolicy>(m, "RestartPolicy")
        .def(py::init<>())
        .def_readwrite("enabled", &RestartPolicy::enabled)
        .def_readwrite("multiplier", &RestartPolicy::multiplier)
        .def_readwrite("max_restarts", &RestartPolicy::max_restarts);

    py::class_<InitialConditions>(m, "InitialConditions")
        .def(py::init<>())
        .def_readwrite("box_low", &InitialConditions::box_low)
        .def_readwrite("box_high", &InitialConditions::box_high)
        .def_readwrite("sigma0", &InitialConditions::sigma0)
        .def_readwrite("m0", &InitialConditions::m0);

    py::class_<IterationRecord>(m, "IterationRecord")
        .def_readonly("iteration", &IterationRecord::iteration)
        .def_readonly("evaluations", &IterationRecord::evaluations)
        .def_readonly("gap", &IterationRecord::gap)
        .def_readonly("f_mean", &IterationRecord::f_mean)
        .def_readonly("sigma", &IterationRecord::sigma)
        .def_readonly("det_error", &IterationRecord::det_error)
        .def_readonly("R", &IterationRecord::R)
        .def_property_readonly("step_type", [](const IterationRecord &r) { return to_string(r.step_type); })
        .def_readonly("eta", &IterationRecord::eta)
        .def_readonly("segment", &IterationRecord::segment);

    py::class_<RunLog>(m, "RunLog")
        .def_readonly("records", &RunLog::records)
        .def_readonly("benchmark", &RunLog::benchmark)
        .def_readonly("dim", &RunLog::dim)
        .def_readonly("seed", &RunLog::seed)
        .def_readonly("params", &RunLog::params)
        .def_property_readonly("termination", [](const RunLog &l) { return to_string(l.termination); })
        .def_readonly("gap_known", &RunLog::gap_known)
        .def_readonly("initial_gap", &RunLog::initial_gap)
        .def_readonly("evaluations", &RunLog::evaluations)
        .def_readonly("segment_lambdas", &RunLog::segment_lambdas)
        .def_readonly("final_A", &RunLog::final_A)
        .def_readonly("final_eta", &RunLog::final_eta)
        .def_readonly("final_mean", &RunLog::final_mean)
        .def_property_readonly("gaps", [](const RunLog &l)
                               {
                                   Vector g(static_cast<Eigen::Index>(l.records.size()));
                                   for (std::size_t i = 0; i < l.records.size(); ++i)
                                       g[static_cast<Eigen::Index>(i)] = l.records[i].gap;
                                   return g;
                               });

    m.def(
        "run",
        [](const Objective &obj, const std::string &algo, std::uint64_t seed, std::optional<StrategyParams> params,
           std::optional<StoppingCriteria> stop, std::optional<InitialConditions> init, bool restart)
        {
            const Algorithm kind = parse_algorithm(algo);
            const StrategyParams p = params ? *params : default_params(obj.dim, kind);
            const StoppingCriteria s = stop ? *stop : StoppingCriteria::defaults(obj.dim);
            const InitialConditions i = init ? *init : InitialConditions{};
            py::gil_scoped_release release;
            return restart ? ipop_run(kind, obj, p, s, RestartPolicy{}, seed, i) : run(kind, obj, p, s, seed, i);
        },
        py::arg("objective"), py::arg("algo") = "qnes", py::arg("seed") = 1, py::arg("params") = std::nullopt,
        py::arg("stop") = std::nullopt, py::arg("init") = std::nullopt, py::arg("restart") = false);
    m.def(
        "ipop_run",
        [](const Objective &obj, const std::string &algo, std::uint64_t seed, const StrategyParams &params,
           const StoppingCriteria &stop, const RestartPolicy &policy, const InitialConditions &init)
        {
            py::gil_scoped_release release;
            return ipop_run(parse_algorithm(algo), obj, params, stop, policy, seed, init);
        },
        py::arg("objective"), py::arg("algo"), py::arg("seed"), py::arg("params"), py::arg("stop"),
        py::arg("policy"), py::arg("init") = InitialConditions{});

    py::class_<RateSummary>(m, "RateSummary")
        .def_readonly("max_factor", &RateSummary::max_factor)
        .def_readonly("max_factor_iteration", &RateSummary::max_factor_iteration)
        .def_readonly("early_median", &RateSummary::early_median)
        .def_readonly("late_median", &RateSummary::late_median)
        .def_readonly("count", &RateSummary::count)
        .def_property_readonly("acceleration", &RateSummary::acceleration);

    m.def("progress_factors", [](const RunLog &log)
          {
              const ProgressSeries s = progress_factors(log);
              return py::make_tuple(s.iteration, s.factor);
          });
    m.def(
        "summarize_rate",
        [](const RunLog &log, long early_begin, long early_end, std::size_t late)
        { return summarize_rate(progress_factors(log), early_begin, early_end, late); },
        py::arg("log"), py::arg("early_begin") = 50, py::arg("early_end") = 100, py::arg("late") = 20);
    m.def("write_csv", &write_csv, py::arg("log"), py::arg("path"));
    m.def("read_csv", &read_csv, py::arg("path"));

    m.def("sym_exp", [](const Matrix &s) { return sym_exp(SymMatrix(s)).matrix(); }, py::arg("s"));
    m.def("chi_mean", &chi_mean, py::arg("dim"));
    m.def("switch_probabilities", [](double R)
          {
              const SwitchProbabilities p = switch_probabilities(R);
              return py::make_tuple(p.recombination, p.quasi_newton);
          });
}
